//! Dense `(T, P, H, W)` frame tensors and the events-to-frames integration.

use crate::error::{Error, Result};
use crate::event::EventStream;

/// Number of polarity channels in every frame tensor.
pub const POLARITIES: usize = 2;

/// Per-bin event counts with axes `(time bin, polarity, row, column)`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameTensor {
    data: Vec<u16>,
    bins: usize,
    height: usize,
    width: usize,
    binarized: bool,
}

impl FrameTensor {
    pub fn zeros(bins: usize, height: usize, width: usize) -> Self {
        Self {
            data: vec![0; bins * POLARITIES * height * width],
            bins,
            height,
            width,
            binarized: false,
        }
    }

    /// Wraps a row-major buffer. With `binarized` set, every entry must be 0 or 1.
    pub fn from_vec(
        bins: usize,
        height: usize,
        width: usize,
        data: Vec<u16>,
        binarized: bool,
    ) -> Result<Self> {
        let expected = bins * POLARITIES * height * width;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "buffer of {} entries for shape ({bins}, {POLARITIES}, {height}, {width})",
                data.len()
            )));
        }
        if binarized {
            if let Some(&v) = data.iter().find(|&&v| v > 1) {
                return Err(Error::NotBinary(v));
            }
        }
        Ok(Self {
            data,
            bins,
            height,
            width,
            binarized,
        })
    }

    pub(crate) fn from_parts_unchecked(
        bins: usize,
        height: usize,
        width: usize,
        data: Vec<u16>,
        binarized: bool,
    ) -> Self {
        debug_assert_eq!(data.len(), bins * POLARITIES * height * width);
        Self {
            data,
            bins,
            height,
            width,
            binarized,
        }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(T, P, H, W)`
    pub fn shape(&self) -> [usize; 4] {
        [self.bins, POLARITIES, self.height, self.width]
    }

    pub fn is_binarized(&self) -> bool {
        self.binarized
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u16> {
        self.data
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn index(&self, t: usize, p: usize, y: usize, x: usize) -> usize {
        ((t * POLARITIES + p) * self.height + y) * self.width + x
    }

    pub fn get(&self, t: usize, p: usize, y: usize, x: usize) -> u16 {
        self.data[self.index(t, p, y, x)]
    }

    /// Sets one entry. Setting a value above 1 clears the binarized flag.
    pub fn set(&mut self, t: usize, p: usize, y: usize, x: usize, v: u16) {
        let i = self.index(t, p, y, x);
        self.data[i] = v;
        if v > 1 {
            self.binarized = false;
        }
    }

    /// The `(t, p)` spatial plane.
    pub fn plane(&self, t: usize, p: usize) -> &[u16] {
        let n = self.plane_len();
        let start = (t * POLARITIES + p) * n;
        &self.data[start..start + n]
    }

    /// All `T * P` spatial planes in storage order.
    pub fn planes(&self) -> std::slice::ChunksExact<'_, u16> {
        self.data.chunks_exact(self.plane_len().max(1))
    }

    pub fn total(&self) -> u64 {
        self.data.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn plane_total(&self, t: usize, p: usize) -> u64 {
        self.plane(t, p).iter().map(|&v| u64::from(v)).sum()
    }

    /// Number of non-zero entries.
    pub fn active(&self) -> u64 {
        self.data.iter().filter(|&&v| v > 0).count() as u64
    }

    pub fn same_shape(&self, other: &FrameTensor) -> bool {
        self.shape() == other.shape()
    }

    /// Clamps every entry to `{0, 1}` and sets the flag. Idempotent.
    pub fn binarize(&self) -> FrameTensor {
        let data = self.data.iter().map(|&v| v.min(1)).collect();
        Self::from_parts_unchecked(self.bins, self.height, self.width, data, true)
    }
}

/// How an event stream is divided into time bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SliceMode {
    /// `[0, duration)` split into equal half-open intervals.
    #[default]
    EqualDuration,
    /// Contiguous runs of `ceil(len / bins)` events; the last bin may hold fewer.
    EqualCount,
}

impl std::str::FromStr for SliceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-duration" | "time" => Ok(SliceMode::EqualDuration),
            "equal-count" | "count" => Ok(SliceMode::EqualCount),
            other => Err(Error::Config(format!("unknown slicing mode `{other}`"))),
        }
    }
}

/// Bins every event of `stream` into a `(num_bins, 2, H, W)` count tensor.
pub fn integrate_frames(
    stream: &EventStream,
    num_bins: usize,
    mode: SliceMode,
    binarize: bool,
) -> Result<FrameTensor> {
    if num_bins == 0 {
        return Err(Error::ZeroBins);
    }
    let (h, w) = (stream.height() as usize, stream.width() as usize);
    let mut out = FrameTensor::zeros(num_bins, h, w);
    let events = stream.events();

    let bin_of: Box<dyn Fn(usize, u64) -> usize> = match mode {
        SliceMode::EqualDuration => {
            let duration = u128::from(stream.duration().max(1));
            Box::new(move |_, t| ((u128::from(t) * num_bins as u128) / duration) as usize)
        }
        SliceMode::EqualCount => {
            if events.is_empty() {
                return Err(Error::EmptyStream);
            }
            let chunk = events.len().div_ceil(num_bins);
            Box::new(move |i, _| i / chunk)
        }
    };

    for (i, e) in events.iter().enumerate() {
        let bin = bin_of(i, e.t).min(num_bins - 1);
        let idx = out.index(bin, e.p.channel(), e.y as usize, e.x as usize);
        out.data[idx] = out.data[idx].saturating_add(1);
    }

    Ok(if binarize { out.binarize() } else { out })
}

/// Sum-pools every spatial plane onto an `out_h x out_w` grid.
///
/// Input cell `(y, x)` lands in output cell `(y * out_h / H, x * out_w / W)`.
pub fn resize_spatial(frames: &FrameTensor, out_h: usize, out_w: usize) -> Result<FrameTensor> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::ZeroDims {
            height: out_h,
            width: out_w,
        });
    }
    let (h, w) = (frames.height, frames.width);
    if (h, w) == (out_h, out_w) {
        return Ok(frames.clone());
    }
    let row_map: Vec<usize> = (0..h).map(|y| y * out_h / h).collect();
    let col_map: Vec<usize> = (0..w).map(|x| x * out_w / w).collect();
    let out_plane = out_h * out_w;
    let mut data = vec![0u16; frames.bins * POLARITIES * out_plane];

    for (src, dst) in frames.planes().zip(data.chunks_exact_mut(out_plane)) {
        for (y, row) in src.chunks_exact(w).enumerate() {
            let base = row_map[y] * out_w;
            for (x, &v) in row.iter().enumerate() {
                let cell = &mut dst[base + col_map[x]];
                *cell = cell.saturating_add(v);
            }
        }
    }

    let out = FrameTensor::from_parts_unchecked(frames.bins, out_h, out_w, data, false);
    Ok(if frames.binarized { out.binarize() } else { out })
}

/// Clamps entries to `{0, 1}`.
pub fn binarize(frames: &FrameTensor) -> FrameTensor {
    frames.binarize()
}

/// A frame tensor paired with a soft label (class weights summing to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub frames: FrameTensor,
    label: Vec<f64>,
}

impl LabeledSample {
    pub const LABEL_TOLERANCE: f64 = 1e-6;

    pub fn new(frames: FrameTensor, label: Vec<f64>) -> Result<Self> {
        if label.is_empty() {
            return Err(Error::Label("empty label vector".into()));
        }
        if label.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::Label("label weights must be finite and non-negative".into()));
        }
        let sum: f64 = label.iter().sum();
        if (sum - 1.0).abs() > Self::LABEL_TOLERANCE {
            return Err(Error::Label(format!("label weights sum to {sum}")));
        }
        Ok(Self { frames, label })
    }

    pub fn one_hot(frames: FrameTensor, class: usize, num_classes: usize) -> Result<Self> {
        if class >= num_classes {
            return Err(Error::Label(format!(
                "class {class} out of range for {num_classes} classes"
            )));
        }
        let mut label = vec![0.0; num_classes];
        label[class] = 1.0;
        Self::new(frames, label)
    }

    pub fn label(&self) -> &[f64] {
        &self.label
    }

    pub(crate) fn from_parts_unchecked(frames: FrameTensor, label: Vec<f64>) -> Self {
        Self { frames, label }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{Event, Polarity};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_stream(rng: &mut ChaCha8Rng, n: usize, w: u32, h: u32) -> EventStream {
        let evs = (0..n)
            .map(|_| {
                Event::new(
                    rng.random_range(0..100_000),
                    rng.random_range(0..w as u16),
                    rng.random_range(0..h as u16),
                    if rng.random_bool(0.5) { Polarity::On } else { Polarity::Off },
                )
            })
            .collect();
        EventStream::new(evs, w, h).unwrap()
    }

    fn random_counts(rng: &mut ChaCha8Rng, t: usize, h: usize, w: usize, max: u16) -> FrameTensor {
        let data = (0..t * 2 * h * w).map(|_| rng.random_range(0..=max)).collect();
        FrameTensor::from_vec(t, h, w, data, false).unwrap()
    }

    #[test]
    fn single_event_placement() {
        let s = EventStream::new(vec![Event::new(0, 3, 2, Polarity::On)], 8, 8).unwrap();
        let f = integrate_frames(&s, 2, SliceMode::EqualDuration, false).unwrap();
        assert_eq!(f.shape(), [2, 2, 8, 8]);
        assert_eq!(f.get(0, 1, 2, 3), 1);
        assert_eq!(f.total(), 1);
    }

    #[test]
    fn empty_stream_gives_zero_tensor() {
        let s = EventStream::empty(4, 4);
        let f = integrate_frames(&s, 10, SliceMode::EqualDuration, false).unwrap();
        assert_eq!(f.shape(), [10, 2, 4, 4]);
        assert_eq!(f.total(), 0);
        assert_eq!(
            integrate_frames(&s, 10, SliceMode::EqualCount, false).unwrap_err(),
            Error::EmptyStream
        );
    }

    #[test]
    fn zero_bins_rejected() {
        let s = EventStream::empty(4, 4);
        assert_eq!(
            integrate_frames(&s, 0, SliceMode::EqualDuration, false).unwrap_err(),
            Error::ZeroBins
        );
    }

    #[test]
    fn conservation_against_direct_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = random_stream(&mut rng, 1000, 34, 34);
        for mode in [SliceMode::EqualDuration, SliceMode::EqualCount] {
            let f = integrate_frames(&s, 10, mode, false).unwrap();
            assert_eq!(f.total(), s.len() as u64);
            // every event is counted in the bin its own rule picks
            let mut direct = [0u64; 10];
            for (i, e) in s.events().iter().enumerate() {
                let b = match mode {
                    SliceMode::EqualDuration => (e.t * 10 / s.duration()) as usize,
                    SliceMode::EqualCount => i / 100,
                };
                direct[b] += 1;
            }
            for (b, &n) in direct.iter().enumerate() {
                assert_eq!(f.plane_total(b, 0) + f.plane_total(b, 1), n);
            }
        }
    }

    #[test]
    fn equal_count_last_bin_smaller() {
        let evs = (0..7).map(|t| Event::new(t, 0, 0, Polarity::On)).collect();
        let s = EventStream::new(evs, 1, 1).unwrap();
        let f = integrate_frames(&s, 3, SliceMode::EqualCount, false).unwrap();
        let per_bin: Vec<u16> = (0..3).map(|b| f.get(b, 1, 0, 0)).collect();
        assert_eq!(per_bin, vec![3, 3, 1]);
    }

    #[test]
    fn binarize_flag_clamps() {
        let evs = vec![Event::new(0, 0, 0, Polarity::On); 5];
        let s = EventStream::new(evs, 2, 2).unwrap();
        let f = integrate_frames(&s, 1, SliceMode::EqualDuration, true).unwrap();
        assert!(f.is_binarized());
        assert_eq!(f.get(0, 1, 0, 0), 1);
    }

    #[test]
    fn binarize_entries_and_idempotence() {
        let mut f = FrameTensor::zeros(1, 1, 2);
        f.set(0, 0, 0, 0, 5);
        let b = binarize(&f);
        assert_eq!(b.get(0, 0, 0, 0), 1);
        assert_eq!(b.get(0, 0, 0, 1), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = random_counts(&mut rng, 2, 5, 6, 4);
            assert_eq!(binarize(&binarize(&x)), binarize(&x));
        }
    }

    #[test]
    fn resize_corner_maps_to_corner() {
        let mut f = FrameTensor::zeros(10, 128, 128);
        for t in 0..10 {
            f.set(t, 0, 0, 0, 1);
        }
        let r = resize_spatial(&f, 48, 48).unwrap();
        assert_eq!(r.shape(), [10, 2, 48, 48]);
        for t in 0..10 {
            assert_eq!(r.get(t, 0, 0, 0), 1);
            assert_eq!(r.plane_total(t, 0), 1);
        }
    }

    #[test]
    fn resize_identity_and_conservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_counts(&mut rng, 10, 48, 48, 3);
        assert_eq!(resize_spatial(&f, 48, 48).unwrap(), f);

        let big = random_counts(&mut rng, 10, 128, 128, 3);
        let r = resize_spatial(&big, 48, 48).unwrap();
        for t in 0..10 {
            for p in 0..2 {
                assert_eq!(r.plane_total(t, p), big.plane_total(t, p));
            }
        }
    }

    #[test]
    fn resize_keeps_binarized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_counts(&mut rng, 2, 10, 10, 1).binarize();
        let r = resize_spatial(&f, 3, 4).unwrap();
        assert!(r.is_binarized());
        assert!(r.data().iter().all(|&v| v <= 1));
        assert_eq!(
            resize_spatial(&f, 0, 4).unwrap_err(),
            Error::ZeroDims { height: 0, width: 4 }
        );
    }

    #[test]
    fn label_validation() {
        let f = FrameTensor::zeros(1, 1, 1);
        assert!(LabeledSample::new(f.clone(), vec![0.5, 0.5]).is_ok());
        assert!(LabeledSample::new(f.clone(), vec![0.5, 0.4]).is_err());
        assert!(LabeledSample::new(f.clone(), vec![-0.5, 1.5]).is_err());
        assert!(LabeledSample::one_hot(f, 3, 3).is_err());
    }
}
