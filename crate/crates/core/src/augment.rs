//! Index-based geometric transforms over frame tensors.
//!
//! Every kernel builds one spatial map and applies it to all `T x P` planes, so
//! polarity channels never mix and equal time slices stay equal. Entries are
//! relocated or erased, never rescaled; a binarized input yields a binarized output.

use std::fmt;

use crate::error::{Error, Result};
use crate::frames::{FrameTensor, LabeledSample};

/// Axis-aligned rectangle in pixel coordinates, `[y0, y0 + height) x [x0, x0 + width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rect {
    pub y0: usize,
    pub x0: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn new(y0: usize, x0: usize, height: usize, width: usize) -> Self {
        Self {
            y0,
            x0,
            height,
            width,
        }
    }

    pub fn area(&self) -> usize {
        self.height * self.width
    }

    pub fn fits(&self, height: usize, width: usize) -> bool {
        self.y0 + self.height <= height && self.x0 + self.width <= width
    }

    pub fn contains(&self, y: usize, x: usize) -> bool {
        (self.y0..self.y0 + self.height).contains(&y) && (self.x0..self.x0 + self.width).contains(&x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AugmentKind {
    Flip,
    Roll,
    Rotate,
    Cutout,
    ShearX,
    CutMix,
}

impl AugmentKind {
    /// The kinds the policy samples from; flip and CutMix are handled separately.
    pub const SAMPLED: [AugmentKind; 4] = [
        AugmentKind::Roll,
        AugmentKind::Rotate,
        AugmentKind::Cutout,
        AugmentKind::ShearX,
    ];
}

/// A fully parameterized transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AugmentParams {
    Flip,
    /// Shift right by `dx` and down by `dy`.
    Roll { dx: i32, dy: i32, circular: bool },
    /// Positive angles rotate clockwise on screen (rows grow downward).
    Rotate { degrees: f64 },
    /// Square of side `side` centered on `(cx, cy)`, clipped at the borders.
    Cutout { side: u32, cx: usize, cy: usize },
    /// `(x, y) -> (x + round(factor * y), y)`.
    ShearX { factor: f64 },
    /// Pixels inside `rect` come from the partner sample.
    CutMix { rect: Rect },
}

impl AugmentParams {
    pub fn kind(&self) -> AugmentKind {
        match self {
            AugmentParams::Flip => AugmentKind::Flip,
            AugmentParams::Roll { .. } => AugmentKind::Roll,
            AugmentParams::Rotate { .. } => AugmentKind::Rotate,
            AugmentParams::Cutout { .. } => AugmentKind::Cutout,
            AugmentParams::ShearX { .. } => AugmentKind::ShearX,
            AugmentParams::CutMix { .. } => AugmentKind::CutMix,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AugmentParams::Cutout { side: 0, .. } => {
                Err(Error::Params("cutout side must be at least 1".into()))
            }
            AugmentParams::Rotate { degrees } if !degrees.is_finite() => {
                Err(Error::Params(format!("rotation angle {degrees}")))
            }
            AugmentParams::ShearX { factor } if !factor.is_finite() => {
                Err(Error::Params(format!("shear factor {factor}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AugmentParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AugmentParams::Flip => write!(f, "flip"),
            AugmentParams::Roll { dx, dy, circular } => {
                write!(f, "roll(dx={dx}, dy={dy}{})", if *circular { ", circular" } else { "" })
            }
            AugmentParams::Rotate { degrees } => write!(f, "rotate({degrees:.3} deg)"),
            AugmentParams::Cutout { side, cx, cy } => write!(f, "cutout(side={side}, cx={cx}, cy={cy})"),
            AugmentParams::ShearX { factor } => write!(f, "shear_x({factor:.4})"),
            AugmentParams::CutMix { rect } => write!(
                f,
                "cutmix(y0={}, x0={}, h={}, w={})",
                rect.y0, rect.x0, rect.height, rect.width
            ),
        }
    }
}

const DROPPED: u32 = u32::MAX;

/// Scatters every plane through `dest`, a per-source-cell destination table.
/// Colliding sources add (saturating); binarized inputs are clamped back to `{0, 1}`.
fn scatter(frames: &FrameTensor, dest: &[u32]) -> FrameTensor {
    let n = frames.plane_len();
    let mut data = vec![0u16; frames.data().len()];
    if n > 0 {
        for (src, dst) in frames.planes().zip(data.chunks_exact_mut(n)) {
            for (&v, &d) in src.iter().zip(dest) {
                if v != 0 && d != DROPPED {
                    let cell = &mut dst[d as usize];
                    *cell = cell.saturating_add(v);
                }
            }
        }
    }
    if frames.is_binarized() {
        data.iter_mut().for_each(|v| *v = (*v).min(1));
    }
    FrameTensor::from_parts_unchecked(
        frames.bins(),
        frames.height(),
        frames.width(),
        data,
        frames.is_binarized(),
    )
}

fn build_map(h: usize, w: usize, f: impl Fn(usize, usize) -> Option<(i64, i64)>) -> Vec<u32> {
    let mut dest = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            dest.push(match f(y, x) {
                Some((ny, nx)) if (0..h as i64).contains(&ny) && (0..w as i64).contains(&nx) => {
                    (ny as usize * w + nx as usize) as u32
                }
                _ => DROPPED,
            });
        }
    }
    dest
}

/// Mirrors the column axis: `x -> W - 1 - x`.
pub fn flip_horizontal(frames: &FrameTensor) -> FrameTensor {
    let w = frames.width() as i64;
    let dest = build_map(frames.height(), frames.width(), |y, x| Some((y as i64, w - 1 - x as i64)));
    scatter(frames, &dest)
}

/// Shifts content by `dx` columns and `dy` rows. Non-circular shifts drop what leaves
/// the frame and zero-fill what enters; circular shifts wrap around.
pub fn roll(frames: &FrameTensor, dx: i32, dy: i32, circular: bool) -> FrameTensor {
    let (h, w) = (frames.height() as i64, frames.width() as i64);
    let dest = build_map(frames.height(), frames.width(), |y, x| {
        let (ny, nx) = (y as i64 + i64::from(dy), x as i64 + i64::from(dx));
        if circular {
            Some((ny.rem_euclid(h), nx.rem_euclid(w)))
        } else {
            Some((ny, nx))
        }
    });
    scatter(frames, &dest)
}

/// Nearest-neighbor rotation about `((H - 1) / 2, (W - 1) / 2)`; positive is clockwise.
///
/// Each source cell moves to the rounded image of its center, so no entry is
/// duplicated; cells rotated off the frame are dropped.
pub fn rotate(frames: &FrameTensor, degrees: f64) -> FrameTensor {
    if degrees == 0.0 {
        return frames.clone();
    }
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cy = (frames.height() as f64 - 1.0) / 2.0;
    let cx = (frames.width() as f64 - 1.0) / 2.0;
    let dest = build_map(frames.height(), frames.width(), |y, x| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let nx = cx + dx * cos - dy * sin;
        let ny = cy + dx * sin + dy * cos;
        Some((ny.round() as i64, nx.round() as i64))
    });
    scatter(frames, &dest)
}

/// Zeroes the square of side `side` around `(cx, cy)`; the square spans
/// `[c - side / 2, c - side / 2 + side)` on each axis, clipped to the frame.
pub fn cutout(frames: &FrameTensor, side: u32, cx: usize, cy: usize) -> FrameTensor {
    let rect = cutout_rect(frames.height(), frames.width(), side, cx, cy);
    let mut data = frames.data().to_vec();
    let (n, w) = (frames.plane_len(), frames.width());
    if n > 0 {
        for plane in data.chunks_exact_mut(n) {
            for y in rect.y0..rect.y0 + rect.height {
                plane[y * w + rect.x0..y * w + rect.x0 + rect.width].fill(0);
            }
        }
    }
    FrameTensor::from_parts_unchecked(
        frames.bins(),
        frames.height(),
        frames.width(),
        data,
        frames.is_binarized(),
    )
}

/// The clipped cutout square as a rectangle.
pub fn cutout_rect(height: usize, width: usize, side: u32, cx: usize, cy: usize) -> Rect {
    let half = i64::from(side / 2);
    let span = |c: usize, limit: usize| {
        let lo = (c as i64 - half).clamp(0, limit as i64);
        let hi = (c as i64 - half + i64::from(side)).clamp(0, limit as i64);
        (lo as usize, (hi - lo) as usize)
    };
    let (y0, hgt) = span(cy, height);
    let (x0, wid) = span(cx, width);
    Rect::new(y0, x0, hgt, wid)
}

/// Horizontal shear: row `y` shifts right by `round(m * y)`; out-of-frame entries drop.
pub fn shear_x(frames: &FrameTensor, m: f64) -> FrameTensor {
    if m == 0.0 {
        return frames.clone();
    }
    let dest = build_map(frames.height(), frames.width(), |y, x| {
        Some((y as i64, x as i64 + (m * y as f64).round() as i64))
    });
    scatter(frames, &dest)
}

/// Label weight of the base sample for a mixing rectangle: `1 - area / (H * W)`.
pub fn cutmix_beta(rect: &Rect, height: usize, width: usize) -> f64 {
    let total = height * width;
    if total == 0 {
        return 1.0;
    }
    (total - rect.area()) as f64 / total as f64
}

/// Pastes `rect` of `b` into `a` and mixes the labels by the retained area fraction.
pub fn cutmix(a: &LabeledSample, b: &LabeledSample, rect: Rect) -> Result<LabeledSample> {
    let (fa, fb) = (&a.frames, &b.frames);
    if !fa.same_shape(fb) {
        return Err(Error::Shape(format!("{:?} vs {:?}", fa.shape(), fb.shape())));
    }
    if a.label().len() != b.label().len() {
        return Err(Error::LabelLength(a.label().len(), b.label().len()));
    }
    let (h, w) = (fa.height(), fa.width());
    if !rect.fits(h, w) {
        return Err(Error::Params(format!("mask {rect:?} exceeds {h}x{w} frame")));
    }

    let mut data = fa.data().to_vec();
    let n = fa.plane_len();
    if n > 0 && rect.area() > 0 {
        for (dst, src) in data.chunks_exact_mut(n).zip(fb.planes()) {
            for y in rect.y0..rect.y0 + rect.height {
                let r = y * w + rect.x0..y * w + rect.x0 + rect.width;
                dst[r.clone()].copy_from_slice(&src[r]);
            }
        }
    }
    let binarized = fa.is_binarized() && fb.is_binarized();
    let frames = FrameTensor::from_parts_unchecked(fa.bins(), h, w, data, binarized);

    let beta = cutmix_beta(&rect, h, w);
    let mut label: Vec<f64> = a
        .label()
        .iter()
        .zip(b.label())
        .map(|(&ya, &yb)| beta * ya + (1.0 - beta) * yb)
        .collect();
    let sum: f64 = label.iter().sum();
    label.iter_mut().for_each(|v| *v /= sum);
    Ok(LabeledSample::from_parts_unchecked(frames, label))
}

/// Runs the kernel selected by `params`. CutMix needs a partner; use [`apply_sample`].
pub fn apply(frames: &FrameTensor, params: &AugmentParams) -> Result<FrameTensor> {
    params.validate()?;
    Ok(match *params {
        AugmentParams::Flip => flip_horizontal(frames),
        AugmentParams::Roll { dx, dy, circular } => roll(frames, dx, dy, circular),
        AugmentParams::Rotate { degrees } => rotate(frames, degrees),
        AugmentParams::Cutout { side, cx, cy } => cutout(frames, side, cx, cy),
        AugmentParams::ShearX { factor } => shear_x(frames, factor),
        AugmentParams::CutMix { .. } => return Err(Error::MissingPartner),
    })
}

/// Labeled counterpart of [`apply`]; labels pass through all kernels except CutMix.
pub fn apply_sample(
    sample: &LabeledSample,
    params: &AugmentParams,
    partner: Option<&LabeledSample>,
) -> Result<LabeledSample> {
    match params {
        AugmentParams::CutMix { rect } => cutmix(sample, partner.ok_or(Error::MissingPartner)?, *rect),
        other => Ok(LabeledSample::from_parts_unchecked(
            apply(&sample.frames, other)?,
            sample.label().to_vec(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(seed: u64, t: usize, h: usize, w: usize, max: u16) -> FrameTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..t * 2 * h * w).map(|_| rng.random_range(0..=max)).collect();
        FrameTensor::from_vec(t, h, w, data, max == 1).unwrap()
    }

    fn single(h: usize, w: usize, y: usize, x: usize) -> FrameTensor {
        let mut f = FrameTensor::zeros(1, h, w);
        f.set(0, 0, y, x, 1);
        f
    }

    #[test]
    fn flip_index_map_and_involution() {
        let f = flip_horizontal(&single(48, 48, 5, 0));
        assert_eq!(f.get(0, 0, 5, 47), 1);
        assert_eq!(f.total(), 1);
        let x = random_tensor(1, 3, 17, 23, 5);
        assert_eq!(flip_horizontal(&flip_horizontal(&x)), x);
        for t in 0..3 {
            assert_eq!(flip_horizontal(&x).plane_total(t, 1), x.plane_total(t, 1));
        }
    }

    #[test]
    fn roll_boundary_semantics() {
        let x = random_tensor(2, 2, 48, 48, 3);
        let rolled = roll(&x, 5, 0, false);
        let mut kept = 0u64;
        for t in 0..2 {
            for p in 0..2 {
                for y in 0..48 {
                    for xx in 0..48 {
                        if xx < 43 {
                            kept += u64::from(x.get(t, p, y, xx));
                            assert_eq!(rolled.get(t, p, y, xx + 5), x.get(t, p, y, xx));
                        }
                    }
                    for xx in 0..5 {
                        assert_eq!(rolled.get(t, p, y, xx), 0);
                    }
                }
            }
        }
        assert_eq!(rolled.total(), kept);
    }

    #[test]
    fn circular_roll_inverse() {
        let x = random_tensor(3, 2, 13, 19, 4);
        let r = roll(&x, 7, -30, true);
        assert_eq!(r.total(), x.total());
        assert_eq!(roll(&r, -7, 30, true), x);
    }

    #[test]
    fn rotate_zero_and_center() {
        let x = random_tensor(4, 2, 9, 9, 2);
        assert_eq!(rotate(&x, 0.0), x);
        for angle in [13.0, 45.0, -90.0, 170.0, 333.3] {
            let r = rotate(&single(9, 9, 4, 4), angle);
            assert_eq!(r.get(0, 0, 4, 4), 1, "angle {angle}");
        }
    }

    #[test]
    fn rotate_ninety_matches_transpose_then_flip() {
        for (h, seed) in [(8usize, 5u64), (9, 6), (48, 7)] {
            let x = random_tensor(seed, 2, h, h, 3);
            let r = rotate(&x, 90.0);
            for t in 0..2 {
                for p in 0..2 {
                    for y in 0..h {
                        for xx in 0..h {
                            // transpose: (y, x) -> (x, y); flip: column c -> h-1-c
                            assert_eq!(r.get(t, p, xx, h - 1 - y), x.get(t, p, y, xx));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rotate_collisions_clamp_binarized() {
        let x = random_tensor(8, 2, 20, 20, 1);
        let r = rotate(&x, 37.0);
        assert!(r.is_binarized());
        assert!(r.data().iter().all(|&v| v <= 1));
        assert!(r.total() <= x.total());
    }

    #[test]
    fn cutout_cases() {
        let x = random_tensor(9, 2, 10, 12, 3);
        assert_eq!(cutout(&x, 30, 6, 5).total(), 0);

        let c = cutout(&x, 1, 4, 7);
        for t in 0..2 {
            for p in 0..2 {
                for y in 0..10 {
                    for xx in 0..12 {
                        let want = if (y, xx) == (7, 4) { 0 } else { x.get(t, p, y, xx) };
                        assert_eq!(c.get(t, p, y, xx), want);
                    }
                }
            }
        }

        let rect = cutout_rect(10, 12, 5, 1, 9);
        let inside: u64 = (0..2)
            .flat_map(|t| (0..2).map(move |p| (t, p)))
            .map(|(t, p)| {
                (0..10)
                    .flat_map(|y| (0..12).map(move |xx| (y, xx)))
                    .filter(|&(y, xx)| rect.contains(y, xx))
                    .map(|(y, xx)| u64::from(x.get(t, p, y, xx)))
                    .sum::<u64>()
            })
            .sum();
        assert_eq!(cutout(&x, 5, 1, 9).total() + inside, x.total());
        assert_eq!(rect, Rect::new(7, 0, 3, 4));
    }

    #[test]
    fn shear_formula() {
        let s = shear_x(&single(8, 8, 4, 2), 0.5);
        assert_eq!(s.get(0, 0, 4, 4), 1);
        assert_eq!(s.total(), 1);
        let x = random_tensor(10, 2, 11, 11, 3);
        assert_eq!(shear_x(&x, 0.0), x);
        for m in [-0.45, 0.15, 0.3] {
            let s = shear_x(&x, m);
            for t in 0..2 {
                for xx in 0..11 {
                    assert_eq!(s.get(t, 1, 0, xx), x.get(t, 1, 0, xx));
                }
            }
        }
    }

    fn labeled(seed: u64, class: usize) -> LabeledSample {
        LabeledSample::one_hot(random_tensor(seed, 2, 48, 48, 1), class, 4).unwrap()
    }

    #[test]
    fn cutmix_degenerate_rects() {
        let (a, b) = (labeled(11, 0), labeled(12, 3));
        assert_eq!(cutmix(&a, &b, Rect::new(3, 3, 0, 5)).unwrap(), a);
        let full = cutmix(&a, &b, Rect::new(0, 0, 48, 48)).unwrap();
        assert_eq!(full.frames, b.frames);
        assert_eq!(full.label(), b.label());
    }

    #[test]
    fn cutmix_twelve_square() {
        let (a, b) = (labeled(13, 1), labeled(14, 2));
        let rect = Rect::new(10, 20, 12, 12);
        assert_eq!(cutmix_beta(&rect, 48, 48), 1.0 - 144.0 / 2304.0);
        assert_eq!(cutmix_beta(&rect, 48, 48), 0.9375);
        let m = cutmix(&a, &b, rect).unwrap();
        assert_eq!(m.label(), &[0.0, 0.9375, 0.0625, 0.0]);
        for y in 0..48 {
            for x in 0..48 {
                let src = if rect.contains(y, x) { &b } else { &a };
                assert_eq!(m.frames.get(1, 0, y, x), src.frames.get(1, 0, y, x));
            }
        }
        assert!(m.frames.is_binarized());
    }

    #[test]
    fn cutmix_errors() {
        let a = labeled(15, 0);
        let small = LabeledSample::one_hot(FrameTensor::zeros(2, 10, 10), 0, 4).unwrap();
        assert!(matches!(cutmix(&a, &small, Rect::default()), Err(Error::Shape(_))));
        let other = LabeledSample::one_hot(a.frames.clone(), 0, 3).unwrap();
        assert!(matches!(cutmix(&a, &other, Rect::default()), Err(Error::LabelLength(4, 3))));
        assert!(cutmix(&a, &a, Rect::new(40, 40, 10, 5)).is_err());
    }

    #[test]
    fn dispatch() {
        let x = random_tensor(16, 2, 20, 20, 3);
        assert_eq!(apply(&x, &AugmentParams::Flip).unwrap(), flip_horizontal(&x));
        let zero = AugmentParams::Roll { dx: 0, dy: 0, circular: false };
        assert_eq!(apply(&x, &zero).unwrap(), x);
        let p = AugmentParams::Rotate { degrees: 21.5 };
        assert_eq!(apply(&x, &p).unwrap(), apply(&x, &p).unwrap());
        let cm = AugmentParams::CutMix { rect: Rect::default() };
        assert_eq!(apply(&x, &cm).unwrap_err(), Error::MissingPartner);
        let s = LabeledSample::one_hot(x, 0, 2).unwrap();
        assert_eq!(apply_sample(&s, &cm, None).unwrap_err(), Error::MissingPartner);
        assert!(apply(&s.frames, &AugmentParams::Cutout { side: 0, cx: 0, cy: 0 }).is_err());
    }

    fn any_params(h: usize, w: usize) -> impl Strategy<Value = AugmentParams> {
        prop_oneof![
            Just(AugmentParams::Flip),
            (-60i32..60, -60i32..60, any::<bool>())
                .prop_map(|(dx, dy, circular)| AugmentParams::Roll { dx, dy, circular }),
            (-180.0f64..180.0).prop_map(|degrees| AugmentParams::Rotate { degrees }),
            (1u32..30, 0..w, 0..h).prop_map(|(side, cx, cy)| AugmentParams::Cutout { side, cx, cy }),
            (-1.0f64..1.0).prop_map(|factor| AugmentParams::ShearX { factor }),
        ]
    }

    proptest! {
        #[test]
        fn kernel_invariants(seed in any::<u64>(), params in any_params(12, 15)) {
            let counts = random_tensor(seed, 3, 12, 15, 4);
            let binary = counts.binarize();

            let out = apply(&binary, &params).unwrap();
            prop_assert!(out.is_binarized());
            prop_assert!(out.data().iter().all(|&v| v <= 1));

            let out = apply(&counts, &params).unwrap();
            prop_assert_eq!(out.shape(), counts.shape());
            prop_assert!(out.total() <= counts.total());

            // temporal consistency: copy slice 0 over slice 2
            let mut data = counts.data().to_vec();
            let n = 2 * 12 * 15;
            data.copy_within(0..n, 2 * n);
            let same = FrameTensor::from_vec(3, 12, 15, data, false).unwrap();
            let out = apply(&same, &params).unwrap();
            prop_assert_eq!(&out.data()[..n], &out.data()[2 * n..]);

            // polarity non-mixing: zeroing channel 1 leaves channel 0 output unchanged
            let mut only_off = counts.clone();
            for t in 0..3 { for y in 0..12 { for x in 0..15 { only_off.set(t, 1, y, x, 0); } } }
            let a = apply(&counts, &params).unwrap();
            let b = apply(&only_off, &params).unwrap();
            for t in 0..3 {
                prop_assert_eq!(a.plane(t, 0), b.plane(t, 0));
                prop_assert!(b.plane(t, 1).iter().all(|&v| v == 0));
            }
        }
    }
}
