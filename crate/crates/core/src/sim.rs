//! Frame-based event-camera simulator and the augment/generate commutativity check.
//!
//! A cell fires an ON event when its log brightness rises by more than `alpha`
//! between consecutive frames and an OFF event when it falls by more than `alpha`.
//! The check compares `augment(simulate(scene))` with `simulate(augment(scene))`,
//! where the brightness-side transforms below are implemented independently of
//! the tensor kernels in [`crate::augment`].

use std::fmt;

use crate::augment::{apply, AugmentParams};
use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};
use crate::frames::{integrate_frames, FrameTensor, SliceMode};
use crate::metrics::event_f1;

/// A grayscale image with values in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessImage {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl BrightnessImage {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::Brightness(format!(
                "{} values for a {height}x{width} image",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Brightness(format!("value {v} outside [0, 1]")));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (y, x)))
            .map(|(y, x)| f(y, x))
            .collect();
        Self::new(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Value at signed coordinates, zero outside the image.
    fn sample(&self, y: i64, x: i64) -> f64 {
        if (0..self.height as i64).contains(&y) && (0..self.width as i64).contains(&x) {
            self.get(y as usize, x as usize)
        } else {
            0.0
        }
    }

    fn gather(&self, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_fn(self.height, self.width, f).expect("gathered values stay in [0, 1]")
    }
}

/// Brightness frames sampled every `frame_interval` microseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessSequence {
    frames: Vec<BrightnessImage>,
    frame_interval: u64,
}

impl BrightnessSequence {
    pub fn new(frames: Vec<BrightnessImage>, frame_interval: u64) -> Result<Self> {
        if let Some(first) = frames.first() {
            let dims = (first.height, first.width);
            if let Some(bad) = frames.iter().find(|f| (f.height, f.width) != dims) {
                return Err(Error::Brightness(format!(
                    "frame of {}x{} in a {}x{} sequence",
                    bad.height, bad.width, dims.0, dims.1
                )));
            }
        }
        if frame_interval == 0 {
            return Err(Error::Brightness("frame interval must be positive".into()));
        }
        Ok(Self {
            frames,
            frame_interval,
        })
    }

    pub fn frames(&self) -> &[BrightnessImage] {
        &self.frames
    }

    pub fn frame_interval(&self) -> u64 {
        self.frame_interval
    }

    pub fn map(&self, f: impl Fn(&BrightnessImage) -> Result<BrightnessImage>) -> Result<Self> {
        Self::new(self.frames.iter().map(f).collect::<Result<_>>()?, self.frame_interval)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub alpha: f64,
    pub log_epsilon: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            log_epsilon: 1e-3,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if [self.alpha, self.log_epsilon].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::Config(format!(
                "alpha ({}) and log epsilon ({}) must be positive",
                self.alpha, self.log_epsilon
            )));
        }
        Ok(())
    }
}

/// Emits at most one event per cell and step: ON when
/// `ln(V(t) + eps) - ln(V(t - 1) + eps) > alpha`, OFF when it is below `-alpha`.
/// Step `k` is stamped `k * frame_interval`; the declared duration is
/// `len * frame_interval`.
pub fn simulate_events(seq: &BrightnessSequence, cfg: &SimConfig) -> Result<EventStream> {
    cfg.validate()?;
    let frames = seq.frames();
    if frames.len() < 2 {
        return Err(Error::Brightness(format!(
            "need at least 2 frames, found {}",
            frames.len()
        )));
    }
    let (h, w) = (frames[0].height, frames[0].width);
    if h > usize::from(u16::MAX) + 1 || w > usize::from(u16::MAX) + 1 {
        return Err(Error::Brightness(format!("{h}x{w} exceeds event coordinate range")));
    }
    let log = |v: f64| (v + cfg.log_epsilon).ln();
    let mut prev: Vec<f64> = frames[0].data.iter().map(|&v| log(v)).collect();
    let mut events = Vec::new();
    for (k, frame) in frames.iter().enumerate().skip(1) {
        let t = k as u64 * seq.frame_interval;
        for (i, (&v, last)) in frame.data.iter().zip(prev.iter_mut()).enumerate() {
            let now = log(v);
            let diff = now - *last;
            let p = if diff > cfg.alpha {
                Some(Polarity::On)
            } else if diff < -cfg.alpha {
                Some(Polarity::Off)
            } else {
                None
            };
            if let Some(p) = p {
                events.push(Event::new(t, (i % w) as u16, (i / w) as u16, p));
            }
            *last = now;
        }
    }
    let duration = frames.len() as u64 * seq.frame_interval;
    EventStream::with_duration(events, w as u32, h as u32, duration)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motion {
    Static,
    /// Pixels per step.
    Translate { dx: f64, dy: f64 },
    /// Degrees per step about the image center, clockwise positive.
    Rotate { degrees: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub motion: Motion,
    pub steps: usize,
    pub frame_interval: u64,
}

impl Trajectory {
    pub const DEFAULT_INTERVAL: u64 = 1000;

    pub fn new(motion: Motion, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Config(format!("trajectory needs >= 2 steps, got {steps}")));
        }
        Ok(Self {
            motion,
            steps,
            frame_interval: Self::DEFAULT_INTERVAL,
        })
    }
}

/// Parses `static`, `translate:DX,DY` or `rotate:DEG` (per step).
impl std::str::FromStr for Motion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown trajectory `{s}`"));
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("static", []) => Ok(Motion::Static),
            ("translate", [dx, dy]) => Ok(Motion::Translate { dx: *dx, dy: *dy }),
            ("translate", [dx]) => Ok(Motion::Translate { dx: *dx, dy: 0.0 }),
            ("rotate", [deg]) => Ok(Motion::Rotate { degrees: *deg }),
            _ => Err(bad()),
        }
    }
}

/// Rotates `image` clockwise by `degrees` about its center, nearest-neighbor, zero fill.
fn rotate_image(image: &BrightnessImage, degrees: f64) -> BrightnessImage {
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cy = (image.height as f64 - 1.0) / 2.0;
    let cx = (image.width as f64 - 1.0) / 2.0;
    image.gather(|y, x| {
        // inverse map: rotate the destination back by -degrees
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let sx = cx + dx * cos + dy * sin;
        let sy = cy - dx * sin + dy * cos;
        image.sample(sy.round() as i64, sx.round() as i64)
    })
}

/// Frame `k` is the image displaced (or rotated) by `k` steps of the motion.
pub fn render_trajectory(image: &BrightnessImage, traj: &Trajectory) -> Result<BrightnessSequence> {
    if traj.steps < 2 {
        return Err(Error::Config(format!("trajectory needs >= 2 steps, got {}", traj.steps)));
    }
    let frames = (0..traj.steps)
        .map(|k| {
            let k = k as f64;
            match traj.motion {
                Motion::Static => image.clone(),
                Motion::Translate { dx, dy } => image.gather(|y, x| {
                    image.sample(
                        (y as f64 - k * dy).round() as i64,
                        (x as f64 - k * dx).round() as i64,
                    )
                }),
                Motion::Rotate { degrees } => rotate_image(image, k * degrees),
            }
        })
        .collect();
    BrightnessSequence::new(frames, traj.frame_interval)
}

/// A transform evaluated on both sides of the commutativity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneTransform {
    Identity,
    Geometric(AugmentParams),
    /// Value transform `clip(gain * v + offset, 0, 1)`.
    Contrast { gain: f64, offset: f64 },
}

impl SceneTransform {
    pub fn is_photometric(&self) -> bool {
        matches!(self, SceneTransform::Contrast { .. })
    }

    /// Brightness-domain version, gathering each output pixel from its source.
    pub fn apply_image(&self, image: &BrightnessImage) -> Result<BrightnessImage> {
        let (h, w) = (image.height as i64, image.width as i64);
        Ok(match *self {
            SceneTransform::Identity => image.clone(),
            SceneTransform::Contrast { gain, offset } => {
                image.gather(|y, x| (gain * image.get(y, x) + offset).clamp(0.0, 1.0))
            }
            SceneTransform::Geometric(params) => match params {
                AugmentParams::Flip => image.gather(|y, x| image.sample(y as i64, w - 1 - x as i64)),
                AugmentParams::Roll { dx, dy, circular } => image.gather(|y, x| {
                    let (sy, sx) = (y as i64 - i64::from(dy), x as i64 - i64::from(dx));
                    if circular {
                        image.sample(sy.rem_euclid(h), sx.rem_euclid(w))
                    } else {
                        image.sample(sy, sx)
                    }
                }),
                AugmentParams::Rotate { degrees } => rotate_image(image, degrees),
                AugmentParams::Cutout { side, cx, cy } => {
                    let lo_x = cx as i64 - i64::from(side / 2);
                    let lo_y = cy as i64 - i64::from(side / 2);
                    let s = i64::from(side);
                    image.gather(|y, x| {
                        let (y, x) = (y as i64, x as i64);
                        if (lo_y..lo_y + s).contains(&y) && (lo_x..lo_x + s).contains(&x) {
                            0.0
                        } else {
                            image.sample(y, x)
                        }
                    })
                }
                AugmentParams::ShearX { factor } => image.gather(|y, x| {
                    image.sample(y as i64, x as i64 - (factor * y as f64).round() as i64)
                }),
                AugmentParams::CutMix { .. } => return Err(Error::MissingPartner),
            },
        })
    }

    /// Event-tensor version. Value transforms act on entries and the continuous
    /// result is thresholded at 0.5 to return to `{0, 1}`.
    pub fn apply_frames(&self, frames: &FrameTensor) -> Result<FrameTensor> {
        match *self {
            SceneTransform::Identity => Ok(frames.clone()),
            SceneTransform::Geometric(params) => apply(frames, &params),
            SceneTransform::Contrast { gain, offset } => {
                let data = frames
                    .data()
                    .iter()
                    .map(|&v| u16::from((gain * f64::from(v) + offset).clamp(0.0, 1.0) >= 0.5))
                    .collect();
                FrameTensor::from_vec(frames.bins(), frames.height(), frames.width(), data, true)
            }
        }
    }
}

impl fmt::Display for SceneTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneTransform::Identity => write!(f, "identity"),
            SceneTransform::Geometric(p) => write!(f, "{p}"),
            SceneTransform::Contrast { gain, offset } => write!(f, "contrast(clip({gain} v {offset:+}))"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchReport {
    pub f1: f64,
    /// Active cells of the augment-after-generate tensor.
    pub lhs_count: u64,
    /// Active cells of the generate-after-augment tensor.
    pub rhs_count: u64,
}

/// Compares `transform(integrate(simulate(render(image))))` against
/// `integrate(simulate(transform(render(image))))` on binarized tensors.
pub fn check_commutativity(
    image: &BrightnessImage,
    traj: &Trajectory,
    cfg: &SimConfig,
    transform: &SceneTransform,
    num_bins: usize,
) -> Result<MatchReport> {
    let seq = render_trajectory(image, traj)?;
    let frames_of = |s: &BrightnessSequence| -> Result<FrameTensor> {
        integrate_frames(&simulate_events(s, cfg)?, num_bins, SliceMode::EqualDuration, true)
    };
    let lhs = transform.apply_frames(&frames_of(&seq)?)?.binarize();
    let rhs = frames_of(&seq.map(|img| transform.apply_image(img))?)?;
    Ok(MatchReport {
        f1: event_f1(&lhs, &rhs)?,
        lhs_count: lhs.active(),
        rhs_count: rhs.active(),
    })
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub name: &'static str,
    pub image: BrightnessImage,
    pub trajectory: Trajectory,
}

pub const SUITE_SIZE: usize = 64;
pub const SUITE_STEPS: usize = 20;
pub const SUITE_BINS: usize = 10;
const BACKGROUND: f64 = 0.05;

/// Fixed 64x64 scenes: a translating bar, a translating textured square and a
/// rotating dot, each rendered over 20 steps.
pub fn default_scene_suite() -> Vec<Scene> {
    let n = SUITE_SIZE;
    let bar = BrightnessImage::from_fn(n, n, |y, x| {
        if (8..14).contains(&x) && (12..48).contains(&y) {
            // ramp along the bar so several contrast levels are present
            0.15 + 0.75 * (y - 12) as f64 / 35.0
        } else {
            BACKGROUND
        }
    })
    .unwrap();
    let square = BrightnessImage::from_fn(n, n, |y, x| {
        if (10..26).contains(&y) && (10..26).contains(&x) {
            if ((y / 4) + (x / 4)) % 2 == 0 { 0.5 } else { 0.62 }
        } else {
            BACKGROUND
        }
    })
    .unwrap();
    let dot = BrightnessImage::from_fn(n, n, |y, x| {
        let (dy, dx) = (y as f64 - 31.5, x as f64 - 47.5);
        let r = (dx * dx + dy * dy).sqrt();
        if r <= 3.0 {
            0.2
        } else if r <= 5.0 {
            0.45
        } else {
            BACKGROUND
        }
    })
    .unwrap();

    let traj = |motion| Trajectory::new(motion, SUITE_STEPS).unwrap();
    vec![
        Scene {
            name: "translating-bar",
            image: bar,
            trajectory: traj(Motion::Translate { dx: 2.0, dy: 0.0 }),
        },
        Scene {
            name: "translating-square",
            image: square,
            trajectory: traj(Motion::Translate { dx: 1.0, dy: 1.0 }),
        },
        Scene {
            name: "rotating-dot",
            image: dot,
            trajectory: traj(Motion::Rotate { degrees: 9.0 }),
        },
    ]
}

/// The transforms the suite evaluates, labelled; the last is the photometric control.
pub fn default_suite_transforms() -> Vec<(&'static str, SceneTransform)> {
    use AugmentParams::*;
    vec![
        ("identity", SceneTransform::Identity),
        ("flip", SceneTransform::Geometric(Flip)),
        ("roll", SceneTransform::Geometric(Roll { dx: 5, dy: -3, circular: false })),
        ("rotate", SceneTransform::Geometric(Rotate { degrees: 30.0 })),
        ("shear", SceneTransform::Geometric(ShearX { factor: 0.3 })),
        ("cutout", SceneTransform::Geometric(Cutout { side: 16, cx: 32, cy: 32 })),
        ("contrast", SceneTransform::Contrast { gain: 1.8, offset: -0.4 }),
    ]
}

#[derive(Debug, Clone)]
pub struct SuiteRow {
    pub name: &'static str,
    pub transform: SceneTransform,
    /// `(scene name, report)` per scene.
    pub scenes: Vec<(&'static str, MatchReport)>,
}

impl SuiteRow {
    pub fn mean_f1(&self) -> f64 {
        self.scenes.iter().map(|(_, r)| r.f1).sum::<f64>() / self.scenes.len().max(1) as f64
    }

    pub fn min_f1(&self) -> f64 {
        self.scenes.iter().map(|(_, r)| r.f1).fold(f64::INFINITY, f64::min)
    }

    pub fn max_f1(&self) -> f64 {
        self.scenes.iter().map(|(_, r)| r.f1).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn run_suite(
    scenes: &[Scene],
    transforms: &[(&'static str, SceneTransform)],
    cfg: &SimConfig,
) -> Result<Vec<SuiteRow>> {
    transforms
        .iter()
        .map(|&(name, transform)| {
            let scenes = scenes
                .iter()
                .map(|s| {
                    check_commutativity(&s.image, &s.trajectory, cfg, &transform, SUITE_BINS)
                        .map(|r| (s.name, r))
                })
                .collect::<Result<_>>()?;
            Ok(SuiteRow {
                name,
                transform,
                scenes,
            })
        })
        .collect()
}

/// True when every photometric row scores below every geometric row on every scene.
pub fn ordering_holds(rows: &[SuiteRow]) -> bool {
    let photometric_max = rows
        .iter()
        .filter(|r| r.transform.is_photometric())
        .map(SuiteRow::max_f1)
        .fold(f64::NEG_INFINITY, f64::max);
    rows.iter()
        .filter(|r| matches!(r.transform, SceneTransform::Geometric(_)))
        .all(|r| r.min_f1() > photometric_max)
}
