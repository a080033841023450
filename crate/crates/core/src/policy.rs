//! M/N augmentation policy: optional flip, `M` kinds drawn from
//! {roll, rotate, cutout, shear-x} at intensity level `N`, then CutMix.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::augment::{apply, apply_sample, AugmentKind, AugmentParams, Rect};
use crate::error::{Error, Result};
use crate::frames::{FrameTensor, LabeledSample};
use crate::rng::{stream, RngKey, SampleRng};

/// Parameter bounds for one intensity level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intensity {
    /// Roll shifts are drawn from the integers in `[-roll, roll]`.
    pub roll: i32,
    /// Rotation angles are drawn from `U(-rotate, rotate)` degrees.
    pub rotate: f64,
    /// Cutout sides are drawn from the integers in `[1, cutout]`.
    pub cutout: u32,
    /// Shear factors are drawn from `U(-shear, shear)`.
    pub shear: f64,
}

const INTENSITY_TABLE: [Intensity; 3] = [
    Intensity { roll: 3, rotate: 15.0, cutout: 8, shear: 0.15 },
    Intensity { roll: 5, rotate: 30.0, cutout: 16, shear: 0.30 },
    Intensity { roll: 7, rotate: 45.0, cutout: 24, shear: 0.45 },
];

pub fn lookup_intensity(level: u8) -> Result<Intensity> {
    match level {
        1..=3 => Ok(INTENSITY_TABLE[usize::from(level) - 1]),
        other => Err(Error::Config(format!("intensity level {other} outside 1..=3"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    /// Number of sampled kinds, 1..=4.
    pub m: u8,
    /// Intensity level, 1..=3.
    pub n: u8,
    pub flip_prob: f64,
    pub cutmix: bool,
    /// Beta distribution parameters for the CutMix retained-area fraction.
    pub cutmix_alpha: (f64, f64),
    /// Wrap roll shifts instead of zero-filling.
    pub circular_roll: bool,
    pub seed: u64,
}

impl Default for Policy {
    fn default() -> Self {
        Self {
            m: 1,
            n: 2,
            flip_prob: 0.5,
            cutmix: true,
            cutmix_alpha: (1.0, 1.0),
            circular_roll: false,
            seed: 0,
        }
    }
}

impl Policy {
    pub fn new(m: u8, n: u8) -> Result<Self> {
        let p = Self {
            m,
            n,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_cutmix(mut self, on: bool) -> Self {
        self.cutmix = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.m) {
            return Err(Error::Config(format!("m={} outside 1..=4", self.m)));
        }
        lookup_intensity(self.n)?;
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::Config(format!("flip_prob={} outside [0, 1]", self.flip_prob)));
        }
        let (a, b) = self.cutmix_alpha;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Config(format!("cutmix alpha ({a}, {b}) must be positive")));
        }
        Ok(())
    }

    pub fn intensity(&self) -> Result<Intensity> {
        lookup_intensity(self.n)
    }

    /// Plan stream for sample `index`.
    pub fn rng(&self, index: u64) -> SampleRng {
        RngKey::new(self.seed, index, stream::PLAN).rng()
    }
}

/// Canonical config text, e.g. `m=1,n=2,flip_prob=0.5,cutmix=on,alpha=1:1,circular=off,seed=0`.
impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let onoff = |b: bool| if b { "on" } else { "off" };
        write!(
            f,
            "m={},n={},flip_prob={},cutmix={},alpha={}:{},circular={},seed={}",
            self.m,
            self.n,
            self.flip_prob,
            onoff(self.cutmix),
            self.cutmix_alpha.0,
            self.cutmix_alpha.1,
            onoff(self.circular_roll),
            self.seed
        )
    }
}

/// Parses `key=value` pairs separated by commas, whitespace or newlines.
/// Missing keys keep their defaults; `#` starts a comment.
impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Policy::default();
        let bad = |k: &str, v: &str| Error::Config(format!("bad value `{v}` for `{k}`"));
        let flag = |k: &str, v: &str| match v {
            "on" | "true" | "1" | "yes" => Ok(true),
            "off" | "false" | "0" | "no" => Ok(false),
            _ => Err(bad(k, v)),
        };
        for line in s.lines() {
            let line = line.split('#').next().unwrap_or("");
            for item in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("expected key=value, found `{item}`")))?;
                match k {
                    "m" => p.m = v.parse().map_err(|_| bad(k, v))?,
                    "n" => p.n = v.parse().map_err(|_| bad(k, v))?,
                    "flip_prob" => p.flip_prob = v.parse().map_err(|_| bad(k, v))?,
                    "cutmix" => p.cutmix = flag(k, v)?,
                    "circular" => p.circular_roll = flag(k, v)?,
                    "seed" => p.seed = v.parse().map_err(|_| bad(k, v))?,
                    "alpha" => {
                        let (a, b) = v.split_once(':').unwrap_or((v, v));
                        p.cutmix_alpha = (
                            a.parse().map_err(|_| bad(k, v))?,
                            b.parse().map_err(|_| bad(k, v))?,
                        );
                    }
                    other => return Err(Error::Config(format!("unknown policy key `{other}`"))),
                }
            }
        }
        p.validate()?;
        Ok(p)
    }
}

/// Draws the per-sample transform list for a `height x width` frame.
///
/// With probability `flip_prob` the plan starts with a flip, followed by `m`
/// distinct kinds in random order, each with parameters at the policy's intensity.
pub fn sample_plan<R: Rng + ?Sized>(
    policy: &Policy,
    height: usize,
    width: usize,
    rng: &mut R,
) -> Result<Vec<AugmentParams>> {
    policy.validate()?;
    let level = policy.intensity()?;
    let mut plan = Vec::with_capacity(usize::from(policy.m) + 1);
    if rng.random_bool(policy.flip_prob) {
        plan.push(AugmentParams::Flip);
    }
    let mut kinds = AugmentKind::SAMPLED;
    let (chosen, _) = kinds.partial_shuffle(rng, usize::from(policy.m));
    for &kind in chosen.iter() {
        plan.push(match kind {
            AugmentKind::Roll => AugmentParams::Roll {
                dx: rng.random_range(-level.roll..=level.roll),
                dy: rng.random_range(-level.roll..=level.roll),
                circular: policy.circular_roll,
            },
            AugmentKind::Rotate => AugmentParams::Rotate {
                degrees: rng.random_range(-level.rotate..level.rotate),
            },
            AugmentKind::Cutout => AugmentParams::Cutout {
                side: rng.random_range(1..=level.cutout),
                cx: rng.random_range(0..width.max(1)),
                cy: rng.random_range(0..height.max(1)),
            },
            AugmentKind::ShearX => AugmentParams::ShearX {
                factor: rng.random_range(-level.shear..level.shear),
            },
            AugmentKind::Flip | AugmentKind::CutMix => unreachable!("not a sampled kind"),
        });
    }
    Ok(plan)
}

/// Draws a square mixing rectangle: `beta ~ Beta(alpha)`, side `round(sqrt((1 - beta) H W))`
/// clipped to the frame, placed uniformly among valid positions.
pub fn sample_cutmix_rect<R: Rng + ?Sized>(
    policy: &Policy,
    height: usize,
    width: usize,
    rng: &mut R,
) -> Result<Rect> {
    let (a, b) = policy.cutmix_alpha;
    let beta = Beta::new(a, b)
        .map_err(|e| Error::Config(format!("cutmix alpha: {e}")))?
        .sample(rng);
    let side = ((1.0 - beta) * (height * width) as f64).sqrt().round() as usize;
    let (sh, sw) = (side.min(height), side.min(width));
    let y0 = rng.random_range(0..=height - sh);
    let x0 = rng.random_range(0..=width - sw);
    Ok(Rect::new(y0, x0, sh, sw))
}

/// Applies a freshly sampled plan and, when enabled, CutMix with `partner`.
/// Returns the augmented sample together with every transform that was applied.
pub fn augment_sample_traced<R: Rng + ?Sized>(
    sample: &LabeledSample,
    partner: Option<&LabeledSample>,
    policy: &Policy,
    rng: &mut R,
) -> Result<(LabeledSample, Vec<AugmentParams>)> {
    if policy.cutmix && partner.is_none() {
        return Err(Error::MissingPartner);
    }
    let (h, w) = (sample.frames.height(), sample.frames.width());
    let mut plan = sample_plan(policy, h, w, rng)?;
    let mut out = sample.clone();
    for params in &plan {
        out = apply_sample(&out, params, None)?;
    }
    if policy.cutmix {
        let rect = sample_cutmix_rect(policy, h, w, rng)?;
        let params = AugmentParams::CutMix { rect };
        out = apply_sample(&out, &params, partner)?;
        plan.push(params);
    }
    Ok((out, plan))
}

pub fn augment_sample<R: Rng + ?Sized>(
    sample: &LabeledSample,
    partner: Option<&LabeledSample>,
    policy: &Policy,
    rng: &mut R,
) -> Result<LabeledSample> {
    augment_sample_traced(sample, partner, policy, rng).map(|(s, _)| s)
}

/// One unlabeled view: flip and the sampled kinds, never CutMix.
pub fn augment_view<R: Rng + ?Sized>(
    frames: &FrameTensor,
    policy: &Policy,
    rng: &mut R,
) -> Result<FrameTensor> {
    let plan = sample_plan(policy, frames.height(), frames.width(), rng)?;
    plan.iter().try_fold(frames.clone(), |f, p| apply(&f, p))
}

/// Two independently augmented views of one input for contrastive training.
pub fn make_contrastive_pair(
    frames: &FrameTensor,
    policy: &Policy,
    index: u64,
) -> Result<(FrameTensor, FrameTensor)> {
    let a = augment_view(frames, policy, &mut RngKey::new(policy.seed, index, stream::VIEW_A).rng())?;
    let b = augment_view(frames, policy, &mut RngKey::new(policy.seed, index, stream::VIEW_B).rng())?;
    Ok((a, b))
}
