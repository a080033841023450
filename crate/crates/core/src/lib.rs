//! Neuromorphic data augmentation for event-camera recordings.
//!
//! Event streams are integrated into `(T, 2, H, W)` frame tensors and augmented
//! with index-based geometric transforms (flip, roll, rotate, cutout, shear-x,
//! CutMix) that keep binary spike tensors binary. The [`policy`] module samples
//! per-sample transform plans; [`sim`] holds a small event-camera simulator used
//! to check that augmenting generated events matches generating events from an
//! augmented scene.

pub mod augment;
pub mod error;
pub mod event;
pub mod frames;
pub mod io;
pub mod metrics;
pub mod policy;
pub mod rng;
pub mod sim;

pub use augment::{apply, apply_sample, AugmentKind, AugmentParams, Rect};
pub use error::{Error, Result};
pub use event::{Event, EventStream, Polarity};
pub use frames::{binarize, integrate_frames, resize_spatial, FrameTensor, LabeledSample, SliceMode};
pub use metrics::{event_f1, fire_rate, synops_estimate, FireRate, LayerShape};
pub use policy::{
    augment_sample, lookup_intensity, make_contrastive_pair, sample_plan, Intensity, Policy,
};
pub use rng::{RngKey, SampleRng};
pub use sim::{
    check_commutativity, render_trajectory, simulate_events, BrightnessImage, BrightnessSequence,
    MatchReport, Motion, SceneTransform, SimConfig, Trajectory,
};
