use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nda_core::io::{write_bin, write_text_events};
use nda_core::sim::{default_scene_suite, render_trajectory, simulate_events};
use nda_core::{BrightnessImage, Motion, SimConfig, Trajectory};

use crate::util::{has_suffix, usage, Outcome};
use crate::SimulateArgs;

pub fn load_image(spec: &str) -> Result<BrightnessImage> {
    if let Some(name) = spec.strip_prefix("scene:") {
        let suite = default_scene_suite();
        let scene = suite
            .iter()
            .find(|s| s.name.ends_with(name))
            .ok_or_else(|| usage(format!("unknown built-in scene `{name}` (bar, square, dot)")))?;
        return Ok(scene.image.clone());
    }
    let img = image::open(Path::new(spec))
        .with_context(|| format!("opening {spec}"))?
        .to_luma8();
    let (w, h) = img.dimensions();
    let data = img.pixels().map(|p| f64::from(p.0[0]) / 255.0).collect();
    Ok(BrightnessImage::new(h as usize, w as usize, data)?)
}

pub fn run(args: &SimulateArgs) -> Result<Outcome> {
    let motion: Motion = args.trajectory.parse().map_err(|e| usage(format!("--trajectory: {e}")))?;
    let mut traj = Trajectory::new(motion, args.steps).map_err(|e| usage(format!("--steps: {e}")))?;
    traj.frame_interval = args.interval;
    let cfg = SimConfig {
        alpha: args.alpha,
        log_epsilon: args.epsilon,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let text_out = has_suffix(&args.out_file, ".evt.txt");
    if !text_out && !has_suffix(&args.out_file, ".bin") {
        return Err(usage("output must end in .bin or .evt.txt"));
    }

    let image = load_image(&args.image)?;
    let seq = render_trajectory(&image, &traj)?;
    let events = simulate_events(&seq, &cfg)?;
    let bytes = if text_out {
        write_text_events(&events).into_bytes()
    } else {
        write_bin(&events)?
    };
    if let Some(dir) = args.out_file.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&args.out_file, bytes).with_context(|| format!("writing {}", args.out_file.display()))?;
    let on = events.events().iter().filter(|e| e.p == nda_core::Polarity::On).count();
    println!(
        "events={} on={} off={} size={}x{} duration_us={}",
        events.len(),
        on,
        events.len() - on,
        image.height(),
        image.width(),
        events.duration()
    );
    Ok(Outcome::Success)
}
