use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use nda_core::io::{parse_bin, parse_text_events, write_frames};
use nda_core::{integrate_frames, resize_spatial, SliceMode};

use crate::labels::{self, Labels};
use crate::manifest::{relative, Failure, RunManifest};
use crate::util::{collect_files, has_suffix, par_map, usage, Outcome};
use crate::IntegrateArgs;

const BIN_EXT: &str = ".bin";
const TEXT_EXT: &str = ".evt.txt";

/// `dir/name.bin` -> `name.ndaf` relative to the input root.
fn output_name(root: &Path, path: &Path) -> String {
    let rel = relative(root, path);
    let stem = rel
        .strip_suffix(TEXT_EXT)
        .or_else(|| rel.strip_suffix(BIN_EXT))
        .unwrap_or(&rel);
    format!("{stem}.ndaf")
}

fn convert(args: &IntegrateArgs, mode: SliceMode, path: &Path) -> Result<Vec<u8>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let stream = if has_suffix(path, TEXT_EXT) {
        let text = String::from_utf8(bytes).context("event text is not UTF-8")?;
        parse_text_events(&text)?
    } else if has_suffix(path, BIN_EXT) {
        let (h, w) = (args.sensor.height as u32, args.sensor.width as u32);
        parse_bin(&bytes, w, h)?.0
    } else {
        return Err(anyhow!("unknown event format"));
    };
    let mut frames = integrate_frames(&stream, args.bins as usize, mode, args.binarize)?;
    if let Some(d) = args.resize {
        frames = resize_spatial(&frames, d.height, d.width)?;
    }
    Ok(write_frames(&frames))
}

pub fn run(args: &IntegrateArgs) -> Result<Outcome> {
    let start = Instant::now();
    let mode: SliceMode = args.mode.parse().map_err(|e| usage(format!("{e}")))?;
    let input_labels: Option<Labels> = args.labels.as_deref().map(labels::load).transpose()?;
    let files = collect_files(&args.in_dir, |p| has_suffix(p, BIN_EXT) || has_suffix(p, TEXT_EXT))?;

    let mut manifest = RunManifest::new("integrate");
    manifest.flag("bins", args.bins);
    manifest.flag("mode", &args.mode);
    manifest.flag("binarize", args.binarize);
    manifest.flag("sensor", format!("{}x{}", args.sensor.height, args.sensor.width));
    if let Some(d) = args.resize {
        manifest.flag("resize", format!("{}x{}", d.height, d.width));
    }

    let results = par_map(args.jobs, &files, |_, path| convert(args, mode, path))?;
    let mut out_labels = Labels::new();
    for (path, result) in files.iter().zip(results) {
        let rel = relative(&args.in_dir, path);
        manifest.inputs.push(rel.clone());
        match result {
            Ok(bytes) => {
                let name = output_name(&args.in_dir, path);
                let out: PathBuf = args.out_dir.join(&name);
                manifest.write_output(&args.out_dir, &out, &bytes)?;
                if let Some(class) = input_labels.as_ref().and_then(|l| l.get(&rel)) {
                    out_labels.insert(name, *class);
                }
            }
            Err(e) => {
                eprintln!("{rel}: {e:#}");
                manifest.failures.push(Failure { path: rel, error: format!("{e:#}") });
            }
        }
    }
    if input_labels.is_some() {
        let sidecar = labels::render(&out_labels);
        manifest.write_output(&args.out_dir, &args.out_dir.join(labels::SIDECAR), sidecar.as_bytes())?;
    }
    manifest.timing.insert("elapsed_ms".into(), start.elapsed().as_secs_f64() * 1e3);
    manifest.save(&args.out_dir)?;
    println!(
        "integrated={} failed={} out={}",
        files.len() - manifest.failures.len(),
        manifest.failures.len(),
        args.out_dir.display()
    );
    Ok(Outcome::from_failures(manifest.failures.len()))
}
