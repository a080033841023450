use std::fs;

use anyhow::Result;
use nda_core::rng::{stream, RngKey};
use rand::seq::SliceRandom;

use crate::manifest::{relative, RunManifest};
use crate::util::{collect_files, has_suffix, usage, Outcome};
use crate::SplitArgs;

const SAMPLE_EXTS: [&str; 3] = [".ndaf", ".bin", ".evt.txt"];

/// Shuffles the sample list with the seed and writes `train.txt` / `valid.txt`.
pub fn run(args: &SplitArgs) -> Result<Outcome> {
    if !(0.0..=1.0).contains(&args.train) {
        return Err(usage(format!("--train {} outside [0, 1]", args.train)));
    }
    let mut files: Vec<String> = collect_files(&args.in_dir, |p| SAMPLE_EXTS.iter().any(|e| has_suffix(p, e)))?
        .iter()
        .map(|p| relative(&args.in_dir, p))
        .collect();
    files.shuffle(&mut RngKey::new(args.seed, 0, stream::SPLIT).rng());
    let n_train = (files.len() as f64 * args.train).round() as usize;
    let (train, valid) = files.split_at(n_train);

    let mut manifest = RunManifest::new("split");
    manifest.seed = Some(args.seed);
    manifest.flag("train", args.train);
    manifest.inputs = files.clone();
    fs::create_dir_all(&args.out_dir)?;
    for (name, list) in [("train.txt", train), ("valid.txt", valid)] {
        let mut sorted = list.to_vec();
        sorted.sort();
        let text: String = sorted.iter().map(|f| format!("{f}\n")).collect();
        manifest.write_output(&args.out_dir, &args.out_dir.join(name), text.as_bytes())?;
    }
    manifest.save(&args.out_dir)?;
    println!("train={} valid={}", train.len(), valid.len());
    Ok(Outcome::Success)
}
