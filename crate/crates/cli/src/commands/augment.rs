use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use nda_core::io::{read_frames, write_frames};
use nda_core::policy::augment_sample;
use nda_core::rng::{stream, RngKey};
use nda_core::{FrameTensor, LabeledSample, Policy};
use rand::seq::SliceRandom;

use crate::labels::{self, Labels};
use crate::manifest::{relative, Failure, RunManifest};
use crate::util::{collect_files, has_suffix, par_map, usage, Outcome};
use crate::AugmentArgs;

/// Config file first, then `--policy`, then `--seed`; later settings win.
pub fn resolve_policy(args: &AugmentArgs) -> Result<Policy> {
    let mut text = String::new();
    if let Some(path) = &args.policy_file {
        text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        text.push('\n');
    }
    if let Some(p) = &args.policy {
        text.push_str(p);
    }
    let mut policy: Policy = text.parse().map_err(|e| usage(format!("--policy: {e}")))?;
    if let Some(seed) = args.seed {
        policy.seed = seed;
    }
    Ok(policy)
}

struct Input {
    name: String,
    sample: LabeledSample,
}

pub fn run(args: &AugmentArgs) -> Result<Outcome> {
    let start = Instant::now();
    let policy = resolve_policy(args)?;
    if args.copies == 0 {
        return Err(usage("--copies must be at least 1"));
    }
    let label_path: Option<PathBuf> = args
        .labels
        .clone()
        .or_else(|| Some(args.in_dir.join(labels::SIDECAR)).filter(|p| p.is_file()));
    if policy.cutmix && label_path.is_none() {
        return Err(usage("CutMix is enabled but no label sidecar was found (use --labels or cutmix=off)"));
    }
    let sidecar: Option<Labels> = label_path.as_deref().map(labels::load).transpose()?;
    let num_classes = match (&sidecar, args.num_classes) {
        (_, Some(n)) => n,
        (Some(l), None) => l.values().max().map_or(1, |m| m + 1),
        (None, None) => 1,
    };

    let files = collect_files(&args.in_dir, |p| has_suffix(p, ".ndaf"))?;
    let mut manifest = RunManifest::new("augment");
    manifest.policy = Some(policy.to_string());
    manifest.seed = Some(policy.seed);
    manifest.flag("copies", args.copies);
    manifest.flag("num_classes", num_classes);

    let mut inputs = Vec::new();
    for path in &files {
        let name = relative(&args.in_dir, path);
        manifest.inputs.push(name.clone());
        let loaded = (|| -> Result<LabeledSample> {
            let frames: FrameTensor = read_frames(&fs::read(path)?)?;
            let class = match &sidecar {
                Some(l) => *l.get(&name).ok_or_else(|| anyhow!("no label in sidecar"))?,
                None => 0,
            };
            Ok(LabeledSample::one_hot(frames, class, num_classes)?)
        })();
        match loaded {
            Ok(sample) => inputs.push(Input { name, sample }),
            Err(e) => {
                eprintln!("{name}: {e:#}");
                manifest.failures.push(Failure { path: name, error: format!("{e:#}") });
            }
        }
    }

    let n = inputs.len();
    let mut tasks = Vec::with_capacity(n * args.copies as usize);
    for copy in 0..u64::from(args.copies) {
        let mut partners: Vec<usize> = (0..n).collect();
        partners.shuffle(&mut RngKey::new(policy.seed, copy, stream::PARTNER).rng());
        tasks.extend((0..n).map(|i| (copy, i, partners[i])));
    }

    let results = par_map(args.jobs, &tasks, |_, &(copy, i, partner)| {
        let index = copy * n as u64 + i as u64;
        let partner = policy.cutmix.then(|| &inputs[partner].sample);
        augment_sample(&inputs[i].sample, partner, &policy, &mut policy.rng(index))
    })?;

    let mut soft = Vec::new();
    for (&(copy, i, _), result) in tasks.iter().zip(results) {
        let name = &inputs[i].name;
        match result {
            Ok(sample) => {
                let out_name = format!("{}.aug{copy}.ndaf", name.strip_suffix(".ndaf").unwrap_or(name));
                manifest.write_output(&args.out_dir, &args.out_dir.join(&out_name), &write_frames(&sample.frames))?;
                soft.push((out_name, sample.label().to_vec()));
            }
            Err(e) => {
                eprintln!("{name} (copy {copy}): {e}");
                manifest.failures.push(Failure { path: name.clone(), error: e.to_string() });
            }
        }
    }
    if sidecar.is_some() {
        let text = labels::render_soft(&soft);
        manifest.write_output(&args.out_dir, &args.out_dir.join(labels::SOFT_SIDECAR), text.as_bytes())?;
    }
    manifest.timing.insert("elapsed_ms".into(), start.elapsed().as_secs_f64() * 1e3);
    manifest.save(&args.out_dir)?;
    println!(
        "augmented={} failed={} policy={policy}",
        soft.len(),
        manifest.failures.len()
    );
    Ok(Outcome::from_failures(manifest.failures.len()))
}
