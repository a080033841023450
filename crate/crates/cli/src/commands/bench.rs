use std::fs;
use std::time::Instant;

use anyhow::{bail, Result};
use nda_core::io::read_frames;
use nda_core::policy::augment_sample;
use nda_core::rng::RngKey;
use nda_core::{FrameTensor, LabeledSample, Policy};
use rand::Rng;
use serde_json::json;

use crate::util::{collect_files, has_suffix, usage, Outcome};
use crate::BenchArgs;

/// Per-sample cost reported for the reference CPU data loader.
pub const REFERENCE_MS: f64 = 1.7;

fn synthetic(count: usize) -> Vec<LabeledSample> {
    let mut rng = RngKey::new(0, 0, 0).rng();
    (0..count.min(256))
        .map(|i| {
            let data = (0..10 * 2 * 48 * 48).map(|_| u16::from(rng.random_bool(0.1))).collect();
            let f = FrameTensor::from_vec(10, 48, 48, data, true).expect("shape");
            LabeledSample::one_hot(f, i % 10, 10).expect("label")
        })
        .collect()
}

pub fn run(args: &BenchArgs) -> Result<Outcome> {
    let policy: Policy = args.policy.parse().map_err(|e| usage(format!("--policy: {e}")))?;
    let (pool, count) = match &args.in_dir {
        Some(dir) => {
            let files = collect_files(dir, |p| has_suffix(p, ".ndaf"))?;
            let pool = files
                .iter()
                .map(|p| Ok(LabeledSample::one_hot(read_frames(&fs::read(p)?)?, 0, 1)?))
                .collect::<Result<Vec<_>>>()?;
            let n = pool.len();
            (pool, n)
        }
        None => (synthetic(args.synthetic), args.synthetic),
    };
    if pool.is_empty() || count == 0 {
        bail!("no samples to benchmark");
    }

    let mut times = Vec::with_capacity(count * args.iters as usize);
    let mut active = 0u64;
    for iter in 0..u64::from(args.iters) {
        for i in 0..count {
            let sample = &pool[i % pool.len()];
            let partner = &pool[(i + 1) % pool.len()];
            let partner = (policy.cutmix && partner.frames.same_shape(&sample.frames)).then_some(partner);
            let index = iter * count as u64 + i as u64;
            let mut rng = policy.rng(index);
            let local = Policy { cutmix: partner.is_some(), ..policy.clone() };
            let start = Instant::now();
            let out = augment_sample(sample, partner, &local, &mut rng)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            active = active.wrapping_add(out.frames.active());
        }
    }
    times.sort_by(f64::total_cmp);
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let median = times[times.len() / 2];
    let p95 = times[(times.len() * 95 / 100).min(times.len() - 1)];
    let within = mean <= REFERENCE_MS;

    if args.json {
        let report = json!({
            "policy": policy.to_string(), "samples": count, "iters": args.iters,
            "mean_ms": mean, "median_ms": median, "p95_ms": p95,
            "reference_ms": REFERENCE_MS, "within_reference": within, "checksum": active,
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("policy={policy}");
        println!("samples={count} iters={}", args.iters);
        println!("mean_ms={mean:.4}");
        println!("median_ms={median:.4}");
        println!("p95_ms={p95:.4}");
        println!("reference_ms={REFERENCE_MS} within_reference={within}");
    }
    Ok(Outcome::Success)
}
