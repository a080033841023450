use std::fs;

use anyhow::{anyhow, Result};
use nda_core::io::read_frames;
use nda_core::metrics::{fire_rate, synops_estimate, LayerShape};
use nda_core::Error as CoreError;
use serde_json::json;

use crate::manifest::relative;
use crate::util::{collect_files, has_suffix, Outcome};
use crate::StatsArgs;

pub fn run(args: &StatsArgs) -> Result<Outcome> {
    let files = collect_files(&args.in_dir, |p| has_suffix(p, ".ndaf"))?;
    let mut failures = 0;
    let mut rows = Vec::new();
    for path in &files {
        let name = relative(&args.in_dir, path);
        let result = (|| -> Result<serde_json::Value> {
            let frames = read_frames(&fs::read(path)?)?;
            let rate = fire_rate(&frames).map_err(|e| match e {
                CoreError::NotBinary(v) => anyhow!(
                    "holds event counts (found entry {v}); fire rate needs a binarized tensor, re-run integrate with --binarize"
                ),
                other => other.into(),
            })?;
            let mut row = json!({
                "file": name,
                "shape": frames.shape(),
                "active": rate.active,
                "total": rate.total,
                "fire_rate": rate.value(),
                "sparsity": rate.sparsity(),
            });
            if let Some(macs) = args.macs {
                row["synops"] = json!(synops_estimate(&[(LayerShape::new("input", macs), rate.value())])?);
            }
            Ok(row)
        })();
        match result {
            Ok(row) => {
                if !args.json {
                    let shape = frames_shape(&row);
                    print!(
                        "file={name} shape={shape} active={} total={} fire_rate={} rational={}/{} sparsity={}",
                        row["active"], row["total"], row["fire_rate"], row["active"], row["total"], row["sparsity"]
                    );
                    if let Some(s) = row.get("synops") {
                        print!(" synops={s}");
                    }
                    println!();
                }
                rows.push(row);
            }
            Err(e) => {
                failures += 1;
                eprintln!("{name}: {e:#}");
                rows.push(json!({ "file": name, "error": format!("{e:#}") }));
            }
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&json!({ "files": rows }))?);
    }
    Ok(Outcome::from_failures(failures))
}

fn frames_shape(row: &serde_json::Value) -> String {
    row["shape"]
        .as_array()
        .map(|a| a.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x"))
        .unwrap_or_default()
}
