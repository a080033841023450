use std::fs;

use anyhow::{Context, Result};
use nda_core::sim::{default_scene_suite, default_suite_transforms, ordering_holds, run_suite};
use nda_core::SimConfig;
use serde_json::json;

use crate::util::{usage, Outcome};
use crate::VerifyArgs;

pub fn run(args: &VerifyArgs) -> Result<Outcome> {
    if args.scene_suite != "default" {
        return Err(usage(format!("unknown scene suite `{}` (only `default`)", args.scene_suite)));
    }
    let cfg = SimConfig {
        alpha: args.alpha,
        ..SimConfig::default()
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let scenes = default_scene_suite();
    let rows = run_suite(&scenes, &default_suite_transforms(), &cfg)?;

    let names: Vec<&str> = scenes.iter().map(|s| s.name).collect();
    println!("{:<10} {}  {:>6} {:>6}", "transform", names.iter().map(|n| format!("{n:>20}")).collect::<String>(), "mean", "min");
    for row in &rows {
        let cells: String = row.scenes.iter().map(|(_, r)| format!("{:>20.4}", r.f1)).collect();
        println!("{:<10} {cells}  {:>6.4} {:>6.4}", row.name, row.mean_f1(), row.min_f1());
    }
    let ok = ordering_holds(&rows);
    println!("ordering geometric > photometric: {}", if ok { "holds" } else { "VIOLATED" });

    if let Some(path) = &args.report {
        let report = json!({
            "alpha": cfg.alpha,
            "log_epsilon": cfg.log_epsilon,
            "scenes": names,
            "ordering_holds": ok,
            "rows": rows.iter().map(|r| json!({
                "name": r.name,
                "transform": r.transform.to_string(),
                "photometric": r.transform.is_photometric(),
                "mean_f1": r.mean_f1(),
                "min_f1": r.min_f1(),
                "scenes": r.scenes.iter().map(|(s, m)| json!({
                    "scene": s, "f1": m.f1, "lhs_count": m.lhs_count, "rhs_count": m.rhs_count,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if ok { Outcome::Success } else { Outcome::Partial })
}
