//! Label sidecar: one `relative/path class_index` pair per line, `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const SIDECAR: &str = "labels.txt";
pub const SOFT_SIDECAR: &str = "labels.soft.txt";

pub type Labels = BTreeMap<String, usize>;

pub fn parse(text: &str) -> Result<Labels> {
    let mut labels = Labels::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((name, class)) = line.rsplit_once(char::is_whitespace) else {
            bail!("line {}: expected `name class`", i + 1);
        };
        let class = class
            .parse()
            .with_context(|| format!("line {}: bad class index `{class}`", i + 1))?;
        labels.insert(name.trim().to_string(), class);
    }
    Ok(labels)
}

pub fn load(path: &Path) -> Result<Labels> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn render(labels: &Labels) -> String {
    labels.iter().fold(String::new(), |mut out, (name, class)| {
        let _ = writeln!(out, "{name} {class}");
        out
    })
}

pub fn render_soft(rows: &[(String, Vec<f64>)]) -> String {
    rows.iter().fold(String::new(), |mut out, (name, weights)| {
        let w: Vec<String> = weights.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "{name} {}", w.join(" "));
        out
    })
}
