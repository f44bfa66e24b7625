//! Count-file parsing: comma-delimited rows `label,x1,x2` under a mandatory
//! header. Diagnostics carry 1-based line numbers.

use anyhow::{bail, Context, Result};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct CountRow {
    pub label: String,
    pub x1: u64,
    pub x2: u64,
}

pub fn parse_count_file(path: &Path) -> Result<Vec<CountRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_counts(&text)
}

fn parse_counts(text: &str) -> Result<Vec<CountRow>> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let n = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            let normalized: String = line.chars().filter(|c| !c.is_whitespace()).collect();
            if !normalized.eq_ignore_ascii_case("label,x1,x2") {
                bail!("line {n}: expected header `label,x1,x2`, got {line:?}");
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            bail!("line {n}: expected 3 fields `label,x1,x2`, got {}", fields.len());
        }
        if fields[0].is_empty() {
            bail!("line {n}: empty label");
        }
        let parse = |s: &str, name: &str| -> Result<u64> {
            s.parse()
                .with_context(|| format!("line {n}: {name} must be a nonnegative integer, got {s:?}"))
        };
        rows.push(CountRow {
            label: fields[0].to_string(),
            x1: parse(fields[1], "x1")?,
            x2: parse(fields[2], "x2")?,
        });
    }
    if !saw_header {
        bail!("no header line: expected `label,x1,x2`");
    }
    if rows.is_empty() {
        bail!("no data rows");
    }
    Ok(rows)
}
