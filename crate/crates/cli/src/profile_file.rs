//! Sensor profile files.
//!
//! ```text
//! # comment lines start with '#'
//! pd,pf
//! 0.9,0.1
//! 0.8,0.2
//! ```
//!
//! One sensor per data row, sensor 0 first.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fusion_core::SensorProfile;

pub fn parse_profile(text: &str) -> Result<SensorProfile> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().context("reading profile header")?.clone();
    if header.len() != 2 || &header[0] != "pd" || &header[1] != "pf" {
        bail!("profile header must be `pd,pf`, found `{}`", header.iter().collect::<Vec<_>>().join(","));
    }
    let (mut pd, mut pf) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("reading profile row {}", row + 1))?;
        let field = |i: usize| -> Result<f64> {
            let raw = &record[i];
            raw.parse::<f64>()
                .with_context(|| format!("row {}: `{raw}` is not a number", row + 1))
        };
        pd.push(field(0)?);
        pf.push(field(1)?);
    }
    if pd.is_empty() {
        bail!("profile has no sensor rows");
    }
    Ok(SensorProfile::new(pd, pf)?)
}

pub fn read_profile(path: &Path) -> Result<SensorProfile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read profile {}", path.display()))?;
    parse_profile(&text).with_context(|| format!("invalid profile {}", path.display()))
}

/// Writes a profile that [`parse_profile`] reads back unchanged.
pub fn format_profile(profile: &SensorProfile) -> String {
    let mut out = String::from("pd,pf\n");
    for (d, f) in profile.pd().iter().zip(profile.pf()) {
        out.push_str(&format!("{d},{f}\n"));
    }
    out
}
