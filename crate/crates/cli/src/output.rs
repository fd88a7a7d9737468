//! Profile CSV, report JSON and plot data files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fdprofile::{RadialSamples, Variable};

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

fn header(variable: Variable) -> [&'static str; 3] {
    match variable {
        Variable::F => ["r", "f", "f_r"],
        Variable::G => ["r", "g", "g_r"],
    }
}

pub fn profile_csv(s: &RadialSamples) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header(s.variable))?;
    for i in 0..s.len() {
        w.write_record([num(s.radii[i]), num(s.values[i]), num(s.derivs[i])])?;
    }
    Ok(w.into_inner()?)
}

pub fn write_profile(path: &Path, s: &RadialSamples) -> Result<()> {
    fs::write(path, profile_csv(s)?).with_context(|| format!("writing {}", path.display()))
}

/// Reads a profile CSV. Errors name the offending line.
pub fn read_profile(path: &Path) -> Result<RadialSamples> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let head: Vec<String> = rd.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let variable = if head == header(Variable::F) {
        Variable::F
    } else if head == header(Variable::G) {
        Variable::G
    } else {
        bail!("{}: header {:?} is neither r,f,f_r nor r,g,g_r", path.display(), head.join(","));
    };
    let mut s = RadialSamples { variable, radii: Vec::new(), values: Vec::new(), derivs: Vec::new() };
    for (i, rec) in rd.records().enumerate() {
        // line 1 is the header
        let line = i + 2;
        let rec = rec.with_context(|| format!("{}: row at line {line} is malformed", path.display()))?;
        if rec.len() != 3 {
            bail!("{}: row at line {line} has {} fields, expected 3", path.display(), rec.len());
        }
        let mut x = [0.0; 3];
        for (k, field) in rec.iter().enumerate() {
            x[k] = field.trim().parse::<f64>().ok().filter(|v| v.is_finite()).with_context(|| {
                format!("{}: row at line {line}: {:?} in column {} is not a finite number", path.display(), field, head[k])
            })?;
        }
        if let Some(prev) = s.radii.last() {
            if !(x[0] > *prev) {
                bail!("{}: row at line {line}: radius {} does not increase", path.display(), num(x[0]));
            }
        }
        if !(x[0] > 0.0 && x[1] > 0.0) {
            bail!("{}: row at line {line}: radius and value must be positive", path.display());
        }
        s.radii.push(x[0]);
        s.values.push(x[1]);
        s.derivs.push(x[2]);
    }
    if s.len() < 7 {
        bail!("{}: {} rows, at least 7 are needed", path.display(), s.len());
    }
    Ok(s)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Two-column data files for the profile, its log-log decay and the
/// log-slope `r f'/f`.
pub fn write_plots(dir: &Path, s: &RadialSamples) -> Result<()> {
    let name = match s.variable {
        Variable::F => "f",
        Variable::G => "g",
    };
    let mut profile = format!("# r {name}\n");
    let mut loglog = format!("# log10(r) log10({name})\n");
    let mut slope = format!("# r r*{name}_r/{name}\n");
    for i in 0..s.len() {
        let (r, v, dv) = (s.radii[i], s.values[i], s.derivs[i]);
        profile.push_str(&format!("{} {}\n", num(r), num(v)));
        if r > 0.0 && v > 0.0 {
            loglog.push_str(&format!("{} {}\n", num(r.log10()), num(v.log10())));
            slope.push_str(&format!("{} {}\n", num(r), num(r * dv / v)));
        }
    }
    let suffix = if name == "f" { String::new() } else { format!("_{name}") };
    for (kind, text) in [("profile", profile), ("loglog", loglog), ("slope", slope)] {
        let path = dir.join(format!("plot_{kind}{suffix}.dat"));
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_is_byte_identical() {
        let s = RadialSamples {
            variable: Variable::G,
            radii: (1..=9).map(|i| 0.1 * f64::from(i)).collect(),
            values: (1..=9).map(|i| 1.0 / f64::from(i) / 3.0).collect(),
            derivs: (1..=9).map(|i| -1e-17 * f64::from(i)).collect(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_profile(&path, &s).unwrap();
        let back = read_profile(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(profile_csv(&back).unwrap(), fs::read(&path).unwrap());
        assert!(fs::read_to_string(&path).unwrap().starts_with("r,g,g_r\n"));
    }

    #[test]
    fn bad_row_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let mut text = String::from("r,f,f_r\n");
        for i in 1..=8 {
            if i == 4 {
                text.push_str("0.4,abc,-1\n");
            } else {
                text.push_str(&format!("{},1,-1\n", 0.1 * f64::from(i)));
            }
        }
        fs::write(&path, text).unwrap();
        let err = format!("{:#}", read_profile(&path).unwrap_err());
        assert!(err.contains("line 5"), "{err}");
    }
}
