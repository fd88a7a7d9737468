//! Run configuration: command-line values layered over an INI file.
//!
//! The file is flat `key = value` text whose keys are the long flag names
//! (`tol`, `rmax`, `eta0`, `beta-range`, ...). Flags given on the command
//! line win over the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ini::Ini;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_RMAX: f64 = 100.0;
pub const DEFAULT_TOL_BETA: f64 = 1e-4;

/// Inclusive range sampled at `count` equally spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.lo],
            c => (0..c)
                .map(|i| {
                    let t = i as f64 / (c - 1) as f64;
                    self.lo * (1.0 - t) + self.hi * t
                })
                .collect(),
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected LO,HI,COUNT, got {s:?}"));
        }
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Axis {
            lo: num(parts[0])?,
            hi: num(parts[1])?,
            count: parts[2].parse().map_err(|e| format!("{:?}: {e}", parts[2]))?,
        })
    }
}

/// A `(lo, hi)` pair written `LO,HI`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket(pub f64, pub f64);

impl std::str::FromStr for Bracket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got {s:?}"))?;
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Bracket(num(a)?, num(b)?))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub tol: Option<f64>,
    pub rmax: Option<f64>,
    pub out: Option<PathBuf>,
    pub n: Option<u32>,
    pub m: Option<f64>,
    pub rho1: Option<f64>,
    pub beta: Option<f64>,
    pub eta0: Option<f64>,
    pub eta: Option<f64>,
    pub bracket: Option<Bracket>,
    pub tol_beta: Option<f64>,
    pub profile: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub kind: Option<String>,
    pub n_values: Option<Vec<u32>>,
    pub m_range: Option<Axis>,
    pub beta_range: Option<Axis>,
    pub boundary: Option<f64>,
    pub jobs: Option<usize>,
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

impl RunConfig {
    /// Fields set in `self` win; the rest come from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            tol: self.tol.or(base.tol),
            rmax: self.rmax.or(base.rmax),
            out: self.out.or(base.out),
            n: self.n.or(base.n),
            m: self.m.or(base.m),
            rho1: self.rho1.or(base.rho1),
            beta: self.beta.or(base.beta),
            eta0: self.eta0.or(base.eta0),
            eta: self.eta.or(base.eta),
            bracket: self.bracket.or(base.bracket),
            tol_beta: self.tol_beta.or(base.tol_beta),
            profile: self.profile.or(base.profile),
            report: self.report.or(base.report),
            kind: self.kind.or(base.kind),
            n_values: self.n_values.or(base.n_values),
            m_range: self.m_range.or(base.m_range),
            beta_range: self.beta_range.or(base.beta_range),
            boundary: self.boundary.or(base.boundary),
            jobs: self.jobs.or(base.jobs),
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let ini = Ini::load_from_str(text)?;
        let mut cfg = RunConfig::default();
        for (section, props) in ini.iter() {
            if let Some(name) = section {
                bail!("sections are not supported (found [{name}]); use flat key = value lines");
            }
            for (key, value) in props.iter() {
                cfg.set(key, value).with_context(|| format!("key {key:?}"))?;
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn f(v: &str) -> Result<f64> {
            Ok(v.parse::<f64>()?)
        }
        let value = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "tol" => self.tol = Some(f(value)?),
            "rmax" => self.rmax = Some(f(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "n" => self.n = Some(value.parse()?),
            "m" => self.m = Some(f(value)?),
            "rho1" => self.rho1 = Some(f(value)?),
            "beta" => self.beta = Some(f(value)?),
            "eta0" => self.eta0 = Some(f(value)?),
            "eta" => self.eta = Some(f(value)?),
            "bracket" => self.bracket = Some(value.parse().map_err(anyhow::Error::msg)?),
            "tol-beta" => self.tol_beta = Some(f(value)?),
            "profile" => self.profile = Some(PathBuf::from(value)),
            "report" => self.report = Some(PathBuf::from(value)),
            "kind" => self.kind = Some(value.to_string()),
            "n-values" => {
                let list: Result<Vec<u32>, _> = value.split(',').map(|x| x.trim().parse()).collect();
                self.n_values = Some(list?);
            }
            "m-range" => self.m_range = Some(value.parse().map_err(anyhow::Error::msg)?),
            "beta-range" => self.beta_range = Some(value.parse().map_err(anyhow::Error::msg)?),
            "boundary" => self.boundary = Some(f(value)?),
            "jobs" => self.jobs = Some(value.parse()?),
            other => bail!("unknown key {other:?}"),
        }
        Ok(())
    }

    /// The config as INI text; numbers use shortest round-trip form.
    pub fn to_ini(&self) -> String {
        let mut ini = Ini::new();
        {
            let mut s = ini.with_section(None::<String>);
            let mut put = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    s.set(k, v);
                }
            };
            put("tol", self.tol.map(num));
            put("rmax", self.rmax.map(num));
            put("out", self.out.as_ref().map(|p| p.display().to_string()));
            put("n", self.n.map(|n| n.to_string()));
            put("m", self.m.map(num));
            put("rho1", self.rho1.map(num));
            put("beta", self.beta.map(num));
            put("eta0", self.eta0.map(num));
            put("eta", self.eta.map(num));
            put("bracket", self.bracket.map(|b| format!("{},{}", num(b.0), num(b.1))));
            put("tol-beta", self.tol_beta.map(num));
            put("profile", self.profile.as_ref().map(|p| p.display().to_string()));
            put("report", self.report.as_ref().map(|p| p.display().to_string()));
            put("kind", self.kind.clone());
            put(
                "n-values",
                self.n_values.as_ref().map(|v| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")),
            );
            put("m-range", self.m_range.map(|a| format!("{},{},{}", num(a.lo), num(a.hi), a.count)));
            put("beta-range", self.beta_range.map(|a| format!("{},{},{}", num(a.lo), num(a.hi), a.count)));
            put("boundary", self.boundary.map(num));
            put("jobs", self.jobs.map(|j| j.to_string()));
        }
        let mut buf = Vec::new();
        ini.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ini output is utf-8")
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn rmax(&self) -> f64 {
        self.rmax.unwrap_or(DEFAULT_RMAX)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_flat_file() {
        let cfg = RunConfig::parse("tol = 1e-8\nrmax=50\nn = 4\nm = 0.25\nbeta-range = -0.1, 0.2, 3\n").unwrap();
        assert_eq!(cfg.tol, Some(1e-8));
        assert_eq!(cfg.rmax, Some(50.0));
        assert_eq!(cfg.n, Some(4));
        let pts = cfg.beta_range.unwrap().points();
        assert_eq!((pts.len(), pts[0], pts[2]), (3, -0.1, 0.2));
        assert!((pts[1] - 0.05).abs() < 1e-16);
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(RunConfig::parse("tolerance = 1\n").is_err());
        assert!(RunConfig::parse("[solve]\ntol = 1\n").is_err());
        assert!(RunConfig::parse("tol = abc\n").is_err());
    }

    #[test]
    fn command_line_wins() {
        let file = RunConfig { tol: Some(1e-6), rmax: Some(10.0), ..Default::default() };
        let cli = RunConfig { tol: Some(1e-9), ..Default::default() };
        let merged = cli.over(file);
        assert_eq!(merged.tol, Some(1e-9));
        assert_eq!(merged.rmax, Some(10.0));
    }

    #[test]
    fn empty_axis_has_no_points() {
        assert!(Axis { lo: 0.0, hi: 1.0, count: 0 }.points().is_empty());
        assert_eq!(Axis { lo: 0.3, hi: 1.0, count: 1 }.points(), vec![0.3]);
    }

    proptest! {
        #[test]
        fn numbers_roundtrip_through_the_file(
            tol in 1e-14f64..1.0,
            m in 1e-3f64..1.0,
            beta in -1e3f64..1e3,
            lo in -1.0f64..1.0,
            hi in -1.0f64..1.0,
            count in 0usize..50,
            jobs in 1usize..64,
        ) {
            let cfg = RunConfig {
                tol: Some(tol),
                m: Some(m),
                beta: Some(beta),
                eta: Some(tol * 4096.0),
                bracket: Some(Bracket(lo, hi)),
                m_range: Some(Axis { lo, hi, count }),
                n_values: Some(vec![3, 4, 5]),
                jobs: Some(jobs),
                ..Default::default()
            };
            let back = RunConfig::parse(&cfg.to_ini()).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.to_ini(), cfg.to_ini());
        }
    }
}
