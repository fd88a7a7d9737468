//! The five subcommands. Each returns the process exit status.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fdprofile::analysis::{find_anomalous_beta_with, BetaSearchOptions};
use fdprofile::solve::{solve_farfield, solve_origin};
use fdprofile::sweep::{run_sweep, SolveKind, SweepPoint, SweepRow};
use fdprofile::{analyze, derive_params, invert_pointwise, Error, Profile, ProfileKind, ProfileParams, SolveReport, TerminalEvent, Variable};
use serde_json::Value;

use crate::config::{RunConfig, DEFAULT_TOL_BETA};
use crate::output::{num, read_profile, write_json, write_plots, write_profile};

/// Residual above which a stored or fresh profile fails verification.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const VERIFY: u8 = 2;
    pub const SOLVER: u8 = 3;
}

/// An error that ends the run with a specific exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: exit::USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => exit::USAGE,
            Error::BadBracket(_) => exit::VERIFY,
            _ => exit::SOLVER,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure { code: exit::USAGE, message: format!("{e:#}") }
    }
}

pub type Outcome = std::result::Result<u8, Failure>;

fn need<T: Clone>(value: &Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    value.clone().ok_or_else(|| Failure::usage(format!("missing --{flag}")))
}

fn params(cfg: &RunConfig) -> std::result::Result<ProfileParams, Failure> {
    let n = need(&cfg.n, "n")?;
    let m = need(&cfg.m, "m")?;
    Ok(derive_params(n, m, cfg.rho1.unwrap_or(1.0), cfg.beta.unwrap_or(0.0))?)
}

/// Creates the output directory and records the effective configuration in
/// `run.ini`, which `--config` accepts to repeat the run.
fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("run.ini"), cfg.to_ini()).context("writing run.ini")?;
    Ok(dir)
}

fn print_summary(report: &SolveReport) {
    println!(
        "terminal event: {} at r = {}",
        report.terminal_event,
        num(report.terminal_radius)
    );
    println!("residual: {} (at r = {})", num(report.residual.ode), num(report.residual.ode_at));
    println!(
        "decay: {:?} (log-slope {}), shape: {:?}",
        report.decay_class.class,
        num(report.decay_class.measured_slope),
        report.shape
    );
    for (name, verdict) in report.inequalities.verdicts() {
        if verdict.fails() {
            eprintln!("inequality {name} fails: {verdict:?}");
        }
    }
}

/// Exit status of a finished solve: verification failures first, then the
/// terminal event.
fn judge(report: &SolveReport) -> u8 {
    if report.inequalities.any_fails() || report.residual.ode > RESIDUAL_LIMIT {
        if report.residual.ode > RESIDUAL_LIMIT {
            eprintln!("residual {} exceeds {}", num(report.residual.ode), num(RESIDUAL_LIMIT));
        }
        exit::VERIFY
    } else if report.terminal_event != TerminalEvent::ReachedRmax {
        exit::SOLVER
    } else {
        exit::OK
    }
}

/// Writes CSVs, plots and the report of a (possibly partial) profile.
fn emit(dir: &Path, profile: &Profile) -> Result<SolveReport> {
    let report = analyze(profile);
    let f = profile.f_samples();
    write_profile(&dir.join("profile.csv"), &f)?;
    write_plots(dir, &f)?;
    if let Some(g) = &profile.inverted {
        write_profile(&dir.join("profile_g.csv"), g)?;
        write_plots(dir, g)?;
    }
    write_json(&dir.join("report.json"), &report)?;
    Ok(report)
}

fn finish(cfg: &RunConfig, result: fdprofile::Result<Profile>) -> Outcome {
    let (profile, failure) = match result {
        Ok(p) => (p, None),
        Err(Error::ContinuationFailed { event, radius, partial }) => {
            (*partial, Some(format!("continuation stopped at r = {}: {event}", num(radius))))
        }
        Err(e) => return Err(e.into()),
    };
    let dir = out_dir(cfg)?;
    let report = emit(&dir, &profile)?;
    print_summary(&report);
    if let Some(msg) = failure {
        eprintln!("{msg}; partial profile written to {}", dir.display());
    }
    Ok(judge(&report))
}

pub fn solve_origin_cmd(cfg: &RunConfig) -> Outcome {
    let p = params(cfg)?;
    let eta0 = cfg.eta0.unwrap_or(1.0);
    if !(eta0 > 0.0) {
        return Err(Failure::usage(format!("eta0 = {eta0} violates eta0 > 0")));
    }
    p.require_origin_window()?;
    finish(cfg, solve_origin(&p, eta0, cfg.rmax(), cfg.tol()))
}

pub fn solve_farfield_cmd(cfg: &RunConfig) -> Outcome {
    let p = params(cfg)?;
    let eta = need(&cfg.eta, "eta")?;
    if !(eta > 0.0) {
        return Err(Failure::usage(format!("eta = {eta} violates eta > 0")));
    }
    p.require_far_field_window()?;
    finish(cfg, solve_farfield(&p, eta, cfg.rmax(), cfg.tol()))
}

/// The origin window `(-rho1/2, threshold)` shrunk by 1% at each end.
pub fn default_bracket(p: &ProfileParams) -> (f64, f64) {
    let lo = -p.rho1() / 2.0;
    let hi = p.beta_threshold();
    let pad = 0.01 * (hi - lo);
    (lo + pad, hi - pad)
}

pub fn beta_find_cmd(cfg: &RunConfig) -> Outcome {
    let p = params(cfg)?;
    let bracket = cfg.bracket.map(|b| (b.0, b.1)).unwrap_or_else(|| default_bracket(&p));
    let mut opts = BetaSearchOptions { tol_beta: cfg.tol_beta.unwrap_or(DEFAULT_TOL_BETA), tol: cfg.tol(), ..Default::default() };
    if let Some(r) = cfg.rmax {
        opts.r_max = r;
    }
    let eta0 = cfg.eta0.unwrap_or(1.0);
    let search = find_anomalous_beta_with(p.n(), p.m(), p.rho1(), eta0, bracket, opts)?;
    let dir = out_dir(cfg)?;
    write_json(&dir.join("beta_find.json"), &search)?;
    println!("beta* = {}", num(search.beta));
    println!("bracket: [{}, {}] after {} probes", num(search.bracket.0), num(search.bracket.1), search.probes);
    Ok(exit::OK)
}

/// Reads the sidecar report of a stored profile.
fn read_sidecar(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn sidecar_params(v: &Value) -> std::result::Result<(ProfileParams, ProfileKind, f64), Failure> {
    let field = |path: &[&str]| {
        let mut cur = v;
        for k in path {
            cur = cur.get(k).ok_or_else(|| Failure::usage(format!("report lacks {}", path.join("."))))?;
        }
        Ok::<_, Failure>(cur)
    };
    let number = |path: &[&str]| {
        field(path)?.as_f64().ok_or_else(|| Failure::usage(format!("report field {} is not a number", path.join("."))))
    };
    let n = number(&["params", "n"])? as u32;
    let p = derive_params(n, number(&["params", "m"])?, number(&["params", "rho1"])?, number(&["params", "beta"])?)?;
    let kind: ProfileKind = serde_json::from_value(field(&["kind"])?.clone())
        .map_err(|e| Failure::usage(format!("report field kind: {e}")))?;
    Ok((p, kind, number(&["boundary"])?))
}

pub fn verify_cmd(cfg: &RunConfig) -> Outcome {
    let profile_path = need(&cfg.profile, "profile")?;
    let report_path = cfg.report.clone().unwrap_or_else(|| {
        profile_path.parent().unwrap_or(Path::new(".")).join("report.json")
    });
    let samples = read_profile(&profile_path)?;
    let sidecar = read_sidecar(&report_path)?;
    let (p, kind, boundary) = sidecar_params(&sidecar)?;
    let (f, g) = match (kind, samples.variable) {
        (ProfileKind::Origin, Variable::F) => (samples, None),
        (ProfileKind::Origin, Variable::G) => {
            return Err(Failure::usage("an origin profile has no inverted samples to verify"));
        }
        (ProfileKind::FarField, Variable::F) => {
            let g = invert_pointwise(&samples, &p)?;
            (samples, Some(g))
        }
        (ProfileKind::FarField, Variable::G) => (invert_pointwise(&samples, &p)?, Some(samples)),
    };
    let mut profile = Profile::from_samples(kind, p, boundary, f, g);
    if let Some(ev) = sidecar.get("terminal_event") {
        profile.terminal_event = serde_json::from_value(ev.clone())
            .map_err(|e| Failure::usage(format!("report field terminal_event: {e}")))?;
    }
    profile.tol = sidecar.get("tol").and_then(Value::as_f64).unwrap_or(f64::NAN);
    let report = analyze(&profile);
    if cfg.out.is_some() {
        let dir = out_dir(cfg)?;
        write_profile(&dir.join("profile.csv"), &profile.f_samples())?;
        if let Some(g) = &profile.inverted {
            write_profile(&dir.join("profile_g.csv"), g)?;
        }
        write_json(&dir.join("report.json"), &report)?;
    }
    print_summary(&report);
    let bad = report.inequalities.any_fails() || report.residual.ode > RESIDUAL_LIMIT;
    if report.residual.ode > RESIDUAL_LIMIT {
        eprintln!("residual check fails: {} > {}", num(report.residual.ode), num(RESIDUAL_LIMIT));
    }
    Ok(if bad { exit::VERIFY } else { exit::OK })
}

fn parse_kind(kind: Option<&str>) -> std::result::Result<SolveKind, Failure> {
    match kind.unwrap_or("origin") {
        "origin" => Ok(SolveKind::Origin),
        "far-field" | "farfield" | "far_field" => Ok(SolveKind::FarField),
        other => Err(Failure::usage(format!("unknown kind {other:?}; expected origin or far-field"))),
    }
}

pub fn sweep_points(cfg: &RunConfig) -> std::result::Result<Vec<SweepPoint>, Failure> {
    let kind = parse_kind(cfg.kind.as_deref())?;
    let ns = cfg.n_values.clone().or(cfg.n.map(|n| vec![n])).unwrap_or_else(|| vec![4]);
    let ms = need(&cfg.m_range, "m-range")?.points();
    let betas = need(&cfg.beta_range, "beta-range")?.points();
    if ns.is_empty() || ms.is_empty() || betas.is_empty() {
        return Err(Failure::usage("sweep axis is empty"));
    }
    let rho1 = cfg.rho1.unwrap_or(1.0);
    let boundary = cfg.boundary.unwrap_or(1.0);
    let mut pts = Vec::new();
    for &n in &ns {
        for &m in &ms {
            for &beta in &betas {
                pts.push(SweepPoint { kind, n, m, rho1, beta, boundary });
            }
        }
    }
    Ok(pts)
}

fn summary_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record([
        "kind", "n", "m", "rho1", "beta", "boundary", "terminal_event", "terminal_radius", "residual", "L1",
        "L1_err", "L2", "L2_err", "L3", "L3_err", "decay_class", "log_slope", "shape", "passes", "error",
    ])?;
    for row in rows {
        let pt = &row.point;
        let kind = match pt.kind {
            SolveKind::Origin => "origin",
            SolveKind::FarField => "far-field",
        };
        let mut rec = vec![kind.to_string(), pt.n.to_string(), num(pt.m), num(pt.rho1), num(pt.beta), num(pt.boundary)];
        match &row.outcome {
            Ok(rep) => {
                let limit = |l: Option<fdprofile::analysis::LimitEstimate>| match l {
                    Some(e) => [num(e.value), num(e.error)],
                    None => [String::new(), String::new()],
                };
                let lims = rep.limits.as_ref();
                rec.push(rep.terminal_event.to_string());
                rec.push(num(rep.terminal_radius));
                rec.push(num(rep.residual.ode));
                rec.extend(limit(lims.and_then(|l| l.l1)));
                rec.extend(limit(lims.and_then(|l| l.l2)));
                rec.extend(limit(lims.and_then(|l| l.l3)));
                rec.push(format!("{:?}", rep.decay_class.class));
                rec.push(num(rep.decay_class.measured_slope));
                rec.push(match rep.shape {
                    fdprofile::analysis::Shape::InteriorMaximum { r0 } => format!("interior_maximum@{}", num(r0)),
                    other => format!("{other:?}"),
                });
                rec.push(rep.checks_pass(RESIDUAL_LIMIT).to_string());
                rec.push(String::new());
            }
            Err(msg) => {
                rec.extend(std::iter::repeat_n(String::new(), 12));
                rec.push("false".to_string());
                rec.push(msg.clone());
            }
        }
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}

pub fn sweep_cmd(cfg: &RunConfig) -> Outcome {
    let pts = sweep_points(cfg)?;
    if cfg.jobs == Some(0) {
        return Err(Failure::usage("jobs = 0 violates jobs >= 1"));
    }
    let rows = run_sweep(&pts, cfg.rmax(), cfg.tol(), cfg.jobs);
    let dir = out_dir(cfg)?;
    let reports = dir.join("reports");
    fs::create_dir_all(&reports).with_context(|| format!("creating {}", reports.display()))?;
    for (i, row) in rows.iter().enumerate() {
        if let Ok(rep) = &row.outcome {
            write_json(&reports.join(format!("{i:04}.json")), rep)?;
        }
    }
    fs::write(dir.join("summary.csv"), summary_csv(&rows)?).context("writing summary.csv")?;
    let passed = rows.iter().filter(|r| r.outcome.as_ref().is_ok_and(|rep| rep.checks_pass(RESIDUAL_LIMIT))).count();
    println!("{} tuples, {passed} pass; summary in {}", rows.len(), dir.join("summary.csv").display());
    Ok(if passed == rows.len() { exit::OK } else { exit::VERIFY })
}
