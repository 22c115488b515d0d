//! Command runners. Each returns the files it wrote and a one-line summary.

use crate::config::{AuditName, ConfigErrors, ExperimentConfig, Format, InitSpec, MapKind};
use crate::output::to_json;
use marketdyn::audits::{
    audit_alt2_mean, audit_crossings, audit_fraction_bounds, audit_mean_volume, audit_nonsym_bounds,
    audit_price_product, audit_ratio_contraction, audit_rho_bounds, find_periodic_orbit, uniform_rho_bound,
};
use marketdyn::dynamics::{project_to_skew, random_state, simulate, simulate_alt2, MarketState, ModelSpec, Orbit};
use marketdyn::families::{validate_f, validate_g, GMapFamily};
use marketdyn::stability::{analyze_stability, corroborate, Corroboration, StabilityReport};
use marketdyn::{AuditReport, DynamicsError, PeriodicError, StabilityError, Status};
use rayon::prelude::*;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<ConfigErrors> for CliError {
    fn from(e: ConfigErrors) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidState(_) | DynamicsError::InvalidModel(_) => CliError::Config(e.to_string()),
            DynamicsError::Csv(_) => CliError::Io(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Precondition(_) | StabilityError::Domain(_) | StabilityError::StepSize(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<PeriodicError> for CliError {
    fn from(e: PeriodicError) -> Self {
        match e {
            PeriodicError::Precondition(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

/// Flags shared by every command; they take precedence over the config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    /// Directory that relative paths inside the config are resolved against.
    pub base: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// 0 when everything applicable passed, 1 when an audit failed.
    pub exit: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

fn out_dir(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let dir = opts.out.clone().or_else(|| cfg.out_dir.as_ref().map(|d| opts.base.join(d))).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write(path: &Path, body: &[u8]) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn json<T: Serialize + ?Sized>(v: &T) -> Result<String, CliError> {
    to_json(v).map_err(|e| CliError::Numeric(format!("serialization: {e}")))
}

fn format_of(cfg: &ExperimentConfig, opts: &RunOptions) -> Format {
    opts.format.or(cfg.format).unwrap_or(Format::Csv)
}

#[derive(Serialize)]
struct InitMeta {
    source: &'static str,
    seed: Option<u64>,
    x_range: Option<(f64, f64)>,
    p_range: Option<(f64, f64)>,
    x: Vec<f64>,
    p: Vec<f64>,
}

/// The initial state and how it was obtained.
fn initial_state(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(MarketState, InitMeta), CliError> {
    match &cfg.init {
        InitSpec::Explicit(s) => Ok((
            s.clone(),
            InitMeta { source: "explicit", seed: None, x_range: None, p_range: None, x: s.x.clone(), p: s.p.clone() },
        )),
        InitSpec::Sampled { seed, x_range, p_range } => {
            let seed = opts.seed.or(*seed).ok_or_else(|| {
                CliError::Config("no initial state: set init.x and init.p, or a seed".into())
            })?;
            let s = random_state(cfg.model.n, seed, *x_range, *p_range)?;
            let meta = InitMeta {
                source: "sampled",
                seed: Some(seed),
                x_range: Some(*x_range),
                p_range: Some(*p_range),
                x: s.x.clone(),
                p: s.p.clone(),
            };
            Ok((s, meta))
        }
    }
}

fn run_orbit(model: &ModelSpec, cfg: &ExperimentConfig, s0: &MarketState) -> Result<Orbit, CliError> {
    Ok(match cfg.map {
        MapKind::Full => simulate(model, s0, cfg.steps, cfg.record_every)?,
        MapKind::Alt2 => simulate_alt2(model, s0, cfg.steps, cfg.record_every)?,
    })
}

#[derive(Serialize)]
struct SimulateMeta<'a> {
    command: &'static str,
    model: &'a ModelSpec,
    theta: Option<f64>,
    init: InitMeta,
    steps: u64,
    record_every: u64,
    map: &'static str,
    rows: usize,
}

fn map_name(m: MapKind) -> &'static str {
    match m {
        MapKind::Full => "full",
        MapKind::Alt2 => "alt2",
    }
}

fn max_ratio(o: &Orbit) -> f64 {
    (0..o.len()).map(|k| marketdyn::audits::rho_excursion(o, k)).fold(1.0, f64::max)
}

#[derive(Serialize)]
struct OrbitJson<'a> {
    n: usize,
    kind: &'static str,
    t: &'a [u64],
    x: &'a [Vec<f64>],
    p: Option<&'a [Vec<f64>]>,
    rho: &'a [Vec<f64>],
}

pub fn orbit_json(o: &Orbit) -> Result<String, CliError> {
    let kind = match o.kind {
        marketdyn::dynamics::OrbitKind::Full => "full",
        marketdyn::dynamics::OrbitKind::Skew => "skew",
        marketdyn::dynamics::OrbitKind::Alt2 => "alt2",
    };
    json(&OrbitJson { n: o.n, kind, t: &o.t, x: &o.x, p: o.p.as_deref(), rho: &o.rho })
}

pub fn run_simulate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let (s0, init) = initial_state(cfg, opts)?;
    let orbit = run_orbit(&cfg.model, cfg, &s0)?;
    let dir = out_dir(cfg, opts)?;
    let fmt = format_of(cfg, opts);
    let path = dir.join(format!("orbit.{}", fmt.extension()));
    let body = match fmt {
        Format::Csv => {
            let mut buf = Vec::new();
            orbit.write_csv(&mut buf)?;
            buf
        }
        Format::Json => orbit_json(&orbit)?.into_bytes(),
    };
    write(&path, &body)?;
    let meta_path = dir.join("meta.json");
    let meta = SimulateMeta {
        command: "simulate",
        model: &cfg.model,
        theta: cfg.theta,
        init,
        steps: cfg.steps,
        record_every: cfg.record_every,
        map: map_name(cfg.map),
        rows: orbit.len(),
    };
    write(&meta_path, json(&meta)?.as_bytes())?;
    let last = orbit.len() - 1;
    let summary = format!(
        "rows={} t={} dist_fixed={} mean_x={} max_ratio={}",
        orbit.len(),
        orbit.t[last],
        orbit.dist_fixed(last),
        orbit.mean_x(last),
        max_ratio(&orbit)
    );
    Ok(Outcome { exit: 0, summary, files: vec![path, meta_path] })
}

/// Runs the configured audits on an orbit of `model`.
pub fn audit_orbit(cfg: &ExperimentConfig, model: &ModelSpec, orbit: &Orbit) -> AuditReport {
    let mut rep = AuditReport::new();
    for a in &cfg.audits {
        let part = match a {
            AuditName::Rho => {
                let b = uniform_rho_bound(model).ok();
                let mut r = audit_rho_bounds(orbit, b.filter(|b| b.applicable).map(|b| b.bound));
                if let Some(b) = b {
                    r.constant("rho.uniform_bound", b.bound);
                    r.constant("S_g", b.s_g);
                    r.constant("T_N", b.t_n as f64);
                }
                r
            }
            AuditName::Contraction => audit_ratio_contraction(orbit, model),
            AuditName::Mean => audit_mean_volume(orbit, model),
            AuditName::Price => audit_price_product(orbit, model),
            AuditName::Crossings => audit_crossings(orbit, cfg.window),
            AuditName::Fractions => audit_fraction_bounds(orbit),
            AuditName::Alt2 => audit_alt2_mean(orbit),
            AuditName::Nonsym => audit_nonsym_bounds(orbit, model, cfg.gamma.unwrap_or(f64::NAN)),
            AuditName::Validate => validation_report(cfg, model),
        };
        rep.merge(part);
    }
    rep
}

fn validation_report(cfg: &ExperimentConfig, model: &ModelSpec) -> AuditReport {
    let mut rep = validate_f(&model.f, model.n, cfg.validate_resolution);
    rep.merge(validate_g(&model.g, model.n, 0));
    rep
}

fn exit_for(rep: &AuditReport) -> i32 {
    i32::from(!rep.all_pass())
}

fn counts(rep: &AuditReport) -> (usize, usize, usize) {
    let pass = rep.checks.iter().filter(|c| c.status == Status::Pass).count();
    let fail = rep.checks.iter().filter(|c| c.status == Status::Fail).count();
    (pass, fail, rep.checks.len() - pass - fail)
}

pub fn run_audit(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let orbit = match &cfg.orbit_csv {
        Some(p) => {
            let path = opts.base.join(p);
            let file = fs::File::open(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let o = Orbit::read_csv(file).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if o.n != cfg.model.n {
                return Err(CliError::Config(format!("{} has {} sellers, config has n = {}", path.display(), o.n, cfg.model.n)));
            }
            o
        }
        None => run_orbit(&cfg.model, cfg, &initial_state(cfg, opts)?.0)?,
    };
    let rep = audit_orbit(cfg, &cfg.model, &orbit);
    let dir = out_dir(cfg, opts)?;
    let path = dir.join("audit.json");
    write(&path, json(&rep)?.as_bytes())?;
    let (p, f, na) = counts(&rep);
    let mut summary = format!("pass={p} fail={f} not_applicable={na}");
    for c in rep.failures() {
        summary.push_str(&format!(" failed:{}", c.name));
    }
    Ok(Outcome { exit: exit_for(&rep), summary, files: vec![path] })
}

pub fn run_validate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let rep = validation_report(cfg, &cfg.model);
    let dir = out_dir(cfg, opts)?;
    let path = dir.join("validate.json");
    write(&path, json(&rep)?.as_bytes())?;
    let (p, f, na) = counts(&rep);
    Ok(Outcome { exit: exit_for(&rep), summary: format!("pass={p} fail={f} not_applicable={na}"), files: vec![path] })
}

#[derive(Serialize)]
struct CorroborationJson<'a> {
    decay_ratio: f64,
    max_rise_after_tenth: f64,
    #[serde(flatten)]
    run: &'a Corroboration,
}

#[derive(Serialize)]
struct StabilityJson<'a> {
    #[serde(flatten)]
    report: &'a StabilityReport,
    corroboration: Option<CorroborationJson<'a>>,
}

pub fn run_stability(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let report = analyze_stability(&cfg.model)?;
    let run = if cfg.corroborate {
        let (s0, _) = initial_state(cfg, opts)?;
        Some(corroborate(&cfg.model, &project_to_skew(&s0), cfg.steps, cfg.record_every)?)
    } else {
        None
    };
    let corroboration = run.as_ref().map(|c| CorroborationJson {
        decay_ratio: c.decay_ratio(),
        max_rise_after_tenth: c.max_rise_after(c.abs_z.len() / 10),
        run: c,
    });
    let mut summary = format!("verdict={}", serde_json::to_value(report.verdict).unwrap().as_str().unwrap_or("?"));
    if let Some(e) = report.eigen {
        summary.push_str(&format!(" class={:?}", e.classification));
    }
    if let Some(m) = report.margin() {
        summary.push_str(&format!(" margin={m}"));
    }
    if let Some(c) = &corroboration {
        summary.push_str(&format!(" decay_ratio={}", c.decay_ratio));
    }
    let dir = out_dir(cfg, opts)?;
    let path = dir.join("stability.json");
    write(&path, json(&StabilityJson { report: &report, corroboration })?.as_bytes())?;
    Ok(Outcome { exit: 0, summary, files: vec![path] })
}

pub fn run_find_periodic(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let orbit = find_periodic_orbit(&cfg.model, cfg.periodic_rho, cfg.periodic_period)?;
    let dir = out_dir(cfg, opts)?;
    let path = dir.join("periodic.json");
    write(&path, json(&orbit)?.as_bytes())?;
    let pattern: Vec<String> = orbit.rho_pattern.iter().map(|r| r.to_string()).collect();
    let summary = format!("residual={:e} rho_pattern=[{}] method={:?}", orbit.residual, pattern.join(", "), orbit.method);
    Ok(Outcome { exit: 0, summary, files: vec![path] })
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub g_a: f64,
    pub checks_pass: usize,
    pub checks_fail: usize,
    pub failed: String,
    pub verdict: String,
    pub margin: Option<f64>,
    pub final_dist_fixed: Option<f64>,
    pub max_ratio: Option<f64>,
    pub error: String,
}

fn with_a(g: GMapFamily, a: f64) -> GMapFamily {
    match g {
        GMapFamily::Linear { .. } => GMapFamily::Linear { a },
        GMapFamily::Quadratic { b, .. } => GMapFamily::Quadratic { a, b },
    }
}

fn sweep_point(cfg: &ExperimentConfig, s0: Option<&MarketState>, alpha: f64, g_a: f64) -> SweepRow {
    let mut row = SweepRow {
        alpha,
        g_a,
        checks_pass: 0,
        checks_fail: 0,
        failed: String::new(),
        verdict: "n/a".into(),
        margin: None,
        final_dist_fixed: None,
        max_ratio: None,
        error: String::new(),
    };
    let model = match ModelSpec::new(cfg.model.n, alpha, cfg.model.f, with_a(cfg.model.g, g_a)) {
        Ok(m) => m,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    if model.n == 2 {
        match analyze_stability(&model) {
            Ok(r) => {
                row.verdict = serde_json::to_value(r.verdict).unwrap().as_str().unwrap_or("?").to_string();
                row.margin = r.margin();
            }
            Err(e) => row.error = e.to_string(),
        }
    }
    if let Some(s0) = s0 {
        match run_orbit(&model, cfg, s0) {
            Ok(o) => {
                let rep = audit_orbit(cfg, &model, &o);
                let (p, f, _) = counts(&rep);
                row.checks_pass = p;
                row.checks_fail = f;
                row.failed = rep.failures().map(|c| c.name.as_str()).collect::<Vec<_>>().join(" ");
                row.final_dist_fixed = Some(o.dist_fixed(o.len() - 1));
                row.max_ratio = Some(max_ratio(&o));
            }
            Err(e) => {
                if !row.error.is_empty() {
                    row.error.push_str("; ");
                }
                row.error.push_str(&e.to_string());
            }
        }
    }
    row
}

/// Evaluates every grid point, in parallel when `threads` allows, and returns rows in
/// grid order.
pub fn sweep_rows(cfg: &ExperimentConfig, s0: Option<&MarketState>, threads: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    let alphas = if cfg.sweep_alpha.is_empty() { vec![cfg.model.alpha] } else { cfg.sweep_alpha.clone() };
    let g_as = if cfg.sweep_g_a.is_empty() { vec![cfg.model.g.slope()] } else { cfg.sweep_g_a.clone() };
    let grid: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| g_as.iter().map(move |&b| (a, b))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| grid.par_iter().map(|&(a, b)| sweep_point(cfg, s0, a, b)).collect()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record([
        "alpha", "g_a", "checks_pass", "checks_fail", "failed", "verdict", "margin", "final_dist_fixed", "max_ratio", "error",
    ])
    .map_err(err)?;
    for r in rows {
        w.write_record([
            r.alpha.to_string(),
            r.g_a.to_string(),
            r.checks_pass.to_string(),
            r.checks_fail.to_string(),
            r.failed.clone(),
            r.verdict.clone(),
            opt(r.margin),
            opt(r.final_dist_fixed),
            opt(r.max_ratio),
            r.error.clone(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn run_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let s0 = match (&cfg.init, opts.seed) {
        (InitSpec::Sampled { seed: None, .. }, None) => None,
        _ => Some(initial_state(cfg, opts)?.0),
    };
    let rows = sweep_rows(cfg, s0.as_ref(), opts.threads)?;
    let dir = out_dir(cfg, opts)?;
    let fmt = format_of(cfg, opts);
    let path = dir.join(format!("sweep.{}", fmt.extension()));
    let body = match fmt {
        Format::Csv => sweep_csv(&rows)?,
        Format::Json => json(&rows)?.into_bytes(),
    };
    write(&path, &body)?;
    let stable = rows.iter().filter(|r| r.verdict == "stable").count();
    let errors = rows.iter().filter(|r| !r.error.is_empty()).count();
    Ok(Outcome { exit: 0, summary: format!("points={} stable={stable} errors={errors}", rows.len()), files: vec![path] })
}
