//! Flat `key = value` experiment configuration.

use marketdyn::dynamics::{MarketState, ModelSpec};
use marketdyn::families::{f_rho_at_unit, BKind, CKernel, Deviation, FMapFamily, GMapFamily, SmoothC4};
use marketdyn::stability::alpha_for_theta;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

/// One problem found while reading a config. `line` is `None` for missing keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Every problem in a config, in line order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Full,
    Alt2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Explicit(MarketState),
    Sampled { seed: Option<u64>, x_range: (f64, f64), p_range: (f64, f64) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AuditName {
    Rho,
    Contraction,
    Mean,
    Price,
    Crossings,
    Fractions,
    Alt2,
    Nonsym,
    Validate,
}

impl AuditName {
    pub const DEFAULT: [AuditName; 6] = [
        AuditName::Rho,
        AuditName::Contraction,
        AuditName::Mean,
        AuditName::Price,
        AuditName::Crossings,
        AuditName::Fractions,
    ];

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rho" => AuditName::Rho,
            "contraction" => AuditName::Contraction,
            "mean" => AuditName::Mean,
            "price" => AuditName::Price,
            "crossings" => AuditName::Crossings,
            "fractions" => AuditName::Fractions,
            "alt2" => AuditName::Alt2,
            "nonsym" => AuditName::Nonsym,
            "validate" => AuditName::Validate,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    /// Rotation angle in radians when `alpha` was solved from `theta_deg`.
    pub theta: Option<f64>,
    pub init: InitSpec,
    pub steps: u64,
    pub record_every: u64,
    pub map: MapKind,
    pub audits: Vec<AuditName>,
    pub window: usize,
    pub gamma: Option<f64>,
    pub orbit_csv: Option<PathBuf>,
    pub corroborate: bool,
    pub sweep_alpha: Vec<f64>,
    pub sweep_g_a: Vec<f64>,
    pub periodic_rho: f64,
    pub periodic_period: usize,
    pub validate_resolution: usize,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

pub const DEFAULT_X_RANGE: (f64, f64) = (0.05, 0.95);
pub const DEFAULT_P_RANGE: (f64, f64) = (0.5, 2.0);

const KEYS: &[&str] = &[
    "n",
    "alpha",
    "theta_deg",
    "seed",
    "f.kind",
    "f.c",
    "f.b",
    "f.rho0",
    "f.x0",
    "f.dev",
    "f.kappa",
    "f.gamma_above",
    "f.gamma_below",
    "g.kind",
    "g.a",
    "g.b",
    "init.x",
    "init.p",
    "init.x_min",
    "init.x_max",
    "init.p_min",
    "init.p_max",
    "run.steps",
    "run.record_every",
    "run.map",
    "audit.list",
    "audit.window",
    "audit.gamma",
    "audit.orbit",
    "stability.corroborate",
    "sweep.alpha",
    "sweep.g_a",
    "periodic.rho",
    "periodic.period",
    "validate.resolution",
    "output.dir",
    "output.format",
];

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Reader {
    entries: BTreeMap<String, Entry>,
    errors: Vec<ConfigError>,
}

impl Reader {
    fn err(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.errors.push(ConfigError { line, message: message.into() });
    }

    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        let e = self.entries.get_mut(key)?;
        e.used = true;
        Some((e.line, e.value.clone()))
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn parsed<T>(&mut self, key: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Option<T> {
        let (line, v) = self.raw(key)?;
        let out = parse(&v);
        if out.is_none() {
            self.err(Some(line), format!("{key}: expected {what}, got {v:?}"));
        }
        out
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        self.parsed(key, "a finite number", |s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
    }

    fn uint(&mut self, key: &str) -> Option<u64> {
        self.parsed(key, "a non-negative integer", |s| s.parse::<u64>().ok())
    }

    fn floats(&mut self, key: &str) -> Option<Vec<f64>> {
        self.parsed(key, "a comma-separated list of numbers", |s| {
            s.split(',').map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite())).collect()
        })
    }

    fn word<T>(&mut self, key: &str, options: &[(&str, T)]) -> Option<T>
    where
        T: Copy,
    {
        let names: Vec<&str> = options.iter().map(|o| o.0).collect();
        let what = format!("one of {}", names.join(", "));
        self.parsed(key, &what, |s| options.iter().find(|o| o.0 == s).map(|o| o.1))
    }

    fn check(&mut self, key: &str, ok: bool, message: impl Into<String>) {
        if !ok {
            let line = self.entries.get(key).map(|e| e.line);
            self.err(line, format!("{key}: {}", message.into()));
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn consume_prefix(&mut self, prefix: &str) {
        self.entries.iter_mut().filter(|(k, _)| k.starts_with(prefix)).for_each(|(_, e)| e.used = true);
    }

    /// Reports a key that is present but meaningless in context.
    fn forbid(&mut self, key: &str, why: &str) {
        if let Some(line) = self.line_of(key) {
            self.entries.get_mut(key).unwrap().used = true;
            self.err(Some(line), format!("{key} {why}"));
        }
    }
}

fn tokenize(text: &str) -> Reader {
    let mut r = Reader { entries: BTreeMap::new(), errors: Vec::new() };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            r.err(Some(line), format!("expected `key = value`, got {body:?}"));
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            r.err(Some(line), format!("unknown key {k:?}"));
            continue;
        }
        if v.is_empty() {
            r.err(Some(line), format!("{k}: missing value"));
            continue;
        }
        if let Some(prev) = r.entries.get(k) {
            let first = prev.line;
            r.err(Some(line), format!("{k} already set on line {first}"));
            continue;
        }
        r.entries.insert(k.to_string(), Entry { line, value: v.to_string(), used: false });
    }
    r
}

const C_KERNELS: [(&str, CKernel); 2] = [("exp_abs_log", CKernel::ExpAbsLog), ("exp_sq_log", CKernel::ExpSqLog)];

fn fraction_parameter(r: &mut Reader, key: &str) -> f64 {
    let v = r.float(key).unwrap_or(0.0);
    r.check(key, (0.0..1.0).contains(&v), format!("must lie in [0, 1), got {v}"));
    v
}

fn read_f(r: &mut Reader) -> Option<FMapFamily> {
    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Affine,
        Spefam,
        Smooth,
        Asym,
    }
    let kind = r.word(
        "f.kind",
        &[("piecewise_affine", Kind::Affine), ("spefam", Kind::Spefam), ("smooth_c4", Kind::Smooth), ("asymmetric", Kind::Asym)],
    );
    if kind.is_none() && !r.has("f.kind") {
        r.err(None, "missing required key f.kind");
    }
    let only = |r: &mut Reader, keys: &[&str], owner: &str| {
        for k in keys {
            r.forbid(k, &format!("only applies to f.kind = {owner}"));
        }
    };
    let Some(kind) = kind else {
        r.consume_prefix("f.");
        return None;
    };
    if kind != Kind::Smooth {
        only(r, &["f.b", "f.rho0", "f.x0"], "smooth_c4");
    }
    if kind != Kind::Spefam {
        only(r, &["f.dev", "f.kappa"], "spefam");
    }
    if kind != Kind::Asym {
        only(r, &["f.gamma_above", "f.gamma_below"], "asymmetric");
    }
    if kind == Kind::Spefam {
        r.forbid("f.c", "does not apply to f.kind = spefam");
    }
    let c_default = if kind == Kind::Smooth { CKernel::ExpSqLog } else { CKernel::ExpAbsLog };
    let c = if r.has("f.c") { r.word("f.c", &C_KERNELS)? } else { c_default };
    match kind {
        Kind::Affine => Some(FMapFamily::PiecewiseAffine { c }),
        Kind::Spefam => {
            let quadratic = r.word("f.dev", &[("zero", false), ("quadratic", true)]).unwrap_or(false);
            if !quadratic {
                r.forbid("f.kappa", "needs f.dev = quadratic");
                return Some(FMapFamily::Spefam { dev: Deviation::Zero });
            }
            if !r.has("f.kappa") {
                r.err(r.line_of("f.dev"), "f.dev = quadratic needs f.kappa");
                return None;
            }
            let kappa = fraction_parameter(r, "f.kappa");
            Some(FMapFamily::Spefam { dev: Deviation::Quadratic { kappa } })
        }
        Kind::Smooth => {
            let b = if r.has("f.b") { r.word("f.b", &[("log_odd", BKind::LogOdd), ("linear", BKind::Linear)])? } else { BKind::LogOdd };
            let rho0 = if r.has("f.rho0") { r.float("f.rho0")? } else { 3.0 };
            let x0 = if r.has("f.x0") { r.float("f.x0")? } else { 1.0 / 3.0 };
            match SmoothC4::new(c, b, rho0, x0) {
                Ok(s) => Some(FMapFamily::SmoothC4(s)),
                Err(e) => {
                    let line = r.line_of("f.rho0").or(r.line_of("f.x0")).or(r.line_of("f.kind"));
                    r.err(line, e.to_string());
                    None
                }
            }
        }
        Kind::Asym => {
            let ga = if r.has("f.gamma_above") { fraction_parameter(r, "f.gamma_above") } else { 0.3 };
            let gb = if r.has("f.gamma_below") { fraction_parameter(r, "f.gamma_below") } else { 0.15 };
            Some(FMapFamily::Asymmetric { c, gamma_above: ga, gamma_below: gb })
        }
    }
}

fn read_g(r: &mut Reader) -> Option<GMapFamily> {
    let quadratic = r.word("g.kind", &[("linear", false), ("quadratic", true)]);
    if quadratic.is_none() && !r.has("g.kind") {
        r.err(None, "missing required key g.kind");
    }
    let Some(quadratic) = quadratic else {
        r.consume_prefix("g.");
        return None;
    };
    if !quadratic {
        r.forbid("g.b", "only applies to g.kind = quadratic");
    }
    if !r.has("g.a") {
        r.err(r.line_of("g.kind"), "g.kind needs g.a");
        return None;
    }
    let a = r.float("g.a")?;
    r.check("g.a", a > 0.0, format!("must be positive, got {a}"));
    if quadratic {
        let b = if r.has("g.b") { r.float("g.b")? } else { 0.0 };
        Some(GMapFamily::Quadratic { a, b })
    } else {
        Some(GMapFamily::Linear { a })
    }
}

fn read_init(r: &mut Reader, n: Option<usize>) -> InitSpec {
    let explicit = r.has("init.x") || r.has("init.p");
    if explicit {
        for k in ["init.x_min", "init.x_max", "init.p_min", "init.p_max"] {
            r.forbid(k, "conflicts with explicit init.x/init.p");
        }
        let x = r.floats("init.x");
        let p = r.floats("init.p");
        for (key, v) in [("init.x", &x), ("init.p", &p)] {
            if !r.has(key) {
                r.err(None, format!("{key} is required when the other initial vector is given"));
            } else if let (Some(v), Some(n)) = (v, n) {
                r.check(key, v.len() == n, format!("has {} entries, expected n = {n}", v.len()));
            }
        }
        if let (Some(x), Some(p)) = (x, p) {
            if n.is_some_and(|n| x.len() == n && p.len() == n) {
                match MarketState::new(x, p) {
                    Ok(s) => return InitSpec::Explicit(s),
                    Err(e) => {
                        let line = r.line_of("init.x");
                        r.err(line, e.to_string());
                    }
                }
            }
        }
        return InitSpec::Sampled { seed: None, x_range: DEFAULT_X_RANGE, p_range: DEFAULT_P_RANGE };
    }
    let seed = r.uint("seed");
    let mut range = |lo: &str, hi: &str, d: (f64, f64)| {
        let a = if r.has(lo) { r.float(lo).unwrap_or(d.0) } else { d.0 };
        let b = if r.has(hi) { r.float(hi).unwrap_or(d.1) } else { d.1 };
        (a, b)
    };
    let x_range = range("init.x_min", "init.x_max", DEFAULT_X_RANGE);
    let p_range = range("init.p_min", "init.p_max", DEFAULT_P_RANGE);
    r.check("init.x_min", 0.0 <= x_range.0 && x_range.0 < x_range.1 && x_range.1 <= 1.0, format!("fraction range {x_range:?} must satisfy 0 <= min < max <= 1"));
    r.check("init.p_min", 0.0 < p_range.0 && p_range.0 < p_range.1, format!("price range {p_range:?} must satisfy 0 < min < max"));
    InitSpec::Sampled { seed, x_range, p_range }
}

/// Reads and validates a config, collecting every error.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut r = tokenize(text);
    let n = r.uint("n");
    if !r.has("n") {
        r.err(None, "missing required key n");
    }
    if let Some(n) = n {
        r.check("n", n >= 2, format!("needs at least two sellers, got {n}"));
    }
    let n = n.filter(|&n| n >= 2).map(|n| n as usize);
    let f = read_f(&mut r);
    let g = read_g(&mut r);

    let mut theta = None;
    let alpha = match (r.has("alpha"), r.has("theta_deg")) {
        (true, true) => {
            let line = r.line_of("theta_deg");
            r.raw("theta_deg");
            r.err(line, "set either alpha or theta_deg, not both");
            r.float("alpha")
        }
        (true, false) => {
            let a = r.float("alpha");
            if let Some(a) = a {
                r.check("alpha", (0.0..1.0).contains(&a), format!("must lie in [0, 1), got {a}"));
            }
            a.filter(|a| (0.0..1.0).contains(a))
        }
        (false, true) => {
            let deg = r.float("theta_deg");
            match (deg, f, g) {
                (Some(deg), Some(f), Some(g)) => {
                    let th = deg.to_radians();
                    let solved = f_rho_at_unit(&f, 0.5).map_err(|e| e.to_string()).and_then(|fp| alpha_for_theta(th, fp, g.slope()).map_err(|e| e.to_string()));
                    match solved {
                        Ok(a) => {
                            theta = Some(th);
                            Some(a)
                        }
                        Err(e) => {
                            let line = r.line_of("theta_deg");
                            r.err(line, format!("theta_deg: {e}"));
                            None
                        }
                    }
                }
                _ => {
                    r.raw("theta_deg");
                    None
                }
            }
        }
        (false, false) => {
            r.err(None, "missing required key alpha (or theta_deg)");
            None
        }
    };

    let init = read_init(&mut r, n);
    if matches!(init, InitSpec::Explicit(_)) && r.has("seed") {
        r.uint("seed");
    }
    let steps = if r.has("run.steps") { r.uint("run.steps").unwrap_or(0) } else { 1000 };
    let record_every = if r.has("run.record_every") { r.uint("run.record_every").unwrap_or(1) } else { 1 };
    r.check("run.record_every", record_every >= 1, "must be at least 1");
    let map = if r.has("run.map") { r.word("run.map", &[("full", MapKind::Full), ("alt2", MapKind::Alt2)]).unwrap_or(MapKind::Full) } else { MapKind::Full };
    if map == MapKind::Alt2 {
        r.check("run.map", n.is_none_or(|n| n == 2), "alt2 needs n = 2");
    }

    let audits = match r.raw("audit.list") {
        Some((line, v)) => {
            let mut out = Vec::new();
            for tok in v.split(',').map(str::trim) {
                match AuditName::parse(tok) {
                    Some(a) => out.push(a),
                    None => r.err(Some(line), format!("audit.list: unknown audit {tok:?}")),
                }
            }
            out.sort();
            out.dedup();
            out
        }
        None => AuditName::DEFAULT.to_vec(),
    };
    let window = if r.has("audit.window") { r.uint("audit.window").unwrap_or(1) as usize } else { 5000 };
    r.check("audit.window", window >= 1, "must be at least 1");
    let gamma = r.float("audit.gamma");
    if let Some(gm) = gamma {
        r.check("audit.gamma", gm > 0.0 && gm < 1.0, format!("must lie in (0, 1), got {gm}"));
    }
    if audits.contains(&AuditName::Nonsym) && gamma.is_none() && !r.has("audit.gamma") {
        r.err(r.line_of("audit.list"), "the nonsym audit needs audit.gamma");
    }
    let orbit_csv = r.raw("audit.orbit").map(|(_, v)| PathBuf::from(v));
    let corroborate = if r.has("stability.corroborate") { r.word("stability.corroborate", &[("true", true), ("false", false)]).unwrap_or(false) } else { false };
    let sweep_alpha = r.floats("sweep.alpha").unwrap_or_default();
    for &a in &sweep_alpha {
        r.check("sweep.alpha", (0.0..1.0).contains(&a), format!("entry {a} outside [0, 1)"));
    }
    let sweep_g_a = r.floats("sweep.g_a").unwrap_or_default();
    for &a in &sweep_g_a {
        r.check("sweep.g_a", a > 0.0, format!("entry {a} must be positive"));
    }
    let periodic_rho = if r.has("periodic.rho") { r.float("periodic.rho").unwrap_or(2.0) } else { 2.0 };
    r.check("periodic.rho", periodic_rho > 0.0, "must be positive");
    let periodic_period = if r.has("periodic.period") { r.uint("periodic.period").unwrap_or(4) as usize } else { 4 };
    r.check("periodic.period", periodic_period >= 1, "must be at least 1");
    let validate_resolution = if r.has("validate.resolution") { r.uint("validate.resolution").unwrap_or(200) as usize } else { 200 };
    r.check("validate.resolution", validate_resolution >= 2, "must be at least 2");
    let out_dir = r.raw("output.dir").map(|(_, v)| PathBuf::from(v));
    let format = if r.has("output.format") { r.parsed("output.format", "csv or json", Format::parse) } else { None };

    let model = match (n, alpha, f, g) {
        (Some(n), Some(alpha), Some(f), Some(g)) => match ModelSpec::new(n, alpha, f, g) {
            Ok(m) => Some(m),
            Err(e) => {
                r.err(None, e.to_string());
                None
            }
        },
        _ => None,
    };
    let unused: Vec<(usize, String)> = r.entries.iter().filter(|(_, e)| !e.used).map(|(k, e)| (e.line, k.clone())).collect();
    for (line, k) in unused {
        r.err(Some(line), format!("{k} is not used by this configuration"));
    }
    if !r.errors.is_empty() || model.is_none() {
        let mut errs = r.errors;
        if errs.is_empty() {
            errs.push(ConfigError { line: None, message: "incomplete model".into() });
        }
        errs.sort_by_key(|e| e.line.unwrap_or(usize::MAX));
        return Err(ConfigErrors(errs));
    }
    Ok(ExperimentConfig {
        model: model.unwrap(),
        theta,
        init,
        steps,
        record_every,
        map,
        audits,
        window,
        gamma,
        orbit_csv,
        corroborate,
        sweep_alpha,
        sweep_g_a,
        periodic_rho,
        periodic_period,
        validate_resolution,
        out_dir,
        format,
    })
}
