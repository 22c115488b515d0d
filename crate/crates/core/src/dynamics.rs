//! States, the full and skew-product maps, inversion and orbit recording.

use crate::error::DynamicsError;
use crate::families::{FMapFamily, GMapFamily};
use serde::Serialize;
use std::io::{Read, Write};

/// Rounding slack allowed before a fraction outside `[0, 1]` is treated as an error.
pub const CLAMP_TOL: f64 = 1e-14;

/// Number of sellers, inertia `alpha` and the two maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSpec {
    pub n: usize,
    pub alpha: f64,
    pub f: FMapFamily,
    pub g: GMapFamily,
}

impl ModelSpec {
    pub fn new(n: usize, alpha: f64, f: FMapFamily, g: GMapFamily) -> Result<Self, DynamicsError> {
        if n < 2 {
            return Err(DynamicsError::InvalidModel(format!("need at least two sellers, got {n}")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(DynamicsError::InvalidModel(format!("alpha must lie in [0, 1), got {alpha}")));
        }
        Ok(Self { n, alpha, f, g })
    }

    #[inline]
    pub fn f_alpha(&self, rho: f64, x: f64) -> f64 {
        x + (1.0 - self.alpha) * (self.f.value(rho, x) - x)
    }
}

/// Buyer fractions `x` and prices `p` of all sellers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarketState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl MarketState {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self, DynamicsError> {
        let s = Self { x, p };
        s.validate()?;
        Ok(s)
    }

    pub fn synchronized(n: usize, x: f64, p: f64) -> Self {
        Self { x: vec![x; n], p: vec![p; n] }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if self.x.len() != self.p.len() {
            return Err(DynamicsError::InvalidState(format!(
                "{} fractions but {} prices",
                self.x.len(),
                self.p.len()
            )));
        }
        if self.x.len() < 2 {
            return Err(DynamicsError::InvalidState("need at least two sellers".into()));
        }
        check_fractions(&self.x)?;
        if let Some((i, v)) = self.p.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(DynamicsError::InvalidState(format!("price {} is {v}", i + 1)));
        }
        Ok(())
    }
}

/// Fractions plus price ratios `rho_i = p_i / p_N` for `i < N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewState {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
}

impl SkewState {
    pub fn new(x: Vec<f64>, rho: Vec<f64>) -> Result<Self, DynamicsError> {
        if x.len() < 2 || rho.len() + 1 != x.len() {
            return Err(DynamicsError::InvalidState(format!(
                "{} fractions need {} ratios, got {}",
                x.len(),
                x.len().saturating_sub(1),
                rho.len()
            )));
        }
        check_fractions(&x)?;
        if let Some((i, v)) = rho.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(DynamicsError::InvalidState(format!("ratio {} is {v}", i + 1)));
        }
        Ok(Self { x, rho })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Prices with `p_N = 1`.
    pub fn prices(&self) -> Vec<f64> {
        let mut p = self.rho.clone();
        p.push(1.0);
        p
    }
}

fn check_fractions(x: &[f64]) -> Result<(), DynamicsError> {
    match x.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        Some((i, v)) => Err(DynamicsError::InvalidState(format!("fraction {} is {v}", i + 1))),
        None => Ok(()),
    }
}

/// Competitor averages `<v>_i` over every index except `i`.
///
/// Sums are taken relative to `v[0]`, so equal entries give exactly equal means.
pub struct Competitors<'a> {
    v: &'a [f64],
    shifted: f64,
}

impl<'a> Competitors<'a> {
    pub fn new(v: &'a [f64]) -> Self {
        let base = v[0];
        Self { v, shifted: v.iter().map(|x| x - base).sum() }
    }

    /// `v_i - <v>_i`.
    #[inline]
    pub fn gap(&self, i: usize) -> f64 {
        let d = self.v[i] - self.v[0];
        d - (self.shifted - d) / (self.v.len() - 1) as f64
    }

    #[inline]
    pub fn mean(&self, i: usize) -> f64 {
        let d = self.v[i] - self.v[0];
        self.v[0] + (self.shifted - d) / (self.v.len() - 1) as f64
    }
}

fn snap_fraction(v: f64, index: usize, step: u64) -> Result<f64, DynamicsError> {
    if (0.0..=1.0).contains(&v) {
        return Ok(v);
    }
    let excess = if v < 0.0 { -v } else { v - 1.0 };
    if excess <= CLAMP_TOL {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(DynamicsError::FractionOutOfRange { index: index + 1, excess, step })
    }
}

fn check_model(model: &ModelSpec, n: usize) -> Result<(), DynamicsError> {
    if model.n != n {
        return Err(DynamicsError::InvalidState(format!("state has {n} sellers, model has {}", model.n)));
    }
    Ok(())
}

/// Price revision factors `1 + g(x_i - <x>_i)`.
fn revision(g: &GMapFamily, x: &[f64]) -> Vec<f64> {
    let c = Competitors::new(x);
    (0..x.len()).map(|i| 1.0 + g.value(c.gap(i).clamp(-1.0, 1.0)))
        .collect()
}

fn update_fractions(
    model: &ModelSpec,
    x: &[f64],
    ratio: impl Fn(usize) -> f64,
    step: u64,
) -> Result<Vec<f64>, DynamicsError> {
    (0..x.len()).map(|i| snap_fraction(model.f_alpha(ratio(i), x[i]), i, step)).collect()
}

fn step_full_at(model: &ModelSpec, s: &MarketState, step: u64) -> Result<MarketState, DynamicsError> {
    check_model(model, s.n())?;
    let r = revision(&model.g, &s.x);
    let p: Vec<f64> = s.p.iter().zip(&r).map(|(p, r)| p * r).collect();
    for (i, &v) in p.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(DynamicsError::NonFinitePrice { index: i + 1, value: v, step });
        }
    }
    let c = Competitors::new(&p);
    let x = update_fractions(model, &s.x, |i| p[i] / c.mean(i), step)?;
    Ok(MarketState { x, p })
}

/// One step of the full map: prices first, then buyers react to the new prices.
pub fn step_full(model: &ModelSpec, s: &MarketState) -> Result<MarketState, DynamicsError> {
    step_full_at(model, s, 0)
}

fn step_skew_at(model: &ModelSpec, s: &SkewState, step: u64) -> Result<SkewState, DynamicsError> {
    check_model(model, s.n())?;
    let n = s.n();
    let r = revision(&model.g, &s.x);
    let mut rho: Vec<f64> = (0..n - 1).map(|i| s.rho[i] * r[i] / r[n - 1]).collect();
    for (i, &v) in rho.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(DynamicsError::NonFinitePrice { index: i + 1, value: v, step });
        }
    }
    rho.push(1.0);
    let c = Competitors::new(&rho);
    let x = update_fractions(model, &s.x, |i| rho[i] / c.mean(i), step)?;
    rho.pop();
    Ok(SkewState { x, rho })
}

/// One step of the reduced map on fractions and ratios to the last seller's price.
pub fn step_skew(model: &ModelSpec, s: &SkewState) -> Result<SkewState, DynamicsError> {
    step_skew_at(model, s, 0)
}

fn step_alt2_at(model: &ModelSpec, s: &MarketState, step: u64) -> Result<MarketState, DynamicsError> {
    if model.n != 2 {
        return Err(DynamicsError::InvalidModel("the mean-price variant needs exactly two sellers".into()));
    }
    check_model(model, s.n())?;
    let r = revision(&model.g, &s.x);
    let p: Vec<f64> = s.p.iter().zip(&r).map(|(p, r)| p * r).collect();
    for (i, &v) in p.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(DynamicsError::NonFinitePrice { index: i + 1, value: v, step });
        }
    }
    let sp = p[0] + p[1];
    let x = update_fractions(model, &s.x, |i| 2.0 * p[i] / sp, step)?;
    Ok(MarketState { x, p })
}

/// Two-seller variant where buyers compare against the mean of both prices.
pub fn step_alt2(model: &ModelSpec, s: &MarketState) -> Result<MarketState, DynamicsError> {
    step_alt2_at(model, s, 0)
}

/// Preimage under [`step_full`]. Fractions are recovered by bisection to `1e-13`.
pub fn inverse_step(model: &ModelSpec, s: &MarketState) -> Result<MarketState, DynamicsError> {
    check_model(model, s.n())?;
    s.validate()?;
    let c = Competitors::new(&s.p);
    let mut x = Vec::with_capacity(s.n());
    for i in 0..s.n() {
        let r = s.p[i] / c.mean(i);
        x.push(invert_fraction(model, r, s.x[i], i)?);
    }
    let rev = revision(&model.g, &x);
    let mut p = Vec::with_capacity(s.n());
    for (i, (&pi, &ri)) in s.p.iter().zip(&rev).enumerate() {
        if ri <= 0.0 {
            return Err(DynamicsError::Inversion(format!("revision factor of seller {} is {ri}", i + 1)));
        }
        p.push(pi / ri);
    }
    Ok(MarketState { x, p })
}

fn invert_fraction(model: &ModelSpec, r: f64, y: f64, i: usize) -> Result<f64, DynamicsError> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (flo, fhi) = (model.f_alpha(r, lo), model.f_alpha(r, hi));
    if y < flo - CLAMP_TOL || y > fhi + CLAMP_TOL {
        return Err(DynamicsError::Inversion(format!(
            "fraction {} = {y} outside the image [{flo}, {fhi}] at ratio {r}",
            i + 1
        )));
    }
    if y <= flo {
        return Ok(lo);
    }
    if y >= fhi {
        return Ok(hi);
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if model.f_alpha(r, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn project_to_skew(s: &MarketState) -> SkewState {
    let last = s.p[s.n() - 1];
    SkewState { x: s.x.clone(), rho: s.p[..s.n() - 1].iter().map(|p| p / last).collect() }
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    hi - lo
}

/// `max_{i,j} max(|x_i - x_j|, |p_i - p_j|)`.
pub fn distance_to_fixed_set(s: &MarketState) -> f64 {
    spread(&s.x).max(spread(&s.p))
}

/// Which map generated an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitKind {
    Full,
    Skew,
    Alt2,
}

/// Recorded states of one run. Skew orbits carry no prices; their ratio columns are
/// relative to the last seller.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub n: usize,
    pub kind: OrbitKind,
    pub t: Vec<u64>,
    pub x: Vec<Vec<f64>>,
    pub p: Option<Vec<Vec<f64>>>,
    pub rho: Vec<Vec<f64>>,
    /// Some fraction sat exactly at 0 or 1 in a recorded state.
    pub hit_boundary: bool,
}

impl Orbit {
    fn empty(n: usize, kind: OrbitKind) -> Self {
        let p = if kind == OrbitKind::Skew { None } else { Some(Vec::new()) };
        Self { n, kind, t: Vec::new(), x: Vec::new(), p, rho: Vec::new(), hit_boundary: false }
    }

    fn record_full(&mut self, t: u64, s: &MarketState) {
        self.t.push(t);
        self.rho.push(project_to_skew(s).rho);
        self.note_boundary(&s.x);
        self.x.push(s.x.clone());
        if let Some(p) = self.p.as_mut() {
            p.push(s.p.clone());
        }
    }

    fn record_skew(&mut self, t: u64, s: &SkewState) {
        self.t.push(t);
        self.note_boundary(&s.x);
        self.x.push(s.x.clone());
        self.rho.push(s.rho.clone());
    }

    fn note_boundary(&mut self, x: &[f64]) {
        if x.iter().any(|&v| v == 0.0 || v == 1.0) {
            self.hit_boundary = true;
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// True when recorded states are consecutive time steps.
    pub fn is_stepwise(&self) -> bool {
        self.t.windows(2).all(|w| w[1] == w[0] + 1)
    }

    pub fn mean_x(&self, k: usize) -> f64 {
        self.x[k].iter().sum::<f64>() / self.n as f64
    }

    pub fn price_product(&self, k: usize) -> Option<f64> {
        self.p.as_ref().map(|p| p[k].iter().product())
    }

    /// Prices of state `k`; skew orbits use `p_N = 1`.
    pub fn prices(&self, k: usize) -> Vec<f64> {
        match &self.p {
            Some(p) => p[k].clone(),
            None => {
                let mut v = self.rho[k].clone();
                v.push(1.0);
                v
            }
        }
    }

    pub fn dist_fixed(&self, k: usize) -> f64 {
        spread(&self.x[k]).max(spread(&self.prices(k)))
    }

    pub fn market_state(&self, k: usize) -> MarketState {
        MarketState { x: self.x[k].clone(), p: self.prices(k) }
    }

    pub fn skew_state(&self, k: usize) -> SkewState {
        SkewState { x: self.x[k].clone(), rho: self.rho[k].clone() }
    }

    pub fn csv_header(n: usize) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend((1..=n).map(|i| format!("x_{i}")));
        h.extend((1..=n).map(|i| format!("p_{i}")));
        h.extend((1..n).map(|i| format!("rho_{i}")));
        h.extend(["mean_x", "price_product", "dist_fixed"].map(String::from));
        h
    }

    /// Writes one row per recorded state with shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DynamicsError> {
        let mut wtr = csv::Writer::from_writer(w);
        let err = |e: csv::Error| DynamicsError::Csv(e.to_string());
        wtr.write_record(Self::csv_header(self.n)).map_err(err)?;
        for k in 0..self.len() {
            let mut row = vec![self.t[k].to_string()];
            row.extend(self.x[k].iter().map(|v| v.to_string()));
            match &self.p {
                Some(p) => row.extend(p[k].iter().map(|v| v.to_string())),
                None => row.extend(std::iter::repeat_n(String::new(), self.n)),
            }
            row.extend(self.rho[k].iter().map(|v| v.to_string()));
            row.push(self.mean_x(k).to_string());
            row.push(self.price_product(k).map(|v| v.to_string()).unwrap_or_default());
            row.push(self.dist_fixed(k).to_string());
            wtr.write_record(&row).map_err(err)?;
        }
        wtr.flush().map_err(|e| DynamicsError::Csv(e.to_string()))
    }

    /// Reads a file produced by [`Orbit::write_csv`]. Empty price columns give a skew orbit.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, DynamicsError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(|e| DynamicsError::Csv(e.to_string()))?.clone();
        let n = header.iter().filter(|h| h.starts_with("x_")).count();
        if n < 2 || header.len() != 2 * n + n - 1 + 4 || header.iter().collect::<Vec<_>>() != Self::csv_header(n) {
            return Err(DynamicsError::Csv("unexpected header".into()));
        }
        let mut orbit: Option<Orbit> = None;
        for (row, rec) in rdr.records().enumerate() {
            let line = row + 2;
            let rec = rec.map_err(|e| DynamicsError::Csv(format!("line {line}: {e}")))?;
            let num = |j: usize| -> Result<f64, DynamicsError> {
                rec[j]
                    .parse::<f64>()
                    .map_err(|_| DynamicsError::Csv(format!("line {line}, column {}: bad number {:?}", &header[j], &rec[j])))
            };
            let t = rec[0]
                .parse::<u64>()
                .map_err(|_| DynamicsError::Csv(format!("line {line}: bad time {:?}", &rec[0])))?;
            let x = (1..=n).map(num).collect::<Result<Vec<_>, _>>()?;
            let skew = rec[n + 1].is_empty();
            let o = orbit.get_or_insert_with(|| Orbit::empty(n, if skew { OrbitKind::Skew } else { OrbitKind::Full }));
            if skew != (o.kind == OrbitKind::Skew) {
                return Err(DynamicsError::Csv(format!("line {line}: price columns present on some rows only")));
            }
            let rho = (2 * n + 1..3 * n).map(num).collect::<Result<Vec<_>, _>>()?;
            o.t.push(t);
            o.note_boundary(&x);
            o.x.push(x);
            o.rho.push(rho);
            if let Some(p) = o.p.as_mut() {
                p.push((n + 1..=2 * n).map(num).collect::<Result<Vec<_>, _>>()?);
            }
        }
        orbit.ok_or_else(|| DynamicsError::Csv("no rows".into()))
    }
}

fn check_stride(record_every: u64) -> Result<(), DynamicsError> {
    if record_every == 0 {
        return Err(DynamicsError::InvalidModel("record_every must be at least 1".into()));
    }
    Ok(())
}

fn recorded(t: u64, steps: u64, every: u64) -> bool {
    t.is_multiple_of(every) || t == steps
}

/// Runs the full map for `steps` steps, recording `t = 0`, every multiple of
/// `record_every`, and the final state.
pub fn simulate(model: &ModelSpec, s0: &MarketState, steps: u64, record_every: u64) -> Result<Orbit, DynamicsError> {
    run_market(model, s0, steps, record_every, OrbitKind::Full)
}

/// Same as [`simulate`] with the two-seller mean-price variant.
pub fn simulate_alt2(model: &ModelSpec, s0: &MarketState, steps: u64, record_every: u64) -> Result<Orbit, DynamicsError> {
    run_market(model, s0, steps, record_every, OrbitKind::Alt2)
}

fn run_market(model: &ModelSpec, s0: &MarketState, steps: u64, every: u64, kind: OrbitKind) -> Result<Orbit, DynamicsError> {
    check_stride(every)?;
    check_model(model, s0.n())?;
    s0.validate()?;
    let mut o = Orbit::empty(model.n, kind);
    let mut s = s0.clone();
    o.record_full(0, &s);
    for t in 1..=steps {
        s = match kind {
            OrbitKind::Alt2 => step_alt2_at(model, &s, t)?,
            _ => step_full_at(model, &s, t)?,
        };
        if recorded(t, steps, every) {
            o.record_full(t, &s);
        }
    }
    Ok(o)
}

/// Runs the skew-product map.
pub fn simulate_skew(model: &ModelSpec, s0: &SkewState, steps: u64, record_every: u64) -> Result<Orbit, DynamicsError> {
    check_stride(record_every)?;
    check_model(model, s0.n())?;
    let mut o = Orbit::empty(model.n, OrbitKind::Skew);
    let mut s = s0.clone();
    o.record_skew(0, &s);
    for t in 1..=steps {
        s = step_skew_at(model, &s, t)?;
        if recorded(t, steps, record_every) {
            o.record_skew(t, &s);
        }
    }
    Ok(o)
}

/// Reproducible initial state: `x_i` uniform on `x_range`, `p_i` uniform on `p_range`,
/// drawn in that order from a ChaCha8 stream seeded with `seed`.
pub fn random_state(n: usize, seed: u64, x_range: (f64, f64), p_range: (f64, f64)) -> Result<MarketState, DynamicsError> {
    use rand::{Rng, SeedableRng};
    if !(0.0 <= x_range.0 && x_range.0 < x_range.1 && x_range.1 <= 1.0) {
        return Err(DynamicsError::InvalidState(format!("bad fraction range {x_range:?}")));
    }
    if !(0.0 < p_range.0 && p_range.0 < p_range.1 && p_range.1.is_finite()) {
        return Err(DynamicsError::InvalidState(format!("bad price range {p_range:?}")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n).map(|_| rng.gen_range(x_range.0..x_range.1)).collect();
    let p = (0..n).map(|_| rng.gen_range(p_range.0..p_range.1)).collect();
    MarketState::new(x, p)
}
