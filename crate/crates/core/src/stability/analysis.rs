use super::coords::NormalFrame;
use super::linear::{require_two, theta_from, transverse_eigen_from, Classification, TransverseEigen};
use super::normal_form::{NormalForm, NormalFormInputs};
use crate::dynamics::{step_skew, ModelSpec, SkewState};
use crate::error::{FamilyError, StabilityError};
use crate::families::{f_center_derivatives, symmetry_residual, validate_g, DerivativeSource, FDerivatives, FMapFamily, GDerivatives, g_center_derivatives};
use crate::report::Status;
use serde::Serialize;

const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    #[serde(rename = "pass", serialize_with = "crate::report::serialize_status")]
    pub status: Status,
    #[serde(serialize_with = "crate::serialize_f64")]
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub alpha: f64,
    pub f_family: &'static str,
    pub g_family: &'static str,
    pub f_derivatives: Option<FDerivatives>,
    pub g_derivatives: GDerivatives,
    pub eigen: Option<TransverseEigen>,
    pub theta: Option<f64>,
    pub normal_form: Option<NormalForm>,
    pub closed_form_margin: Option<f64>,
    pub hypotheses: Vec<Hypothesis>,
    pub verdict: Verdict,
    pub reason: String,
}

impl StabilityReport {
    pub fn margin(&self) -> Option<f64> {
        self.normal_form.map(|n| n.margin)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }
}

fn hyp(name: &'static str, ok: bool, value: f64, detail: impl Into<String>) -> Hypothesis {
    Hypothesis { name, status: Status::from_bool(ok), value, detail: detail.into() }
}

fn smoothness(f: &FMapFamily, d: &FDerivatives) -> Hypothesis {
    let jump = d.max_jump();
    match (f, d.source) {
        (FMapFamily::SmoothC4(s), DerivativeSource::Analytic) => {
            let (_, r) = s.c.d1_at_one();
            hyp("smooth_c4", jump <= EXACT && r == 0.0, jump, format!("reflection jumps up to {jump:e}, c'(1) = {r}"))
        }
        _ => Hypothesis {
            name: "smooth_c4",
            status: Status::NotApplicable,
            value: jump,
            detail: "fourth-order smoothness at rho = 1 cannot be certified from differences".into(),
        },
    }
}

/// Linear and third-order analysis of the synchronized point `(1/2, 1/2, 1)` of the
/// two-seller skew map.
pub fn analyze_stability(model: &ModelSpec) -> Result<StabilityReport, StabilityError> {
    require_two(model)?;
    let g_derivatives = g_center_derivatives(&model.g);
    let mut rep = StabilityReport {
        alpha: model.alpha,
        f_family: model.f.name(),
        g_family: model.g.name(),
        f_derivatives: None,
        g_derivatives,
        eigen: None,
        theta: None,
        normal_form: None,
        closed_form_margin: None,
        hypotheses: Vec::new(),
        verdict: Verdict::Inconclusive,
        reason: String::new(),
    };
    let d = match f_center_derivatives(&model.f) {
        Ok(d) => d,
        Err(FamilyError::NonSmooth(why)) => {
            rep.hypotheses.push(hyp("smooth_c4", false, f64::NAN, why.clone()));
            rep.reason = format!("f is not smooth at rho = 1: {why}");
            return Ok(rep);
        }
        Err(e) => return Err(e.into()),
    };
    rep.f_derivatives = Some(d);
    let gp = g_derivatives.g_p;
    let eig = transverse_eigen_from(model.alpha, d.f_p, gp);
    rep.eigen = Some(eig);

    let sym = symmetry_residual(&model.f, 200);
    let g_checks = validate_g(&model.g, 2, 0);
    let hg1 = g_checks.get("g.hg1").is_some_and(|c| c.status == Status::Pass);
    rep.hypotheses = vec![
        smoothness(&model.f, &d),
        hyp("symmetric_f", sym <= EXACT, sym, "f(1/rho, 1 - x) = 1 - f(rho, x)"),
        hyp("f_rho_negative", d.f_p < 0.0, d.f_p, "f'_rho(1, 1/2) < 0"),
        hyp("f_rho_xx_zero", d.f_rhox2.abs() <= EXACT, d.f_rhox2, "f'''_{rho x x}(1, 1/2) = 0"),
        hyp("f_rho_rho_x_negative", d.f_rho2x < 0.0, d.f_rho2x, "f'''_{rho rho x}(1, 1/2) < 0"),
        hyp("f_rho_x_zero", d.f_rhox.abs() <= EXACT, d.f_rhox, "f''_{rho x}(1, 1/2) = 0"),
        hyp("g_odd", model.g.is_odd(), g_derivatives.g_pp, "g(-d) = -g(d)"),
        hyp("g_hg1", hg1, gp, "g(0) = 0, increasing, above -1"),
        hyp("g_slope_positive", gp > 0.0, gp, "g'(0) > 0"),
        hyp(
            "elliptic",
            eig.classification == Classification::Elliptic,
            (1.0 - model.alpha) * d.f_p * gp,
            "-1 <= (1 - alpha) f_p g_p < 0",
        ),
    ];

    match eig.classification {
        Classification::Hyperbolic => {
            rep.verdict = Verdict::Unstable;
            rep.reason = format!("hyperbolic: eigenvalue {} off the unit circle", eig.lambda_plus.norm().max(eig.lambda_minus.norm()));
            return Ok(rep);
        }
        Classification::Parabolic => {
            if gp != 0.0 {
                rep.verdict = Verdict::Unstable;
                rep.reason = "parabolic with a non-trivial Jordan block: ratios drift linearly".into();
            } else {
                rep.reason = "parabolic with g'(0) = 0: linear analysis is degenerate".into();
            }
            return Ok(rep);
        }
        Classification::Elliptic => {}
    }
    if d.f_rhox.abs() > EXACT || d.f_rhox2.abs() > EXACT {
        rep.verdict = Verdict::Unstable;
        rep.reason = "elliptic, but the rotation angle varies along the synchronized line".into();
        return Ok(rep);
    }
    let theta = theta_from(model.alpha, d.f_p, gp)?;
    rep.theta = Some(theta);
    rep.hypotheses.push(hyp("theta_not_pi", theta < std::f64::consts::PI, theta, "theta != pi"));
    if theta >= std::f64::consts::PI {
        rep.reason = "theta = pi: eigenvalue -1, normal form undefined".into();
        return Ok(rep);
    }
    let inputs = NormalFormInputs {
        alpha: model.alpha,
        g_p: gp,
        k_g: g_derivatives.k_g,
        f_p: d.f_p,
        f_rho2: d.f_rho2,
        f_rho3: d.f_rho3,
        f_rho2x: d.f_rho2x,
    };
    let nf = inputs.normal_form()?;
    rep.normal_form = Some(nf);
    rep.closed_form_margin = Some(inputs.closed_form_margin());
    let failing: Vec<&str> = rep.hypotheses.iter().filter(|h| h.status != Status::Pass).map(|h| h.name).collect();
    if !failing.is_empty() {
        rep.reason = format!("hypotheses not established: {}", failing.join(", "));
    } else if nf.margin < 0.0 {
        rep.verdict = Verdict::Stable;
        rep.reason = format!("elliptic with negative margin {:e}", nf.margin);
    } else {
        rep.reason = format!("margin {:e} is not negative", nf.margin);
    }
    Ok(rep)
}

/// `|z|` along a skew orbit recorded every `stride` steps, with the transverse distance
/// `|x_1 - x_2| + |ln rho_1|` at both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corroboration {
    pub steps: u64,
    pub stride: u64,
    pub abs_z: Vec<f64>,
    pub initial_distance: f64,
    pub final_distance: f64,
    /// Mean one-step rotation angle over the first stride.
    pub measured_theta: f64,
}

impl Corroboration {
    /// Largest increase of `|z|` between consecutive records from index `skip` on.
    pub fn max_rise_after(&self, skip: usize) -> f64 {
        self.abs_z[skip.min(self.abs_z.len())..].windows(2).fold(f64::NEG_INFINITY, |m, w| m.max(w[1] - w[0]))
    }

    pub fn decay_ratio(&self) -> f64 {
        self.final_distance / self.initial_distance
    }
}

pub fn transverse_distance(s: &SkewState) -> f64 {
    (s.x[0] - s.x[1]).abs() + s.rho[0].ln().abs()
}

pub fn corroborate(model: &ModelSpec, start: &SkewState, steps: u64, stride: u64) -> Result<Corroboration, StabilityError> {
    if stride == 0 {
        return Err(StabilityError::Precondition("stride must be positive".into()));
    }
    let frame = NormalFrame::new(model)?;
    let mut s = start.clone();
    let mut z = frame.to_normal(&s).z;
    let mut abs_z = vec![z.norm()];
    let mut turned = 0.0;
    for t in 1..=steps {
        s = step_skew(model, &s)?;
        let next = frame.to_normal(&s).z;
        if t <= stride {
            turned += (next / z).arg();
        }
        z = next;
        if t % stride == 0 {
            abs_z.push(z.norm());
        }
    }
    Ok(Corroboration {
        steps,
        stride,
        abs_z,
        initial_distance: transverse_distance(start),
        final_distance: transverse_distance(&s),
        measured_theta: turned / stride.min(steps).max(1) as f64,
    })
}
