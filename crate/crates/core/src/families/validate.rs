use super::cn::compute_c_n;
use super::f::{Deviation, FMapFamily};
use super::g::{compute_s_g, g_center_derivatives, GMapFamily};
use crate::report::{AuditReport, Check, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;
const ANCHOR_F: &str = "buyer-response-hypotheses";
const ANCHOR_G: &str = "price-revision-hypotheses";

fn rho_grid(f: &FMapFamily, res: usize) -> Vec<f64> {
    let top: f64 = match f {
        FMapFamily::SmoothC4(s) => (3.0 * s.rho0).max(10.0),
        _ => 10.0,
    };
    let lt = top.ln();
    let mut out: Vec<f64> = (1..=res).map(|i| (lt * i as f64 / res as f64).exp()).collect();
    if let FMapFamily::SmoothC4(s) = f {
        let l0 = s.rho0.ln();
        out.extend((1..=res).map(|i| (l0 * i as f64 / (res + 1) as f64).exp()));
        out.push(s.rho0);
    }
    let mut all: Vec<f64> = out.iter().map(|r| 1.0 / r).collect();
    all.extend(out);
    all.push(1.0);
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

fn x_grid(f: &FMapFamily, res: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=res).map(|i| i as f64 / res as f64).collect();
    if let FMapFamily::SmoothC4(s) = f {
        xs.extend([s.x0, 1.0 - s.x0]);
        xs.extend((1..res).map(|i| s.x0 * i as f64 / res as f64));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// `max |f(1/rho, x) - 1 + f(rho, 1 - x)|` over the validation grid.
pub fn symmetry_residual(f: &FMapFamily, resolution: usize) -> f64 {
    let res = resolution.max(4);
    let xs = x_grid(f, res);
    rho_grid(f, res)
        .iter()
        .flat_map(|&r| xs.iter().map(move |&x| (f.value(1.0 / r, x) - 1.0 + f.value(r, 1.0 - x)).abs()))
        .fold(0.0, f64::max)
}

fn count_check(name: &str, bad: usize, measured: f64, tol: f64, anchor: &str) -> Check {
    Check::new(name, Status::from_bool(bad == 0), measured, tol, anchor)
        .with_detail(format!("{bad} grid violations"))
}

/// Grid check of the buyer-response hypotheses for `n` sellers.
///
/// `resolution` is the number of points per axis half (at least 10 is sensible).
pub fn validate_f(f: &FMapFamily, n: usize, resolution: usize) -> AuditReport {
    let res = resolution.max(4);
    let rhos = rho_grid(f, res);
    let xs = x_grid(f, res);
    let mut rep = AuditReport::new();

    let mut range_bad = 0;
    let mut id_err: f64 = 0.0;
    let mut inc_bad = 0;
    let mut dec_bad = 0;
    let mut dec_worst: f64 = 0.0;
    let mut bnd_bad = 0;
    let mut slope_sup: f64 = 0.0;
    let mut slope_bad = 0;
    let mut sym: f64 = 0.0;

    for (j, &r) in rhos.iter().enumerate() {
        let vals: Vec<f64> = xs.iter().map(|&x| f.value(r, x)).collect();
        for (i, &v) in vals.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                range_bad += 1;
            }
            if r == 1.0 {
                id_err = id_err.max((v - xs[i]).abs());
            }
            if i > 0 && vals[i] <= vals[i - 1] {
                inc_bad += 1;
            }
            if j > 0 && xs[i] > 0.0 && xs[i] < 1.0 {
                let prev = f.value(rhos[j - 1], xs[i]);
                if v > prev + TOL {
                    dec_bad += 1;
                    dec_worst = dec_worst.max(v - prev);
                }
            }
            sym = sym.max((f.value(1.0 / r, xs[i]) - 1.0 + f.value(r, 1.0 - xs[i])).abs());
        }
        if r > 1.0 {
            if vals[0].abs() > TOL || vals[vals.len() - 1] >= 1.0 {
                bnd_bad += 1;
            }
        } else if r < 1.0 && (vals[0] <= 0.0 || (vals[vals.len() - 1] - 1.0).abs() > TOL) {
            bnd_bad += 1;
        }
        if r != 1.0 {
            let s = xs.iter().map(|&x| f.dx(r, x)).fold(f64::MIN, f64::max);
            slope_sup = slope_sup.max(s);
            if s >= 1.0 {
                slope_bad += 1;
            }
        }
    }
    // edge of the domain on the decreasing-in-rho check at x = 0 when rho >= 1
    for w in rhos.windows(2).filter(|w| w[0] >= 1.0) {
        if f.value(w[1], 0.0) > f.value(w[0], 0.0) + TOL {
            dec_bad += 1;
        }
    }

    rep.push(count_check("f.range", range_bad, 0.0, 0.0, ANCHOR_F));
    rep.push(Check::new("f.identity", Status::from_bool(id_err <= TOL), id_err, TOL, ANCHOR_F));
    rep.push(count_check("f.increasing_x", inc_bad, 0.0, 0.0, ANCHOR_F));
    rep.push(count_check("f.decreasing_rho", dec_bad, dec_worst, TOL, ANCHOR_F));
    rep.push(count_check("f.boundary", bnd_bad, 0.0, TOL, ANCHOR_F));
    rep.push(count_check("f.slope_below_one", slope_bad, slope_sup, 1.0, ANCHOR_F));
    let sym_status = if sym <= TOL {
        Status::Pass
    } else if n == 2 {
        Status::Fail
    } else {
        Status::NotApplicable
    };
    rep.push(
        Check::new("f.symmetry", sym_status, sym, TOL, ANCHOR_F)
            .with_detail("max |f(1/rho, x) - 1 + f(rho, 1 - x)|"),
    );
    rep.constant("f.symmetry_residual", sym);

    if let FMapFamily::Spefam { dev } = f {
        spefam_checks(&mut rep, *dev, n, &rhos, &xs);
    }
    if let FMapFamily::SmoothC4(s) = f {
        let c0 = s.c.value(s.rho0);
        let end = (s.b.value(s.rho0) - 0.5 * (1.0 - c0)).abs();
        let b_ok = s.b.value(1.0) == 0.0 && s.b.deriv(1, 1.0) > 0.0 && end <= TOL;
        let mono_b = rhos.iter().filter(|&&r| r >= 1.0 && r <= s.rho0).all(|&r| s.b.deriv(1, r) > 0.0);
        rep.push(
            Check::new("f.smooth.b_shape", Status::from_bool(b_ok && mono_b), end, TOL, ANCHOR_F)
                .with_detail("b(1) = 0, b' > 0, b(rho0) = (1 - c(rho0))/2"),
        );
        let worst = rhos
            .iter()
            .filter(|&&r| r >= 1.0 && r <= s.rho0)
            .map(|&r| s.b.deriv(1, r) + s.c.d1(r) * s.x0)
            .fold(f64::INFINITY, f64::min);
        rep.push(
            Check::new("f.smooth.rho_monotone", Status::from_bool(worst >= 0.0), worst, 0.0, ANCHOR_F)
                .with_detail("min of b'(rho) + c'(rho) x0 on [1, rho0]"),
        );
    }
    rep
}

fn spefam_checks(rep: &mut AuditReport, dev: Deviation, n: usize, rhos: &[f64], xs: &[f64]) {
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for &r in rhos {
        for &x in xs {
            let d = dev.value(r, x);
            let cap = Deviation::envelope(r) * x;
            if d < -TOL || d > cap + TOL {
                bad += 1;
                worst = worst.max((d - cap).max(-d));
            }
        }
    }
    rep.push(count_check("f.spefam.deviation_bounds", bad, worst, TOL, ANCHOR_F));
    if n < 3 {
        return;
    }
    let zero = matches!(dev, Deviation::Zero);
    if n < 5 {
        rep.push(
            Check::new("f.spefam.c_n", Status::from_bool(zero), if zero { 0.0 } else { 1.0 }, 0.0, ANCHOR_F)
                .with_detail("three or four sellers need a zero deviation"),
        );
        return;
    }
    let mut bad = 0;
    let mut margin = f64::INFINITY;
    for &r in rhos.iter().filter(|&&r| r != 1.0 && r < n as f64 - 1.0) {
        let Ok(cn) = compute_c_n(n, r) else { continue };
        let sup = xs
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| dev.value(r, x) / x)
            .fold(0.0, f64::max);
        if (sup.is_nan() || sup >= cn) && !zero {
            bad += 1;
        }
        margin = margin.min(cn - sup);
    }
    rep.push(count_check("f.spefam.c_n", bad, margin, 0.0, ANCHOR_F));
}

/// Checks the price-revision hypotheses; `seed` drives the sampled sum check.
pub fn validate_g(g: &GMapFamily, n: usize, seed: u64) -> AuditReport {
    let mut rep = AuditReport::new();
    let m = 2000;
    let ds: Vec<f64> = (1..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
    let vals: Vec<f64> = ds.iter().map(|&d| g.value(d)).collect();
    let floor = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let inc = vals.windows(2).all(|w| w[1] > w[0]);
    let hg1 = inc && floor > -1.0 && g.value(0.0) == 0.0;
    rep.push(
        Check::new("g.hg1", Status::from_bool(hg1), floor, -1.0, ANCHOR_G)
            .with_detail("g(0) = 0, increasing and above -1 on (-1, 1]"),
    );
    let hg2 = match *g {
        GMapFamily::Linear { .. } => true,
        GMapFamily::Quadratic { b, .. } => b <= 0.0,
    };
    rep.push(
        Check::new("g.hg2", Status::from_bool(hg2), 0.0, 0.0, ANCHOR_G)
            .with_detail("sum of g over competitor gaps is non-positive"),
    );
    if n > 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::NEG_INFINITY;
        let mut x = vec![0.0; n];
        for _ in 0..100_000 {
            x.iter_mut().for_each(|v| *v = rng.gen::<f64>());
            let s: f64 = x.iter().sum();
            let tot: f64 = x.iter().map(|&xi| g.value(xi - (s - xi) / (n - 1) as f64)).sum();
            worst = worst.max(tot);
        }
        rep.push(Check::new("g.hg2_sampled", Status::from_bool(worst <= TOL), worst, TOL, ANCHOR_G));
    }
    let s_g = compute_s_g(g);
    rep.push(Check::new("g.hg3", Status::from_bool(s_g.is_finite()), s_g, f64::INFINITY, ANCHOR_G));
    rep.constant("S_g", s_g);
    rep.constant("K_g", g_center_derivatives(g).k_g);
    rep
}
