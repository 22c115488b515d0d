use marketdyn::families::{CKernel, FMapFamily, GMapFamily};
use marketdyn_cli::config::{AuditName, InitSpec, MapKind};
use marketdyn_cli::parse_config;

const MINIMAL: &str = "\
n = 2
alpha = 0.5
f.kind = piecewise_affine
g.kind = linear
g.a = 0.5
init.x = 0.6, 0.4
init.p = 1, 1
";

#[test]
fn minimal_config_parses() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.model.n, 2);
    assert_eq!(cfg.model.alpha, 0.5);
    assert_eq!(cfg.model.f, FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog });
    assert_eq!(cfg.model.g, GMapFamily::Linear { a: 0.5 });
    let InitSpec::Explicit(s) = &cfg.init else { panic!("expected explicit init") };
    assert_eq!(s.x, vec![0.6, 0.4]);
    assert_eq!(cfg.steps, 1000);
    assert_eq!(cfg.record_every, 1);
    assert_eq!(cfg.map, MapKind::Full);
    assert_eq!(cfg.audits, AuditName::DEFAULT.to_vec());
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = format!("# header\n\n{}  # trailing\nrun.steps = 5 # five\n", MINIMAL.trim_end());
    assert_eq!(parse_config(&text).unwrap().steps, 5);
}

#[test]
fn alpha_of_one_is_rejected() {
    let text = MINIMAL.replace("alpha = 0.5", "alpha = 1.0");
    let errs = parse_config(&text).unwrap_err();
    assert_eq!(errs.0.len(), 1);
    assert_eq!(errs.0[0].line, Some(2));
    assert!(errs.0[0].message.contains("[0, 1)"));
}

#[test]
fn errors_are_collected_with_line_numbers() {
    let text = "\
n = two
alpha = 0.5
f.kind = piecewise_affine
f.rho0 = 3
g.kind = linear
g.a = 0.5
colour = red
alpha = 0.2
";
    let errs = parse_config(text).unwrap_err();
    let lines: Vec<Option<usize>> = errs.0.iter().map(|e| e.line).collect();
    assert_eq!(lines, vec![Some(1), Some(4), Some(7), Some(8)], "{errs}");
    assert!(errs.0[0].message.contains("integer"));
    assert!(errs.0[1].message.contains("smooth_c4"));
    assert!(errs.0[2].message.contains("unknown key"));
    assert!(errs.0[3].message.contains("already set on line 2"));
}

#[test]
fn missing_keys_are_reported() {
    let errs = parse_config("n = 3\n").unwrap_err();
    let text = errs.to_string();
    for key in ["f.kind", "g.kind", "alpha"] {
        assert!(text.contains(key), "{text}");
    }
}

#[test]
fn vector_lengths_must_match_n() {
    let text = MINIMAL.replace("init.x = 0.6, 0.4", "init.x = 0.6, 0.3, 0.1");
    let errs = parse_config(&text).unwrap_err();
    assert_eq!(errs.0[0].line, Some(6));
    let text = MINIMAL.replace("init.p = 1, 1", "init.p = 1, -1");
    assert!(parse_config(&text).is_err());
}

#[test]
fn seeded_sampling_records_bounds() {
    let text = "n = 4\nalpha = 0.9\nf.kind = piecewise_affine\ng.kind = linear\ng.a = 0.5\nseed = 42\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.init, InitSpec::Sampled { seed: Some(42), x_range: (0.05, 0.95), p_range: (0.5, 2.0) });
    let bad = format!("{text}init.x_min = 0.9\ninit.x_max = 0.1\n");
    assert!(parse_config(&bad).is_err());
}

#[test]
fn theta_solves_for_alpha() {
    let text = "\
n = 2
theta_deg = 30
f.kind = smooth_c4
g.kind = linear
g.a = 0.5
";
    let cfg = parse_config(text).unwrap();
    assert!((cfg.model.alpha - 0.580_003_085_6).abs() < 1e-9);
    assert!((cfg.theta.unwrap() - std::f64::consts::PI / 6.0).abs() < 1e-15);
    let both = format!("{text}alpha = 0.5\n");
    assert!(parse_config(&both).is_err());
    let affine = text.replace("smooth_c4", "piecewise_affine");
    assert!(parse_config(&affine).is_err());
}

#[test]
fn audit_list_and_family_options() {
    let text = "\
n = 2
alpha = 0.2
f.kind = asymmetric
f.gamma_above = 0.3
f.gamma_below = 0.15
g.kind = quadratic
g.a = 0.5
g.b = -0.1
audit.list = nonsym, mean, mean
audit.gamma = 0.3
run.map = alt2
";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.audits, vec![AuditName::Mean, AuditName::Nonsym]);
    assert_eq!(cfg.gamma, Some(0.3));
    assert_eq!(cfg.map, MapKind::Alt2);
    let no_gamma = text.replace("audit.gamma = 0.3\n", "");
    assert!(parse_config(&no_gamma).is_err());
    let spefam = "n = 3\nalpha = 0\nf.kind = spefam\nf.dev = quadratic\nf.kappa = 0.5\ng.kind = linear\ng.a = 0.5\n";
    assert!(parse_config(spefam).is_ok());
    assert!(parse_config(&spefam.replace("0.5\ng.kind", "1.5\ng.kind")).is_err());
}
