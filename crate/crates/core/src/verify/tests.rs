use super::*;
use crate::C64;

fn curve(coeffs: &[f64]) -> HyperellipticCurve {
    let f: Vec<C64> = coeffs.iter().map(|&x| C64::new(x, 0.0)).collect();
    HyperellipticCurve::new(&f).unwrap()
}

fn assert_passes(report: &SuiteReport) {
    for c in &report.checks {
        assert!(c.passed, "{}: {:?} > {:e} {:?}", c.name, c.residual, c.tolerance, c.detail);
    }
    assert!(report.passed);
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert!("fays".parse::<Suite>().is_err());
    assert_eq!(serde_json::to_string(&Suite::Fay).unwrap(), "\"fay\"");
}

#[test]
fn a_single_failure_fails_the_suite() {
    let r = SuiteReport::new(
        Suite::Theta,
        vec![Check::residual("a", 1e-3, 1e-2), Check::residual("b", 1e-1, 1e-2)],
    );
    assert!(!r.passed);
    assert_eq!(r.max_residual(), 1e-1);
    let e = Check::errored("c", 1.0, "boom".into());
    assert_eq!(serde_json::to_value(&e).unwrap()["residual"], serde_json::Value::Null);
}

#[test]
fn theta_suite_passes() {
    assert_passes(&run_suite(Suite::Theta, None, &VerifyConfig::default()).unwrap());
}

#[test]
fn jets_suite_is_exact() {
    let r = run_suite(Suite::Jets, None, &VerifyConfig::default()).unwrap();
    assert_passes(&r);
    assert_eq!(r.max_residual(), 0.0);
    assert!(r.checks.len() >= 15);
}

#[test]
fn curve_suites_pass_in_genus_one_and_two() {
    let config = VerifyConfig::default();
    for c in [curve(&[0.0, -1.0, 0.0, 1.0]), curve(&[0.0, -1.0, 0.0, 0.0, 0.0, 1.0])] {
        for suite in [Suite::Kernels, Suite::Fay, Suite::Gauss] {
            assert_passes(&run_suite(suite, Some(&c), &config).unwrap());
        }
    }
}

#[test]
fn curve_suites_need_a_curve() {
    assert!(run_suite(Suite::Fay, None, &VerifyConfig::default()).is_err());
}

#[test]
fn quadratic_identity_ratio_is_one() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let om = random_riemann_matrix(&mut rng, 2);
    let pairs = vec![(vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.1)], vec![C64::new(0.2, -0.1), C64::new(0.05, 0.3)])];
    let r = quadratic_identity_ratios(&om, &pairs, 1e-12).unwrap();
    assert!((r[0] - 1.0).norm() < 1e-10, "{}", r[0]);
}
