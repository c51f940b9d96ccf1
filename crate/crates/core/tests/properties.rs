use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use proptest::prelude::*;

use theta_opers::curve::{Chart, HyperellipticCurve, SurfacePoint};
use theta_opers::kernels::{klein_coordinates, JacobianPoint, Kernels};
use theta_opers::parse::{parse_complex, parse_point, parse_vector};
use theta_opers::theta::{theta, Characteristic, RiemannMatrix, ThetaConfig, ThetaRequest};
use theta_opers::C64;

const DX: [Chart; 2] = [Chart::Linear {
    scale: C64 { re: 1.0, im: 0.0 },
}; 2];

fn quintic() -> &'static HyperellipticCurve {
    static CURVE: OnceLock<HyperellipticCurve> = OnceLock::new();
    CURVE.get_or_init(|| {
        let f: Vec<C64> = [0.3, -1.0, 0.2, 0.0, -0.5, 1.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        HyperellipticCurve::new(&f).unwrap()
    })
}

fn omega_strategy(g: usize) -> impl Strategy<Value = RiemannMatrix> {
    (
        prop::collection::vec(-0.5f64..0.5, g * g),
        prop::collection::vec(-0.5f64..0.5, g * g),
        0.8f64..1.5,
    )
        .prop_map(move |(a, x, shift)| {
            let a = DMatrix::from_vec(g, g, a);
            let y = &a * a.transpose() + DMatrix::<f64>::identity(g, g) * shift;
            let x = DMatrix::from_vec(g, g, x);
            let x = (&x + x.transpose()) * 0.5;
            RiemannMatrix::new(DMatrix::from_fn(g, g, |i, j| C64::new(x[(i, j)], y[(i, j)]))).unwrap()
        })
}

fn vector_strategy(g: usize, r: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b)), g)
}

fn characteristic_strategy(g: usize) -> impl Strategy<Value = Characteristic> {
    (prop::collection::vec(0u8..2, g), prop::collection::vec(0u8..2, g))
        .prop_map(|(a, b)| Characteristic::new(a, b).unwrap())
}

fn setup(g: usize) -> impl Strategy<Value = (RiemannMatrix, Vec<C64>, Characteristic)> {
    (omega_strategy(g), vector_strategy(g, 0.5), characteristic_strategy(g))
}

fn theta_at(z: &[C64], ch: &Characteristic, om: &RiemannMatrix) -> C64 {
    theta(&ThetaRequest::value(z.to_vec(), ch.clone(), 1e-12), om).unwrap().to_c64()
}

/// A point on `quintic()` at least 0.15 from every branch point.
fn point_strategy() -> impl Strategy<Value = SurfacePoint> {
    ((-1.5f64..1.5, -1.5f64..1.5), prop::bool::ANY)
        .prop_filter("near a branch point", |((re, im), _)| {
            quintic().branch_distance(C64::new(*re, *im)) > 0.15
        })
        .prop_map(|((re, im), up)| quintic().point(C64::new(re, im), if up { 1 } else { -1 }).unwrap())
}

fn jacobian_strategy() -> impl Strategy<Value = Vec<C64>> {
    (prop::collection::vec(-0.5f64..0.5, 2), prop::collection::vec(-0.5f64..0.5, 2))
        .prop_map(|(a, b)| quintic().riemann_matrix().lattice_vector(&b, &a))
        .prop_filter("on the theta divisor", |e| {
            JacobianPoint::new(e.clone()).theta_ratio(quintic(), &ThetaConfig::default()).unwrap() > 1e-2
        })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theta_parity((om, z, ch) in (1usize..=3).prop_flat_map(setup)) {
        let minus: Vec<C64> = z.iter().map(|v| -v).collect();
        let sign = if ch.is_odd() { -1.0 } else { 1.0 };
        let (p, m) = (theta_at(&z, &ch, &om), theta_at(&minus, &ch, &om));
        prop_assert!((m - sign * p).norm() <= 1e-10 * p.norm().max(1.0));
    }

    #[test]
    fn theta_is_periodic_in_integer_shifts((om, z, ch) in setup(2), n0 in -2i32..3, n1 in -2i32..3) {
        // theta[a, b](z + n) = exp(2 pi i a.n) theta[a, b](z)
        let a = ch.alpha();
        let shifted = vec![z[0] + n0 as f64, z[1] + n1 as f64];
        let phase = C64::new(0.0, 2.0 * PI * (a[0] * n0 as f64 + a[1] * n1 as f64)).exp();
        let (lhs, rhs) = (theta_at(&shifted, &ch, &om), phase * theta_at(&z, &ch, &om));
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn reduction_stays_in_the_class((om, z, _ch) in setup(2)) {
        let r = om.reduce(&z);
        let diff: Vec<C64> = z.iter().zip(&r).map(|(a, b)| a - b).collect();
        prop_assert!(om.lattice_distance(&diff) < 1e-12);
        let (a, b) = om.real_coordinates(&r);
        prop_assert!(a.iter().chain(&b).all(|x| (-0.5 - 1e-12..0.5 + 1e-12).contains(x)));
    }

    #[test]
    fn complex_round_trip(re in any::<f64>().prop_filter("finite", |x| x.is_finite()),
                          im in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let z = C64::new(re, im);
        let text = serde_json::to_string(&z).unwrap();
        prop_assert_eq!(parse_complex(&text).unwrap(), z);
        let v = vec![z, z.conj()];
        prop_assert_eq!(parse_vector(&serde_json::to_string(&v).unwrap()).unwrap(), v);
        let p = parse_point(&format!("{{\"x\": {text}, \"sheet\": -1}}")).unwrap();
        prop_assert_eq!(p, (z, -1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bergman_and_klein_are_symmetric(x in point_strategy(), y in point_strategy(), e in jacobian_strategy()) {
        prop_assume!((x.x - y.x).norm() > 0.2);
        let k = Kernels::new(quintic()).unwrap();
        let b = (k.bergman(&x, &y, DX).unwrap().value, k.bergman(&y, &x, DX).unwrap().value);
        prop_assert!(rel(b.0, b.1) < 1e-9);
        let pair = [e.clone(), e.iter().map(|v| -v).collect()];
        let kl = (k.klein(&pair, &x, &y, DX).unwrap().value, k.klein(&pair, &y, &x, DX).unwrap().value);
        prop_assert!(rel(kl.0, kl.1) < 1e-9);
    }

    #[test]
    fn szego_transposes_to_the_dual(x in point_strategy(), y in point_strategy(), e in jacobian_strategy()) {
        prop_assume!((x.x - y.x).norm() > 0.2);
        let k = Kernels::new(quintic()).unwrap();
        let minus: Vec<C64> = e.iter().map(|v| -v).collect();
        let s = k.szego(&e, &x, &y, DX).unwrap().value;
        let t = k.szego(&minus, &y, &x, DX).unwrap().value;
        prop_assert!(rel(s, -t) < 1e-9);
    }

    #[test]
    fn klein_coordinates_are_even_and_periodic(e in jacobian_strategy(), m0 in -1i32..2, n1 in -1i32..2) {
        let cfg = ThetaConfig::default();
        let curve = quintic();
        let c = klein_coordinates(curve, &e, &cfg).unwrap();
        let minus: Vec<C64> = e.iter().map(|v| -v).collect();
        let shift = curve.riemann_matrix().lattice_vector(&[m0 as f64, 0.0], &[0.0, n1 as f64]);
        let moved: Vec<C64> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let scale = c.norm();
        prop_assert!((&c.matrix - &klein_coordinates(curve, &minus, &cfg).unwrap().matrix).norm() < 1e-9 * scale);
        prop_assert!((&c.matrix - &klein_coordinates(curve, &moved, &cfg).unwrap().matrix).norm() < 1e-9 * scale);
    }
}
