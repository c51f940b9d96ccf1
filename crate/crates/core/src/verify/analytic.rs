use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use super::{Check, VerifyConfig};
use crate::curve::{Chart, HyperellipticCurve, SurfacePoint};
use crate::kernels::{
    gauss_limit_check, klein_coordinates, nonsingular_odd_characteristics, odd_half_period, DiagonalKernel,
    JacobianPoint, KernelError, Kernels,
};
use crate::theta::{
    second_order_theta_basis, theta, theta_jet, Characteristic, RiemannMatrix, ScaledComplex, ThetaConfig,
    ThetaError, ThetaRequest,
};
use crate::C64;

const DX: [Chart; 2] = [Chart::Linear {
    scale: C64 { re: 1.0, im: 0.0 },
}; 2];

/// `Omega = X + iY` with `Y = A A^T + c I`, entries of `A` and `X` uniform in `[-1/2, 1/2)`.
pub fn random_riemann_matrix<R: Rng>(rng: &mut R, g: usize) -> RiemannMatrix {
    let a = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    let y = &a * a.transpose() + DMatrix::identity(g, g) * rng.gen_range(0.8..1.5);
    let x = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    let x = (&x + x.transpose()) * 0.5;
    RiemannMatrix::new(DMatrix::from_fn(g, g, |i, j| C64::new(x[(i, j)], y[(i, j)])))
        .expect("Y is positive definite by construction")
}

fn random_vector<R: Rng>(rng: &mut R, g: usize, scale: f64) -> Vec<C64> {
    (0..g)
        .map(|_| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect()
}

/// Plain lattice sum over the box `|n_i| <= bound`, without rescaling.
pub fn brute_force_theta(z: &[C64], ch: &Characteristic, omega: &RiemannMatrix, bound: i64) -> C64 {
    let g = z.len();
    let (a, b) = (ch.alpha(), ch.beta());
    let om = omega.entries();
    let mut total = C64::new(0.0, 0.0);
    let mut n = vec![-bound; g];
    loop {
        let w: Vec<f64> = (0..g).map(|i| n[i] as f64 + a[i]).collect();
        let mut ex = C64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                ex += C64::new(0.0, PI) * om[(i, j)] * w[i] * w[j];
            }
            ex += C64::new(0.0, 2.0 * PI) * w[i] * (z[i] + b[i]);
        }
        total += ex.exp();
        let mut k = 0;
        loop {
            if k == g {
                return total;
            }
            n[k] += 1;
            if n[k] <= bound {
                break;
            }
            n[k] = -bound;
            k += 1;
        }
    }
}

/// `theta(z + w) theta(z - w) / sum_sigma Theta[sigma](z) Theta[sigma](w)` for each pair.
pub fn quadratic_identity_ratios(
    omega: &RiemannMatrix,
    pairs: &[(Vec<C64>, Vec<C64>)],
    tol: f64,
) -> Result<Vec<C64>, ThetaError> {
    let zero = Characteristic::zero(omega.genus());
    pairs
        .iter()
        .map(|(z, w)| {
            let plus: Vec<C64> = z.iter().zip(w).map(|(a, b)| a + b).collect();
            let minus: Vec<C64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
            let lhs = theta(&ThetaRequest::value(plus, zero.clone(), tol), omega)?
                * theta(&ThetaRequest::value(minus, zero.clone(), tol), omega)?;
            let bz = second_order_theta_basis(z, omega, tol)?;
            let bw = second_order_theta_basis(w, omega, tol)?;
            let rhs = bz
                .iter()
                .zip(&bw)
                .fold(ScaledComplex::ZERO, |acc, (a, b)| acc.add(&(*a * *b)));
            Ok((lhs / rhs).to_c64())
        })
        .collect()
}

/// A uniformly drawn admissible point well away from the branch points.
pub fn random_point<R: Rng>(curve: &HyperellipticCurve, rng: &mut R) -> SurfacePoint {
    let roots = curve.finite_branch_points();
    let center = roots.iter().sum::<C64>() / roots.len() as f64;
    let spread = roots.iter().map(|r| (r - center).norm()).fold(0.0, f64::max).max(curve.scale());
    let half = 1.2 * spread;
    loop {
        let x = center + C64::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
        if curve.branch_distance(x) > 0.1 * spread {
            let sheet = if rng.gen_bool(0.5) { 1 } else { -1 };
            if let Ok(p) = curve.point(x, sheet) {
                return p;
            }
        }
    }
}

fn random_pair<R: Rng>(curve: &HyperellipticCurve, rng: &mut R) -> (SurfacePoint, SurfacePoint) {
    loop {
        let x = random_point(curve, rng);
        let y = random_point(curve, rng);
        if (x.x - y.x).norm() > 0.2 * curve.scale() {
            return (x, y);
        }
    }
}

/// `e = a + Omega b` with `(a, b)` uniform in `[-1/2, 1/2)^{2g}`, at least `1e-2` (relative)
/// away from the theta divisor.
pub fn random_jacobian_point<R: Rng>(
    curve: &HyperellipticCurve,
    rng: &mut R,
    config: &ThetaConfig,
) -> Result<Vec<C64>, KernelError> {
    let omega = curve.riemann_matrix();
    let g = omega.genus();
    loop {
        let a: Vec<f64> = (0..g).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let b: Vec<f64> = (0..g).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let e = omega.lattice_vector(&b, &a);
        if JacobianPoint::new(e.clone()).theta_ratio(curve, config)? > 1e-2 {
            return Ok(e);
        }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

fn neg(e: &[C64]) -> Vec<C64> {
    e.iter().map(|z| -z).collect()
}

/// Theta values against lattice sums, quasi-periodicity, parity and the quadratic identity.
pub fn theta_suite(config: &VerifyConfig) -> Result<Vec<Check>, KernelError> {
    let tol = config.theta.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();

    let square = RiemannMatrix::from_rows(&[vec![C64::new(0.0, 1.0)]])?;
    let origin = [C64::new(0.0, 0.0)];
    let zero1 = Characteristic::zero(1);
    let value = theta(&ThetaRequest::value(origin.to_vec(), zero1.clone(), tol), &square)?.to_c64();
    let brute = brute_force_theta(&origin, &zero1, &square, 10);
    checks.push(Check::residual("theta_origin_lattice_sum", (value - brute).norm(), 1e-12));
    let closed = PI.powf(0.25) / gamma(0.75);
    checks.push(Check::residual("theta_origin_closed_form", (value - closed).norm(), 1e-12));

    let mut worst = 0.0f64;
    for _ in 0..10 {
        let g = rng.gen_range(1..=2);
        let om = random_riemann_matrix(&mut rng, g);
        let z = random_vector(&mut rng, g, 0.5);
        let chars = Characteristic::all(g);
        let ch = &chars[rng.gen_range(0..chars.len())];
        let v = theta(&ThetaRequest::value(z.clone(), ch.clone(), tol), &om)?.to_c64();
        worst = worst.max(rel(v, brute_force_theta(&z, ch, &om, 8)));
    }
    checks.push(Check::residual("theta_random_lattice_sums", worst, 1e-12));

    let mut quasi = 0.0f64;
    let mut parity = 0.0f64;
    for _ in 0..50 {
        let g = rng.gen_range(1..=3);
        let om = random_riemann_matrix(&mut rng, g);
        let z = random_vector(&mut rng, g, 0.5);
        let chars = Characteristic::all(g);
        let ch = chars[rng.gen_range(0..chars.len())].clone();
        let m: Vec<f64> = (0..g).map(|_| rng.gen_range(-1..=1) as f64).collect();
        let n: Vec<f64> = (0..g).map(|_| rng.gen_range(-1..=1) as f64).collect();
        let shifted: Vec<C64> = z.iter().zip(om.lattice_vector(&m, &n)).map(|(a, b)| a + b).collect();
        let lhs = theta(&ThetaRequest::value(shifted, ch.clone(), tol), &om)?;
        let base = theta(&ThetaRequest::value(z.clone(), ch.clone(), tol), &om)?;
        let (al, be) = (ch.alpha(), ch.beta());
        let mut ex = C64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                ex -= C64::new(0.0, PI) * m[i] * om.entries()[(i, j)] * m[j];
            }
            ex -= C64::new(0.0, 2.0 * PI) * m[i] * z[i];
            ex += C64::new(0.0, 2.0 * PI) * (al[i] * n[i] - be[i] * m[i]);
        }
        let predicted = ScaledComplex::new(ex.exp(), 0.0) * base;
        let diff = lhs.add(&-predicted);
        if !diff.is_zero() {
            quasi = quasi.max((diff.ln_abs() - lhs.ln_abs()).exp());
        }

        let plus = theta_jet(&z, &ch, &om, 0, tol)?;
        let minus = theta_jet(&neg(&z), &ch, &om, 0, tol)?;
        let sign = if ch.is_odd() { -1.0 } else { 1.0 };
        let diff = minus.scaled_value().add(&-(ScaledComplex::new(C64::new(sign, 0.0), 0.0) * plus.scaled_value()));
        if !diff.is_zero() {
            let reference = plus.max_term.ln() + plus.log_scale;
            parity = parity.max((diff.ln_abs() - reference).exp());
        }
    }
    checks.push(Check::residual("theta_quasi_periodicity", quasi, 1e-10));
    checks.push(Check::residual("theta_parity", parity, 1e-10));

    for g in 1..=2 {
        let om = random_riemann_matrix(&mut rng, g);
        let pairs: Vec<(Vec<C64>, Vec<C64>)> = (0..10)
            .map(|_| (random_vector(&mut rng, g, 0.5), random_vector(&mut rng, g, 0.5)))
            .collect();
        let ratios = quadratic_identity_ratios(&om, &pairs, tol)?;
        let spread = ratios.iter().map(|r| rel(*r, ratios[0])).fold(0.0, f64::max);
        checks.push(
            Check::residual(&format!("quadratic_identity_genus_{g}"), spread, 1e-8)
                .with_detail(format!("ratio {:.12}", ratios[0])),
        );
    }
    Ok(checks)
}

/// Diagonal normalizations, symmetries, A-periods and characteristic independence.
pub fn kernels_suite(curve: &HyperellipticCurve, config: &VerifyConfig) -> Result<Vec<Check>, KernelError> {
    let k = Kernels::with_config(curve, config.theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();
    let s = 1e-3 * curve.scale();

    let names = ["prime_form_diagonal", "bergman_biresidue", "szego_residue", "klein_rank_2_biresidue", "klein_rank_3_biresidue"];
    let mut worst = [0.0f64; 5];
    for _ in 0..3 {
        let x = random_point(curve, &mut rng);
        let dir = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        let e = random_jacobian_point(curve, &mut rng, &config.theta)?;
        let e2 = random_jacobian_point(curve, &mut rng, &config.theta)?;
        let e3: Vec<C64> = e.iter().zip(&e2).map(|(a, b)| -a - b).collect();
        let kinds = [
            DiagonalKernel::Prime,
            DiagonalKernel::Bergman,
            DiagonalKernel::Szego(e.clone()),
            DiagonalKernel::Klein(vec![e.clone(), neg(&e)]),
            DiagonalKernel::Klein(vec![e, e2, e3]),
        ];
        for (w, kind) in worst.iter_mut().zip(&kinds) {
            *w = w.max((k.diagonal_limit(kind, &x, dir, s)? - 1.0).norm());
        }
    }
    for (name, w) in names.iter().zip(worst) {
        checks.push(Check::residual(name, w, 1e-6));
    }

    let mut period = 0.0f64;
    for _ in 0..2 {
        let x = random_point(curve, &mut rng);
        for cycle in 0..curve.genus() {
            period = period.max(k.bergman_a_period(&x, cycle, 256)?.norm());
        }
    }
    checks.push(Check::residual("bergman_a_periods", period, 1e-7));

    let (mut bergman, mut szego, mut klein, mut even) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..config.cases.max(1) {
        let (x, y) = random_pair(curve, &mut rng);
        let e = random_jacobian_point(curve, &mut rng, &config.theta)?;
        let m = neg(&e);
        bergman = bergman.max(rel(k.bergman(&x, &y, DX)?.value, k.bergman(&y, &x, DX)?.value));
        szego = szego.max(rel(k.szego(&e, &x, &y, DX)?.value, -k.szego(&m, &y, &x, DX)?.value));
        let pair = [e.clone(), m.clone()];
        klein = klein.max(rel(k.klein(&pair, &x, &y, DX)?.value, k.klein(&pair, &y, &x, DX)?.value));
        let a = klein_coordinates(curve, &e, &config.theta)?;
        let b = klein_coordinates(curve, &m, &config.theta)?;
        even = even.max((&a.matrix - &b.matrix).norm() / a.norm());
    }
    checks.push(Check::residual("bergman_symmetry", bergman, 1e-9));
    checks.push(Check::residual("szego_transpose", szego, 1e-9));
    checks.push(Check::residual("klein_rank_2_symmetry", klein, 1e-9));
    checks.push(Check::residual("klein_coordinates_even", even, 1e-9));

    let odd = nonsingular_odd_characteristics(curve, &config.theta)?;
    if odd.len() > 1 {
        let other = Kernels::with_characteristic(curve, odd[odd.len() - 1].clone(), config.theta)?;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let (x, y) = random_pair(curve, &mut rng);
            worst = worst.max(rel(k.bergman(&x, &y, DX)?.value, other.bergman(&x, &y, DX)?.value));
        }
        checks.push(Check::residual("bergman_characteristic_independence", worst, 1e-8));
    }

    // approach a theta zero along a line: the coordinates must keep growing
    let e0 = odd_half_period(curve, k.characteristic());
    let dir: Vec<C64> = (0..curve.genus()).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))).collect();
    let norms = (0..8)
        .map(|j| {
            let t = 0.1 / 4f64.powi(j);
            let e: Vec<C64> = e0.iter().zip(&dir).map(|(a, d)| a + d * t).collect();
            Ok(klein_coordinates(curve, &e, &config.theta)?.norm())
        })
        .collect::<Result<Vec<f64>, KernelError>>()?;
    let drops = norms[3..].windows(2).filter(|w| w[1] <= w[0]).count();
    checks.push(Check::exact("klein_coordinates_blow_up", drops == 0, drops as f64));
    Ok(checks)
}

/// Kl(e, -e) against Bergman plus the Klein-coordinate correction at random (e, x, y).
pub fn fay_suite(curve: &HyperellipticCurve, config: &VerifyConfig) -> Result<Vec<Check>, KernelError> {
    let k = Kernels::with_config(curve, config.theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.cases.max(1))
        .map(|i| {
            let (x, y) = random_pair(curve, &mut rng);
            let e = random_jacobian_point(curve, &mut rng, &config.theta)?;
            Ok(Check::residual(&format!("fay_case_{i}"), k.fay_residual(&e, &x, &y)?, 1e-8))
        })
        .collect()
}

/// The squared Gauss map at every nonsingular odd half period.
pub fn gauss_suite(curve: &HyperellipticCurve, config: &VerifyConfig) -> Result<Vec<Check>, KernelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();
    for delta in nonsingular_odd_characteristics(curve, &config.theta)? {
        let e0 = odd_half_period(curve, &delta);
        let dir: Vec<C64> = (0..curve.genus()).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))).collect();
        let report = gauss_limit_check(curve, &e0, &dir, 1e-3, 3, &config.theta)?;
        let tag = format!("{:?}{:?}", delta.alpha_bits(), delta.beta_bits()).replace(", ", "");
        checks.push(Check::residual(&format!("gauss_limit_{tag}"), report.extrapolated_deviation, 1e-5));
        if curve.genus() > 1 {
            checks.push(Check::residual(&format!("gauss_rank_one_{tag}"), report.singular_ratio, 1e-4));
        }
    }
    Ok(checks)
}
