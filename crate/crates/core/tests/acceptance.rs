//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every criterion compares library output against an oracle written here: plain
//! lattice sums for theta values, q-series for the Weierstrass function, and
//! Richardson extrapolation of raw kernel values for diagonal limits.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use theta_opers::curve::{Chart, HyperellipticCurve, SurfacePoint};
use theta_opers::kernels::{
    finiteness_probe, gauss_limit_check, klein_coordinates, nonsingular_odd_characteristics, odd_half_period,
    CollisionKind, JacobianPoint, KernelError, Kernels, ProbeConfig,
};
use theta_opers::theta::{theta, Characteristic, RiemannMatrix, ThetaConfig, ThetaRequest};
use theta_opers::verify::jets_suite;
use theta_opers::C64;

const DX: [Chart; 2] = [Chart::Linear {
    scale: C64 { re: 1.0, im: 0.0 },
}; 2];
const DU: [Chart; 2] = [Chart::Abelian { index: 0 }; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn real_poly(coeffs: &[f64]) -> Vec<C64> {
    coeffs.iter().map(|&x| c(x, 0.0)).collect()
}

fn curve(coeffs: &[C64]) -> HyperellipticCurve {
    HyperellipticCurve::new(coeffs).expect("test curve is smooth")
}

fn flat_cubic() -> HyperellipticCurve {
    curve(&real_poly(&[0.0, -1.0, 0.0, 1.0]))
}

fn bolza_like_quintic() -> HyperellipticCurve {
    curve(&real_poly(&[0.0, -1.0, 0.0, 0.0, 0.0, 1.0]))
}

/// A genus-two curve without extra symmetry.
fn generic_quintic() -> HyperellipticCurve {
    // (x + 1.1)(x - 0.2 - 0.3i)(x - 1)(x + 0.4 + 0.9i)(x - 0.7 + 1.2i)
    let roots = [c(-1.1, 0.0), c(0.2, 0.3), c(1.0, 0.0), c(-0.4, -0.9), c(0.7, -1.2)];
    let mut f = vec![c(1.0, 0.0)];
    for r in roots {
        let mut next = vec![c(0.0, 0.0); f.len() + 1];
        for (i, a) in f.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        f = next;
    }
    curve(&f)
}

// ---------------------------------------------------------------- oracles

/// `sum_n exp(i pi (n+a) Om (n+a) + 2 pi i (n+a)(z+b))` over `|n_i| <= bound`, with the sum
/// of absolute values of the terms.
fn lattice_sum(z: &[C64], a: &[f64], b: &[f64], om: &DMatrix<C64>, bound: i64) -> (C64, f64) {
    let g = z.len();
    let mut n = vec![-bound; g];
    let (mut total, mut abs) = (c(0.0, 0.0), 0.0);
    loop {
        let w: Vec<f64> = (0..g).map(|i| n[i] as f64 + a[i]).collect();
        let mut ex = c(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                ex += c(0.0, PI) * om[(i, j)] * w[i] * w[j];
            }
            ex += c(0.0, 2.0 * PI) * w[i] * (z[i] + b[i]);
        }
        let t = ex.exp();
        total += t;
        abs += t.norm();
        let mut k = 0;
        loop {
            if k == g {
                return (total, abs);
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

/// `wp(u) - wp(v)` for the lattice `Z + tau Z` from the q-series
/// `wp(z) = (2 pi i)^2 sum_n q^n s / (1 - q^n s)^2 + const`, `s = e^{2 pi i z}`.
fn wp_difference(u: C64, v: C64, tau: C64) -> C64 {
    let q = (c(0.0, 2.0 * PI) * tau).exp();
    let part = |z: C64| -> C64 {
        // shift z into the strip |Im z| <= Im tau / 2 so every term is bounded
        let k = (z.im / tau.im).round();
        let z = z - tau * k;
        let s = (c(0.0, 2.0 * PI) * z).exp();
        // x / (1 - x)^2 is invariant under x -> 1/x, so negative n use q^|n| / s
        let term = |t: C64| t / ((c(1.0, 0.0) - t) * (c(1.0, 0.0) - t));
        term(s) + (1..=40).map(|n| term(q.powi(n) * s) + term(q.powi(n) / s)).sum::<C64>()
    };
    c(0.0, 2.0 * PI).powi(2) * (part(u) - part(v))
}

/// Three-level Richardson extrapolation of samples at `s, s/2, s/4`, removing the
/// linear and quadratic error terms.
fn extrapolate(f: [C64; 3]) -> C64 {
    let r1 = [2.0 * f[1] - f[0], 2.0 * f[2] - f[1]];
    (4.0 * r1[1] - r1[0]) / 3.0
}

// ---------------------------------------------------------------- sampling

fn random_omega(rng: &mut ChaCha8Rng, g: usize) -> RiemannMatrix {
    let a = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    let y = &a * a.transpose() + DMatrix::<f64>::identity(g, g) * rng.gen_range(0.8..1.5);
    let x = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-0.5..0.5));
    let x = (&x + x.transpose()) * 0.5;
    RiemannMatrix::new(DMatrix::from_fn(g, g, |i, j| c(x[(i, j)], y[(i, j)]))).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, g: usize, r: f64) -> Vec<C64> {
    (0..g).map(|_| c(rng.gen_range(-r..r), rng.gen_range(-r..r))).collect()
}

fn random_point(k: &HyperellipticCurve, rng: &mut ChaCha8Rng) -> SurfacePoint {
    let roots = k.finite_branch_points();
    let center = roots.iter().sum::<C64>() / roots.len() as f64;
    let spread = roots.iter().map(|r| (r - center).norm()).fold(0.0, f64::max).max(k.scale());
    loop {
        let x = center + c(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)) * spread;
        if k.branch_distance(x) > 0.1 * spread {
            let sheet = if rng.gen_bool(0.5) { 1 } else { -1 };
            return k.point(x, sheet).unwrap();
        }
    }
}

fn random_pair(k: &HyperellipticCurve, rng: &mut ChaCha8Rng) -> (SurfacePoint, SurfacePoint) {
    loop {
        let (x, y) = (random_point(k, rng), random_point(k, rng));
        if (x.x - y.x).norm() > 0.2 * k.scale() {
            return (x, y);
        }
    }
}

fn random_jacobian_point(k: &HyperellipticCurve, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let g = k.genus();
    loop {
        let a: Vec<f64> = (0..g).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let b: Vec<f64> = (0..g).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let e = k.riemann_matrix().lattice_vector(&b, &a);
        if JacobianPoint::new(e.clone()).theta_ratio(k, &ThetaConfig::default()).unwrap() > 1e-2 {
            return e;
        }
    }
}

fn neg(e: &[C64]) -> Vec<C64> {
    e.iter().map(|z| -z).collect()
}

/// Running maximum that keeps NaN, so a broken comparison cannot pass.
fn worse(acc: f64, x: f64) -> f64 {
    if acc.is_nan() || x.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

// ---------------------------------------------------------------- reporting

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn within(name: &str, value: f64, tol: f64) -> (bool, String) {
    (value <= tol, format!("{name}={value:.2e} (tol {tol:.0e})"))
}

fn combine(parts: Vec<(bool, String)>) -> Outcome {
    let passed = parts.iter().all(|p| p.0);
    let detail = parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join(", ");
    Outcome::new(passed, detail)
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome, KernelError>) -> Outcome {
    let start = Instant::now();
    let outcome = match f() {
        Ok(o) => o,
        Err(e) => Outcome::new(false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let budget = limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
    Outcome::new(
        outcome.passed && in_time,
        format!("{}, time {:.2}s{budget}", outcome.detail, elapsed.as_secs_f64()),
    )
}

// ---------------------------------------------------------------- criteria

fn theta_engine() -> Result<Outcome, KernelError> {
    let tol = ThetaConfig::default().tol;
    let square = RiemannMatrix::from_rows(&[vec![c(0.0, 1.0)]])?;
    let value = theta(&ThetaRequest::value(vec![c(0.0, 0.0)], Characteristic::zero(1), tol), &square)?.to_c64();
    let (brute, _) = lattice_sum(&[c(0.0, 0.0)], &[0.0], &[0.0], square.entries(), 10);
    let closed = PI.powf(0.25) / gamma(0.75);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut sums, mut quasi, mut parity) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let g = rng.gen_range(1..=3);
        let om = random_omega(&mut rng, g);
        let z = random_vec(&mut rng, g, 0.5);
        let chars = Characteristic::all(g);
        let ch = chars[rng.gen_range(0..chars.len())].clone();
        let (a, b) = (ch.alpha(), ch.beta());
        let eval = |z: Vec<C64>| theta(&ThetaRequest::value(z, ch.clone(), tol), &om).map(|s| s.to_c64());

        let base = eval(z.clone())?;
        let (oracle, scale) = lattice_sum(&z, &a, &b, om.entries(), 8);
        sums = worse(sums, (base - oracle).norm() / scale);

        let m: Vec<f64> = (0..g).map(|_| rng.gen_range(-1..=1) as f64).collect();
        let n: Vec<f64> = (0..g).map(|_| rng.gen_range(-1..=1) as f64).collect();
        let shift = om.lattice_vector(&m, &n);
        let shifted = eval(z.iter().zip(&shift).map(|(p, q)| p + q).collect())?;
        let mut ex = c(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                ex -= c(0.0, PI) * m[i] * om.entries()[(i, j)] * m[j];
            }
            ex -= c(0.0, 2.0 * PI) * m[i] * (z[i] + b[i]);
            ex += c(0.0, 2.0 * PI) * a[i] * n[i];
        }
        let factor = ex.exp();
        quasi = worse(quasi, (shifted - factor * base).norm() / (factor.norm() * scale));

        let sign = if ch.is_odd() { -1.0 } else { 1.0 };
        let flipped = eval(neg(&z))?;
        parity = worse(parity, (flipped - sign * base).norm() / scale);
    }
    Ok(combine(vec![
        within("|theta(0,i) - lattice sum|", (value - brute).norm(), 1e-12),
        within("|theta(0,i) - pi^(1/4)/Gamma(3/4)|", (value - closed).norm(), 1e-12),
        within("random lattice sums", sums, 1e-12),
        within("quasi-periodicity", quasi, 1e-10),
        within("parity", parity, 1e-10),
    ]))
}

fn periods() -> Result<Outcome, KernelError> {
    let square = flat_cubic().riemann_matrix().entries()[(0, 0)];
    let hex = curve(&real_poly(&[-1.0, 0.0, 0.0, 1.0])).riemann_matrix().entries()[(0, 0)];
    let two = bolza_like_quintic();
    let om = two.riemann_matrix();
    Ok(combine(vec![
        within("|tau(x^3-x) - i|", (square - c(0.0, 1.0)).norm(), 1e-9),
        within("||tau(x^3-1)| - 1|", (hex.norm() - 1.0).abs(), 1e-9),
        within("|Re tau(x^3-1) - 1/2|", (hex.re - 0.5).abs(), 1e-9),
        within("genus-2 asymmetry", om.asymmetry(), 1e-9),
        (
            om.min_im_eigenvalue() > 1e-9,
            format!("genus-2 min eig Im = {:.3}", om.min_im_eigenvalue()),
        ),
    ]))
}

fn fay() -> Result<Outcome, KernelError> {
    let cfg = ThetaConfig::default();
    let mut parts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (label, k) in [("g1", flat_cubic()), ("g2", bolza_like_quintic()), ("g2 generic", generic_quintic())] {
        let ker = Kernels::new(&k)?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let (x, y) = random_pair(&k, &mut rng);
            let e = random_jacobian_point(&k, &mut rng);
            let kl = ker.klein(&[e.clone(), neg(&e)], &x, &y, DX)?.value;
            let cm = klein_coordinates(&k, &e, &cfg)?.matrix;
            let (wx, wy) = (k.omega_dx(&x), k.omega_dx(&y));
            let mut rhs = ker.bergman(&x, &y, DX)?.value;
            for i in 0..k.genus() {
                for j in 0..k.genus() {
                    rhs += cm[(i, j)] * wx[i] * wy[j];
                }
            }
            worst = worse(worst, (kl - rhs).norm() / kl.norm());
        }
        parts.push(within(&format!("{label} residual"), worst, 1e-8));
    }

    // genus one: Kl(e, -e) = wp(u) - wp(e - (1 + tau)/2) in the flat coordinate u
    let k = flat_cubic();
    let ker = Kernels::new(&k)?;
    let tau = k.riemann_matrix().entries()[(0, 0)];
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (x, y) = random_pair(&k, &mut rng);
        let e = random_jacobian_point(&k, &mut rng);
        let kl = ker.klein(&[e.clone(), neg(&e)], &x, &y, DU)?.value;
        let u = k.abel_difference(&x, &y)?[0];
        let oracle = wp_difference(u, e[0] - (1.0 + tau) / 2.0, tau);
        worst = worse(worst, rel(kl, oracle));
    }
    parts.push(within("g1 vs Weierstrass", worst, 1e-8));
    Ok(combine(parts))
}

fn kernel_normalizations() -> Result<Outcome, KernelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut limits = [0.0f64; 4];
    let mut a_periods = 0.0f64;
    for k in [flat_cubic(), bolza_like_quintic()] {
        let ker = Kernels::new(&k)?;
        let s = 1e-3 * k.scale();
        for _ in 0..3 {
            let x = random_point(&k, &mut rng);
            let dir = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
            let e = random_jacobian_point(&k, &mut rng);
            let e2 = random_jacobian_point(&k, &mut rng);
            let e3: Vec<C64> = e.iter().zip(&e2).map(|(a, b)| -a - b).collect();
            let samples = |f: &dyn Fn(&SurfacePoint, C64) -> Result<C64, KernelError>| -> Result<C64, KernelError> {
                let mut v = [c(0.0, 0.0); 3];
                for (i, h) in [s, s / 2.0, s / 4.0].into_iter().enumerate() {
                    let y = k.neighbor(&x, x.x + dir * h)?;
                    v[i] = f(&y, x.x - y.x)?;
                }
                Ok(extrapolate(v))
            };
            let szego = samples(&|y, t| Ok(ker.szego(&e, &x, y, DX)?.value * t))?;
            let bergman = samples(&|y, t| Ok(ker.bergman(&x, y, DX)?.value * t * t))?;
            let klein2 = samples(&|y, t| Ok(ker.klein(&[e.clone(), neg(&e)], &x, y, DX)?.value * t * t))?;
            let klein3 =
                samples(&|y, t| Ok(ker.klein(&[e.clone(), e2.clone(), e3.clone()], &x, y, DX)?.value * t.powi(3)))?;
            for (w, v) in limits.iter_mut().zip([szego, bergman, klein2, klein3]) {
                *w = worse(*w, (v - 1.0).norm());
            }
        }
        for _ in 0..2 {
            let x = random_point(&k, &mut rng);
            for cycle in 0..k.genus() {
                a_periods = worse(a_periods, ker.bergman_a_period(&x, cycle, 256)?.norm());
            }
        }
    }
    Ok(combine(vec![
        within("Szego residue", limits[0], 1e-6),
        within("Bergman biresidue", limits[1], 1e-6),
        within("rank-2 Klein", limits[2], 1e-6),
        within("rank-3 Klein", limits[3], 1e-6),
        within("Bergman A-periods", a_periods, 1e-7),
    ]))
}

fn gauss_map() -> Result<Outcome, KernelError> {
    let cfg = ThetaConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut deviation, mut ratio, mut gradient) = (0.0f64, 0.0f64, 0.0f64);
    let mut zeros = 0;
    for k in [flat_cubic(), bolza_like_quintic()] {
        let g = k.genus();
        let om = k.riemann_matrix();
        for delta in nonsingular_odd_characteristics(&k, &cfg)? {
            let e0 = odd_half_period(&k, &delta);
            let dir: Vec<C64> = (0..g).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))).collect();
            let report = gauss_limit_check(&k, &e0, &dir, 1e-3, 3, &cfg)?;
            deviation = worse(deviation, report.extrapolated_deviation);
            ratio = worse(ratio, report.singular_ratio);
            zeros += 1;

            // the target against central differences of plain lattice sums
            let h = 1e-4;
            let grad: Vec<C64> = (0..g)
                .map(|i| {
                    let step = |s: f64| {
                        let mut z = e0.clone();
                        z[i] += s;
                        lattice_sum(&z, &vec![0.0; g], &vec![0.0; g], om.entries(), 10).0
                    };
                    (step(h) - step(-h)) / (2.0 * h)
                })
                .collect();
            // the report works in rescaled theta units, so compare after normalizing
            let oracle = DMatrix::from_fn(g, g, |i, j| -grad[i] * grad[j]);
            let target = DMatrix::from_fn(g, g, |i, j| report.target[i][j]);
            let unit = |m: &DMatrix<C64>| m / c(m.iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
            gradient = worse(gradient, (unit(&oracle) - unit(&target)).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    Ok(combine(vec![
        (zeros > 0, format!("{zeros} theta zeros")),
        within("extrapolated deviation", deviation, 1e-5),
        within("singular value ratio", ratio, 1e-4),
        within("target vs difference quotients", gradient, 1e-6),
    ]))
}

fn finiteness() -> Result<Outcome, KernelError> {
    let config = ProbeConfig::default();
    let mut parts = Vec::new();

    let k = flat_cubic();
    let first = finiteness_probe(&k, &config)?;
    let again = finiteness_probe(&k, &config)?;
    parts.push((first.nontrivial_collisions == 0, format!("g1 nontrivial={}", first.nontrivial_collisions)));
    parts.push((first == again, "g1 deterministic".to_string()));

    // c(e) = -wp(e - (1 + tau)/2) + const, so coordinate differences are wp differences
    let tau = k.riemann_matrix().entries()[(0, 0)];
    let shift = (1.0 + tau) / 2.0;
    let p0 = &first.points[0];
    let mut worst = 0.0f64;
    let mut wp_collisions = 0;
    for p in &first.points[1..] {
        let oracle = -wp_difference(p.e[0] - shift, p0.e[0] - shift, tau);
        worst = worse(worst, rel(p.coords[0] - p0.coords[0], oracle));
    }
    for (i, p) in first.points.iter().enumerate() {
        for q in &first.points[i + 1..] {
            let d = wp_difference(p.e[0] - shift, q.e[0] - shift, tau);
            if d.norm() < config.collision_tol * p.coords[0].norm().max(q.coords[0].norm()) {
                wp_collisions += 1;
            }
        }
    }
    parts.push(within("g1 coordinates vs Weierstrass", worst, 1e-8));
    parts.push((
        wp_collisions == first.trivial_collisions,
        format!("g1 Weierstrass collisions={wp_collisions}, reported trivial={}", first.trivial_collisions),
    ));

    let e = first.points[7].e.clone();
    let with_pair = ProbeConfig {
        samples: 2,
        extra: vec![e.clone(), neg(&e)],
        ..config.clone()
    };
    let flagged = finiteness_probe(&k, &with_pair)?;
    let opposite = flagged.collisions.iter().filter(|c| c.kind == CollisionKind::Opposite).count();
    parts.push((
        opposite >= 1 && flagged.nontrivial_collisions == 0,
        format!("g1 planted (e, -e) flagged as trivial: {opposite}"),
    ));

    for (label, k) in [("g2", bolza_like_quintic()), ("g2 generic", generic_quintic())] {
        let first = finiteness_probe(&k, &config)?;
        let again = finiteness_probe(&k, &config)?;
        parts.push((first.nontrivial_collisions == 0, format!("{label} nontrivial={}", first.nontrivial_collisions)));
        parts.push((first == again, format!("{label} deterministic")));
    }
    Ok(combine(parts))
}

fn jet_calculus() -> Result<Outcome, KernelError> {
    let checks = jets_suite(16, 0);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let max = checks.iter().filter_map(|c| c.residual).fold(0.0, worse);
    Ok(Outcome::new(
        failed.is_empty() && max == 0.0,
        format!("{} checks, max residual {max:e}, failed {failed:?}", checks.len()),
    ))
}

fn quadratic_identity() -> Result<Outcome, KernelError> {
    let tol = ThetaConfig::default().tol;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut parts = Vec::new();
    for g in 1..=2 {
        let om = random_omega(&mut rng, g);
        let doubled = om.entries() * c(2.0, 0.0);
        let zero = Characteristic::zero(g);
        let mut ratios = Vec::new();
        for _ in 0..10 {
            let z = random_vec(&mut rng, g, 0.5);
            let w = random_vec(&mut rng, g, 0.5);
            let plus: Vec<C64> = z.iter().zip(&w).map(|(a, b)| a + b).collect();
            let minus: Vec<C64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
            let lhs = theta(&ThetaRequest::value(plus, zero.clone(), tol), &om)?.to_c64()
                * theta(&ThetaRequest::value(minus, zero.clone(), tol), &om)?.to_c64();
            let z2: Vec<C64> = z.iter().map(|v| v * 2.0).collect();
            let w2: Vec<C64> = w.iter().map(|v| v * 2.0).collect();
            let mut rhs = c(0.0, 0.0);
            for bits in 0..(1u32 << g) {
                let a: Vec<f64> = (0..g).map(|i| ((bits >> i) & 1) as f64 / 2.0).collect();
                let b = vec![0.0; g];
                rhs += lattice_sum(&z2, &a, &b, &doubled, 8).0 * lattice_sum(&w2, &a, &b, &doubled, 8).0;
            }
            ratios.push(lhs / rhs);
        }
        let spread = ratios.iter().map(|r| rel(*r, ratios[0])).fold(0.0, worse);
        parts.push(within(&format!("g{g} ratio spread"), spread, 1e-8));
        parts.push(within(&format!("g{g} |ratio - 1|"), (ratios[0] - 1.0).norm(), 1e-8));
    }
    Ok(combine(parts))
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, Option<u64>, fn() -> Result<Outcome, KernelError>);
    let criteria: [Criterion; 8] = [
        ("theta engine", Some(5), theta_engine),
        ("periods", Some(10), periods),
        ("Fay identity", Some(60), fay),
        ("kernel normalizations", None, kernel_normalizations),
        ("Gauss map squared", None, gauss_map),
        ("finiteness probe", Some(120), finiteness),
        ("jet calculus", Some(30), jet_calculus),
        ("quadratic identity", None, quadratic_identity),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let outcome = timed(limit.map(Duration::from_secs), run);
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        // written past the test harness capture so the lines always show
        let mut out = std::io::stdout().lock();
        writeln!(out, "AC{} {verdict} {name}: {}", i + 1, outcome.detail).unwrap();
        if !outcome.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
