use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::jets::*;

/// Collects agreement over several trials of one identity.
struct Tally {
    residual: f64,
    agrees: bool,
}

impl Tally {
    fn new() -> Self {
        Self {
            residual: 0.0,
            agrees: true,
        }
    }

    fn kernel(&mut self, a: &JetKernel<Exact>, b: &JetKernel<Exact>) {
        self.agrees &= a.agrees(b);
        self.residual = self.residual.max(a.max_diff(b));
    }

    fn series(&mut self, a: &Series<Exact>, b: &Series<Exact>) {
        self.agrees &= a.agrees(b);
        self.residual = self.residual.max(a.max_diff(b));
    }

    fn matrix(&mut self, a: &SeriesMatrix<Exact>, b: &SeriesMatrix<Exact>) {
        self.agrees &= a.agrees(b);
        let d = a
            .entries()
            .iter()
            .zip(b.entries())
            .map(|(x, y)| x.max_diff(y))
            .fold(0.0, f64::max);
        self.residual = self.residual.max(d);
    }

    fn zero(&mut self, a: &Series<Exact>) {
        self.series(a, &Series::zero(a.len()));
    }
}

struct Gen {
    rng: ChaCha8Rng,
    len: usize,
}

impl Gen {
    fn q(&mut self) -> Exact {
        exact(
            (self.rng.gen_range(-3..=3), self.rng.gen_range(1..=3)),
            (self.rng.gen_range(-2..=2), 1),
        )
    }

    fn poly(&mut self, degree: usize) -> Series<Exact> {
        let cs: Vec<Exact> = (0..=degree).map(|_| self.q()).collect();
        Series::polynomial(&cs, self.len)
    }

    fn chart(&mut self) -> Series<Exact> {
        let c1 = exact((self.rng.gen_range(1..=3), self.rng.gen_range(1..=2)), (self.rng.gen_range(-1..=1), 1));
        let c2 = exact((self.rng.gen_range(-2..=2), 1), (self.rng.gen_range(-1..=1), 2));
        let c3 = exact((self.rng.gen_range(-2..=2), 3), (0, 1));
        Series::polynomial(&[Exact::from_int(0), c1, c2, c3], self.len)
    }

    fn matrix(&mut self, rank: usize, degree: usize) -> SeriesMatrix<Exact> {
        SeriesMatrix::from_fn(rank, |_, _| self.poly(degree))
    }

    fn traceless(&mut self, degree: usize) -> SeriesMatrix<Exact> {
        let (a, b, c) = (self.poly(degree), self.poly(degree), self.poly(degree));
        let na = -&a;
        SeriesMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => a.clone(),
            (0, 1) => b.clone(),
            (1, 0) => c.clone(),
            _ => na.clone(),
        })
    }

    fn monic_kernel(&mut self, n: usize, rank: usize) -> JetKernel<Exact> {
        let mut coeffs = vec![SeriesMatrix::identity(rank, self.len)];
        for _ in 0..n {
            coeffs.push(self.matrix(rank, 3));
        }
        JetKernel::from_coeffs(n as i64 + 1, n as i64 + 1, &coeffs)
    }

    fn sl_oper(&mut self, n: usize, m: usize) -> Result<JetKernel<Exact>, JetError> {
        let q = self.poly(2);
        let mut v = vec![Series::zero(self.len)];
        for _ in 3..=n {
            v.push(self.poly(1));
        }
        build_oper(&q, &v, n, m)
    }
}

fn q(num: i64, den: i64) -> Exact {
    Exact::from_ratio(num, den)
}

fn run(name: &str, f: impl FnOnce(&mut Tally) -> Result<(), JetError>) -> Check {
    let mut t = Tally::new();
    match f(&mut t) {
        Ok(()) => Check::exact(name, t.agrees, t.residual),
        Err(e) => Check::errored(name, 0.0, e.to_string()),
    }
}

/// The exact identities of the jet calculus over complex rationals, with series known to
/// `order` (so `order + 1` coefficients).
pub fn jets_suite(order: usize, seed: u64) -> Vec<Check> {
    let len = order + 1;
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        len,
    };
    let mut checks = Vec::new();

    checks.push(run("mu_diagonal_and_restriction", |t| {
        for nu in 0..5 {
            let mu = JetKernel::<Exact>::mu(nu, 4, len);
            t.series(mu.numerator().diagonal(), &Series::one(len));
            t.kernel(&mu.restrict(1), &JetKernel::mu(nu, 1, len));
        }
        Ok(())
    }));
    checks.push(run("mu_swap_parity", |t| {
        for nu in 0..6 {
            let mu = JetKernel::<Exact>::mu(nu, 6, len);
            let sign = if nu % 2 == 0 { q(1, 1) } else { q(-1, 1) };
            t.kernel(&mu.swap(), &mu.scale(&sign));
        }
        Ok(())
    }));
    checks.push(run("mu_tensor_powers", |t| {
        let mu1 = JetKernel::<Exact>::mu(1, 6, len);
        let mut acc = mu1.clone();
        for nu in 2..6 {
            acc = acc.tensor(&mu1);
            t.kernel(&acc, &JetKernel::mu(nu, 6, len));
        }
        Ok(())
    }));
    checks.push(run("mu_coordinate_invariance", |t| {
        for k in 0..20 {
            let nu = (k % 4) as i64 + 1;
            let w = g.chart();
            let out = JetKernel::<Exact>::mu(nu, 4, len).change_coordinate(&w)?;
            t.kernel(&out.restrict(2), &JetKernel::mu(nu, 2, len));
        }
        // Moebius charts preserve the whole kernel
        let c = exact((2, 3), (1, 1));
        let var = Series::var(len);
        let w = (&var * &(&Series::one(len) - &var.scale(&c)).inverse().ok_or(JetError::NonInvertibleChart)?)
            .truncate(len);
        for nu in 1..4 {
            let mu = JetKernel::<Exact>::mu(nu, 6, len);
            t.kernel(&mu.change_coordinate(&w)?, &mu);
        }
        Ok(())
    }));
    checks.push(run("chart_change_round_trip", |t| {
        for _ in 0..4 {
            let s = g.monic_kernel(3, 2);
            let w = g.chart();
            let back = s.change_coordinate(&w)?.change_coordinate(&w.reversion().ok_or(JetError::NonInvertibleChart)?)?;
            t.kernel(&back, &s);
        }
        Ok(())
    }));
    checks.push(run("kernel_operator_round_trip", |t| {
        for n in 0..5 {
            for rank in 1..=2 {
                let s = g.monic_kernel(n, rank);
                t.kernel(&operator_to_kernel(&kernel_to_operator(&s)?, len), &s);
                let op = if n == 0 {
                    DiffOperator::power_of_d(0, rank, len)
                } else {
                    DiffOperator::new((0..n).map(|_| g.matrix(rank, 3)).collect())?
                };
                let back = kernel_to_operator(&operator_to_kernel(&op, len))?;
                t.agrees &= back.order() == op.order();
                for k in 1..=n {
                    t.matrix(back.q(k), op.q(k));
                }
            }
        }
        Ok(())
    }));
    checks.push(run("residue_pairing_is_the_operator", |t| {
        for n in 1..4 {
            let s = g.monic_kernel(n, 2);
            let op = kernel_to_operator(&s)?;
            let f = vec![g.poly(6), g.poly(6)];
            for (a, b) in op.apply(&f).iter().zip(&residue_pairing(&s, &f)?) {
                t.series(a, b);
            }
        }
        Ok(())
    }));
    checks.push(run("projective_second_order_term", |t| {
        for nu in 1..5i64 {
            let qq = g.poly(3);
            let gamma = gamma_from_projective(&qq, nu, 4)?;
            t.zero(gamma.numerator().term(1));
            t.series(gamma.numerator().term(2), &qq.scale(&q(-nu, 6)));
        }
        Ok(())
    }));
    checks.push(run("solution_pair_independence", |t| {
        let qq = g.poly(3);
        let (f1, f2) = sturm_liouville_basis(&qq);
        let reference = gamma_from_solutions(&f1, &f2, 3, 5)?;
        for (a, b, c, d) in [(2, 1, 1, 1), (1, -1, 3, 2), (1, 2, 0, 1)] {
            let g1 = &f1.scale(&q(a, 1)) + &f2.scale(&q(b, 1));
            let g2 = &f1.scale(&q(c, 1)) + &f2.scale(&q(d, 1));
            t.kernel(&gamma_from_solutions(&g1, &g2, 3, 5)?, &reference);
        }
        Ok(())
    }));
    checks.push(run("rescaling_torsor_identity", |t| {
        for k in 1..6i64 {
            let qq = g.poly(4);
            let rho = unshift(&qq, 1);
            let mut power = rho.clone();
            for _ in 1..k {
                power = power.tensor(&rho);
            }
            t.series(power.numerator().term(2), &qq.scale(&q(k, 1)));
            t.series(&rescale_shift(&power, k)?, &qq);
        }
        Ok(())
    }));
    checks.push(run("companion_solution_correspondence", |t| {
        for n in 1..4 {
            let op = DiffOperator::scalar((0..n).map(|_| g.poly(3)).collect());
            let conn = companion_connection(&op)?;
            let init: Vec<Exact> = (0..n).map(|k| Exact::from_int(k as i64 + 1)).collect();
            let f = solve_scalar(&op, &init, len);
            t.zero(&op.apply(std::slice::from_ref(&f))[0]);
            let y: Vec<Series<Exact>> = (0..n).map(|k| f.nth_derivative(n - 1 - k)).collect();
            for c in conn.covariant_derivative(&y) {
                t.zero(&c);
            }
            let y = solve_flat(&conn, &init, len);
            t.zero(&op.apply(&[y[n - 1].clone()])[0]);
        }
        Ok(())
    }));
    checks.push(run("flat_kernel_reads_off_its_connection", |t| {
        for _ in 0..3 {
            let gamma = g.matrix(2, 3);
            let k = flat_extension(&ConnectionJet::new(gamma.clone()), 5);
            t.matrix(&connection_from_kernel(&k)?.gamma, &gamma);
            let prod = k.matmul(&k.swap())?;
            let id = flat_extension(&ConnectionJet::trivial(2, len), 5);
            t.kernel(&prod, &id);
        }
        Ok(())
    }));
    checks.push(run("hitchin_action_transitivity", |t| {
        let n = 4;
        let qq = g.poly(2);
        let v = vec![Series::zero(len), g.poly(2), g.poly(1)];
        let w = vec![Series::zero(len), g.poly(2), g.poly(1)];
        let vw: Vec<Series<Exact>> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let lhs = hitchin_action(&build_oper(&qq, &v, n, 6)?, &qq, &w, n)?;
        t.kernel(&lhs, &build_oper(&qq, &vw, n, 6)?);
        Ok(())
    }));
    checks.push(run("determinant_multiplicativity", |t| {
        let o1 = g.sl_oper(2, 5)?;
        let o2 = g.sl_oper(2, 5)?;
        let d = JetKernel::from_entries(
            2,
            3,
            3,
            vec![o1.numerator().clone(), Bivar::zero(5, len), Bivar::zero(5, len), o2.numerator().clone()],
        );
        t.kernel(&det_kernel(&d, 5)?, &o1.tensor(&o2));
        let conn = ConnectionJet::new(g.matrix(2, 2));
        let k = flat_extension(&conn, 5);
        t.kernel(&det_kernel(&k, 5)?, &flat_extension(&conn.determinant(), 5));
        Ok(())
    }));
    checks.push(run("determinant_diagram_commutes", |t| {
        for _ in 0..3 {
            let o = g.sl_oper(3, 5)?;
            let conn = ConnectionJet::new(g.matrix(2, 2));
            let eta = [g.traceless(1), g.traceless(1)];
            let s = matrix_oper(&conn, &o, &eta)?;
            let transported = s.matmul(&flat_extension(&conn, 5).swap())?;
            let lhs = det_kernel(&transported, 5)?;
            let rhs = det_kernel(&s, 5)?.matmul(&flat_extension(&conn.determinant(), 5).swap())?;
            t.kernel(&lhs, &rhs);
            t.kernel(&trace_map(&s, TraceSelector::Determinant)?, &lhs);
        }
        Ok(())
    }));
    checks.push(run("matrix_oper_projects_to_its_oper", |t| {
        for _ in 0..3 {
            let o = g.sl_oper(3, 5)?;
            let conn = ConnectionJet::new(g.matrix(2, 2));
            let eta = [g.traceless(2), g.traceless(1)];
            let s = matrix_oper(&conn, &o, &eta)?;
            t.agrees &= s.is_monic();
            t.matrix(&connection_from_kernel(&s)?.gamma, &conn.gamma);
            let s0 = matrix_oper(&conn, &o, &[])?;
            t.kernel(&trace_map(&s0, TraceSelector::NormalizedTrace)?, &o);
        }
        Ok(())
    }));
    checks.push(run("quadratic_map_recovers_the_projective_structure", |t| {
        for k in 0..10 {
            let nu = 2 + (k % 3) as i64;
            let rho = gamma_from_projective(&g.poly(3), nu, 4)?;
            let conn = ConnectionJet::new(g.matrix(2, 2));
            let s = rho.tensor(&flat_extension(&conn, 4));
            t.series(&quadratic_s(&s, &q(1, 1))?, &rescale_shift(&rho, nu)?);
        }
        Ok(())
    }));
    checks.push(run("quadratic_map_at_zero_is_trace_of_higgs_squared", |t| {
        for _ in 0..3 {
            let rho = gamma_from_projective(&g.poly(2), 2, 4)?;
            let conn = ConnectionJet::new(g.matrix(2, 2));
            let eta = g.traceless(2);
            let s0 = higgs_deformation(&rho, &conn, &eta, &q(0, 1))?;
            let eta2 = eta.mul(&eta).trace();
            t.series(&quadratic_s(&s0, &q(0, 1))?, &eta2);
        }
        Ok(())
    }));
    checks.push(run("nilpotent_higgs_field_vanishes", |t| {
        let rho = gamma_from_projective(&g.poly(2), 2, 4)?;
        let conn = ConnectionJet::new(g.matrix(2, 2));
        let b = g.poly(2);
        let nilpotent = SeriesMatrix::from_fn(2, |i, j| if (i, j) == (0, 1) { b.clone() } else { Series::zero(len) });
        let s0 = higgs_deformation(&rho, &conn, &nilpotent, &q(0, 1))?;
        t.zero(&quadratic_s(&s0, &q(0, 1))?);
        Ok(())
    }));
    checks
}
