use super::periods::sqrt_near;
use super::quadrature::gauss_legendre;
use super::{CurveError, HyperellipticCurve, SurfacePoint};
use crate::C64;

const NODES: usize = 16;
const MAX_RELATIVE_STEP: f64 = 0.1;

/// One leg of an integration path. `Branch` ends sit exactly on a root.
#[derive(Debug, Clone, Copy)]
enum Leg {
    Regular { from: C64, to: C64 },
    FromBranch { root: usize, to: C64 },
    ToBranch { from: C64, root: usize },
}

impl HyperellipticCurve {
    /// Abel map `int_base^p omega` of the normalized differentials, along the default path.
    pub fn abel_map(&self, p: &SurfacePoint, base: &SurfacePoint) -> Result<Vec<C64>, CurveError> {
        let a = self.abel(p)?;
        let b = self.abel(base)?;
        Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
    }

    /// Abel image of `p` relative to the first branch point.
    pub fn abel(&self, p: &SurfacePoint) -> Result<Vec<C64>, CurveError> {
        let path = self.plan(self.roots[0], p.x, Some(0), None)?;
        self.abel_along(&path, p)
    }

    /// Abel image of `p` along `b1 -> waypoints -> p` (straight legs).
    pub fn abel_via(&self, p: &SurfacePoint, waypoints: &[C64]) -> Result<Vec<C64>, CurveError> {
        let mut path = vec![self.roots[0]];
        path.extend_from_slice(waypoints);
        path.push(p.x);
        self.abel_along(&path, p)
    }

    /// Abel image of the `i`-th finite branch point.
    pub fn abel_of_branch(&self, i: usize) -> Result<Vec<C64>, CurveError> {
        if i == 0 {
            return Ok(vec![C64::new(0.0, 0.0); self.genus]);
        }
        let mut path = self.plan(self.roots[0], self.roots[i], Some(0), Some(i))?;
        if path.len() == 2 {
            path.insert(1, (path[0] + path[1]) * 0.5);
        }
        let last = path.len() - 1;
        let mut legs = vec![Leg::FromBranch { root: 0, to: path[1] }];
        for w in path[1..last].windows(2) {
            legs.push(Leg::Regular { from: w[0], to: w[1] });
        }
        legs.push(Leg::ToBranch {
            from: path[last - 1],
            root: i,
        });
        let (raw, _) = self.integrate(&legs, None)?;
        Ok(self.normalize(&raw))
    }

    fn abel_along(&self, path: &[C64], p: &SurfacePoint) -> Result<Vec<C64>, CurveError> {
        let mut legs = vec![Leg::FromBranch {
            root: 0,
            to: path[1],
        }];
        for w in path[1..].windows(2) {
            legs.push(Leg::Regular { from: w[0], to: w[1] });
        }
        let (mut raw, y_end) = self.integrate(&legs, None)?;
        // starting on a branch point, the two sheets differ by the involution
        let y = self.y(p);
        if (y_end + y).norm() < (y_end - y).norm() {
            raw.iter_mut().for_each(|r| *r = -*r);
        }
        Ok(self.normalize(&raw))
    }

    /// Integral of the normalized differentials along a straight path from `p` to `q`
    /// (same-sheet continuation from `p`); returns the integral and `y` at the end.
    pub fn integrate_segment(&self, p: &SurfacePoint, q: C64) -> Result<(Vec<C64>, C64), CurveError> {
        let (raw, y) = self.integrate(&[Leg::Regular { from: p.x, to: q }], Some(self.y(p)))?;
        Ok((self.normalize(&raw), y))
    }

    /// The point over `x` on the sheet continuing `p`; meant for `x` close to `p`.
    pub fn neighbor(&self, p: &SurfacePoint, x: C64) -> Result<SurfacePoint, CurveError> {
        let y = self.y(p);
        let up = self.point(x, 1)?;
        let w = self.y(&up);
        Ok(if (w - y).norm() <= (w + y).norm() { up } else { up.involution() })
    }

    /// `A(x) - A(y)`: along the straight segment `y -> x` when it is clear of the branch
    /// points and lands on the sheet of `x`, otherwise through the base point.
    pub fn abel_difference(&self, x: &SurfacePoint, y: &SurfacePoint) -> Result<Vec<C64>, CurveError> {
        if x.x == y.x {
            if x.sheet == y.sheet {
                return Ok(vec![C64::new(0.0, 0.0); self.genus]);
            }
        } else if self.clear(y.x, x.x, &[]) {
            let (d, y_end) = self.integrate_segment(y, x.x)?;
            let target = self.y(x);
            if (y_end - target).norm() < (y_end + target).norm() {
                return Ok(d);
            }
        }
        let a = self.abel(x)?;
        let b = self.abel(y)?;
        Ok(a.iter().zip(&b).map(|(p, q)| p - q).collect())
    }

    fn clear(&self, from: C64, to: C64, skip: &[usize]) -> bool {
        let margin = self.config.margin * self.scale;
        self.roots
            .iter()
            .enumerate()
            .filter(|(k, _)| !skip.contains(k))
            .all(|(_, &r)| segment_distance(r, from, to) >= margin)
    }

    /// Straight path, or one with a single detour vertex, avoiding the branch points.
    fn plan(&self, from: C64, to: C64, from_root: Option<usize>, to_root: Option<usize>) -> Result<Vec<C64>, CurveError> {
        let skip_first: Vec<usize> = from_root.into_iter().collect();
        let skip_last: Vec<usize> = to_root.into_iter().collect();
        let both: Vec<usize> = skip_first.iter().chain(&skip_last).cloned().collect();
        if self.clear(from, to, &both) {
            return Ok(vec![from, to]);
        }
        let mid = (from + to) * 0.5;
        let len = (to - from).norm().max(self.scale * 1e-3);
        let normal = if (to - from).norm() > 0.0 {
            (to - from) * C64::new(0.0, 1.0) / (to - from).norm()
        } else {
            C64::new(0.0, 1.0)
        };
        for c in [0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
            let w = mid + normal * (len * c);
            if self.clear(from, w, &skip_first) && self.clear(w, to, &skip_last) {
                return Ok(vec![from, w, to]);
            }
        }
        Err(CurveError::PathThroughBranchPoint { re: to.re, im: to.im })
    }

    /// Raw integrals `int x^j dx / y` along consecutive legs, continuing `y`.
    fn integrate(&self, legs: &[Leg], y_start: Option<C64>) -> Result<(Vec<C64>, C64), CurveError> {
        let g = self.genus;
        let mut total = vec![C64::new(0.0, 0.0); g];
        let mut y = y_start.unwrap_or(C64::new(0.0, 0.0));
        for leg in legs {
            match *leg {
                Leg::Regular { from, to } => {
                    let r0 = if y.norm() == 0.0 { self.f(from).sqrt() } else { y };
                    let (acc, r) = self.tracked(
                        |u| from + (to - from) * u,
                        |x| self.f(x),
                        to - from,
                        r0,
                    )?;
                    add(&mut total, &acc);
                    y = r;
                }
                Leg::FromBranch { root, to } => {
                    let p = self.roots[root];
                    let c = (to - p).sqrt();
                    let (acc, r) = self.tracked(
                        |u| p + (to - p) * (u * u),
                        |x| self.f_without(x, root),
                        c * 2.0,
                        self.f_without(p, root).sqrt(),
                    )?;
                    add(&mut total, &acc);
                    y = c * r;
                }
                Leg::ToBranch { from, root } => {
                    let q = self.roots[root];
                    let c = (from - q).sqrt();
                    let (acc, _) = self.tracked(
                        |u| q + (from - q) * ((1.0 - u) * (1.0 - u)),
                        |x| self.f_without(x, root),
                        -c * 2.0,
                        y / c,
                    )?;
                    add(&mut total, &acc);
                    y = C64::new(0.0, 0.0);
                }
            }
        }
        Ok((total, y))
    }

    /// `int_0^1 weight * x(u)^j / r(u) du` with `r^2 = g(x(u))` continued from `r0`.
    fn tracked(
        &self,
        x_of: impl Fn(f64) -> C64,
        g_of: impl Fn(C64) -> C64,
        weight: C64,
        r0: C64,
    ) -> Result<(Vec<C64>, C64), CurveError> {
        let (nodes, weights) = gauss_legendre(NODES);
        let g = self.genus;
        let mut acc = vec![C64::new(0.0, 0.0); g];
        let mut u = 0.0f64;
        let mut r = r0;
        let mut h = 0.125f64;
        while u < 1.0 {
            h = h.min(1.0 - u);
            let r1 = loop {
                let r1 = sqrt_near(g_of(x_of(u + h)), r);
                let rm = sqrt_near(g_of(x_of(u + 0.5 * h)), r);
                let lim = MAX_RELATIVE_STEP * r.norm();
                if (r1 - r).norm() <= lim && (rm - r).norm() <= lim {
                    break r1;
                }
                h *= 0.5;
                if h < 1e-14 {
                    let x = x_of(u);
                    return Err(CurveError::PathThroughBranchPoint { re: x.re, im: x.im });
                }
            };
            for (t, w) in nodes.iter().zip(&weights) {
                let frac = 0.5 * (t + 1.0);
                let x = x_of(u + h * frac);
                let guess = r + (r1 - r) * frac;
                let rk = sqrt_near(g_of(x), guess);
                let mut term = weight * (0.5 * h * w) / rk;
                for a in acc.iter_mut() {
                    *a += term;
                    term *= x;
                }
            }
            u += h;
            r = r1;
            h = (2.0 * h).min(0.25);
        }
        Ok((acc, r))
    }
}

fn add(total: &mut [C64], part: &[C64]) {
    for (t, p) in total.iter_mut().zip(part) {
        *t += p;
    }
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}
