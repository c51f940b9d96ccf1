use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{klein_coordinates, KernelError};
use crate::curve::HyperellipticCurve;
use crate::theta::{theta_jet, Characteristic, ThetaConfig};
use crate::C64;

/// Draws per sample before giving up on finding a point off the divisor.
const MAX_DRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub samples: usize,
    /// Collisions are pairs with `|c - c'| < collision_tol * max(|c|, |c'|)`.
    pub collision_tol: f64,
    /// `e' = +-e` modulo the lattice within this distance counts as trivial.
    pub trivial_tol: f64,
    pub seed: u64,
    /// Points appended after the random samples, in order.
    pub extra: Vec<Vec<C64>>,
    pub theta: ThetaConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            collision_tol: 1e-6,
            trivial_tol: 1e-6,
            seed: 0,
            extra: Vec::new(),
            theta: ThetaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSample {
    pub index: usize,
    pub e: Vec<C64>,
    /// Upper triangle of the Klein coordinates, row by row.
    pub coords: Vec<C64>,
    /// Draws rejected for lying too close to the theta divisor.
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionKind {
    /// `e' = e` modulo the lattice.
    Equal,
    /// `e' = -e` modulo the lattice.
    Opposite,
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collision {
    pub i: usize,
    pub j: usize,
    /// `|c_i - c_j| / max(|c_i|, |c_j|)`.
    pub distance: f64,
    pub kind: CollisionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub genus: usize,
    pub seed: u64,
    pub samples: usize,
    pub collision_tol: f64,
    pub trivial_tol: f64,
    pub rejected: usize,
    pub trivial_collisions: usize,
    pub nontrivial_collisions: usize,
    pub collisions: Vec<Collision>,
    pub points: Vec<ProbeSample>,
}

impl ProbeReport {
    /// One line per point: index, `e` and the Klein coordinates as real/imaginary columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let g = self.genus;
        let mut header = vec!["index".to_string()];
        for i in 0..g {
            header.push(format!("e{i}_re"));
            header.push(format!("e{i}_im"));
        }
        for i in 0..g {
            for j in i..g {
                header.push(format!("c{i}{j}_re"));
                header.push(format!("c{i}{j}_im"));
            }
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for p in &self.points {
            let mut row = vec![p.index.to_string()];
            for z in p.e.iter().chain(&p.coords) {
                row.push(format!("{:e}", z.re));
                row.push(format!("{:e}", z.im));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Samples `e = a + Omega b` with `(a, b)` uniform in `[-1/2, 1/2)^{2g}`, computes Klein
/// coordinates, and reports pairs whose coordinates nearly coincide.
///
/// Sample `k` draws from its own stream of the seeded generator, so the report does
/// not depend on the thread schedule.
pub fn finiteness_probe(curve: &HyperellipticCurve, config: &ProbeConfig) -> Result<ProbeReport, KernelError> {
    if config.samples + config.extra.len() < 2 {
        return Err(KernelError::InvalidArgument(format!(
            "need at least 2 points, got {}",
            config.samples + config.extra.len()
        )));
    }
    if !(config.collision_tol > 0.0) || !(config.trivial_tol > 0.0) {
        return Err(KernelError::InvalidArgument("tolerances must be positive".into()));
    }
    let omega = curve.riemann_matrix();
    let g = omega.genus();
    for e in &config.extra {
        super::check_len(g, e.len())?;
    }
    let zero = Characteristic::zero(g);
    let mut points: Vec<ProbeSample> = (0..config.samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(index as u64);
            for rejected in 0..MAX_DRAWS {
                let a: Vec<f64> = (0..g).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let b: Vec<f64> = (0..g).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let e = omega.lattice_vector(&b, &a);
                let jet = theta_jet(&e, &zero, omega, 0, config.theta.tol)?;
                if jet.zero_ratio() < config.theta.zero_floor {
                    continue;
                }
                let coords = klein_coordinates(curve, &e, &config.theta)?.upper_triangle();
                return Ok(ProbeSample {
                    index,
                    e,
                    coords,
                    rejected,
                });
            }
            Err(KernelError::InvalidArgument("every draw landed on the theta divisor".into()))
        })
        .collect::<Result<_, KernelError>>()?;
    for (k, e) in config.extra.iter().enumerate() {
        let coords = klein_coordinates(curve, e, &config.theta)?.upper_triangle();
        points.push(ProbeSample {
            index: config.samples + k,
            e: e.clone(),
            coords,
            rejected: 0,
        });
    }

    let norms: Vec<f64> = points.iter().map(|p| norm(&p.coords)).collect();
    let collisions: Vec<Collision> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let points = &points;
            let norms = &norms;
            (i + 1..points.len()).filter_map(move |j| {
                let diff: Vec<C64> = points[i].coords.iter().zip(&points[j].coords).map(|(a, b)| a - b).collect();
                let distance = norm(&diff) / norms[i].max(norms[j]);
                if !(distance < config.collision_tol) {
                    return None;
                }
                let minus: Vec<C64> = points[i].e.iter().zip(&points[j].e).map(|(a, b)| a - b).collect();
                let plus: Vec<C64> = points[i].e.iter().zip(&points[j].e).map(|(a, b)| a + b).collect();
                let kind = if omega.lattice_distance(&minus) < config.trivial_tol {
                    CollisionKind::Equal
                } else if omega.lattice_distance(&plus) < config.trivial_tol {
                    CollisionKind::Opposite
                } else {
                    CollisionKind::Nontrivial
                };
                Some(Collision { i, j, distance, kind })
            })
        })
        .collect();
    let nontrivial = collisions.iter().filter(|c| c.kind == CollisionKind::Nontrivial).count();
    Ok(ProbeReport {
        genus: g,
        seed: config.seed,
        samples: points.len(),
        collision_tol: config.collision_tol,
        trivial_tol: config.trivial_tol,
        rejected: points.iter().map(|p| p.rejected).sum(),
        trivial_collisions: collisions.len() - nontrivial,
        nontrivial_collisions: nontrivial,
        collisions,
        points,
    })
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
