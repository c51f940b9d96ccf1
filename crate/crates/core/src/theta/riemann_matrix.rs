use nalgebra::DMatrix;
use std::f64::consts::PI;

use super::lattice;
use super::ThetaError;
use crate::C64;

/// A symmetric complex `g x g` matrix with positive-definite imaginary part.
///
/// The Cholesky factor of `pi * Im(Omega)` is computed once on construction and
/// reused by every lattice enumeration.
#[derive(Debug, Clone)]
pub struct RiemannMatrix {
    entries: DMatrix<C64>,
    /// Upper-triangular `T` with `T^T T = pi * Im(Omega)`.
    cholesky: DMatrix<f64>,
    im_inverse: DMatrix<f64>,
    /// Length of the shortest nonzero vector of the lattice `T Z^g`.
    shortest: f64,
    /// Spectral norm of `T^{-1}`.
    inv_norm: f64,
    asymmetry: f64,
}

impl RiemannMatrix {
    /// Symmetrizes `entries` and checks that the imaginary part is positive definite.
    pub fn new(entries: DMatrix<C64>) -> Result<Self, ThetaError> {
        let g = entries.nrows();
        if g == 0 || entries.ncols() != g {
            return Err(ThetaError::DimensionMismatch {
                expected: g.max(1),
                found: entries.ncols(),
            });
        }
        let mut asymmetry = 0.0f64;
        for i in 0..g {
            for j in 0..g {
                asymmetry = asymmetry.max((entries[(i, j)] - entries[(j, i)]).norm());
            }
        }
        let sym = (&entries + entries.transpose()) * C64::new(0.5, 0.0);
        let im = sym.map(|c| c.im);
        let scaled = &im * PI;
        let chol = nalgebra::Cholesky::new(scaled.clone()).ok_or(ThetaError::NotPositiveDefinite)?;
        let cholesky = chol.l().transpose();
        let im_inverse = nalgebra::Cholesky::new(im)
            .ok_or(ThetaError::NotPositiveDefinite)?
            .inverse();
        let eig = scaled.symmetric_eigenvalues();
        let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min_eig > 0.0) {
            return Err(ThetaError::NotPositiveDefinite);
        }
        let inv_norm = 1.0 / min_eig.sqrt();
        let shortest = lattice::shortest_vector_length(&cholesky);
        Ok(Self {
            entries: sym,
            cholesky,
            im_inverse,
            shortest,
            inv_norm,
            asymmetry,
        })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, ThetaError> {
        let g = rows.len();
        for r in rows {
            if r.len() != g {
                return Err(ThetaError::DimensionMismatch {
                    expected: g,
                    found: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(g, g, |i, j| rows[i][j]))
    }

    pub fn genus(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.cholesky
    }

    pub fn im_inverse(&self) -> &DMatrix<f64> {
        &self.im_inverse
    }

    pub fn shortest_vector(&self) -> f64 {
        self.shortest
    }

    pub fn cholesky_inverse_norm(&self) -> f64 {
        self.inv_norm
    }

    /// Largest `|Omega_ij - Omega_ji|` of the input before symmetrization.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    /// Smallest eigenvalue of `Im(Omega)`.
    pub fn min_im_eigenvalue(&self) -> f64 {
        self.entries
            .map(|c| c.im)
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// The matrix `k * Omega`, used for the second-order theta basis.
    pub fn scaled(&self, k: f64) -> Result<Self, ThetaError> {
        Self::new(self.entries.map(|c| c * k))
    }

    /// `Omega * m + n` for integer vectors.
    pub fn lattice_vector(&self, m: &[f64], n: &[f64]) -> Vec<C64> {
        let g = self.genus();
        (0..g)
            .map(|i| {
                let mut s = C64::new(n[i], 0.0);
                for j in 0..g {
                    s += self.entries[(i, j)] * m[j];
                }
                s
            })
            .collect()
    }

    /// Writes `z = a + Omega b` and returns the real coordinate vectors `(a, b)`.
    pub fn real_coordinates(&self, z: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let g = self.genus();
        let y = nalgebra::DVector::from_fn(g, |i, _| z[i].im);
        let b = &self.im_inverse * y;
        let a: Vec<f64> = (0..g)
            .map(|i| {
                let mut s = z[i].re;
                for j in 0..g {
                    s -= self.entries[(i, j)].re * b[j];
                }
                s
            })
            .collect();
        (a, b.iter().cloned().collect())
    }

    /// Canonical representative of `z` modulo `Z^g + Omega Z^g`: both coefficient
    /// vectors land in `[-1/2, 1/2)`.
    pub fn reduce(&self, z: &[C64]) -> Vec<C64> {
        let (a, b) = self.real_coordinates(z);
        let nb: Vec<f64> = b.iter().map(|x| (x + 0.5).floor()).collect();
        let na: Vec<f64> = a.iter().map(|x| (x + 0.5).floor()).collect();
        let shift = self.lattice_vector(&nb, &na);
        z.iter().zip(shift).map(|(zi, si)| zi - si).collect()
    }

    /// Distance of `z` from the lattice, measured in `(a, b)` coefficients.
    pub fn lattice_distance(&self, z: &[C64]) -> f64 {
        let (a, b) = self.real_coordinates(&self.reduce(z));
        a.iter().chain(b.iter()).fold(0.0f64, |m, x| m.max(x.abs()))
    }
}
