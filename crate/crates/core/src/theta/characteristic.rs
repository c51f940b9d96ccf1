use serde::{Deserialize, Serialize};
use std::fmt;

/// A half-integer theta characteristic `[alpha; beta]`.
///
/// Entries are stored as bits in `{0, 1}` and mean `bit / 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Characteristic {
    alpha: Vec<u8>,
    beta: Vec<u8>,
}

impl Characteristic {
    pub fn new(alpha: Vec<u8>, beta: Vec<u8>) -> Option<Self> {
        if alpha.len() != beta.len() || alpha.iter().chain(beta.iter()).any(|&b| b > 1) {
            return None;
        }
        Some(Self { alpha, beta })
    }

    pub fn zero(g: usize) -> Self {
        Self {
            alpha: vec![0; g],
            beta: vec![0; g],
        }
    }

    pub fn genus(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha_bits(&self) -> &[u8] {
        &self.alpha
    }

    pub fn beta_bits(&self) -> &[u8] {
        &self.beta
    }

    pub fn alpha(&self) -> Vec<f64> {
        self.alpha.iter().map(|&b| b as f64 * 0.5).collect()
    }

    pub fn beta(&self) -> Vec<f64> {
        self.beta.iter().map(|&b| b as f64 * 0.5).collect()
    }

    /// `4 alpha^T beta mod 2`: 0 for even, 1 for odd.
    pub fn parity(&self) -> u8 {
        let s: u32 = self
            .alpha
            .iter()
            .zip(&self.beta)
            .map(|(&a, &b)| (a * b) as u32)
            .sum();
        (s % 2) as u8
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }

    /// All `4^g` characteristics in lexicographic order of `(alpha, beta)`.
    pub fn all(g: usize) -> Vec<Self> {
        let total = 1usize << (2 * g);
        (0..total)
            .map(|idx| {
                let bit = |k: usize| ((idx >> (2 * g - 1 - k)) & 1) as u8;
                Self {
                    alpha: (0..g).map(bit).collect(),
                    beta: (g..2 * g).map(bit).collect(),
                }
            })
            .collect()
    }

    /// The characteristics `[sigma; 0]`, `sigma in {0, 1/2}^g`, in lexicographic order.
    pub fn second_order(g: usize) -> Vec<Self> {
        (0..(1usize << g))
            .map(|idx| Self {
                alpha: (0..g).map(|k| ((idx >> (g - 1 - k)) & 1) as u8).collect(),
                beta: vec![0; g],
            })
            .collect()
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &[u8]| v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join("");
        write!(f, "[{};{}]/2", bits(&self.alpha), bits(&self.beta))
    }
}
