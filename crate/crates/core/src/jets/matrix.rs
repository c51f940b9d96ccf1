use super::coeff::Coeff;
use super::series::Series;

/// Square matrix of truncated series, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix<C> {
    rank: usize,
    entries: Vec<Series<C>>,
}

impl<C: Coeff> SeriesMatrix<C> {
    pub fn from_fn(rank: usize, mut f: impl FnMut(usize, usize) -> Series<C>) -> Self {
        let mut entries = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                entries.push(f(i, j));
            }
        }
        Self { rank, entries }
    }

    pub fn scalar(s: Series<C>) -> Self {
        Self {
            rank: 1,
            entries: vec![s],
        }
    }

    pub fn zero(rank: usize, len: usize) -> Self {
        Self::from_fn(rank, |_, _| Series::zero(len))
    }

    pub fn identity(rank: usize, len: usize) -> Self {
        Self::from_fn(rank, |i, j| if i == j { Series::one(len) } else { Series::zero(len) })
    }

    /// `Diag(s, ..., s)`.
    pub fn diagonal(rank: usize, s: &Series<C>) -> Self {
        Self::from_fn(rank, |i, j| if i == j { s.clone() } else { Series::zero(s.len()) })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &Series<C> {
        &self.entries[i * self.rank + j]
    }

    pub fn entries(&self) -> &[Series<C>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(|s| s.len()).min().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn map(&self, f: impl Fn(&Series<C>) -> Series<C>) -> Self {
        Self {
            rank: self.rank,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            rank: self.rank,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            rank: self.rank,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let r = self.rank;
        Self::from_fn(r, |i, k| {
            let mut acc = self.get(i, 0) * other.get(0, k);
            for l in 1..r {
                acc = &acc + &(self.get(i, l) * other.get(l, k));
            }
            acc
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn mul_series(&self, s: &Series<C>) -> Self {
        self.map(|e| e * s)
    }

    pub fn derivative(&self) -> Self {
        self.map(|s| s.derivative())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.rank, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Series<C> {
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.rank {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    pub fn apply(&self, v: &[Series<C>]) -> Vec<Series<C>> {
        (0..self.rank)
            .map(|i| {
                let mut acc = self.get(i, 0) * &v[0];
                for j in 1..self.rank {
                    acc = &acc + &(self.get(i, j) * &v[j]);
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|s| s.is_zero())
    }

    pub fn agrees(&self, other: &Self) -> bool {
        self.rank == other.rank && self.entries.iter().zip(&other.entries).all(|(a, b)| a.agrees(b))
    }

    pub fn is_identity(&self) -> bool {
        self.agrees(&Self::identity(self.rank, self.len()))
    }

    pub fn truncate(&self, len: usize) -> Self {
        self.map(|s| s.truncate(len))
    }
}
