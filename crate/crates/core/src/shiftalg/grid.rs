use crate::exactnum::Rational;
use crate::linalg;
use num_traits::{One, Zero};

/// Dense `(N+1) x (N+1)` realization of a difference operator on `{0..=N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMatrix {
    n: usize,
    entries: Vec<Vec<Rational>>,
}

impl GridMatrix {
    pub(crate) fn new(n: usize, entries: Vec<Vec<Rational>>) -> Self {
        debug_assert!(entries.len() == n + 1 && entries.iter().all(|r| r.len() == n + 1));
        GridMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        GridMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn mul(&self, other: &GridMatrix) -> GridMatrix {
        assert_eq!(self.n, other.n, "grid sizes differ");
        GridMatrix::new(self.n, linalg::mat_mul(&self.entries, &other.entries))
    }

    /// Acts on the sample vector `(f(0), ..., f(N))`.
    pub fn apply(&self, samples: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.entries, samples)
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }
}
