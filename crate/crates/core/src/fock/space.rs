use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Occupation basis `|n1, n2⟩`, `0 <= n1, n2 <= n_max`, with flat index
/// `n1 * (n_max + 1) + n2`.
#[derive(Debug, Clone)]
pub struct TruncatedSpace {
    n_max: usize,
    a1: DMatrix<f64>,
    a2: DMatrix<f64>,
}

impl TruncatedSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Range { index: 0, limit: 1 });
        }
        let side = n_max + 1;
        let dim = side * side;
        let mut a1 = DMatrix::zeros(dim, dim);
        let mut a2 = DMatrix::zeros(dim, dim);
        for n1 in 0..side {
            for n2 in 0..side {
                let col = n1 * side + n2;
                if n1 > 0 {
                    a1[((n1 - 1) * side + n2, col)] = (n1 as f64).sqrt();
                }
                if n2 > 0 {
                    a2[(n1 * side + n2 - 1, col)] = (n2 as f64).sqrt();
                }
            }
        }
        Ok(Self { n_max, a1, a2 })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 <= self.n_max && n2 <= self.n_max);
        n1 * (self.n_max + 1) + n2
    }

    pub fn occupations(&self, index: usize) -> (usize, usize) {
        (index / (self.n_max + 1), index % (self.n_max + 1))
    }

    /// Annihilation matrix of mode 1 or 2.
    pub fn annihilator(&self, mode: usize) -> &DMatrix<f64> {
        match mode {
            1 => &self.a1,
            2 => &self.a2,
            _ => panic!("mode must be 1 or 2"),
        }
    }

    pub fn creator(&self, mode: usize) -> DMatrix<f64> {
        self.annihilator(mode).transpose()
    }

    /// Indices of basis states with `n1 + n2 <= shell`.
    pub fn shell_indices(&self, shell: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let (n1, n2) = self.occupations(i);
                n1 + n2 <= shell
            })
            .collect()
    }

    /// Unit vector `|n1, n2⟩`.
    pub fn basis_vector(&self, n1: usize, n2: usize) -> nalgebra::DVector<f64> {
        let mut v = nalgebra::DVector::zeros(self.dim());
        v[self.index(n1, n2)] = 1.0;
        v
    }
}
