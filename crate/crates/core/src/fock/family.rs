use nalgebra::{DMatrix, DVector, SVD};

use super::operators::ladder_matrix;
use super::space::TruncatedSpace;
use crate::algebra::{compute_eigenbasis, SymplecticEigenbasis, SYMPLECTIC_TOL};
use crate::error::{Error, Result};
use crate::params::ModelParameters;

/// Largest accepted `sqrt(‖Θ1Ψ0‖² + ‖Θ2Ψ0‖²)` for an extracted vacuum.
pub const VACUUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct VacuumState {
    /// Unit norm, largest-magnitude component positive.
    pub vector: DVector<f64>,
    pub residual: f64,
}

/// Smallest right singular vector of the stacked annihilators `(Θ1; Θ2)`.
fn extract_vacuum(theta1: &DMatrix<f64>, theta2: &DMatrix<f64>) -> Result<VacuumState> {
    let (rows, dim) = theta1.shape();
    let mut stacked = DMatrix::zeros(rows + theta2.nrows(), dim);
    stacked.rows_mut(0, rows).copy_from(theta1);
    stacked.rows_mut(rows, theta2.nrows()).copy_from(theta2);
    let svd = SVD::try_new(stacked, false, true, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence("vacuum singular value decomposition"))?;
    let v_t = svd
        .v_t
        .ok_or(Error::NoConvergence("missing right singular vectors"))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::NoConvergence("empty operator"))?;
    let mut vector: DVector<f64> = v_t.row(idx).transpose();
    vector /= vector.norm();
    let lead = vector
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if lead < 0.0 {
        vector.neg_mut();
    }
    let residual = ((theta1 * &vector).norm_squared() + (theta2 * &vector).norm_squared()).sqrt();
    Ok(VacuumState { vector, residual })
}

/// Common null vector of two annihilators, rejected when the residual
/// exceeds `tol` (the cutoff is too small for the coupling strength).
pub fn vacuum_state(theta1: &DMatrix<f64>, theta2: &DMatrix<f64>, tol: f64) -> Result<VacuumState> {
    let vac = extract_vacuum(theta1, theta2)?;
    if !(vac.residual <= tol) {
        return Err(Error::Truncation {
            what: "vacuum",
            residual: vac.residual,
            tol,
        });
    }
    Ok(vac)
}

/// Eigenvectors of `H` (columns of `v`) and of `H*` (columns of `w`),
/// both indexed by `labels`.
#[derive(Debug, Clone)]
pub struct BiorthogonalFamily {
    /// `(n1, n2)` of each column, `n1`-major.
    pub labels: Vec<(usize, usize)>,
    pub v: DMatrix<f64>,
    pub w: DMatrix<f64>,
    /// `gram[(i, j)] = ⟨Ψ_j, Ψ̃_i⟩ = w_iᵀ v_j`.
    pub gram: DMatrix<f64>,
    /// `⟨Ψ0, Ψ̃0⟩` for the unit-norm vacua.
    pub vacuum_overlap: f64,
    pub vacuum_residual: f64,
    pub adjoint_vacuum_residual: f64,
    pub n_cap: usize,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl BiorthogonalFamily {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn column(&self, n1: usize, n2: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == (n1, n2))
    }

    /// Max over columns of `|gram_nn / gram_00 − n1!n2!| / (n1!n2!)`.
    pub fn diagonal_ratio_residual(&self) -> f64 {
        let g00 = self.gram[(0, 0)];
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &(n1, n2))| {
                let expect = factorial(n1) * factorial(n2);
                ((self.gram[(i, i)] / g00 - expect) / expect).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest off-diagonal Gram entry relative to the largest diagonal one.
    pub fn offdiagonal_residual(&self) -> f64 {
        let n = self.len();
        let diag = (0..n).map(|i| self.gram[(i, i)].abs()).fold(0.0, f64::max);
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(self.gram[(i, j)].abs());
                }
            }
        }
        off / diag
    }

    /// Oblique projector `V (WᵀV)⁻¹ Wᵀ` onto the span of the `Ψ` columns.
    pub fn projector(&self) -> Result<DMatrix<f64>> {
        let g_inv = self
            .gram
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateFamily)?;
        Ok(&self.v * g_inv * self.w.transpose())
    }

    /// `P H P` with `P` the [`projector`](Self::projector): the Hamiltonian
    /// restricted to the physical span.
    pub fn compress(&self, h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let p = self.projector()?;
        Ok(&p * h * &p)
    }

    /// Rescales column pairs so that the Gram diagonal is one.
    pub fn normalized(&self) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..self.len() {
            let d = self.gram[(i, i)];
            if d == 0.0 || !d.is_finite() {
                return Err(Error::DegenerateFamily);
            }
            let s = d.abs().sqrt();
            out.v.column_mut(i).unscale_mut(s);
            out.w.column_mut(i).scale_mut(s / d);
        }
        out.gram = out.w.transpose() * &out.v;
        Ok(out)
    }
}

/// Builds both families without judging the vacuum residuals.
pub fn build_families_unchecked(
    basis: &SymplecticEigenbasis,
    space: &TruncatedSpace,
    n_cap: usize,
) -> Result<BiorthogonalFamily> {
    if 2 * n_cap > space.n_max() {
        return Err(Error::Range {
            index: n_cap,
            limit: space.n_max() / 2,
        });
    }
    let create = [
        ladder_matrix(&basis.creation(1), space),
        ladder_matrix(&basis.creation(2), space),
    ];
    let annihilate = [
        ladder_matrix(&basis.annihilation(1), space),
        ladder_matrix(&basis.annihilation(2), space),
    ];
    let vac = extract_vacuum(&annihilate[0], &annihilate[1])?;
    // vacuum of Θi‡*, raised by Θi*
    let adj_annihilate = [create[0].transpose(), create[1].transpose()];
    let adj_create = [annihilate[0].transpose(), annihilate[1].transpose()];
    let adj_vac = extract_vacuum(&adj_annihilate[0], &adj_annihilate[1])?;

    let side = n_cap + 1;
    let labels: Vec<(usize, usize)> = (0..side)
        .flat_map(|n1| (0..side).map(move |n2| (n1, n2)))
        .collect();
    let fill = |raise: &[DMatrix<f64>; 2], start: &DVector<f64>| {
        let mut cols = DMatrix::zeros(space.dim(), labels.len());
        let mut base = start.clone();
        for n2 in 0..side {
            let mut col = base.clone();
            for n1 in 0..side {
                cols.set_column(n1 * side + n2, &col);
                col = &raise[0] * &col;
            }
            base = &raise[1] * &base;
        }
        cols
    };
    let v = fill(&create, &vac.vector);
    let w = fill(&adj_create, &adj_vac.vector);
    let gram = w.transpose() * &v;
    Ok(BiorthogonalFamily {
        labels,
        vacuum_overlap: vac.vector.dot(&adj_vac.vector),
        vacuum_residual: vac.residual,
        adjoint_vacuum_residual: adj_vac.residual,
        v,
        w,
        gram,
        n_cap,
    })
}

/// `Ψ_{n1,n2} = Θ1‡ⁿ¹Θ2‡ⁿ²Ψ0` and `Ψ̃_{n1,n2} = Θ1*ⁿ¹Θ2*ⁿ²Ψ̃0` for
/// `n1, n2 <= n_cap`, requiring `2 n_cap <= n_max`.
pub fn build_families(
    p: &ModelParameters,
    n_max: usize,
    n_cap: usize,
) -> Result<BiorthogonalFamily> {
    let basis = compute_eigenbasis(p, SYMPLECTIC_TOL)?;
    let space = TruncatedSpace::new(n_max)?;
    let family = build_families_unchecked(&basis, &space, n_cap)?;
    for (what, residual) in [
        ("vacuum", family.vacuum_residual),
        ("adjoint vacuum", family.adjoint_vacuum_residual),
    ] {
        if !(residual <= VACUUM_TOL) {
            return Err(Error::Truncation {
                what,
                residual,
                tol: VACUUM_TOL,
            });
        }
    }
    Ok(family)
}
