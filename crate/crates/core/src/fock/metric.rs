use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::family::BiorthogonalFamily;
use crate::error::{Error, Result};

/// Positive operator `η` with `ηΨ_n = Ψ̃_n` on the span of the family,
/// for the rescaling where `⟨Ψ_n, Ψ̃_m⟩ = δ_nm`.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    pub eta: DMatrix<f64>,
    /// Orthonormal basis of the span of the `Ψ` columns.
    pub span: DMatrix<f64>,
}

/// `η = W Wᵀ` after rescaling the family so that its Gram matrix has unit
/// diagonal. Equivalently `ηΨ_n = Ψ̃_n` for the unscaled columns when
/// `⟨Ψ0, Ψ̃0⟩ > 0`.
pub fn build_metric(family: &BiorthogonalFamily) -> Result<MetricOperator> {
    let unit = family.normalized()?;
    let eta = &unit.w * unit.w.transpose();
    if eta.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateFamily);
    }
    let span = family.v.clone().qr().q();
    Ok(MetricOperator { eta, span })
}

pub(crate) fn apply_real(m: &DMatrix<f64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let re = m * v.map(|z| z.re);
    let im = m * v.map(|z| z.im);
    re.zip_map(&im, Complex64::new)
}

pub(crate) fn complexify(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

impl MetricOperator {
    pub fn dim(&self) -> usize {
        self.eta.nrows()
    }

    /// Max-abs entry of `η − η†`.
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.eta - self.eta.transpose()).amax()
    }

    /// Eigenvalues of `η` compressed onto the spanned subspace, ascending.
    pub fn restricted_eigenvalues(&self) -> Vec<f64> {
        let compressed = self.span.transpose() * &self.eta * &self.span;
        let sym = (&compressed + compressed.transpose()) * 0.5;
        let mut eigs: Vec<f64> = SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(f64::total_cmp);
        eigs
    }

    /// Frobenius norm of `(ηH − H†η)` restricted to the spanned subspace.
    pub fn intertwining_residual(&self, h: &DMatrix<f64>) -> f64 {
        let lhs = &self.eta * (h * &self.span);
        let rhs = h.transpose() * (&self.eta * &self.span);
        (lhs - rhs).norm()
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        apply_real(&self.eta, v)
    }

    /// `⟨ηψ, ψ⟩`, real and positive on the span.
    pub fn physical_norm_squared(&self, psi: &DVector<Complex64>) -> f64 {
        physical_inner_product(psi, psi, self).re
    }
}

/// `⟨ψ, φ⟩_S = ⟨ηψ, φ⟩ = φ†ηψ`, linear in the first argument.
pub fn physical_inner_product(
    psi: &DVector<Complex64>,
    phi: &DVector<Complex64>,
    eta: &MetricOperator,
) -> Complex64 {
    phi.dotc(&eta.apply(psi))
}

/// Expansion `ψ = Σ c_n Ψ_n` in the eigenfamily of `H`.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub labels: Vec<(usize, usize)>,
    /// `c_n = ⟨ηψ, Ψ_n⟩ / ⟨ηΨ_n, Ψ_n⟩`.
    pub coefficients: Vec<Complex64>,
    /// `A_n = ⟨ηψ, Ψ_n⟩ / √⟨ηΨ_n, Ψ_n⟩`, with `Σ|A_n|² = ⟨ηψ, ψ⟩`.
    pub amplitudes: Vec<Complex64>,
    /// `‖ψ − Σ c_n Ψ_n‖ / ‖ψ‖`.
    pub residual: f64,
}

impl Expansion {
    pub fn probability_total(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn expansion_coefficients(
    psi: &DVector<Complex64>,
    family: &BiorthogonalFamily,
    eta: &MetricOperator,
    tol: f64,
) -> Result<Expansion> {
    let eta_psi = eta.apply(psi);
    let mut coefficients = Vec::with_capacity(family.len());
    let mut amplitudes = Vec::with_capacity(family.len());
    let mut rebuilt = DVector::<Complex64>::zeros(psi.len());
    for i in 0..family.len() {
        let col = complexify(&family.v.column(i).into_owned());
        let overlap = col.dotc(&eta_psi);
        let weight = col.dotc(&eta.apply(&col)).re;
        if !(weight > 0.0) {
            return Err(Error::DegenerateFamily);
        }
        let c = overlap / weight;
        rebuilt += &col * c;
        coefficients.push(c);
        amplitudes.push(overlap / weight.sqrt());
    }
    let scale = psi.norm();
    let residual = if scale > 0.0 {
        (psi - rebuilt).norm() / scale
    } else {
        0.0
    };
    if !(residual <= tol) {
        return Err(Error::OutsideSpan { residual, tol });
    }
    Ok(Expansion {
        labels: family.labels.clone(),
        coefficients,
        amplitudes,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{assemble_hamiltonian, build_families, TruncatedSpace};
    use crate::params::ModelParameters;

    fn derived() -> ModelParameters {
        ModelParameters::new(2.0, 1.0, 0.0, 0.0, 0.0, 0.5).unwrap()
    }

    #[test]
    fn decoupled_metric_is_identity_on_span() {
        let p = ModelParameters::decoupled(2.0, 1.0).unwrap();
        let fam = build_families(&p, 6, 2).unwrap();
        let norm = fam.normalized().unwrap();
        let space = TruncatedSpace::new(6).unwrap();
        for (i, &(n1, n2)) in norm.labels.iter().enumerate() {
            assert!((norm.v.column(i) - space.basis_vector(n1, n2)).amax() < 1e-12);
            assert!((norm.w.column(i) - space.basis_vector(n1, n2)).amax() < 1e-12);
        }
        let eta = build_metric(&fam).unwrap();
        for e in eta.restricted_eigenvalues() {
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn raw_and_normalized_families_give_same_metric() {
        let fam = build_families(&derived(), 12, 2).unwrap();
        let a = build_metric(&fam).unwrap();
        let b = build_metric(&fam.normalized().unwrap()).unwrap();
        assert!((&a.eta - &b.eta).amax() < 1e-10);
        let wwt = &fam.normalized().unwrap().w * fam.normalized().unwrap().w.transpose();
        assert!((&b.eta - wwt).amax() < 1e-10);
    }

    #[test]
    fn metric_intertwines_on_span() {
        let p = derived();
        let fam = build_families(&p, 20, 3).unwrap();
        let eta = build_metric(&fam).unwrap();
        let h = assemble_hamiltonian(&p, &TruncatedSpace::new(20).unwrap());
        assert!(eta.hermiticity_residual() < 1e-10);
        assert!(eta.restricted_eigenvalues()[0] > 0.0);
        assert!(eta.intertwining_residual(&h) < 1e-8);
    }

    #[test]
    fn expansion_of_single_eigenvector() {
        let fam = build_families(&derived(), 12, 2).unwrap();
        let eta = build_metric(&fam).unwrap();
        let k = fam.column(1, 0).unwrap();
        let psi = complexify(&fam.v.column(k).into_owned());
        let exp = expansion_coefficients(&psi, &fam, &eta, 1e-8).unwrap();
        for (i, c) in exp.coefficients.iter().enumerate() {
            let expect = if i == k { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn vector_outside_span_is_reported() {
        let fam = build_families(&derived(), 12, 2).unwrap();
        let eta = build_metric(&fam).unwrap();
        let space = TruncatedSpace::new(12).unwrap();
        let psi = complexify(&space.basis_vector(7, 0));
        assert!(matches!(
            expansion_coefficients(&psi, &fam, &eta, 1e-8),
            Err(Error::OutsideSpan { .. })
        ));
    }
}
