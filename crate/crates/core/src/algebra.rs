//! The equation-of-motion eigenproblem `[H, Θ] = λΘ` for operators
//! `Θ = x1 a1* + x2 a2* + y1 a1 + y2 a2`.
//!
//! Coefficient vectors are ordered `(x1, x2, y1, y2)`. For two such vectors
//! the bilinear form `vᵀΩw` equals the operator commutator `[Θ_v, Θ_w]`.
//!
//! Sign convention: the rows of [`SymplecticEigenbasis::u`] satisfy
//! `UΩUᵀ = Ω`, so `[Θi, Θi‡] = v_{i+2}ᵀΩv_i = 1`.

use nalgebra::{Matrix4, Vector4, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParameters;

/// A numeric eigenvalue is real when `|Im λ| <= REALITY_TOL * (1 + ‖A‖_max)`.
pub const REALITY_TOL: f64 = 1e-9;

/// `λ1` and `λ2` are degenerate when `|λ1 − λ2| <= DEGENERACY_TOL * (1 + λ1)`.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Default tolerance for the symplectic invariants of a computed eigenbasis.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// The fixed symplectic form with `Ω² = −I` and `Ωᵀ = −Ω`.
pub fn omega() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    )
}

/// `vᵀΩw` for raw coefficient vectors.
pub fn symplectic_form(v: &Vector4<f64>, w: &Vector4<f64>) -> f64 {
    // Ωw = (−w3, −w4, w1, w2)
    -v[0] * w[2] - v[1] * w[3] + v[2] * w[0] + v[3] * w[1]
}

fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMatrix {
    entries: Matrix4<f64>,
}

impl DynamicalMatrix {
    pub fn entries(&self) -> &Matrix4<f64> {
        &self.entries
    }

    pub fn omega(&self) -> Matrix4<f64> {
        omega()
    }

    /// Max-abs entry of `ΩA − (ΩA)ᵀ`.
    pub fn omega_symmetry_residual(&self) -> f64 {
        let oa = omega() * self.entries;
        max_abs(&(oa - oa.transpose()))
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(&self.entries)
    }
}

/// The dynamical matrix `A` of `[H, Θ] = λΘ` acting on `(x1, x2, y1, y2)ᵀ`.
pub fn build_dynamical_matrix(p: &ModelParameters) -> Result<DynamicalMatrix> {
    p.validate()?;
    let ModelParameters {
        alpha11: a11,
        alpha22: a22,
        alpha12: a12,
        beta11: b11,
        beta22: b22,
        beta12: b12,
    } = *p;
    let entries = Matrix4::new(
        a11, a12, -b11, -b12, //
        -a12, a22, -b12, -b22, //
        -b11, -b12, -a11, a12, //
        -b12, -b22, -a12, -a22,
    );
    Ok(DynamicalMatrix { entries })
}

/// The dynamical matrix of `H*`, i.e. `A` with `α12 → −α12` and `β → −β`.
pub fn build_adjoint_dynamical_matrix(p: &ModelParameters) -> Result<DynamicalMatrix> {
    p.validate()?;
    let ModelParameters {
        alpha11: a11,
        alpha22: a22,
        alpha12: a12,
        beta11: b11,
        beta22: b22,
        beta12: b12,
    } = *p;
    let entries = Matrix4::new(
        a11, -a12, b11, b12, //
        a12, a22, b12, b22, //
        b11, b12, -a11, -a12, //
        b12, b22, a12, -a22,
    );
    Ok(DynamicalMatrix { entries })
}

/// Maps an eigenvector of `Ã` with eigenvalue `λ` to an eigenvector of `A`
/// with eigenvalue `−λ`: `(x̃1, x̃2, ỹ1, ỹ2) ↦ (ỹ1, ỹ2, x̃1, x̃2)`.
///
/// This is the coefficient vector of the adjoint operator `Θ*`, and the map
/// is an involution.
pub fn adjoint_eigenvector_map(v: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new(v[2], v[3], v[0], v[1])
}

/// Coefficients of `det(A − λI) = C − Bλ² + λ⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicCoefficients {
    pub b: f64,
    pub c: f64,
}

impl CharacteristicCoefficients {
    pub fn evaluate(&self, lambda: f64) -> f64 {
        let l2 = lambda * lambda;
        self.c - self.b * l2 + l2 * l2
    }

    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.c
    }
}

pub fn characteristic_coefficients(p: &ModelParameters) -> Result<CharacteristicCoefficients> {
    p.validate()?;
    let ModelParameters {
        alpha11: a11,
        alpha22: a22,
        alpha12: a12,
        beta11: b11,
        beta22: b22,
        beta12: b12,
    } = *p;
    let (a11s, a22s, a12s) = (a11 * a11, a22 * a22, a12 * a12);
    let (b11s, b22s, b12s) = (b11 * b11, b22 * b22, b12 * b12);
    let b = a11s + a22s + 2.0 * b12s - 2.0 * a12s + b11s + b22s;
    let c = a11s * a22s + 2.0 * a11 * a22 * b12s + b12s * b12s + 2.0 * a11 * a22 * a12s
        - 2.0 * b12s * a12s
        + a12s * a12s
        + a22s * b11s
        - 2.0 * b12s * b11 * b22
        + 2.0 * a12s * b11 * b22
        + a11s * b22s
        + b11s * b22s;
    Ok(CharacteristicCoefficients { b, c })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Four real, simple eigenvalues `±λ1, ±λ2` with `λ1 > λ2 > 0`.
    RealSimple,
    /// Real, but `λ1` and `λ2` coincide within [`DEGENERACY_TOL`].
    Degenerate,
    /// Some eigenvalue is not real, or a `λ²` root is not positive.
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticEigenvalues {
    pub regime: Regime,
    /// `(λ1, λ2)` with `λ1 >= λ2 > 0`; `None` in the complex regime.
    pub lambdas: Option<(f64, f64)>,
}

impl AnalyticEigenvalues {
    pub fn real_simple(&self) -> Result<(f64, f64)> {
        match (self.regime, self.lambdas) {
            (Regime::RealSimple, Some(l)) => Ok(l),
            (r, _) => Err(Error::Regime(r)),
        }
    }
}

/// Closed-form roots `λ = ±√(½B ± ½√(B² − 4C))` with regime classification.
pub fn analytic_eigenvalues(p: &ModelParameters) -> Result<AnalyticEigenvalues> {
    let cc = characteristic_coefficients(p)?;
    Ok(classify_quartic(&cc))
}

fn classify_quartic(cc: &CharacteristicCoefficients) -> AnalyticEigenvalues {
    let complex = AnalyticEigenvalues {
        regime: Regime::Complex,
        lambdas: None,
    };
    let (b, c) = (cc.b, cc.c);
    let disc = cc.discriminant();
    // b² − 4c loses ~eps·b² to cancellation
    if disc < -1e-12 * b * b || b <= 0.0 || c <= 0.0 {
        return complex;
    }
    let root = disc.max(0.0).sqrt();
    let l1_sq = 0.5 * (b + root);
    // product of roots is C; avoids cancellation in ½(B − √disc)
    let l2_sq = c / l1_sq;
    if !(l2_sq > 0.0) {
        return complex;
    }
    let (l1, l2) = (l1_sq.sqrt(), l2_sq.sqrt());
    let regime = if l1 - l2 <= DEGENERACY_TOL * (1.0 + l1) {
        Regime::Degenerate
    } else {
        Regime::RealSimple
    };
    AnalyticEigenvalues {
        regime,
        lambdas: Some((l1, l2)),
    }
}

/// All four eigenvalues of a 4×4 real matrix from a dense Schur-based solver.
pub fn numeric_eigenvalues(m: &Matrix4<f64>) -> Vec<Complex64> {
    m.complex_eigenvalues().iter().copied().collect()
}

/// Regime of a set of numeric eigenvalues under the scale-aware reality
/// tolerance.
pub fn classify_numeric(eigs: &[Complex64], max_abs_entry: f64) -> Regime {
    let tol = REALITY_TOL * (1.0 + max_abs_entry);
    if eigs.iter().any(|z| z.im.abs() > tol) {
        return Regime::Complex;
    }
    let mut pos: Vec<f64> = eigs.iter().map(|z| z.re).filter(|&x| x > tol).collect();
    if pos.len() != 2 {
        return Regime::Complex;
    }
    pos.sort_by(|a, b| b.total_cmp(a));
    if pos[0] - pos[1] <= DEGENERACY_TOL * (1.0 + pos[0]) {
        Regime::Degenerate
    } else {
        Regime::RealSimple
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LadderKind {
    Creation,
    Annihilation,
}

/// One operator `Θ = x1 a1* + x2 a2* + y1 a1 + y2 a2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCoefficients {
    pub coeffs: Vector4<f64>,
    pub kind: LadderKind,
    /// 1 or 2.
    pub mode: usize,
}

impl LadderCoefficients {
    pub fn new(coeffs: Vector4<f64>, kind: LadderKind, mode: usize) -> Self {
        Self { coeffs, kind, mode }
    }

    pub fn x(&self) -> (f64, f64) {
        (self.coeffs[0], self.coeffs[1])
    }

    pub fn y(&self) -> (f64, f64) {
        (self.coeffs[2], self.coeffs[3])
    }

    /// The Hilbert-space adjoint `Θ*`: creation and annihilation parts swap.
    ///
    /// `Θi*` creates and `Θi‡*` annihilates quanta of `H*`.
    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            LadderKind::Creation => LadderKind::Annihilation,
            LadderKind::Annihilation => LadderKind::Creation,
        };
        Self {
            coeffs: adjoint_eigenvector_map(&self.coeffs),
            kind,
            mode: self.mode,
        }
    }
}

/// `[Θ_v, Θ_w] = vᵀΩw` under the canonical commutation relations.
pub fn commutator(v: &LadderCoefficients, w: &LadderCoefficients) -> f64 {
    symplectic_form(&v.coeffs, &w.coeffs)
}

/// Normalized eigenvectors of `A` as the rows of `U`, ordered for the
/// eigenvalues `(λ1, λ2, −λ1, −λ2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticEigenbasis {
    pub lambda1: f64,
    pub lambda2: f64,
    pub u: Matrix4<f64>,
    pub regime: Regime,
}

impl SymplecticEigenbasis {
    /// Eigenvalue belonging to row `i` (0-based).
    pub fn eigenvalue(&self, i: usize) -> f64 {
        [self.lambda1, self.lambda2, -self.lambda1, -self.lambda2][i]
    }

    pub fn row(&self, i: usize) -> Vector4<f64> {
        self.u.row(i).transpose()
    }

    /// `Θ‡_mode`, row `mode` of `U`.
    pub fn creation(&self, mode: usize) -> LadderCoefficients {
        assert!(mode == 1 || mode == 2, "mode must be 1 or 2");
        LadderCoefficients::new(self.row(mode - 1), LadderKind::Creation, mode)
    }

    /// `Θ_mode`, row `mode + 2` of `U`.
    pub fn annihilation(&self, mode: usize) -> LadderCoefficients {
        assert!(mode == 1 || mode == 2, "mode must be 1 or 2");
        LadderCoefficients::new(self.row(mode + 1), LadderKind::Annihilation, mode)
    }

    /// `(Θ1‡, Θ2‡, Θ1, Θ2)`.
    pub fn ladder_operators(&self) -> [LadderCoefficients; 4] {
        [
            self.creation(1),
            self.creation(2),
            self.annihilation(1),
            self.annihilation(2),
        ]
    }

    /// `U⁻¹ = ΩUᵀΩᵀ`.
    pub fn inverse(&self) -> Matrix4<f64> {
        let om = omega();
        om * self.u.transpose() * om.transpose()
    }

    /// Max-abs entry of `UΩUᵀΩᵀ − I`.
    pub fn symplectic_residual(&self) -> f64 {
        let om = omega();
        max_abs(&(self.u * om * self.u.transpose() * om.transpose() - Matrix4::identity()))
    }

    /// `T[i][j] = [Θ_i, Θ_j]` over `(Θ1‡, Θ2‡, Θ1, Θ2)`, i.e. `UΩUᵀ`.
    ///
    /// The canonical table equals `Ω`.
    pub fn commutator_table(&self) -> Matrix4<f64> {
        self.u * omega() * self.u.transpose()
    }

    /// Max over rows of `‖A vᵢ − λᵢ vᵢ‖ / ‖vᵢ‖`.
    pub fn eigen_residual(&self, a: &DynamicalMatrix) -> f64 {
        (0..4)
            .map(|i| {
                let v = self.row(i);
                (a.entries() * v - v * self.eigenvalue(i)).norm() / v.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Unit null vector of `A − λI` from the smallest singular triple.
fn null_vector(a: &Matrix4<f64>, lambda: f64) -> Result<Vector4<f64>> {
    let shifted = a - Matrix4::identity() * lambda;
    let svd = SVD::try_new(shifted, false, true, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence("4x4 singular value decomposition"))?;
    let v_t = svd
        .v_t
        .ok_or(Error::NoConvergence("missing right singular vectors"))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("four singular values");
    Ok(v_t.row(idx).transpose())
}

/// Builds `U` from the analytic eigenvalues and numerically computed
/// eigenvectors.
///
/// Each positive-eigenvalue eigenvector is unit length with its
/// largest-magnitude component positive; its negative partner `w` is
/// rescaled so that `wᵀΩv = 1`.
pub fn compute_eigenbasis(p: &ModelParameters, tol: f64) -> Result<SymplecticEigenbasis> {
    let basis = eigenbasis_unchecked(p, tol)?;
    let residual = basis.symplectic_residual();
    if !(residual <= tol) {
        return Err(Error::Invariant {
            what: "U Ω Uᵀ Ωᵀ = I",
            residual,
            tol,
        });
    }
    Ok(basis)
}

/// As [`compute_eigenbasis`] but without the final `UΩUᵀΩᵀ = I` check;
/// `pairing_tol` still guards the partner rescaling.
pub fn eigenbasis_unchecked(p: &ModelParameters, pairing_tol: f64) -> Result<SymplecticEigenbasis> {
    let tol = pairing_tol;
    let (l1, l2) = analytic_eigenvalues(p)?.real_simple()?;
    let a = build_dynamical_matrix(p)?;
    let targets = [l1, l2, -l1, -l2];
    let mut rows = [Vector4::zeros(); 4];
    for (row, &lambda) in rows.iter_mut().zip(targets.iter()) {
        *row = null_vector(a.entries(), lambda)?;
    }
    for v in rows.iter_mut().take(2) {
        let lead = v
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap();
        if lead < 0.0 {
            *v = -*v;
        }
    }
    for i in 0..2 {
        let pairing = symplectic_form(&rows[i + 2], &rows[i]);
        if pairing.abs() < tol {
            return Err(Error::Pairing {
                value: pairing.abs(),
                tol,
            });
        }
        rows[i + 2] /= pairing;
    }
    let u = Matrix4::from_rows(&[
        rows[0].transpose(),
        rows[1].transpose(),
        rows[2].transpose(),
        rows[3].transpose(),
    ]);
    Ok(SymplecticEigenbasis {
        lambda1: l1,
        lambda2: l2,
        u,
        regime: Regime::RealSimple,
    })
}

/// `H = E0 + λ1 Θ1‡Θ1 + λ2 Θ2‡Θ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalForm {
    pub e0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n1: usize,
    pub n2: usize,
    pub energy: f64,
}

impl DiagonalForm {
    pub fn energy(&self, n1: usize, n2: usize) -> f64 {
        self.e0 + n1 as f64 * self.lambda1 + n2 as f64 * self.lambda2
    }

    /// All `E_{n1,n2}` with `n1, n2 <= n_cap`, ascending in energy with ties
    /// broken by `(n1, n2)`.
    pub fn levels(&self, n_cap: usize) -> Vec<EnergyLevel> {
        let mut out: Vec<EnergyLevel> = (0..=n_cap)
            .flat_map(|n1| (0..=n_cap).map(move |n2| (n1, n2)))
            .map(|(n1, n2)| EnergyLevel {
                n1,
                n2,
                energy: self.energy(n1, n2),
            })
            .collect();
        out.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then((a.n1, a.n2).cmp(&(b.n1, b.n2)))
        });
        out
    }
}

/// `E0 = (λ1 + λ2 − α11 − α22) / 2`.
pub fn diagonal_form(p: &ModelParameters) -> Result<DiagonalForm> {
    let (l1, l2) = analytic_eigenvalues(p)?.real_simple()?;
    Ok(DiagonalForm {
        e0: 0.5 * (l1 + l2 - p.alpha11 - p.alpha22),
        lambda1: l1,
        lambda2: l2,
    })
}

pub fn energy_levels(p: &ModelParameters, n_cap: usize) -> Result<Vec<EnergyLevel>> {
    Ok(diagonal_form(p)?.levels(n_cap))
}
