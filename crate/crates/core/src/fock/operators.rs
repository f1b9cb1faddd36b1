use nalgebra::DMatrix;
use num_complex::Complex64;

use super::space::TruncatedSpace;
use crate::algebra::{LadderCoefficients, SymplecticEigenbasis};
use crate::error::{Error, Result};
use crate::params::ModelParameters;

/// Matrix of `H` in the occupation basis, assembled term by term.
///
/// Every term of `H` is normal ordered, so the matrix elements between
/// retained states are exact; only transitions out of the space are dropped.
pub fn assemble_hamiltonian(p: &ModelParameters, space: &TruncatedSpace) -> DMatrix<f64> {
    let dim = space.dim();
    let top = space.n_max();
    let mut h = DMatrix::zeros(dim, dim);
    let mut add = |n1: usize, n2: usize, m1: usize, m2: usize, value: f64| {
        if m1 <= top && m2 <= top {
            h[(space.index(m1, m2), space.index(n1, n2))] += value;
        }
    };
    for n1 in 0..=top {
        for n2 in 0..=top {
            let (f1, f2) = (n1 as f64, n2 as f64);
            add(n1, n2, n1, n2, p.alpha11 * f1 + p.alpha22 * f2);
            // α12 (a1* a2 − a2* a1)
            if n2 >= 1 {
                add(n1, n2, n1 + 1, n2 - 1, p.alpha12 * ((f1 + 1.0) * f2).sqrt());
            }
            if n1 >= 1 {
                add(
                    n1,
                    n2,
                    n1 - 1,
                    n2 + 1,
                    -p.alpha12 * (f1 * (f2 + 1.0)).sqrt(),
                );
            }
            // ½β11 (a1*² − a1²)
            add(
                n1,
                n2,
                n1 + 2,
                n2,
                0.5 * p.beta11 * ((f1 + 1.0) * (f1 + 2.0)).sqrt(),
            );
            if n1 >= 2 {
                add(
                    n1,
                    n2,
                    n1 - 2,
                    n2,
                    -0.5 * p.beta11 * (f1 * (f1 - 1.0)).sqrt(),
                );
            }
            // ½β22 (a2*² − a2²)
            add(
                n1,
                n2,
                n1,
                n2 + 2,
                0.5 * p.beta22 * ((f2 + 1.0) * (f2 + 2.0)).sqrt(),
            );
            if n2 >= 2 {
                add(
                    n1,
                    n2,
                    n1,
                    n2 - 2,
                    -0.5 * p.beta22 * (f2 * (f2 - 1.0)).sqrt(),
                );
            }
            // β12 (a1* a2* − a2 a1)
            add(
                n1,
                n2,
                n1 + 1,
                n2 + 1,
                p.beta12 * ((f1 + 1.0) * (f2 + 1.0)).sqrt(),
            );
            if n1 >= 1 && n2 >= 1 {
                add(n1, n2, n1 - 1, n2 - 1, -p.beta12 * (f1 * f2).sqrt());
            }
        }
    }
    h
}

/// `x1 a1* + x2 a2* + y1 a1 + y2 a2` as a dense matrix.
pub fn ladder_matrix(coeffs: &LadderCoefficients, space: &TruncatedSpace) -> DMatrix<f64> {
    let (x1, x2) = coeffs.x();
    let (y1, y2) = coeffs.y();
    let a1 = space.annihilator(1);
    let a2 = space.annihilator(2);
    a1.transpose() * x1 + a2.transpose() * x2 + a1 * y1 + a2 * y2
}

/// `N1 + N2`.
pub fn number_matrix(space: &TruncatedSpace) -> DMatrix<f64> {
    DMatrix::from_fn(space.dim(), space.dim(), |i, j| {
        if i == j {
            let (n1, n2) = space.occupations(i);
            (n1 + n2) as f64
        } else {
            0.0
        }
    })
}

/// `Θ1‡Θ1 + Θ2‡Θ2`.
pub fn pseudo_number_matrix(basis: &SymplecticEigenbasis, space: &TruncatedSpace) -> DMatrix<f64> {
    (1..=2)
        .map(|mode| {
            ladder_matrix(&basis.creation(mode), space)
                * ladder_matrix(&basis.annihilation(mode), space)
        })
        .fold(DMatrix::zeros(space.dim(), space.dim()), |acc, m| acc + m)
}

/// `[A, B] = AB − BA`.
pub fn commutator_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// The `k` eigenvalues of `h` with smallest real part, ascending.
pub fn lowest_eigenvalues(h: &DMatrix<f64>, k: usize) -> Result<Vec<Complex64>> {
    if k > h.nrows() {
        return Err(Error::Range {
            index: k,
            limit: h.nrows(),
        });
    }
    let mut eigs: Vec<Complex64> = h.complex_eigenvalues().iter().copied().collect();
    eigs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    eigs.truncate(k);
    Ok(eigs)
}

/// The `k` lowest (by real part) eigenvalues of the truncated Hamiltonian.
pub fn oracle_spectrum(p: &ModelParameters, n_max: usize, k: usize) -> Result<Vec<Complex64>> {
    let space = TruncatedSpace::new(n_max)?;
    if k > space.dim() {
        return Err(Error::Range {
            index: k,
            limit: space.dim(),
        });
    }
    lowest_eigenvalues(&assemble_hamiltonian(p, &space), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{compute_eigenbasis, LadderKind, SYMPLECTIC_TOL};
    use nalgebra::Vector4;

    fn derived() -> ModelParameters {
        ModelParameters::new(2.0, 1.0, 0.0, 0.0, 0.0, 0.5).unwrap()
    }

    /// Second assembly route: products of the ladder matrices.
    fn product_hamiltonian(p: &ModelParameters, s: &TruncatedSpace) -> DMatrix<f64> {
        // pad by two shells so that products are exact on the retained block
        let big = TruncatedSpace::new(s.n_max() + 2).unwrap();
        let (a1, a2) = (big.annihilator(1).clone(), big.annihilator(2).clone());
        let (c1, c2) = (a1.transpose(), a2.transpose());
        let h = &c1 * &a1 * p.alpha11
            + &c2 * &a2 * p.alpha22
            + (&c1 * &a2 - &c2 * &a1) * p.alpha12
            + (&c1 * &c1 - &a1 * &a1) * (0.5 * p.beta11)
            + (&c2 * &c2 - &a2 * &a2) * (0.5 * p.beta22)
            + (&c1 * &c2 - &a2 * &a1) * p.beta12;
        DMatrix::from_fn(s.dim(), s.dim(), |i, j| {
            let (n1, n2) = s.occupations(i);
            let (m1, m2) = s.occupations(j);
            h[(big.index(n1, n2), big.index(m1, m2))]
        })
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let s = TruncatedSpace::new(4).unwrap();
        let h = assemble_hamiltonian(&ModelParameters::decoupled(2.0, 0.7).unwrap(), &s);
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let (n1, n2) = s.occupations(i);
                let expect = if i == j {
                    2.0 * n1 as f64 + 0.7 * n2 as f64
                } else {
                    0.0
                };
                assert_eq!(h[(i, j)], expect);
            }
        }
    }

    #[test]
    fn single_squeeze_element() {
        let s = TruncatedSpace::new(4).unwrap();
        let p = ModelParameters::new(1.0, 1.0, 0.0, 0.8, 0.0, 0.0).unwrap();
        let h = assemble_hamiltonian(&p, &s);
        assert!((h[(s.index(2, 0), s.index(0, 0))] - 0.5 * 0.8 * 2f64.sqrt()).abs() < 1e-15);
        assert!((h[(s.index(0, 0), s.index(2, 0))] + 0.5 * 0.8 * 2f64.sqrt()).abs() < 1e-15);
        assert!((&h - h.transpose()).amax() > 0.1);
    }

    #[test]
    fn term_assembly_matches_products() {
        let s = TruncatedSpace::new(5).unwrap();
        let p = ModelParameters::new(1.3, 0.8, 0.25, -0.4, 0.3, 0.6).unwrap();
        let diff = (assemble_hamiltonian(&p, &s) - product_hamiltonian(&p, &s)).amax();
        assert!(diff < 1e-13, "{diff}");
    }

    #[test]
    fn ladder_matrix_of_unit_creation() {
        let s = TruncatedSpace::new(3).unwrap();
        let c = LadderCoefficients::new(Vector4::new(1.0, 0.0, 0.0, 0.0), LadderKind::Creation, 1);
        assert_eq!(ladder_matrix(&c, &s), s.creator(1));
        assert_eq!(ladder_matrix(&c.adjoint(), &s), *s.annihilator(1));
    }

    #[test]
    fn ladder_operators_shift_energy_on_safe_block() {
        let s = TruncatedSpace::new(12).unwrap();
        let p = derived();
        let basis = compute_eigenbasis(&p, SYMPLECTIC_TOL).unwrap();
        let h = assemble_hamiltonian(&p, &s);
        let safe = s.shell_indices(s.n_max() - 2);
        for mode in 1..=2 {
            let lambda = basis.eigenvalue(mode - 1);
            let c = ladder_matrix(&basis.creation(mode), &s);
            let lhs = commutator_matrix(&h, &c) - &c * lambda;
            let t = ladder_matrix(&basis.annihilation(mode), &s);
            let lhs_t = commutator_matrix(&h, &t) + &t * lambda;
            let boson = commutator_matrix(&t, &c);
            for &i in &safe {
                for &j in &safe {
                    assert!(lhs[(i, j)].abs() < 1e-10);
                    assert!(lhs_t[(i, j)].abs() < 1e-10);
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((boson[(i, j)] - id).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn decoupled_spectrum_is_integer_lattice() {
        let eigs = oracle_spectrum(&ModelParameters::decoupled(2.0, 1.0).unwrap(), 6, 5).unwrap();
        let expect = [0.0, 1.0, 2.0, 2.0, 3.0];
        for (z, e) in eigs.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn too_many_eigenvalues_is_range_error() {
        assert!(matches!(
            oracle_spectrum(&derived(), 2, 10),
            Err(Error::Range {
                index: 10,
                limit: 9
            })
        ));
    }
}
