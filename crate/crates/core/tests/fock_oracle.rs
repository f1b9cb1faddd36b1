use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pseudoboson::algebra::numeric_eigenvalues;
use pseudoboson::fock::{
    assemble_hamiltonian, build_families, ladder_matrix, number_matrix, oracle_spectrum,
    vacuum_state, TruncatedSpace, VACUUM_TOL,
};
use pseudoboson::sampling::{rng_from_env, ParameterRanges};
use pseudoboson::statmech::{oracle_trace, SpectrumSpec};
use pseudoboson::{
    build_adjoint_dynamical_matrix, build_dynamical_matrix, compute_eigenbasis, diagonal_form,
    ModelParameters,
};

fn derived() -> ModelParameters {
    ModelParameters::new(2.0, 1.0, 0.0, 0.0, 0.0, 0.5).unwrap()
}

fn sorted_eigs(m: &nalgebra::Matrix4<f64>) -> Vec<Complex64> {
    let mut e = numeric_eigenvalues(m);
    e.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    e
}

#[test]
fn adjoint_dynamical_matrix_is_isospectral() {
    let mut rng = rng_from_env();
    let ranges = ParameterRanges::default();
    for _ in 0..200 {
        let p = ranges.draw_real_simple(&mut rng);
        let a = sorted_eigs(build_dynamical_matrix(&p).unwrap().entries());
        let b = sorted_eigs(build_adjoint_dynamical_matrix(&p).unwrap().entries());
        for (x, y) in a.iter().zip(&b) {
            assert!(
                (x - y).norm() < 1e-9 * (1.0 + x.norm()),
                "{p:?}: {a:?} vs {b:?}"
            );
        }
    }
}

#[test]
fn decoupled_fock_trace_matches_closed_form() {
    let p = ModelParameters::decoupled(1.0, 3.0).unwrap();
    let spec = SpectrumSpec::from(diagonal_form(&p).unwrap());
    let (beta, zeta, n_max) = (1.0, -1.0, 60);
    let space = TruncatedSpace::new(n_max).unwrap();
    let h = assemble_hamiltonian(&p, &space);
    let n = number_matrix(&space);
    let (mut z, mut e, mut num) = (0.0, 0.0, 0.0);
    for i in 0..space.dim() {
        let w = (-beta * h[(i, i)] + zeta * n[(i, i)]).exp();
        z += w;
        e += w * h[(i, i)];
        num += w * n[(i, i)];
    }
    let t = oracle_trace(&spec, beta, zeta, n_max).unwrap();
    assert!((z - t.z).abs() / t.z < 1e-12);
    assert!((e / z - t.energy).abs() / t.energy < 1e-12);
    assert!((num / z - t.number).abs() / t.number < 1e-12);
}

#[test]
fn vacuum_is_lowest_eigenvector_and_ladder_raises_energy() {
    let p = derived();
    let form = diagonal_form(&p).unwrap();
    let basis = compute_eigenbasis(&p, 1e-10).unwrap();
    let space = TruncatedSpace::new(20).unwrap();
    let h = assemble_hamiltonian(&p, &space);
    let t1 = ladder_matrix(&basis.annihilation(1), &space);
    let t2 = ladder_matrix(&basis.annihilation(2), &space);
    let vac = vacuum_state(&t1, &t2, VACUUM_TOL).unwrap();
    let psi0 = &vac.vector;
    assert!((&h * psi0 - psi0 * form.e0).norm() < 1e-6);
    for (mode, lambda) in [(1, form.lambda1), (2, form.lambda2)] {
        let up = ladder_matrix(&basis.creation(mode), &space) * psi0;
        let r = (&h * &up - &up * (form.e0 + lambda)).norm() / up.norm();
        assert!(r < 1e-8, "mode {mode}: {r:e}");
    }
}

/// Smallest right singular vector of `m`.
fn null_direction(m: DMatrix<f64>) -> DVector<f64> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    v_t.row(k).transpose()
}

#[test]
fn adjoint_family_spans_eigenvectors_of_adjoint() {
    let p = derived();
    let form = diagonal_form(&p).unwrap();
    let n_max = 20;
    let space = TruncatedSpace::new(n_max).unwrap();
    let h = assemble_hamiltonian(&p, &space);
    let fam = build_families(&p, n_max, 3).unwrap();
    // the four lowest levels are non-degenerate for this instance
    for (n1, n2) in [(0, 0), (0, 1), (1, 0), (0, 2)] {
        let e = form.energy(n1, n2);
        let shifted = h.transpose() - DMatrix::identity(space.dim(), space.dim()) * e;
        let v = null_direction(shifted);
        let w = fam.w.column(fam.column(n1, n2).unwrap()).into_owned();
        let cos = v.dot(&w).abs() / w.norm();
        assert!((1.0 - cos).abs() < 1e-8, "({n1},{n2}): cos = {cos}");
    }
}

#[test]
fn spectrum_equivalence_for_moderate_couplings() {
    let mut rng = rng_from_env();
    let ranges = ParameterRanges {
        alpha_diag: (1.0, 3.0),
        alpha12: 0.4,
        beta: 0.4,
    };
    for _ in 0..8 {
        let p = ranges.draw_real_simple(&mut rng);
        let form = diagonal_form(&p).unwrap();
        let oracle = oracle_spectrum(&p, 20, 6).unwrap();
        for (z, lvl) in oracle.iter().zip(form.levels(6)) {
            assert!(
                (z - lvl.energy).norm() < 1e-6,
                "{p:?}: {z} vs {}",
                lvl.energy
            );
        }
    }
}

/// `α a*a + ½β(a*² − a²)` on `0..=n_max`.
fn single_mode(alpha: f64, beta: f64, n_max: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(n_max + 1, n_max + 1);
    for n in 0..=n_max {
        h[(n, n)] = alpha * n as f64;
        if n + 2 <= n_max {
            let amp = 0.5 * beta * (((n + 1) * (n + 2)) as f64).sqrt();
            h[(n + 2, n)] = amp;
            h[(n, n + 2)] = -amp;
        }
    }
    h
}

fn lowest_real(h: &DMatrix<f64>, k: usize) -> Vec<f64> {
    let mut e: Vec<Complex64> = h.complex_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| a.re.total_cmp(&b.re));
    e.iter().take(k).map(|z| z.re).collect()
}

#[test]
fn figure_parameters_spectrum() {
    let (a1, a2, b1, b2) = (1.5, 0.5, 6.75f64.sqrt(), 0.75f64.sqrt());
    let p = ModelParameters::new(a1, a2, 0.0, b1, b2, 0.0).unwrap();
    let form = diagonal_form(&p).unwrap();
    assert!((form.e0 - 1.0).abs() < 1e-12);
    assert!((form.lambda1 - 3.0).abs() < 1e-12 && (form.lambda2 - 1.0).abs() < 1e-12);

    // without α12, β12 the modes separate and a long single-mode ladder is cheap
    let m1 = lowest_real(&single_mode(a1, b1, 300), 3);
    let m2 = lowest_real(&single_mode(a2, b2, 300), 6);
    let mut levels: Vec<f64> = m1
        .iter()
        .flat_map(|x| m2.iter().map(move |y| x + y))
        .collect();
    levels.sort_by(f64::total_cmp);
    let expect = [1.0, 2.0, 3.0, 4.0, 4.0];
    for (got, want) in levels.iter().zip(expect) {
        assert!((got - want).abs() < 1e-6, "{levels:?}");
    }
    let closed: Vec<f64> = form.levels(6).iter().take(5).map(|l| l.energy).collect();
    assert_eq!(closed, expect);

    // the two-mode oracle approaches the ground level as the cutoff grows
    let errs: Vec<f64> = [12, 16, 20, 24]
        .iter()
        .map(|&n| (oracle_spectrum(&p, n, 1).unwrap()[0] - 1.0).norm())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 1e-4);
}
