//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero when
//! any criterion fails.
//!
//! Run with `cargo test -p pseudoboson --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use num_complex::Complex64;
use pseudoboson::algebra::{numeric_eigenvalues, SYMPLECTIC_TOL};
use pseudoboson::fock::{
    assemble_hamiltonian, build_families, build_metric, evolve, oracle_spectrum, TruncatedSpace,
};
use pseudoboson::sampling::{rng_from_env, seed_from_env, ParameterRanges};
use pseudoboson::statmech::{
    default_mu_grid, numerical_range_boundary, oracle_trace, partition_function, sweep_figure1,
    SpectrumSpec, ThermoPoint, FIGURE1_BETAS,
};
use pseudoboson::{
    analytic_eigenvalues, build_dynamical_matrix, compute_eigenbasis, diagonal_form,
    ModelParameters,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn derived() -> ModelParameters {
    ModelParameters::new(2.0, 1.0, 0.0, 0.0, 0.0, 0.5).unwrap()
}

fn draws() -> Vec<ModelParameters> {
    let mut rng = rng_from_env();
    let ranges = ParameterRanges::default();
    (0..1000)
        .map(|_| ranges.draw_real_simple(&mut rng))
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let params = draws();
    let worst = params
        .iter()
        .map(|p| {
            compute_eigenbasis(p, SYMPLECTIC_TOL).map_or(f64::INFINITY, |b| b.symplectic_residual())
        })
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-10 && elapsed < Duration::from_secs(5),
        format!(
            "max |UΩUᵀΩᵀ − I| = {worst:.2e} < 1e-10 over 1000 draws (seed {}), {elapsed:.2?} < 5 s",
            seed_from_env()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0_f64;
    for p in draws() {
        let (l1, l2) = analytic_eigenvalues(&p).unwrap().real_simple().unwrap();
        let numeric = numeric_eigenvalues(build_dynamical_matrix(&p).unwrap().entries());
        for l in [l1, l2, -l1, -l2] {
            let rel = numeric
                .iter()
                .map(|z| (z - l).norm() / l.abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(rel);
        }
    }
    outcome(
        worst < 1e-10,
        format!("max relative |λ_root − λ_eig| = {worst:.2e} < 1e-10 over 1000 draws"),
    )
}

fn criterion_3() -> Outcome {
    let p = derived();
    let start = Instant::now();
    let oracle = oracle_spectrum(&p, 20, 6).unwrap();
    let elapsed = start.elapsed();
    let form = diagonal_form(&p).unwrap();
    let constants = (form.e0 - 0.0811388).abs() < 5e-8
        && (form.lambda1 - 2.0811388).abs() < 5e-8
        && (form.lambda2 - 1.0811388).abs() < 5e-8;
    let worst = oracle
        .iter()
        .zip(form.levels(6))
        .map(|(z, l)| (z - l.energy).norm())
        .fold(0.0, f64::max);
    outcome(
        constants && worst < 1e-6 && elapsed < Duration::from_secs(10),
        format!(
            "E0 = {:.7}, λ = ({:.7}, {:.7}); 6 lowest of dim-441 matrix within {worst:.2e} < 1e-6, {elapsed:.2?} < 10 s",
            form.e0, form.lambda1, form.lambda2
        ),
    )
}

fn criterion_4() -> Outcome {
    let fam = build_families(&derived(), 20, 3).unwrap();
    let ratios = fam.diagonal_ratio_residual();
    let off = fam.offdiagonal_residual();
    outcome(
        ratios < 1e-6 && off < 1e-8,
        format!("n_cap 3: ratio residual {ratios:.2e} < 1e-6, off-diagonal {off:.2e} < 1e-8 × max diagonal"),
    )
}

fn criterion_5() -> Outcome {
    let p = derived();
    let fam = build_families(&p, 20, 3).unwrap();
    let metric = build_metric(&fam).unwrap();
    let h = assemble_hamiltonian(&p, &TruncatedSpace::new(20).unwrap());
    let herm = metric.hermiticity_residual();
    let min_eig = metric.restricted_eigenvalues()[0];
    let inter = metric.intertwining_residual(&h);
    outcome(
        herm < 1e-10 && min_eig > 0.0 && inter < 1e-8,
        format!("|η − η†| = {herm:.2e} < 1e-10, min eig {min_eig:.4} > 0, ‖ηH − H†η‖ = {inter:.2e} < 1e-8"),
    )
}

fn criterion_6() -> Outcome {
    let p = derived();
    let n_max = 20;
    let fam = build_families(&p, n_max, 3).unwrap();
    let unit = fam.normalized().unwrap();
    let metric = build_metric(&fam).unwrap();
    let h = assemble_hamiltonian(&p, &TruncatedSpace::new(n_max).unwrap());
    let mut psi = DVector::<Complex64>::zeros(h.nrows());
    for (n1, n2) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let k = unit.column(n1, n2).unwrap();
        psi += unit.v.column(k).map(|x| Complex64::new(x, 0.0));
    }
    psi /= Complex64::from(metric.physical_norm_squared(&psi).sqrt());
    let traj = evolve(&psi, &fam.compress(&h).unwrap(), 5.0, 100).unwrap();
    let physical = traj.max_relative_drift(|s| metric.physical_norm_squared(s));
    let standard = traj.max_relative_drift(|s| s.norm_squared());
    outcome(
        physical < 1e-8 && standard > 1e-3,
        format!(
            "t ∈ [0, 5]: physical drift {physical:.2e} < 1e-8, standard drift {standard:.3} > 1e-3"
        ),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_7() -> Outcome {
    let spec = SpectrumSpec::figure1();
    let (beta, zeta) = (1.0, -1.0);
    let t = oracle_trace(&spec, beta, zeta, 60).unwrap();
    let c = ThermoPoint::evaluate(&spec, beta, zeta).unwrap();
    let worst = [
        rel(t.z, c.z),
        rel(t.energy, c.energy),
        rel(t.number, c.number),
        rel(t.entropy, c.entropy),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    // the quoted digits are truncated, not rounded
    let spot = (c.number - 0.175175).abs() < 1e-6 && (c.energy - 1.212489).abs() < 1e-6;
    outcome(
        worst < 1e-10 && spot,
        format!(
            "n_max 60: max relative gap in Z, E, N, S = {worst:.2e} < 1e-10; N = {:.7}, E = {:.7}",
            c.number, c.energy
        ),
    )
}

fn criterion_8() -> Outcome {
    let spec = SpectrumSpec::figure1();
    let sweep = sweep_figure1(&spec, &FIGURE1_BETAS, &default_mu_grid()).unwrap();
    let curves = sweep.betas();
    let n_top = sweep.rows.iter().map(|r| r.n_expected).fold(0.0, f64::max);
    let boundary = numerical_range_boundary(&spec, 1.1 * n_top, 50).unwrap();
    let lines_ok = boundary
        .lower
        .iter()
        .all(|&(t, y)| (y - (1.0 + t)).abs() < 1e-12)
        && boundary
            .upper
            .iter()
            .all(|&(t, y)| (y - (1.0 + 3.0 * t)).abs() < 1e-12);
    let outside = sweep
        .rows
        .iter()
        .filter(|r| {
            !(1.0 + r.n_expected <= r.h_expected + 1e-12
                && r.h_expected <= 1.0 + 3.0 * r.n_expected + 1e-12)
        })
        .count();
    // μ → −∞: each curve approaches (0, 1) monotonically
    let mut limit_ok = true;
    let mut worst_end = 0.0_f64;
    for &beta in &FIGURE1_BETAS {
        let dist: Vec<f64> = [-1e4, -1e3, -1e2, -1e1]
            .iter()
            .map(|&mu| {
                let p = ThermoPoint::from_mu(&spec, beta, mu).unwrap();
                p.number.hypot(p.energy - 1.0)
            })
            .collect();
        limit_ok &= dist.windows(2).all(|w| w[0] <= w[1]) && dist[0] < 1e-12;
        worst_end = worst_end.max(dist[0]);
    }
    outcome(
        curves == FIGURE1_BETAS.to_vec() && sweep.rows.len() == 1000 && outside == 0 && lines_ok && limit_ok,
        format!(
            "{} curves, {} points, {outside} outside 1+N ≤ H ≤ 1+3N (slack 1e-12); boundary lines ok: {lines_ok}; \
             distance to (0, 1) at μ = −1e4: {worst_end:.1e}",
            curves.len(),
            sweep.rows.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let spec = SpectrumSpec::figure1();
    let h = 1e-5;
    let log_z = |b: f64, z: f64| partition_function(&spec, b, z).unwrap().log_z;
    let mut worst = 0.0_f64;
    for &beta in &FIGURE1_BETAS {
        for mu in [-1e-2, -1e-1, -1.0] {
            let zeta = beta * mu;
            let p = ThermoPoint::evaluate(&spec, beta, zeta).unwrap();
            let e_fd = -(log_z(beta + h, zeta) - log_z(beta - h, zeta)) / (2.0 * h);
            let n_fd = (log_z(beta, zeta + h) - log_z(beta, zeta - h)) / (2.0 * h);
            worst = worst.max(rel(e_fd, p.energy)).max(rel(n_fd, p.number));
        }
    }
    outcome(
        worst < 1e-6,
        format!(
            "central differences (h = 1e-5) on 15 points: max relative error {worst:.2e} < 1e-6"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("symplectic normalization", criterion_1),
        ("quartic vs eigensolver", criterion_2),
        ("oracle spectrum", criterion_3),
        ("biorthogonality", criterion_4),
        ("metric operator", criterion_5),
        ("evolution", criterion_6),
        ("closed form vs truncated trace", criterion_7),
        ("figure reproduction", criterion_8),
        ("finite-difference consistency", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
