use pseudoboson::algebra::{
    analytic_eigenvalues, characteristic_coefficients, compute_eigenbasis, diagonal_form,
};
use pseudoboson::sampling::seed_from_env;
use pseudoboson::statmech::{
    numerical_range_boundary, sweep_figure1, sweep_zeta, trace_cutoff, truncated_trace,
    SpectrumSpec, Sweep, SweepWarning, ThermoPoint,
};
use pseudoboson::verify::run_checks;
use pseudoboson::{Error, ModelParameters, Regime};
use serde::Serialize;

use crate::config::{Axis, RunConfig};
use crate::output::{write_atomic, write_json};
use crate::{svg, CliError};

fn core_error(e: Error) -> CliError {
    match e {
        Error::Regime(r) => CliError::Regime(r),
        Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
        other => CliError::Verification(other.to_string()),
    }
}

#[derive(Debug, Serialize)]
struct DiagonalizeReport {
    model: ModelParameters,
    regime: Regime,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "C")]
    c: f64,
    discriminant: f64,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    #[serde(rename = "E0")]
    e0: Option<f64>,
    /// Rows `(Θ1‡, Θ2‡, Θ1, Θ2)` in the basis `(a1*, a2*, a1, a2)`.
    #[serde(rename = "U")]
    u: Option<[[f64; 4]; 4]>,
    symplectic_residual: Option<f64>,
}

pub fn diagonalize(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.model()?;
    let coeffs = characteristic_coefficients(&p).map_err(core_error)?;
    let eig = analytic_eigenvalues(&p).map_err(core_error)?;
    let mut report = DiagonalizeReport {
        model: p,
        regime: eig.regime,
        b: coeffs.b,
        c: coeffs.c,
        discriminant: coeffs.discriminant(),
        lambda1: None,
        lambda2: None,
        e0: None,
        u: None,
        symplectic_residual: None,
    };
    let dir = &cfg.output.dir;
    if eig.regime != Regime::RealSimple {
        write_json(dir, "diagonalize.json", &report, cfg.output.pretty)?;
        return Err(CliError::Regime(eig.regime));
    }
    let form = diagonal_form(&p).map_err(core_error)?;
    report.lambda1 = Some(form.lambda1);
    report.lambda2 = Some(form.lambda2);
    report.e0 = Some(form.e0);
    let basis = compute_eigenbasis(&p, cfg.tolerances.symplectic);
    if let Ok(b) = &basis {
        let mut u = [[0.0; 4]; 4];
        for (i, row) in u.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = b.u[(i, j)];
            }
        }
        report.u = Some(u);
        report.symplectic_residual = Some(b.symplectic_residual());
    }
    let path = write_json(dir, "diagonalize.json", &report, cfg.output.pretty)?;
    basis.map_err(core_error)?;
    Ok(format!(
        "lambda1 = {}, lambda2 = {}, E0 = {}\nwrote {}",
        form.lambda1,
        form.lambda2,
        form.e0,
        path.display()
    ))
}

pub fn verify(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.model()?;
    let opts = cfg.verify_options(seed_from_env());
    let report = run_checks(&p, &opts).map_err(core_error)?;
    let path = write_json(&cfg.output.dir, "verify.json", &report, cfg.output.pretty)?;
    let mut lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<28} residual {:.3e} < {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.check_name,
                c.residual,
                c.tolerance
            )
        })
        .collect();
    lines.push(format!("wrote {}", path.display()));
    let text = lines.join("\n");
    if report.all_pass {
        Ok(text)
    } else {
        let failed: Vec<&str> = report.failures().map(|c| c.check_name.as_str()).collect();
        println!("{text}");
        Err(CliError::Verification(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

/// Largest cutoff used for the brute-force trace comparison.
const ORACLE_MAX_CUTOFF: usize = 1000;
/// Omitted trace weight; small enough for relative comparisons of tiny `N`.
const ORACLE_TAIL_TOL: f64 = 1e-30;
const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Serialize)]
struct OracleCheck {
    beta: f64,
    mu: f64,
    zeta: f64,
    n_max: Option<usize>,
    /// Relative differences, closed form vs truncated trace.
    z: Option<f64>,
    energy: Option<f64>,
    number: Option<f64>,
    entropy: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CurveCount {
    beta: f64,
    points: usize,
}

#[derive(Debug, Serialize)]
struct StatmechSummary {
    spectrum: SpectrumSpec,
    spectrum_source: &'static str,
    axis: &'static str,
    betas: Vec<f64>,
    rows: usize,
    curves: Vec<CurveCount>,
    warnings: Vec<SweepWarning>,
    oracle: Vec<OracleCheck>,
    oracle_max_residual: f64,
    oracle_tolerance: f64,
    wedge_slack: f64,
    wedge_violations: usize,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn oracle_check(spec: &SpectrumSpec, beta: f64, mu: f64, zeta: f64) -> OracleCheck {
    let mut out = OracleCheck {
        beta,
        mu,
        zeta,
        n_max: None,
        z: None,
        energy: None,
        number: None,
        entropy: None,
    };
    // at least the first excited shells, or N and E are compared against zero
    let Ok(n) = trace_cutoff(spec, beta, zeta, ORACLE_TAIL_TOL).map(|n| n.max(2)) else {
        return out;
    };
    if n > ORACLE_MAX_CUTOFF {
        return out;
    }
    if let (Ok(t), Ok(c)) = (
        truncated_trace(spec, beta, zeta, n),
        ThermoPoint::evaluate(spec, beta, zeta),
    ) {
        out.n_max = Some(n);
        out.z = Some((t.log_z - c.log_z).exp_m1().abs());
        out.energy = Some(rel(t.energy, c.energy));
        out.number = Some(rel(t.number, c.number));
        // S vanishes at zero temperature; compare absolutely below unit scale
        out.entropy = Some((t.entropy - c.entropy).abs() / c.entropy.abs().max(1.0));
    }
    out
}

fn resolve_spectrum(cfg: &RunConfig) -> Result<(SpectrumSpec, &'static str), CliError> {
    if let Some(s) = cfg.thermo.spectrum {
        return Ok((s, "config"));
    }
    if let Some(p) = &cfg.model {
        return Ok((diagonal_form(p).map_err(core_error)?.into(), "model"));
    }
    Ok((SpectrumSpec::figure1(), "default"))
}

struct StatmechRun {
    spectrum: SpectrumSpec,
    sweep: Sweep,
    summary_path: std::path::PathBuf,
    csv_path: std::path::PathBuf,
    oracle_pass: bool,
}

const WEDGE_SLACK: f64 = 1e-12;

fn run_statmech(cfg: &RunConfig) -> Result<StatmechRun, CliError> {
    let (spectrum, source) = resolve_spectrum(cfg)?;
    let betas = cfg.betas()?;
    let axis = cfg.axis()?;
    let sweep = match &axis {
        Axis::Mu(g) => sweep_figure1(&spectrum, &betas, g),
        Axis::Zeta(z) => sweep_zeta(&spectrum, &betas, z),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;

    let mut oracle = Vec::new();
    let mut curves = Vec::new();
    for beta in sweep.betas() {
        let curve: Vec<_> = sweep.curve(beta).collect();
        curves.push(CurveCount {
            beta,
            points: curve.len(),
        });
        let picks = [0, curve.len() / 2, curve.len() - 1];
        for (k, &i) in picks.iter().enumerate() {
            if k > 0 && i == picks[k - 1] {
                continue;
            }
            oracle.push(oracle_check(&spectrum, beta, curve[i].mu, curve[i].zeta));
        }
    }
    let oracle_max_residual = oracle
        .iter()
        .flat_map(|o| [o.z, o.energy, o.number, o.entropy])
        .flatten()
        .fold(0.0, f64::max);

    let n_top = sweep.rows.iter().map(|r| r.n_expected).fold(0.0, f64::max);
    let boundary = numerical_range_boundary(&spectrum, if n_top > 0.0 { n_top } else { 1.0 }, 2)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let wedge_violations = sweep
        .rows
        .iter()
        .filter(|r| !boundary.contains(r.n_expected, r.h_expected, WEDGE_SLACK))
        .count();

    let summary = StatmechSummary {
        spectrum,
        spectrum_source: source,
        axis: match axis {
            Axis::Mu(_) => "mu",
            Axis::Zeta(_) => "zeta",
        },
        betas,
        rows: sweep.rows.len(),
        curves,
        warnings: sweep.warnings.clone(),
        oracle,
        oracle_max_residual,
        oracle_tolerance: ORACLE_TOL,
        wedge_slack: WEDGE_SLACK,
        wedge_violations,
    };
    let mut csv = Vec::new();
    sweep
        .write_csv(&mut csv)
        .map_err(|e| CliError::Io(e.to_string()))?;
    let csv_path = write_atomic(&cfg.output.dir, "sweep.csv", &csv)?;
    let summary_path = write_json(
        &cfg.output.dir,
        "statmech_summary.json",
        &summary,
        cfg.output.pretty,
    )?;
    Ok(StatmechRun {
        spectrum,
        sweep,
        summary_path,
        csv_path,
        oracle_pass: oracle_max_residual < ORACLE_TOL && wedge_violations == 0,
    })
}

fn statmech_text(run: &StatmechRun) -> String {
    let mut lines = vec![format!(
        "{} rows over {} curves, {} warnings",
        run.sweep.rows.len(),
        run.sweep.betas().len(),
        run.sweep.warnings.len()
    )];
    for w in &run.sweep.warnings {
        lines.push(format!(
            "warning: beta = {}, zeta = {}: {}",
            w.beta, w.zeta, w.message
        ));
    }
    lines.push(format!("wrote {}", run.csv_path.display()));
    lines.push(format!("wrote {}", run.summary_path.display()));
    lines.join("\n")
}

fn finish(run: &StatmechRun, text: String) -> Result<String, CliError> {
    if run.oracle_pass {
        Ok(text)
    } else {
        println!("{text}");
        Err(CliError::Verification(format!(
            "closed form disagrees with the truncated trace or leaves the wedge; see {}",
            run.summary_path.display()
        )))
    }
}

pub fn statmech(cfg: &RunConfig) -> Result<String, CliError> {
    let run = run_statmech(cfg)?;
    let text = statmech_text(&run);
    finish(&run, text)
}

pub fn figure(cfg: &RunConfig) -> Result<String, CliError> {
    let run = run_statmech(cfg)?;
    let n_top = run
        .sweep
        .rows
        .iter()
        .map(|r| r.n_expected)
        .fold(0.0, f64::max);
    let t_max = if n_top > 0.0 { 1.1 * n_top } else { 1.0 };
    let boundary = numerical_range_boundary(&run.spectrum, t_max, 2).map_err(core_error)?;
    let path = write_atomic(
        &cfg.output.dir,
        "figure1.svg",
        svg::render(&run.sweep, &boundary).as_bytes(),
    )?;
    let text = format!("{}\nwrote {}", statmech_text(&run), path.display());
    finish(&run, text)
}
