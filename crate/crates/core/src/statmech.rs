//! Grand-canonical thermodynamics of `H = E0 + Σ λ_k Θk‡Θk` with the
//! pseudo-boson number operator `N̂ = Σ Θk‡Θk`.
//!
//! With `x_k = βλ_k − ζ > 0` and `q_k = e^{−x_k}`:
//!
//! ```text
//! log Z = −βE0 − Σ log(1 − q_k)
//! n̄_k   = 1 / (e^{x_k} − 1)
//! E     = E0 + Σ λ_k n̄_k,   N = Σ n̄_k
//! S     = β(E − E0) − ζN − Σ log(1 − q_k)
//! ```
//!
//! Everything is evaluated in log space; `Z` itself may underflow.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::algebra::DiagonalForm;
use crate::error::{Error, Result};

/// Inverse temperatures of the reproduced figure.
pub const FIGURE1_BETAS: [f64; 5] = [0.125, 0.25, 0.5, 1.0, 4.0];

/// Largest relative weight a truncated trace may omit.
pub const TRACE_TAIL_TOL: f64 = 1e-12;

/// Header of the sweep CSV.
pub const CSV_HEADER: &str = "beta,mu,zeta,n_expected,h_expected,log_z,entropy";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub e0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SpectrumSpec {
    pub fn new(e0: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        let s = Self {
            e0,
            lambda1,
            lambda2,
        };
        s.validate()?;
        Ok(s)
    }

    /// `E0 = 1, λ1 = 1, λ2 = 3`.
    pub fn figure1() -> Self {
        Self {
            e0: 1.0,
            lambda1: 1.0,
            lambda2: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.e0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "e0",
                value: self.e0,
                reason: "must be finite",
            });
        }
        for (name, value) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "mode energies must be finite and positive",
                });
            }
        }
        Ok(())
    }

    pub fn lambdas(&self) -> [f64; 2] {
        [self.lambda1, self.lambda2]
    }

    pub fn level(&self, n1: usize, n2: usize) -> f64 {
        self.e0 + n1 as f64 * self.lambda1 + n2 as f64 * self.lambda2
    }
}

impl From<DiagonalForm> for SpectrumSpec {
    fn from(d: DiagonalForm) -> Self {
        Self {
            e0: d.e0,
            lambda1: d.lambda1,
            lambda2: d.lambda2,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "inverse temperature must be finite and positive",
        })
    }
}

/// `x_k = βλ_k − ζ`, each required to be positive.
fn mode_exponents(spec: &SpectrumSpec, beta: f64, zeta: f64) -> Result<[f64; 2]> {
    spec.validate()?;
    check_beta(beta)?;
    if !zeta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "zeta",
            value: zeta,
            reason: "must be finite",
        });
    }
    let mut out = [0.0; 2];
    for (k, lambda) in spec.lambdas().into_iter().enumerate() {
        let x = beta * lambda - zeta;
        if !(x > 0.0) {
            return Err(Error::Divergence {
                mode: k + 1,
                exponent: x,
            });
        }
        out[k] = x;
    }
    Ok(out)
}

/// `log(1 − e^{−x})` for `x > 0`.
fn log1m_exp(x: f64) -> f64 {
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionFunction {
    pub log_z: f64,
    pub z: f64,
}

pub fn partition_function(spec: &SpectrumSpec, beta: f64, zeta: f64) -> Result<PartitionFunction> {
    let x = mode_exponents(spec, beta, zeta)?;
    let log_z = -beta * spec.e0 - x.iter().map(|&xk| log1m_exp(xk)).sum::<f64>();
    Ok(PartitionFunction {
        log_z,
        z: log_z.exp(),
    })
}

/// Bose occupations `(n̄1, n̄2)`.
pub fn occupations(spec: &SpectrumSpec, beta: f64, zeta: f64) -> Result<[f64; 2]> {
    let x = mode_exponents(spec, beta, zeta)?;
    Ok(x.map(|xk| 1.0 / xk.exp_m1()))
}

/// `(⟨H⟩, ⟨N̂⟩)`.
pub fn expected_energy_number(spec: &SpectrumSpec, beta: f64, zeta: f64) -> Result<(f64, f64)> {
    let n = occupations(spec, beta, zeta)?;
    let energy = spec.e0 + spec.lambda1 * n[0] + spec.lambda2 * n[1];
    Ok((energy, n[0] + n[1]))
}

/// Von Neumann entropy from `β(E − E0) − ζN − Σ log(1 − q_k)`.
pub fn entropy(spec: &SpectrumSpec, beta: f64, zeta: f64) -> Result<f64> {
    let x = mode_exponents(spec, beta, zeta)?;
    let (energy, number) = expected_energy_number(spec, beta, zeta)?;
    Ok(beta * (energy - spec.e0) - zeta * number - x.iter().map(|&xk| log1m_exp(xk)).sum::<f64>())
}

/// `Σ_k (1 + n̄_k) log(1 + n̄_k) − n̄_k log n̄_k`.
pub fn entropy_from_occupations(occ: [f64; 2]) -> f64 {
    occ.iter()
        .map(|&n| {
            let vacuum_term = if n > 0.0 { n * n.ln() } else { 0.0 };
            (1.0 + n) * n.ln_1p() - vacuum_term
        })
        .sum()
}

/// All thermodynamic quantities at one `(β, ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub beta: f64,
    pub zeta: f64,
    /// `ζ / β`.
    pub mu: f64,
    pub occupations: [f64; 2],
    pub log_z: f64,
    pub z: f64,
    pub energy: f64,
    pub number: f64,
    pub entropy: f64,
}

impl ThermoPoint {
    /// Raw-`ζ` entry point; only convergence is enforced.
    pub fn evaluate(spec: &SpectrumSpec, beta: f64, zeta: f64) -> Result<Self> {
        let pf = partition_function(spec, beta, zeta)?;
        let occupations = occupations(spec, beta, zeta)?;
        let (energy, number) = expected_energy_number(spec, beta, zeta)?;
        Ok(Self {
            beta,
            zeta,
            mu: zeta / beta,
            occupations,
            log_z: pf.log_z,
            z: pf.z,
            energy,
            number,
            entropy: entropy(spec, beta, zeta)?,
        })
    }

    /// Chemical-potential entry point with `μ <= 0` enforced.
    pub fn from_mu(spec: &SpectrumSpec, beta: f64, mu: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(mu <= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "chemical potential must be non-positive",
            });
        }
        let mut point = Self::evaluate(spec, beta, beta * mu)?;
        point.mu = mu;
        Ok(point)
    }
}

/// Brute-force sums over `0 <= n1, n2 <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSums {
    pub n_max: usize,
    pub z: f64,
    pub log_z: f64,
    pub energy: f64,
    pub number: f64,
    pub entropy: f64,
    /// Relative weight of the omitted states.
    pub tail: f64,
}

/// `1 − Π_k (1 − q_k^{n_max+1})`.
fn omitted_weight(x: [f64; 2], n_max: usize) -> f64 {
    let m = (n_max + 1) as f64;
    -x.iter().map(|&xk| log1m_exp(m * xk)).sum::<f64>().exp_m1()
}

/// Truncated trace without judging the omitted tail.
pub fn truncated_trace(
    spec: &SpectrumSpec,
    beta: f64,
    zeta: f64,
    n_max: usize,
) -> Result<TraceSums> {
    let x = mode_exponents(spec, beta, zeta)?;
    let side = n_max + 1;
    let log_w: Vec<f64> = (0..side * side)
        .map(|i| {
            let (n1, n2) = (i / side, i % side);
            -beta * spec.level(n1, n2) + zeta * (n1 + n2) as f64
        })
        .collect();
    let peak = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mass: f64 = log_w.iter().map(|lw| (lw - peak).exp()).sum();
    let log_z = peak + mass.ln();
    let (mut energy, mut number, mut entropy) = (0.0, 0.0, 0.0);
    for (i, lw) in log_w.iter().enumerate() {
        let (n1, n2) = (i / side, i % side);
        let log_p = lw - log_z;
        let p = log_p.exp();
        energy += p * spec.level(n1, n2);
        number += p * (n1 + n2) as f64;
        entropy -= p * log_p;
    }
    Ok(TraceSums {
        n_max,
        z: log_z.exp(),
        log_z,
        energy,
        number,
        entropy,
        tail: omitted_weight(x, n_max),
    })
}

/// Truncated trace, rejected when the omitted tail exceeds
/// [`TRACE_TAIL_TOL`].
pub fn oracle_trace(spec: &SpectrumSpec, beta: f64, zeta: f64, n_max: usize) -> Result<TraceSums> {
    let sums = truncated_trace(spec, beta, zeta, n_max)?;
    if !(sums.tail <= TRACE_TAIL_TOL) {
        return Err(Error::Truncation {
            what: "trace tail",
            residual: sums.tail,
            tol: TRACE_TAIL_TOL,
        });
    }
    Ok(sums)
}

/// Smallest cutoff whose omitted tail is at most `tail_tol`.
pub fn trace_cutoff(spec: &SpectrumSpec, beta: f64, zeta: f64, tail_tol: f64) -> Result<usize> {
    let x = mode_exponents(spec, beta, zeta)?;
    let x_min = x[0].min(x[1]);
    // the omitted weight is at least q_max^{n+1}, so this never overshoots
    let mut n = ((tail_tol.ln() / -x_min).ceil() - 1.0).max(0.0) as usize;
    while omitted_weight(x, n) > tail_tol {
        n += 1;
    }
    Ok(n)
}

/// One point of a sweep, in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub mu: f64,
    pub zeta: f64,
    pub n_expected: f64,
    pub h_expected: f64,
    pub log_z: f64,
    pub entropy: f64,
}

impl From<&ThermoPoint> for SweepRow {
    fn from(p: &ThermoPoint) -> Self {
        Self {
            beta: p.beta,
            mu: p.mu,
            zeta: p.zeta,
            n_expected: p.number,
            h_expected: p.energy,
            log_z: p.log_z,
            entropy: p.entropy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepWarning {
    pub beta: f64,
    pub zeta: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    /// Ordered by `β`, then `μ`, ascending.
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<SweepWarning>,
}

impl Sweep {
    fn sort(&mut self) {
        self.rows
            .sort_by(|a, b| a.beta.total_cmp(&b.beta).then(a.mu.total_cmp(&b.mu)));
    }

    /// Rows of one curve, ascending in `μ`.
    pub fn curve(&self, beta: f64) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.beta == beta)
    }

    pub fn betas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.rows.iter().map(|r| r.beta).collect();
        out.dedup();
        out
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.beta, r.mu, r.zeta, r.n_expected, r.h_expected, r.log_z, r.entropy
            )?;
        }
        Ok(())
    }
}

/// `points` values of `μ` with `−μ` log-spaced on `[min_neg_mu, max_neg_mu]`,
/// returned in ascending `μ`.
pub fn log_mu_grid(min_neg_mu: f64, max_neg_mu: f64, points: usize) -> Result<Vec<f64>> {
    if !(min_neg_mu > 0.0 && max_neg_mu >= min_neg_mu && max_neg_mu.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mu_grid",
            value: min_neg_mu,
            reason: "need 0 < min_neg_mu <= max_neg_mu",
        });
    }
    if points == 0 {
        return Err(Error::Range { index: 0, limit: 1 });
    }
    if points == 1 {
        return Ok(vec![-min_neg_mu]);
    }
    let (lo, hi) = (min_neg_mu.ln(), max_neg_mu.ln());
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .rev()
        .map(|i| -(lo + step * i as f64).exp())
        .collect())
}

/// `−μ` from `1e-4` to `1e2`, 200 points.
pub fn default_mu_grid() -> Vec<f64> {
    log_mu_grid(1e-4, 1e2, 200).expect("static grid")
}

/// Curves of `(⟨N̂⟩, ⟨H⟩)` at fixed `β` over a non-positive `μ` grid.
pub fn sweep_figure1(spec: &SpectrumSpec, betas: &[f64], mu_grid: &[f64]) -> Result<Sweep> {
    spec.validate()?;
    if mu_grid.is_empty() {
        return Err(Error::Range { index: 0, limit: 1 });
    }
    if let Some(&mu) = mu_grid.iter().find(|&&mu| !(mu <= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            reason: "chemical potential must be non-positive",
        });
    }
    let mut sweep = Sweep::default();
    for &beta in betas {
        check_beta(beta)?;
        for &mu in mu_grid {
            match ThermoPoint::from_mu(spec, beta, mu) {
                Ok(p) => sweep.rows.push(SweepRow::from(&p)),
                Err(e @ Error::Divergence { .. }) => sweep.warnings.push(SweepWarning {
                    beta,
                    zeta: beta * mu,
                    message: e.to_string(),
                }),
                Err(e) => return Err(e),
            }
        }
    }
    sweep.sort();
    Ok(sweep)
}

/// Raw-`ζ` sweep; divergent points are skipped with a warning.
pub fn sweep_zeta(spec: &SpectrumSpec, betas: &[f64], zetas: &[f64]) -> Result<Sweep> {
    spec.validate()?;
    if zetas.is_empty() {
        return Err(Error::Range { index: 0, limit: 1 });
    }
    let mut sweep = Sweep::default();
    for &beta in betas {
        check_beta(beta)?;
        for &zeta in zetas {
            match ThermoPoint::evaluate(spec, beta, zeta) {
                Ok(p) => sweep.rows.push(SweepRow::from(&p)),
                Err(e @ Error::Divergence { .. }) => sweep.warnings.push(SweepWarning {
                    beta,
                    zeta,
                    message: e.to_string(),
                }),
                Err(e) => return Err(e),
            }
        }
    }
    sweep.sort();
    Ok(sweep)
}

/// Boundary of the attainable `(⟨N̂⟩, ⟨H⟩)` region: two rays from `(0, E0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeBoundary {
    /// `y = E0 + min(λ)·t`.
    pub lower: Vec<(f64, f64)>,
    /// `y = E0 + max(λ)·t`.
    pub upper: Vec<(f64, f64)>,
    pub e0: f64,
    pub slope_lower: f64,
    pub slope_upper: f64,
}

impl RangeBoundary {
    /// `E0 + λ_min·N − slack <= E <= E0 + λ_max·N + slack`.
    pub fn contains(&self, number: f64, energy: f64, slack: f64) -> bool {
        number >= -slack
            && energy >= self.e0 + self.slope_lower * number - slack
            && energy <= self.e0 + self.slope_upper * number + slack
    }
}

pub fn numerical_range_boundary(
    spec: &SpectrumSpec,
    t_max: f64,
    samples: usize,
) -> Result<RangeBoundary> {
    spec.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_max",
            value: t_max,
            reason: "must be finite and positive",
        });
    }
    if samples < 2 {
        return Err(Error::Range {
            index: samples,
            limit: 2,
        });
    }
    let slope_lower = spec.lambda1.min(spec.lambda2);
    let slope_upper = spec.lambda1.max(spec.lambda2);
    let ts: Vec<f64> = (0..samples)
        .map(|i| t_max * i as f64 / (samples - 1) as f64)
        .collect();
    Ok(RangeBoundary {
        lower: ts.iter().map(|&t| (t, spec.e0 + slope_lower * t)).collect(),
        upper: ts.iter().map(|&t| (t, spec.e0 + slope_upper * t)).collect(),
        e0: spec.e0,
        slope_lower,
        slope_upper,
    })
}
