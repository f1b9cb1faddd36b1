use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// States sampled at `times[k] = k·t/steps`, `k = 0..=steps`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<Complex64>>,
}

impl Trajectory {
    /// Largest `|f(ψ_k) − f(ψ_0)| / |f(ψ_0)|` along the trajectory.
    pub fn max_relative_drift(&self, f: impl Fn(&DVector<Complex64>) -> f64) -> f64 {
        let f0 = f(&self.states[0]);
        self.states
            .iter()
            .map(|s| ((f(s) - f0) / f0).abs())
            .fold(0.0, f64::max)
    }
}

/// Solves `i dΨ/dt = HΨ` on `[0, t]` for a real matrix `H`.
///
/// The one-sample propagator `exp(−iH·t/steps) = cos(H dt) − i sin(H dt)` is
/// computed once by a dense matrix exponential of the real block matrix
/// `[[0, H dt], [−H dt, 0]]` and applied repeatedly, so there is no
/// integrator error.
///
/// For a non-Hermitian `H` truncated from an infinite space, pass the
/// Hamiltonian compressed onto the physical span
/// ([`BiorthogonalFamily::compress`](super::BiorthogonalFamily::compress)):
/// spurious complex eigenvalues near the cutoff otherwise amplify rounding
/// errors exponentially.
pub fn evolve(
    psi0: &DVector<Complex64>,
    h: &DMatrix<f64>,
    t: f64,
    steps: usize,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::Range { index: 0, limit: 1 });
    }
    let n = h.nrows();
    let dt = t / steps as f64;
    let mut block = DMatrix::<f64>::zeros(2 * n, 2 * n);
    block.view_mut((0, n), (n, n)).copy_from(&(h * dt));
    block.view_mut((n, 0), (n, n)).copy_from(&(h * -dt));
    let exp = block.exp();
    let cos = exp.view((0, 0), (n, n)).into_owned();
    let sin = exp.view((0, n), (n, n)).into_owned();

    let mut states = Vec::with_capacity(steps + 1);
    states.push(psi0.clone());
    for k in 0..steps {
        let re = states[k].map(|z| z.re);
        let im = states[k].map(|z| z.im);
        let next_re = &cos * &re + &sin * &im;
        let next_im = &cos * &im - &sin * &re;
        states.push(next_re.zip_map(&next_im, Complex64::new));
    }
    let times = (0..=steps).map(|k| k as f64 * dt).collect();
    Ok(Trajectory { times, states })
}
