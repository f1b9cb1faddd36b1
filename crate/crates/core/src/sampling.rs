//! Seeded parameter draws for property suites and verification runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{analytic_eigenvalues, Regime};
use crate::params::ModelParameters;

/// Environment variable that fixes the RNG seed.
pub const SEED_ENV: &str = "PSEUDOBOSON_SEED";

pub const DEFAULT_SEED: u64 = 0x5eed_b050;

/// Reads [`SEED_ENV`], falling back to [`DEFAULT_SEED`] when unset or
/// unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng_from_env() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_from_env())
}

/// Uniform ranges for random model parameters.
#[derive(Debug, Clone, Copy)]
pub struct ParameterRanges {
    pub alpha_diag: (f64, f64),
    /// Half-width of the symmetric range for `α12`.
    pub alpha12: f64,
    /// Half-width of the symmetric range for every `β`.
    pub beta: f64,
}

impl Default for ParameterRanges {
    fn default() -> Self {
        Self {
            alpha_diag: (0.5, 3.0),
            alpha12: 1.0,
            beta: 1.0,
        }
    }
}

impl ParameterRanges {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ModelParameters {
        let (lo, hi) = self.alpha_diag;
        let mut sym = |w: f64| {
            if w > 0.0 {
                rng.random_range(-w..w)
            } else {
                0.0
            }
        };
        let alpha12 = sym(self.alpha12);
        let beta11 = sym(self.beta);
        let beta22 = sym(self.beta);
        let beta12 = sym(self.beta);
        let alpha11 = rng.random_range(lo..hi);
        let alpha22 = rng.random_range(lo..hi);
        ModelParameters::new(alpha11, alpha22, alpha12, beta11, beta22, beta12)
            .expect("ranges produce valid parameters")
    }

    /// Draws until the regime is [`Regime::RealSimple`].
    pub fn draw_real_simple<R: Rng + ?Sized>(&self, rng: &mut R) -> ModelParameters {
        loop {
            let p = self.draw(rng);
            if analytic_eigenvalues(&p).map(|e| e.regime) == Ok(Regime::RealSimple) {
                return p;
            }
        }
    }
}
