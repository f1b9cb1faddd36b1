//! The run configuration: a single JSON document, unknown keys rejected.

use std::path::{Path, PathBuf};

use pseudoboson::fock::DEFAULT_N_MAX;
use pseudoboson::statmech::{default_mu_grid, log_mu_grid, SpectrumSpec, FIGURE1_BETAS};
use pseudoboson::verify::{Tolerances, VerifyOptions};
use pseudoboson::ModelParameters;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: Option<ModelParameters>,
    #[serde(default)]
    pub fock: FockConfig,
    #[serde(default)]
    pub thermo: ThermoConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    /// Seed for randomized checks; falls back to `PSEUDOBOSON_SEED`.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockConfig {
    pub n_max: usize,
    pub n_cap: usize,
    pub evolve_time: f64,
    pub evolve_steps: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        let v = VerifyOptions::default();
        Self {
            n_max: DEFAULT_N_MAX,
            n_cap: v.n_cap,
            evolve_time: v.evolve_time,
            evolve_steps: v.evolve_steps,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuGrid {
    Points(Vec<f64>),
    #[serde(rename_all = "snake_case")]
    LogSpaced {
        min_neg_mu: f64,
        max_neg_mu: f64,
        points: usize,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoConfig {
    /// Used instead of the model's diagonal form when present.
    #[serde(default)]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default)]
    pub beta_list: Option<Vec<f64>>,
    #[serde(default)]
    pub mu_grid: Option<MuGrid>,
    #[serde(default)]
    pub zeta_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub pretty: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            pretty: true,
        }
    }
}

/// The chemical-potential axis of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Mu(Vec<f64>),
    Zeta(Vec<f64>),
}

fn config_error(key: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("config key `{key}`: {message}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let key = if key == "." { "<root>".to_owned() } else { key };
            config_error(&key, e.inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(m) = &self.model {
            m.validate().map_err(|e| match e {
                pseudoboson::Error::InvalidParameter { name, .. } => {
                    config_error(&format!("model.{name}"), e)
                }
                other => config_error("model", other),
            })?;
        }
        if self.fock.n_max == 0 {
            return Err(config_error("fock.n_max", "must be at least 1"));
        }
        if !(self.fock.evolve_time.is_finite() && self.fock.evolve_time > 0.0) {
            return Err(config_error(
                "fock.evolve_time",
                "must be finite and positive",
            ));
        }
        if self.fock.evolve_steps == 0 {
            return Err(config_error("fock.evolve_steps", "must be at least 1"));
        }
        for (name, tol) in self.tolerances.named() {
            let ok = if name == "metric_positivity" {
                tol >= 0.0
            } else {
                tol > 0.0
            };
            if !(ok && tol.is_finite()) {
                return Err(config_error(
                    &format!("tolerances.{name}"),
                    "must be finite and positive",
                ));
            }
        }
        if let Some(s) = &self.thermo.spectrum {
            s.validate()
                .map_err(|e| config_error("thermo.spectrum", e))?;
        }
        self.betas()?;
        self.axis()?;
        Ok(())
    }

    pub fn model(&self) -> Result<ModelParameters, CliError> {
        self.model
            .ok_or_else(|| config_error("model", "required by this command"))
    }

    pub fn betas(&self) -> Result<Vec<f64>, CliError> {
        let betas = self
            .thermo
            .beta_list
            .clone()
            .unwrap_or_else(|| FIGURE1_BETAS.to_vec());
        if betas.is_empty() {
            return Err(config_error("thermo.beta_list", "must not be empty"));
        }
        if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(config_error(
                "thermo.beta_list",
                format!("{b} is not a positive inverse temperature"),
            ));
        }
        Ok(betas)
    }

    pub fn axis(&self) -> Result<Axis, CliError> {
        match (&self.thermo.mu_grid, &self.thermo.zeta_list) {
            (Some(_), Some(_)) => Err(config_error(
                "thermo",
                "give either mu_grid or zeta_list, not both",
            )),
            (None, Some(z)) => {
                if z.is_empty() {
                    return Err(config_error("thermo.zeta_list", "must not be empty"));
                }
                if let Some(v) = z.iter().find(|v| !v.is_finite()) {
                    return Err(config_error(
                        "thermo.zeta_list",
                        format!("{v} is not finite"),
                    ));
                }
                Ok(Axis::Zeta(z.clone()))
            }
            (None, None) => Ok(Axis::Mu(default_mu_grid())),
            (Some(MuGrid::Points(p)), None) => {
                if p.is_empty() {
                    return Err(config_error("thermo.mu_grid", "must not be empty"));
                }
                if let Some(mu) = p.iter().find(|mu| !(mu.is_finite() && **mu <= 0.0)) {
                    return Err(config_error(
                        "thermo.mu_grid",
                        format!("{mu} is not a non-positive chemical potential"),
                    ));
                }
                Ok(Axis::Mu(p.clone()))
            }
            (
                Some(MuGrid::LogSpaced {
                    min_neg_mu,
                    max_neg_mu,
                    points,
                }),
                None,
            ) => {
                if *points == 0 {
                    return Err(config_error("thermo.mu_grid.points", "must not be empty"));
                }
                log_mu_grid(*min_neg_mu, *max_neg_mu, *points)
                    .map(Axis::Mu)
                    .map_err(|e| config_error("thermo.mu_grid", e))
            }
        }
    }

    pub fn verify_options(&self, seed: u64) -> VerifyOptions {
        VerifyOptions {
            n_max: self.fock.n_max,
            n_cap: self.fock.n_cap,
            evolve_time: self.fock.evolve_time,
            evolve_steps: self.fock.evolve_steps,
            seed: self.seed.unwrap_or(seed),
            tolerances: self.tolerances,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message(text: &str) -> String {
        match RunConfig::parse(text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_uses_defaults() {
        let cfg = RunConfig::parse("{}").unwrap();
        assert_eq!(cfg.fock.n_max, DEFAULT_N_MAX);
        assert_eq!(cfg.betas().unwrap(), FIGURE1_BETAS.to_vec());
        assert_eq!(cfg.axis().unwrap(), Axis::Mu(default_mu_grid()));
        assert!(cfg.model().is_err());
    }

    #[test]
    fn errors_name_the_key() {
        assert!(message(r#"{"modle": {}}"#).contains("modle"));
        assert!(message(r#"{"fock": {"n_max": "big"}}"#).contains("fock.n_max"));
        assert!(message(
            r#"{"model": {"alpha11": -1, "alpha22": 1, "alpha12": 0, "beta11": 0, "beta22": 0, "beta12": 0}}"#
        )
        .contains("model.alpha11"));
        assert!(message(r#"{"thermo": {"mu_grid": []}}"#).contains("thermo.mu_grid"));
        assert!(message(r#"{"thermo": {"mu_grid": [0.5]}}"#).contains("thermo.mu_grid"));
        assert!(message(r#"{"tolerances": {"symplectic": 0}}"#).contains("tolerances.symplectic"));
        assert!(message(r#"{"thermo": {"mu_grid": [-1], "zeta_list": [-1]}}"#).contains("thermo"));
    }

    #[test]
    fn log_spaced_grid() {
        let cfg = RunConfig::parse(
            r#"{"thermo": {"mu_grid": {"min_neg_mu": 0.01, "max_neg_mu": 1, "points": 3}}}"#,
        )
        .unwrap();
        match cfg.axis().unwrap() {
            Axis::Mu(g) => {
                assert_eq!(g.len(), 3);
                assert!(
                    (g[0] + 1.0).abs() < 1e-12
                        && (g[1] + 0.1).abs() < 1e-12
                        && (g[2] + 0.01).abs() < 1e-12
                );
            }
            other => panic!("{other:?}"),
        }
    }
}
