//! JSON configuration: scenario, solver, sweep, and oracle blocks.

use serde::{Deserialize, Serialize};

use crate::error::{QiccError, Result};
use crate::estimator::Scenario;
use crate::oracle::Distribution;
use crate::solver::{GInit, SolverParams};

/// Transmissivities given either explicitly or by the split rule: a fraction
/// shared equally by the K OAC devices and the rest shared equally by the M
/// communication devices.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum EtaSpec {
    Explicit(Vec<f64>),
    Split { oac_share: f64, comm_share: f64 },
}

impl Default for EtaSpec {
    fn default() -> Self {
        EtaSpec::Split { oac_share: 0.6, comm_share: 0.4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioConfig {
    pub k: usize,
    pub m: usize,
    #[serde(default)]
    pub eta: EtaSpec,
    pub n0: f64,
    pub pc: f64,
    pub pt: f64,
}

fn default_mu() -> f64 {
    1e-3
}
fn default_eps() -> f64 {
    1e-6
}
fn default_n_max() -> usize {
    1000
}
fn default_g_init() -> String {
    "full-power".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolverConfig {
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_eps")]
    pub eps_ao: f64,
    #[serde(default = "default_eps")]
    pub eps_mse: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// "full-power", "half-power", or an explicit JSON array via `g_init_explicit`.
    #[serde(default = "default_g_init")]
    pub g_init: String,
    #[serde(default)]
    pub g_init_explicit: Option<Vec<f64>>,
    #[serde(default)]
    pub monotone_guard: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu: default_mu(),
            eps_ao: default_eps(),
            eps_mse: default_eps(),
            n_max: default_n_max(),
            g_init: default_g_init(),
            g_init_explicit: None,
            monotone_guard: false,
        }
    }
}

fn default_grid() -> usize {
    21
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    /// Number of evenly spaced sum-rate points on [0, R_max], endpoints
    /// included. Ignored when `r_sum_list` is given.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub r_sum_list: Option<Vec<f64>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { grid: default_grid(), r_sum_list: None }
    }
}

fn default_samples() -> usize {
    1_000_000
}
fn default_distribution() -> String {
    "circular-gaussian".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OracleConfig {
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// "circular-gaussian" or "uniform-phase".
    #[serde(default = "default_distribution")]
    pub distribution: String,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_samples: default_samples(),
            seed: 0,
            distribution: default_distribution(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigFile {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

impl ConfigFile {
    /// Standard setup: K = M = 2, 0.6/0.4 transmissivity split, N0 = 2,
    /// Pc = Pt = 10.
    pub fn standard() -> Self {
        Self {
            scenario: ScenarioConfig {
                k: 2,
                m: 2,
                eta: EtaSpec::default(),
                n0: 2.0,
                pc: 10.0,
                pt: 10.0,
            },
            solver: SolverConfig::default(),
            sweep: SweepConfig::default(),
            oracle: OracleConfig::default(),
        }
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QiccError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            QiccError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization")
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let sc = &self.scenario;
        let eta = match &sc.eta {
            EtaSpec::Explicit(v) => v.clone(),
            EtaSpec::Split { oac_share, comm_share } => {
                let mut eta = vec![oac_share / sc.k.max(1) as f64; sc.k];
                if sc.m > 0 {
                    eta.extend(std::iter::repeat(comm_share / sc.m as f64).take(sc.m));
                } else if *comm_share != 0.0 {
                    return Err(QiccError::Config(
                        "comm_share must be 0 when M = 0".into(),
                    ));
                }
                eta
            }
        };
        Scenario::new(sc.k, sc.m, eta, sc.n0, sc.pc, sc.pt)
    }

    pub fn solver_params(&self, r_sum: f64) -> Result<SolverParams> {
        let s = &self.solver;
        let g_init = match (s.g_init.as_str(), &s.g_init_explicit) {
            (_, Some(v)) => GInit::Explicit(v.clone()),
            ("full-power", None) => GInit::FullPower,
            ("half-power", None) => GInit::HalfPower,
            (other, None) => {
                return Err(QiccError::Config(format!(
                    "unknown g_init policy '{other}' (expected full-power or half-power)"
                )))
            }
        };
        let params = SolverParams {
            r_sum,
            mu: s.mu,
            eps_ao: s.eps_ao,
            eps_mse: s.eps_mse,
            n_max: s.n_max,
            g_init,
            monotone_guard: s.monotone_guard,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn distribution(&self) -> Result<Distribution> {
        match self.oracle.distribution.as_str() {
            "circular-gaussian" => Ok(Distribution::CircularGaussian),
            "uniform-phase" | "qpsk" => Ok(Distribution::UniformPhaseQpskLike),
            other => Err(QiccError::Config(format!(
                "unknown distribution '{other}' (expected circular-gaussian or uniform-phase)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_scenario_uses_split_rule() {
        let cfg = ConfigFile::standard();
        let s = cfg.scenario().unwrap();
        assert_eq!(s.eta, vec![0.3, 0.3, 0.2, 0.2]);
        assert_eq!(s.n0, 2.0);
    }

    #[test]
    fn explicit_eta_parses() {
        let text = r#"{"scenario": {"k": 1, "m": 1, "eta": [0.6, 0.4], "n0": 2.0, "pc": 5.0, "pt": 5.0}}"#;
        let cfg = ConfigFile::from_json(text).unwrap();
        assert_eq!(cfg.scenario().unwrap().eta, vec![0.6, 0.4]);
    }

    #[test]
    fn round_trip_preserves_scenario() {
        let cfg = ConfigFile::standard();
        let back = ConfigFile::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.scenario().unwrap(), cfg.scenario().unwrap());
    }

    #[test]
    fn malformed_json_reports_location() {
        let err = ConfigFile::from_json("{not json").unwrap_err();
        assert!(matches!(err, QiccError::Config(_)));
        assert!(err.to_string().contains("line"));
    }

    #[test]
    fn unknown_g_init_rejected() {
        let mut cfg = ConfigFile::standard();
        cfg.solver.g_init = "warm".into();
        assert!(cfg.solver_params(0.0).is_err());
    }
}
