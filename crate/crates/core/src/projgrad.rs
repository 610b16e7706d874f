//! Projected-gradient update of the OAC powers: descent step, box clip, and
//! Euclidean projection onto the aggregate half-space Σ η_k g_k <= Γ_max.

use crate::estimator::{self, Scenario};

/// Stepsize and gradient-singularity lift for the descent step.
#[derive(Debug, Clone, Copy)]
pub struct PgParams {
    pub mu: f64,
    pub epsilon_floor: f64,
}

impl Default for PgParams {
    fn default() -> Self {
        Self { mu: 1e-3, epsilon_floor: estimator::EPSILON_FLOOR }
    }
}

/// One gradient step on the reduced MSE followed by the component-wise clip
/// to [0, Pc].
pub fn pg_step(scenario: &Scenario, g: &[f64], n_sig: f64, params: &PgParams) -> Vec<f64> {
    let grad = estimator::mse_gradient(scenario, g, n_sig);
    g.iter()
        .zip(&grad)
        .map(|(&gk, &dk)| (gk - params.mu * dk).clamp(0.0, scenario.pc))
        .collect()
}

/// Slack allowed on the aggregate constraint after projection.
pub const AGGREGATE_SLACK: f64 = 1e-9;

/// Euclidean projection onto {g : Σ η_k g_k <= Γ_max} intersected with the
/// box [0, Pc]^K.
///
/// A feasible input is returned unchanged. Otherwise the closed-form
/// half-space projection g_k = ḡ_k − η_k·(Σ η_j ḡ_j − Γ_max)/(Σ η_j²) is
/// applied and the result clipped back to the box. Clipping negative
/// components to zero can push the aggregate back above Γ_max; the
/// projection is then repeated over the still-positive components until the
/// aggregate constraint holds, which terminates after at most K passes.
pub fn project_halfspace(scenario: &Scenario, g_bar: &[f64], gamma_max: f64) -> Vec<f64> {
    let eta = scenario.eta_oac();
    let aggregate = |g: &[f64]| -> f64 { eta.iter().zip(g).map(|(e, x)| e * x).sum() };

    let mut g = g_bar.to_vec();
    if aggregate(&g) <= gamma_max + AGGREGATE_SLACK {
        return g;
    }
    let mut active: Vec<bool> = vec![true; g.len()];
    for _ in 0..g.len() {
        let excess = aggregate(&g) - gamma_max;
        if excess <= AGGREGATE_SLACK {
            break;
        }
        let eta_sq: f64 = eta
            .iter()
            .zip(&active)
            .filter(|(_, &a)| a)
            .map(|(e, _)| e * e)
            .sum();
        if eta_sq == 0.0 {
            break;
        }
        let delta = excess / eta_sq;
        for k in 0..g.len() {
            if active[k] {
                g[k] = (g[k] - eta[k] * delta).min(scenario.pc);
                if g[k] <= 0.0 {
                    g[k] = 0.0;
                    active[k] = false;
                }
            }
        }
    }
    g
}
