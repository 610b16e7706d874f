//! One-dimensional bisection for the two monotone root problems of the
//! allocation: the aggregate communication power N_sig* that meets the
//! requested sum-rate, and the largest aggregate OAC power Γ_max the
//! sum-rate constraint admits.

use crate::entropy::{self, rate_gap_raw};
use crate::error::{QiccError, Result};
use crate::estimator::Scenario;

/// Bracket and termination control for the bisection searches.
#[derive(Debug, Clone, Copy)]
pub struct BisectionSpec {
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for BisectionSpec {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_steps: 200 }
    }
}

impl BisectionSpec {
    pub fn new(tolerance: f64, max_steps: usize) -> Result<Self> {
        if !(tolerance > 0.0) || max_steps == 0 {
            return Err(QiccError::InvalidArgument(
                "bisection tolerance must be > 0 and max_steps >= 1".into(),
            ));
        }
        Ok(Self { tolerance, max_steps })
    }

    /// Combined relative-plus-absolute residual bound for a target value.
    fn residual_bound(&self, target: f64) -> f64 {
        self.tolerance * target.abs().max(1.0)
    }
}

/// Outcome of the N_sig* search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NsigSolution {
    /// Root within the power budget.
    Feasible(f64),
    /// The requested rate is unreachable at this effective noise even with
    /// all communication devices at full power.
    Infeasible { rate_at_max: f64 },
}

/// Solves `rate_gap(N_sig, n_eff) = r_sum` for N_sig ∈ [0, N_sig_max].
///
/// The left-hand side is strictly increasing in N_sig, so plain bisection on
/// the residual applies.
pub fn solve_nsig(
    scenario: &Scenario,
    n_eff: f64,
    r_sum: f64,
    spec: &BisectionSpec,
) -> Result<NsigSolution> {
    if n_eff < scenario.n0 - 1e-9 || !n_eff.is_finite() {
        return Err(QiccError::Domain(format!(
            "effective noise {n_eff} below the noise floor {}",
            scenario.n0
        )));
    }
    if r_sum < 0.0 || !r_sum.is_finite() {
        return Err(QiccError::Domain(format!("sum-rate must be >= 0, got {r_sum}")));
    }
    if r_sum == 0.0 {
        return Ok(NsigSolution::Feasible(0.0));
    }
    let hi = scenario.n_sig_max();
    let rate_at_max = rate_gap_raw(hi, n_eff);
    // one-tolerance margin absorbs floating-point boundary cases
    if rate_at_max < r_sum - spec.residual_bound(r_sum) {
        return Ok(NsigSolution::Infeasible { rate_at_max });
    }
    let root = bisect_increasing(0.0, hi, r_sum, spec, |n| rate_gap_raw(n, n_eff));
    Ok(NsigSolution::Feasible(root))
}

/// Largest aggregate OAC power Γ_max = N_eff_max − N_0 compatible with the
/// requested sum-rate when the communication side runs at full power.
///
/// Solves `rate_gap(N_sig_max, N_eff) = r_sum` for N_eff; the left-hand side
/// is strictly decreasing in N_eff. The result is capped at Σ η_k Pc: below
/// some r_sum the equality root exceeds anything the box constraints can
/// produce and the constraint is inactive.
pub fn solve_gamma_max(scenario: &Scenario, r_sum: f64, spec: &BisectionSpec) -> Result<f64> {
    if r_sum < 0.0 || !r_sum.is_finite() {
        return Err(QiccError::Domain(format!("sum-rate must be >= 0, got {r_sum}")));
    }
    let r_max = entropy::max_sum_rate(scenario);
    if r_sum > r_max + spec.residual_bound(r_sum) {
        return Err(QiccError::InvalidArgument(format!(
            "sum-rate {r_sum} exceeds the maximum supported rate {r_max}"
        )));
    }
    let cap = scenario.gamma_cap();
    if r_sum == 0.0 {
        return Ok(cap);
    }
    let n_sig_max = scenario.n_sig_max();
    let n_eff_hi = scenario.n0 + cap;
    // Constraint inactive even at the largest reachable aggregate.
    if rate_gap_raw(n_sig_max, n_eff_hi) >= r_sum {
        return Ok(cap);
    }
    // rate_gap(N_sig_max, ·) decreases in n_eff; negate to bisect as increasing.
    let n_eff = bisect_increasing(scenario.n0, n_eff_hi, -r_sum, spec, |n| {
        -rate_gap_raw(n_sig_max, n)
    });
    Ok((n_eff - scenario.n0).clamp(0.0, cap))
}

/// Bisection for `f(x) = target` with `f` increasing on [lo, hi].
/// Assumes f(lo) <= target <= f(hi) up to the residual bound.
fn bisect_increasing<F>(mut lo: f64, mut hi: f64, target: f64, spec: &BisectionSpec, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let bound = spec.residual_bound(target);
    if f(lo) >= target - bound && f(lo) >= target {
        return lo;
    }
    if f(hi) <= target {
        return hi;
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..spec.max_steps {
        mid = 0.5 * (lo + hi);
        let val = f(mid);
        if (val - target).abs() <= bound {
            return mid;
        }
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}
