//! Alternating-optimization driver: closed-form receive-coefficient update,
//! N_sig bisection, projected-gradient refinement of the OAC powers, with
//! stopping rules and full per-iteration trace capture.

use crate::entropy;
use crate::error::{QiccError, Result};
use crate::estimator::{self, Allocation, Scenario};
use crate::projgrad::{self, PgParams};
use crate::rootfind::{self, BisectionSpec, NsigSolution};

/// Initial OAC power policy.
#[derive(Debug, Clone, PartialEq)]
pub enum GInit {
    /// g_k = Pc for all k (unconstrained optimum), projected into the
    /// feasible set before the first iteration.
    FullPower,
    /// g_k = Pc/2 for all k.
    HalfPower,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SolverParams {
    /// Requested sum-rate in bits per channel use.
    pub r_sum: f64,
    /// Gradient stepsize μ.
    pub mu: f64,
    /// Stop when the MSE change between iterations falls below this.
    pub eps_ao: f64,
    /// Bisection residual tolerance.
    pub eps_mse: f64,
    pub n_max: usize,
    pub g_init: GInit,
    /// Reject-and-halve the gradient step whenever it would increase the
    /// MSE. Off by default.
    pub monotone_guard: bool,
}

impl SolverParams {
    pub fn with_r_sum(r_sum: f64) -> Self {
        Self { r_sum, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_sum >= 0.0) {
            return Err(QiccError::InvalidArgument("r_sum must be >= 0".into()));
        }
        if !(self.mu > 0.0) || !(self.eps_ao > 0.0) || !(self.eps_mse > 0.0) || self.n_max < 1 {
            return Err(QiccError::InvalidArgument(
                "mu, eps_ao, eps_mse must be > 0 and n_max >= 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            r_sum: 0.0,
            mu: 1e-3,
            eps_ao: 1e-6,
            eps_mse: 1e-6,
            n_max: 1000,
            g_init: GInit::FullPower,
            monotone_guard: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ToleranceMet,
    MaxIterations,
    Infeasible,
}

/// One recorded iterate of the AO loop.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub iter: usize,
    pub mse: f64,
    pub g: Vec<f64>,
    pub n_sig: f64,
    pub h: f64,
    /// Effective noise at which the N_sig bisection of this iteration ran.
    pub n_eff: f64,
    /// The bisection could not reach r_sum at this iterate's effective noise
    /// and N_sig was clamped to its maximum.
    pub nsig_clamped: bool,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub iterations: Vec<TraceEntry>,
    pub terminated_by: Termination,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub alloc: Allocation,
    pub mse: f64,
    /// Recovered per-device communication powers (uniform split of N_sig).
    pub comm_powers: Vec<f64>,
    /// Aggregate OAC cap used by the projection.
    pub gamma_max: f64,
    pub trace: ConvergenceTrace,
}

/// Any communication power split with Σ η_{K+m} P_m = N_sig gives the same
/// MSE; this returns the uniform choice P_m = N_sig / Σ η_{K+j}.
pub fn split_comm_powers(scenario: &Scenario, n_sig: f64) -> Result<Vec<f64>> {
    let budget = scenario.n_sig_max();
    if n_sig < 0.0 || n_sig > budget + 1e-9 {
        return Err(QiccError::InvalidArgument(format!(
            "N_sig {n_sig} outside the budget [0, {budget}]"
        )));
    }
    if scenario.m == 0 {
        return Ok(Vec::new());
    }
    let eta_total: f64 = scenario.eta_comm().iter().sum();
    let p = (n_sig / eta_total).min(scenario.pt);
    Ok(vec![p; scenario.m])
}

/// Runs the alternating optimization to a stationary allocation.
///
/// Per iteration: (1) h from the LMMSE closed form, (2) effective noise from
/// the current OAC powers, (3) N_sig from bisection of the sum-rate
/// equation, (4) gradient step on the OAC powers with box clip, (5)
/// half-space projection if the aggregate cap Γ_max is violated, (6) MSE
/// update. Γ_max is precomputed once before the loop. Stops when the MSE
/// change drops below `eps_ao` or after `n_max` iterations.
pub fn ao_solve(scenario: &Scenario, params: &SolverParams) -> Result<Solution> {
    params.validate()?;
    let r_max = entropy::max_sum_rate(scenario);
    let spec = BisectionSpec::new(params.eps_mse, 200)?;
    if params.r_sum > r_max + spec_residual(&spec, params.r_sum) {
        return Err(QiccError::Infeasible { requested: params.r_sum, max: r_max });
    }

    let gamma_max = rootfind::solve_gamma_max(scenario, params.r_sum, &spec)?;

    let g0 = match &params.g_init {
        GInit::FullPower => vec![scenario.pc; scenario.k],
        GInit::HalfPower => vec![0.5 * scenario.pc; scenario.k],
        GInit::Explicit(g) => {
            if g.len() != scenario.k {
                return Err(QiccError::InvalidArgument(format!(
                    "explicit init needs {} powers, got {}",
                    scenario.k,
                    g.len()
                )));
            }
            g.iter().map(|&x| x.clamp(0.0, scenario.pc)).collect()
        }
    };
    let mut g = projgrad::project_halfspace(scenario, &g0, gamma_max);

    // Iterate 0 records the initial point with its own h and N_sig updates.
    let (n_sig0, clamped0, n_eff0) = nsig_update(scenario, &g, params.r_sum, &spec)?;
    let mut n_sig = n_sig0;
    let mut h = estimator::lmmse_coefficient(scenario, &g, n_sig);
    let mut mse = estimator::reduced_mse(scenario, &g, n_sig);
    let mut trace = vec![TraceEntry {
        iter: 0,
        mse,
        g: g.clone(),
        n_sig,
        h,
        n_eff: n_eff0,
        nsig_clamped: clamped0,
    }];

    let mut terminated_by = Termination::MaxIterations;
    let mut mu = params.mu;
    for iter in 1..=params.n_max {
        h = estimator::lmmse_coefficient(scenario, &g, n_sig);
        let (n_sig_new, clamped, n_eff) = nsig_update(scenario, &g, params.r_sum, &spec)?;
        n_sig = n_sig_new;

        let pg = PgParams { mu, epsilon_floor: estimator::EPSILON_FLOOR };
        let mut g_new = step_and_project(scenario, &g, n_sig, gamma_max, &pg);
        let mut mse_new = estimator::reduced_mse(scenario, &g_new, n_sig);

        if params.monotone_guard {
            let mse_here = estimator::reduced_mse(scenario, &g, n_sig);
            let mut tries = 0;
            while mse_new > mse_here && tries < 60 {
                mu *= 0.5;
                let pg = PgParams { mu, epsilon_floor: estimator::EPSILON_FLOOR };
                g_new = step_and_project(scenario, &g, n_sig, gamma_max, &pg);
                mse_new = estimator::reduced_mse(scenario, &g_new, n_sig);
                tries += 1;
            }
            if mse_new > mse_here {
                // No decreasing step available: keep the current point.
                g_new = g.clone();
                mse_new = mse_here;
            }
        }

        g = g_new;
        let mse_prev = mse;
        mse = mse_new;
        trace.push(TraceEntry {
            iter,
            mse,
            g: g.clone(),
            n_sig,
            h,
            n_eff,
            nsig_clamped: clamped,
        });

        if (mse - mse_prev).abs() <= params.eps_ao {
            terminated_by = Termination::ToleranceMet;
            break;
        }
    }

    // Final h consistent with the returned allocation.
    h = estimator::lmmse_coefficient(scenario, &g, n_sig);
    let comm_powers = split_comm_powers(scenario, n_sig)?;
    Ok(Solution {
        alloc: Allocation::new_real(g.clone(), n_sig, h),
        mse: estimator::reduced_mse(scenario, &g, n_sig),
        comm_powers,
        gamma_max,
        trace: ConvergenceTrace { iterations: trace, terminated_by },
    })
}

fn spec_residual(spec: &BisectionSpec, target: f64) -> f64 {
    spec.tolerance * target.abs().max(1.0)
}

fn nsig_update(
    scenario: &Scenario,
    g: &[f64],
    r_sum: f64,
    spec: &BisectionSpec,
) -> Result<(f64, bool, f64)> {
    let n_eff = scenario.n0 + scenario.eta_oac().iter().zip(g).map(|(e, x)| e * x).sum::<f64>();
    match rootfind::solve_nsig(scenario, n_eff, r_sum, spec)? {
        NsigSolution::Feasible(n) => Ok((n, false, n_eff)),
        // Transient mid-loop infeasibility: the current OAC interference is
        // still above Γ_max. Clamp to full communication power; the Γ_max
        // projection drives subsequent iterates back into rate feasibility.
        NsigSolution::Infeasible { .. } => Ok((scenario.n_sig_max(), true, n_eff)),
    }
}

fn step_and_project(
    scenario: &Scenario,
    g: &[f64],
    n_sig: f64,
    gamma_max: f64,
    pg: &PgParams,
) -> Vec<f64> {
    let stepped = projgrad::pg_step(scenario, g, n_sig, pg);
    projgrad::project_halfspace(scenario, &stepped, gamma_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{mse_min, reduced_mse};

    fn scen() -> Scenario {
        Scenario::new(2, 2, vec![0.3, 0.3, 0.2, 0.2], 2.0, 10.0, 10.0).unwrap()
    }

    #[test]
    fn zero_rate_reaches_mse_min() {
        let s = scen();
        let sol = ao_solve(&s, &SolverParams::with_r_sum(0.0)).unwrap();
        assert!((sol.mse - mse_min(&s)).abs() < 1e-3, "mse={}", sol.mse);
        assert_eq!(sol.alloc.n_sig, 0.0);
        assert!(sol.alloc.g.iter().all(|&g| (g - 10.0).abs() < 1e-9));
        assert_eq!(sol.trace.terminated_by, Termination::ToleranceMet);
    }

    #[test]
    fn max_rate_collapses_to_zero_oac() {
        let s = scen();
        let r_max = entropy::max_sum_rate(&s);
        let sol = ao_solve(&s, &SolverParams::with_r_sum(r_max)).unwrap();
        assert!((sol.mse - 2.0).abs() < 1e-6, "mse={}", sol.mse);
        assert!((sol.alloc.n_sig - s.n_sig_max()).abs() < 1e-6);
    }

    #[test]
    fn infeasible_rate_rejected() {
        let s = scen();
        let r_max = entropy::max_sum_rate(&s);
        match ao_solve(&s, &SolverParams::with_r_sum(r_max + 0.5)) {
            Err(QiccError::Infeasible { requested, max }) => {
                assert!(requested > max);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn half_max_rate_converges_between_bounds() {
        let s = scen();
        let r = 0.5 * entropy::max_sum_rate(&s);
        let sol = ao_solve(&s, &SolverParams::with_r_sum(r)).unwrap();
        assert_eq!(sol.trace.terminated_by, Termination::ToleranceMet);
        assert!(sol.trace.iterations.len() < 1000);
        assert!(sol.mse > mse_min(&s) && sol.mse < 2.0, "mse={}", sol.mse);
        // every iterate feasible
        for e in &sol.trace.iterations {
            assert!(e.g.iter().all(|&g| (-1e-12..=10.0 + 1e-12).contains(&g)));
            let agg: f64 = e.g.iter().zip(s.eta_oac()).map(|(g, eta)| g * eta).sum();
            assert!(agg <= sol.gamma_max + 1e-9);
            assert!(e.n_sig >= 0.0 && e.n_sig <= s.n_sig_max() + 1e-9);
        }
        // solution MSE matches its allocation
        assert!((sol.mse - reduced_mse(&s, &sol.alloc.g, sol.alloc.n_sig)).abs() < 1e-12);
    }

    #[test]
    fn monotone_guard_enforces_decrease() {
        let s = scen();
        let mut p = SolverParams::with_r_sum(0.3 * entropy::max_sum_rate(&s));
        p.monotone_guard = true;
        p.g_init = GInit::HalfPower;
        let sol = ao_solve(&s, &p).unwrap();
        for w in sol.trace.iterations.windows(2) {
            assert!(w[1].mse <= w[0].mse + 1e-12);
        }
    }

    #[test]
    fn block_optimality_at_convergence() {
        let s = scen();
        let r = 0.5 * entropy::max_sum_rate(&s);
        let p = SolverParams::with_r_sum(r);
        let sol = ao_solve(&s, &p).unwrap();
        let spec = BisectionSpec::new(p.eps_mse, 200).unwrap();
        // re-running the n_sig bisection changes the MSE by < eps_ao
        let (n_sig2, _, _) = nsig_update(&s, &sol.alloc.g, r, &spec).unwrap();
        let mse2 = reduced_mse(&s, &sol.alloc.g, n_sig2);
        assert!((mse2 - sol.mse).abs() < p.eps_ao * 10.0);
    }

    #[test]
    fn split_comm_powers_cases() {
        let s = scen();
        assert_eq!(split_comm_powers(&s, 0.0).unwrap(), vec![0.0, 0.0]);
        let p = split_comm_powers(&s, 2.0).unwrap();
        assert!((p[0] - 5.0).abs() < 1e-12 && (p[1] - 5.0).abs() < 1e-12);
        let full = split_comm_powers(&s, s.n_sig_max()).unwrap();
        assert!(full.iter().all(|&x| (x - 10.0).abs() < 1e-12));
        assert!(split_comm_powers(&s, 100.0).is_err());
    }
}
