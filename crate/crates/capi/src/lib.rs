//! C ABI for the qicc power-allocation library.
//!
//! Scenarios and solutions are opaque handles created and released through
//! the constructor/free pairs below; every fallible call returns a
//! [`QiccStatus`] and writes its result through out-pointers. The header is
//! generated into `include/qicc.h` at build time.

use std::slice;

use qicc::entropy::{self, PhotonNumber};
use qicc::estimator::{self, Allocation};
use qicc::oracle::{self, Distribution, SymbolModel};
use qicc::solver::{self, GInit, SolverParams, Termination};
use qicc::{QiccError, Scenario};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QiccStatus {
    Ok = 0,
    InvalidArgument = 1,
    /// Requested sum-rate above the supported maximum.
    Infeasible = 2,
    /// Input outside the mathematical domain of the operation.
    DomainError = 3,
    NullPointer = 4,
    /// Output buffer smaller than the required length.
    BufferTooSmall = 5,
}

fn status_of(e: &QiccError) -> QiccStatus {
    match e {
        QiccError::Infeasible { .. } => QiccStatus::Infeasible,
        QiccError::Domain(_) => QiccStatus::DomainError,
        _ => QiccStatus::InvalidArgument,
    }
}

/// Opaque problem instance.
pub struct QiccScenario(Scenario);

/// Opaque solver result.
pub struct QiccSolution(solver::Solution);

/// Initial OAC power policy for the solver.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QiccGInit {
    FullPower = 0,
    HalfPower = 1,
}

/// Symbol distribution of the Monte-Carlo channel simulator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QiccDistribution {
    CircularGaussian = 0,
    UniformPhaseQpskLike = 1,
}

/// Solver controls; see `qicc_solver_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QiccSolverParams {
    /// Requested sum-rate, bits per channel use.
    pub r_sum: f64,
    /// Gradient stepsize.
    pub mu: f64,
    /// Stop when the MSE change falls below this.
    pub eps_ao: f64,
    /// Bisection residual tolerance.
    pub eps_mse: f64,
    pub n_max: usize,
    pub g_init: QiccGInit,
    /// Nonzero rejects and halves gradient steps that would increase the MSE.
    pub monotone_guard: u8,
}

/// Default solver controls at zero requested sum-rate.
#[no_mangle]
pub extern "C" fn qicc_solver_params_default() -> QiccSolverParams {
    let d = SolverParams::default();
    QiccSolverParams {
        r_sum: d.r_sum,
        mu: d.mu,
        eps_ao: d.eps_ao,
        eps_mse: d.eps_mse,
        n_max: d.n_max,
        g_init: QiccGInit::FullPower,
        monotone_guard: 0,
    }
}

/// Creates a scenario from explicit transmissivities (`eta_len` must equal
/// `k + m`; values must sum to 1). On success writes a handle that must be
/// released with `qicc_scenario_free`.
///
/// # Safety
/// `eta` must point to `eta_len` readable doubles and `out` must be a valid
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qicc_scenario_new(
    k: usize,
    m: usize,
    eta: *const f64,
    eta_len: usize,
    n0: f64,
    pc: f64,
    pt: f64,
    out: *mut *mut QiccScenario,
) -> QiccStatus {
    if eta.is_null() || out.is_null() {
        return QiccStatus::NullPointer;
    }
    let eta = slice::from_raw_parts(eta, eta_len).to_vec();
    match Scenario::new(k, m, eta, n0, pc, pt) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(QiccScenario(s)));
            QiccStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Creates a scenario with the split transmissivity rule: `oac_share`
/// divided equally over the K OAC devices and `comm_share` over the M
/// communication devices.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qicc_scenario_split(
    k: usize,
    m: usize,
    oac_share: f64,
    comm_share: f64,
    n0: f64,
    pc: f64,
    pt: f64,
    out: *mut *mut QiccScenario,
) -> QiccStatus {
    if out.is_null() {
        return QiccStatus::NullPointer;
    }
    if k == 0 || (m == 0 && comm_share != 0.0) {
        return QiccStatus::InvalidArgument;
    }
    let mut eta = vec![oac_share / k as f64; k];
    if m > 0 {
        eta.extend(std::iter::repeat(comm_share / m as f64).take(m));
    }
    match Scenario::new(k, m, eta, n0, pc, pt) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(QiccScenario(s)));
            QiccStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a scenario handle. Null is a no-op.
///
/// # Safety
/// `scenario` must come from a qicc constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qicc_scenario_free(scenario: *mut QiccScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// von Neumann entropy g(x) of a thermal state, bits per channel use.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qicc_von_neumann_g(x: f64, out: *mut f64) -> QiccStatus {
    if out.is_null() {
        return QiccStatus::NullPointer;
    }
    match PhotonNumber::new(x) {
        Ok(p) => {
            *out = entropy::von_neumann_g(p);
            QiccStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Largest sum-rate the scenario supports, bits per channel use.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qicc_max_sum_rate(
    scenario: *const QiccScenario,
    out: *mut f64,
) -> QiccStatus {
    if scenario.is_null() || out.is_null() {
        return QiccStatus::NullPointer;
    }
    *out = entropy::max_sum_rate(&(*scenario).0);
    QiccStatus::Ok
}

/// Minimum achievable MSE (no communication, full OAC power).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qicc_mse_min(scenario: *const QiccScenario, out: *mut f64) -> QiccStatus {
    if scenario.is_null() || out.is_null() {
        return QiccStatus::NullPointer;
    }
    *out = estimator::mse_min(&(*scenario).0);
    QiccStatus::Ok
}

/// Runs the alternating optimization. On success writes a solution handle
/// that must be released with `qicc_solution_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qicc_solve(
    scenario: *const QiccScenario,
    params: *const QiccSolverParams,
    out: *mut *mut QiccSolution,
) -> QiccStatus {
    if scenario.is_null() || params.is_null() || out.is_null() {
        return QiccStatus::NullPointer;
    }
    let p = &*params;
    let params = SolverParams {
        r_sum: p.r_sum,
        mu: p.mu,
        eps_ao: p.eps_ao,
        eps_mse: p.eps_mse,
        n_max: p.n_max,
        g_init: match p.g_init {
            QiccGInit::FullPower => GInit::FullPower,
            QiccGInit::HalfPower => GInit::HalfPower,
        },
        monotone_guard: p.monotone_guard != 0,
    };
    match solver::ao_solve(&(*scenario).0, &params) {
        Ok(sol) => {
            *out = Box::into_raw(Box::new(QiccSolution(sol)));
            QiccStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a solution handle. Null is a no-op.
///
/// # Safety
/// `solution` must come from `qicc_solve` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_free(solution: *mut QiccSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Final MSE of the solution.
///
/// # Safety
/// `solution` must be a live handle from `qicc_solve`.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_mse(solution: *const QiccSolution) -> f64 {
    (*solution).0.mse
}

/// Aggregate received communication power of the solution.
///
/// # Safety
/// `solution` must be a live handle from `qicc_solve`.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_n_sig(solution: *const QiccSolution) -> f64 {
    (*solution).0.alloc.n_sig
}

/// Receive coefficient of the solution (real-valued).
///
/// # Safety
/// `solution` must be a live handle from `qicc_solve`.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_h(solution: *const QiccSolution) -> f64 {
    (*solution).0.alloc.h.0
}

/// Number of AO iterations performed.
///
/// # Safety
/// `solution` must be a live handle from `qicc_solve`.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_iterations(solution: *const QiccSolution) -> usize {
    (*solution).0.trace.iterations.len() - 1
}

/// Nonzero when the run stopped on the MSE tolerance rather than the
/// iteration cap.
///
/// # Safety
/// `solution` must be a live handle from `qicc_solve`.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_converged(solution: *const QiccSolution) -> u8 {
    ((*solution).0.trace.terminated_by == Termination::ToleranceMet) as u8
}

/// Copies the K OAC powers into `buf`.
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_oac_powers(
    solution: *const QiccSolution,
    buf: *mut f64,
    buf_len: usize,
) -> QiccStatus {
    if solution.is_null() || buf.is_null() {
        return QiccStatus::NullPointer;
    }
    let g = &(*solution).0.alloc.g;
    if buf_len < g.len() {
        return QiccStatus::BufferTooSmall;
    }
    slice::from_raw_parts_mut(buf, g.len()).copy_from_slice(g);
    QiccStatus::Ok
}

/// Copies the M recovered communication powers into `buf`.
///
/// # Safety
/// `buf` must point to `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qicc_solution_comm_powers(
    solution: *const QiccSolution,
    buf: *mut f64,
    buf_len: usize,
) -> QiccStatus {
    if solution.is_null() || buf.is_null() {
        return QiccStatus::NullPointer;
    }
    let p = &(*solution).0.comm_powers;
    if buf_len < p.len() {
        return QiccStatus::BufferTooSmall;
    }
    if !p.is_empty() {
        slice::from_raw_parts_mut(buf, p.len()).copy_from_slice(p);
    }
    QiccStatus::Ok
}

/// Monte-Carlo estimate of the MSE at an explicit allocation. Writes the
/// empirical MSE and its standard error.
///
/// # Safety
/// `g` must hold K doubles, `comm_powers` M doubles; out-pointers must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn qicc_simulate_mse(
    scenario: *const QiccScenario,
    g: *const f64,
    g_len: usize,
    n_sig: f64,
    h: f64,
    comm_powers: *const f64,
    comm_len: usize,
    distribution: QiccDistribution,
    seed: u64,
    n_samples: usize,
    out_mse: *mut f64,
    out_std_err: *mut f64,
) -> QiccStatus {
    if scenario.is_null() || g.is_null() || out_mse.is_null() || out_std_err.is_null() {
        return QiccStatus::NullPointer;
    }
    if comm_len > 0 && comm_powers.is_null() {
        return QiccStatus::NullPointer;
    }
    let alloc = Allocation::new_real(slice::from_raw_parts(g, g_len).to_vec(), n_sig, h);
    let comm = if comm_len == 0 {
        &[]
    } else {
        slice::from_raw_parts(comm_powers, comm_len)
    };
    let model = SymbolModel {
        distribution: match distribution {
            QiccDistribution::CircularGaussian => Distribution::CircularGaussian,
            QiccDistribution::UniformPhaseQpskLike => Distribution::UniformPhaseQpskLike,
        },
        seed,
    };
    match oracle::simulate_mse(&(*scenario).0, &alloc, comm, &model, n_samples) {
        Ok(est) => {
            *out_mse = est.mse_hat;
            *out_std_err = est.std_err;
            QiccStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    unsafe fn standard_scenario() -> *mut QiccScenario {
        let mut s: *mut QiccScenario = ptr::null_mut();
        let st = qicc_scenario_split(2, 2, 0.6, 0.4, 2.0, 10.0, 10.0, &mut s);
        assert_eq!(st, QiccStatus::Ok);
        s
    }

    #[test]
    fn scenario_lifecycle_and_rates() {
        unsafe {
            let s = standard_scenario();
            let mut r_max = 0.0;
            assert_eq!(qicc_max_sum_rate(s, &mut r_max), QiccStatus::Ok);
            assert!(r_max > 1.0 && r_max < 2.0);
            let mut lo = 0.0;
            assert_eq!(qicc_mse_min(s, &mut lo), QiccStatus::Ok);
            assert!((lo - 0.5).abs() < 1e-12);
            qicc_scenario_free(s);
        }
    }

    #[test]
    fn invalid_scenario_rejected() {
        unsafe {
            let eta = [0.5f64, 0.2];
            let mut s: *mut QiccScenario = ptr::null_mut();
            let st = qicc_scenario_new(1, 1, eta.as_ptr(), 2, 2.0, 10.0, 10.0, &mut s);
            assert_eq!(st, QiccStatus::InvalidArgument);
            assert_eq!(
                qicc_scenario_new(1, 1, ptr::null(), 0, 2.0, 10.0, 10.0, &mut s),
                QiccStatus::NullPointer
            );
        }
    }

    #[test]
    fn solve_and_read_back() {
        unsafe {
            let s = standard_scenario();
            let mut params = qicc_solver_params_default();
            params.r_sum = 0.0;
            let mut sol: *mut QiccSolution = ptr::null_mut();
            assert_eq!(qicc_solve(s, &params, &mut sol), QiccStatus::Ok);
            assert!((qicc_solution_mse(sol) - 0.5).abs() < 1e-3);
            assert_eq!(qicc_solution_n_sig(sol), 0.0);
            assert_eq!(qicc_solution_converged(sol), 1);
            let mut g = [0.0f64; 2];
            assert_eq!(qicc_solution_oac_powers(sol, g.as_mut_ptr(), 2), QiccStatus::Ok);
            assert!(g.iter().all(|&x| (x - 10.0).abs() < 1e-9));
            let mut short = [0.0f64; 1];
            assert_eq!(
                qicc_solution_oac_powers(sol, short.as_mut_ptr(), 1),
                QiccStatus::BufferTooSmall
            );
            qicc_solution_free(sol);
            qicc_scenario_free(s);
        }
    }

    #[test]
    fn infeasible_rate_maps_to_status() {
        unsafe {
            let s = standard_scenario();
            let mut params = qicc_solver_params_default();
            params.r_sum = 100.0;
            let mut sol: *mut QiccSolution = ptr::null_mut();
            assert_eq!(qicc_solve(s, &params, &mut sol), QiccStatus::Infeasible);
            qicc_scenario_free(s);
        }
    }

    #[test]
    fn entropy_through_ffi() {
        unsafe {
            let mut out = 0.0;
            assert_eq!(qicc_von_neumann_g(1.0, &mut out), QiccStatus::Ok);
            assert!((out - 2.0).abs() < 1e-14);
            assert_eq!(qicc_von_neumann_g(-1.0, &mut out), QiccStatus::DomainError);
        }
    }

    #[test]
    fn simulate_through_ffi_matches_analytic() {
        unsafe {
            let s = standard_scenario();
            let g = [10.0f64, 10.0];
            let scenario = &(*s).0;
            let h = estimator::lmmse_coefficient(scenario, &g, 0.0);
            let comm = [0.0f64, 0.0];
            let (mut mse, mut se) = (0.0, 0.0);
            let st = qicc_simulate_mse(
                s,
                g.as_ptr(),
                2,
                0.0,
                h,
                comm.as_ptr(),
                2,
                QiccDistribution::CircularGaussian,
                17,
                200_000,
                &mut mse,
                &mut se,
            );
            assert_eq!(st, QiccStatus::Ok);
            assert!((mse - 0.5).abs() <= 4.0 * se, "mse={mse} se={se}");
            qicc_scenario_free(s);
        }
    }
}
