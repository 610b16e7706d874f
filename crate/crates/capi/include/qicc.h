#ifndef QICC_H
#define QICC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Symbol distribution of the Monte-Carlo channel simulator.
 */
typedef enum QiccDistribution {
  QiccDistribution_CircularGaussian = 0,
  QiccDistribution_UniformPhaseQpskLike = 1,
} QiccDistribution;

/**
 * Initial OAC power policy for the solver.
 */
typedef enum QiccGInit {
  QiccGInit_FullPower = 0,
  QiccGInit_HalfPower = 1,
} QiccGInit;

/**
 * Result code of every fallible call.
 */
typedef enum QiccStatus {
  QiccStatus_Ok = 0,
  QiccStatus_InvalidArgument = 1,
  /**
   * Requested sum-rate above the supported maximum.
   */
  QiccStatus_Infeasible = 2,
  /**
   * Input outside the mathematical domain of the operation.
   */
  QiccStatus_DomainError = 3,
  QiccStatus_NullPointer = 4,
  /**
   * Output buffer smaller than the required length.
   */
  QiccStatus_BufferTooSmall = 5,
} QiccStatus;

/**
 * Opaque problem instance.
 */
typedef struct QiccScenario QiccScenario;

/**
 * Opaque solver result.
 */
typedef struct QiccSolution QiccSolution;

/**
 * Solver controls; see `qicc_solver_params_default`.
 */
typedef struct QiccSolverParams {
  /**
   * Requested sum-rate, bits per channel use.
   */
  double r_sum;
  /**
   * Gradient stepsize.
   */
  double mu;
  /**
   * Stop when the MSE change falls below this.
   */
  double eps_ao;
  /**
   * Bisection residual tolerance.
   */
  double eps_mse;
  uintptr_t n_max;
  enum QiccGInit g_init;
  /**
   * Nonzero rejects and halves gradient steps that would increase the MSE.
   */
  uint8_t monotone_guard;
} QiccSolverParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default solver controls at zero requested sum-rate.
 */
struct QiccSolverParams qicc_solver_params_default(void);

/**
 * Creates a scenario from explicit transmissivities (`eta_len` must equal
 * `k + m`; values must sum to 1). On success writes a handle that must be
 * released with `qicc_scenario_free`.
 *
 * # Safety
 * `eta` must point to `eta_len` readable doubles and `out` must be a valid
 * writable pointer.
 */
enum QiccStatus qicc_scenario_new(uintptr_t k,
                                  uintptr_t m,
                                  const double *eta,
                                  uintptr_t eta_len,
                                  double n0,
                                  double pc,
                                  double pt,
                                  struct QiccScenario **out);

/**
 * Creates a scenario with the split transmissivity rule: `oac_share`
 * divided equally over the K OAC devices and `comm_share` over the M
 * communication devices.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum QiccStatus qicc_scenario_split(uintptr_t k,
                                    uintptr_t m,
                                    double oac_share,
                                    double comm_share,
                                    double n0,
                                    double pc,
                                    double pt,
                                    struct QiccScenario **out);

/**
 * Releases a scenario handle. Null is a no-op.
 *
 * # Safety
 * `scenario` must come from a qicc constructor and not be freed twice.
 */
void qicc_scenario_free(struct QiccScenario *scenario);

/**
 * von Neumann entropy g(x) of a thermal state, bits per channel use.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QiccStatus qicc_von_neumann_g(double x, double *out);

/**
 * Largest sum-rate the scenario supports, bits per channel use.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QiccStatus qicc_max_sum_rate(const struct QiccScenario *scenario, double *out);

/**
 * Minimum achievable MSE (no communication, full OAC power).
 *
 * # Safety
 * Pointers must be valid.
 */
enum QiccStatus qicc_mse_min(const struct QiccScenario *scenario, double *out);

/**
 * Runs the alternating optimization. On success writes a solution handle
 * that must be released with `qicc_solution_free`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QiccStatus qicc_solve(const struct QiccScenario *scenario,
                           const struct QiccSolverParams *params,
                           struct QiccSolution **out);

/**
 * Releases a solution handle. Null is a no-op.
 *
 * # Safety
 * `solution` must come from `qicc_solve` and not be freed twice.
 */
void qicc_solution_free(struct QiccSolution *solution);

/**
 * Final MSE of the solution.
 *
 * # Safety
 * `solution` must be a live handle from `qicc_solve`.
 */
double qicc_solution_mse(const struct QiccSolution *solution);

/**
 * Aggregate received communication power of the solution.
 *
 * # Safety
 * `solution` must be a live handle from `qicc_solve`.
 */
double qicc_solution_n_sig(const struct QiccSolution *solution);

/**
 * Receive coefficient of the solution (real-valued).
 *
 * # Safety
 * `solution` must be a live handle from `qicc_solve`.
 */
double qicc_solution_h(const struct QiccSolution *solution);

/**
 * Number of AO iterations performed.
 *
 * # Safety
 * `solution` must be a live handle from `qicc_solve`.
 */
uintptr_t qicc_solution_iterations(const struct QiccSolution *solution);

/**
 * Nonzero when the run stopped on the MSE tolerance rather than the
 * iteration cap.
 *
 * # Safety
 * `solution` must be a live handle from `qicc_solve`.
 */
uint8_t qicc_solution_converged(const struct QiccSolution *solution);

/**
 * Copies the K OAC powers into `buf`.
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum QiccStatus qicc_solution_oac_powers(const struct QiccSolution *solution,
                                         double *buf,
                                         uintptr_t buf_len);

/**
 * Copies the M recovered communication powers into `buf`.
 *
 * # Safety
 * `buf` must point to `buf_len` writable doubles.
 */
enum QiccStatus qicc_solution_comm_powers(const struct QiccSolution *solution,
                                          double *buf,
                                          uintptr_t buf_len);

/**
 * Monte-Carlo estimate of the MSE at an explicit allocation. Writes the
 * empirical MSE and its standard error.
 *
 * # Safety
 * `g` must hold K doubles, `comm_powers` M doubles; out-pointers must be
 * valid.
 */
enum QiccStatus qicc_simulate_mse(const struct QiccScenario *scenario,
                                  const double *g,
                                  uintptr_t g_len,
                                  double n_sig,
                                  double h,
                                  const double *comm_powers,
                                  uintptr_t comm_len,
                                  enum QiccDistribution distribution,
                                  uint64_t seed,
                                  uintptr_t n_samples,
                                  double *out_mse,
                                  double *out_std_err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QICC_H */
