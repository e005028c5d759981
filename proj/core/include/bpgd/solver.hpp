#ifndef BPGD_SOLVER_HPP_
#define BPGD_SOLVER_HPP_

#include "bpgd/common.hpp"
#include "bpgd/model.hpp"
#include "bpgd/prox.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bpgd {

class Oracle;
struct OracleConfig;

/// Disturbance injected into the outer gradient (and nowhere else).
struct NoiseSpec {
  enum class Kind { UniformBall, ConstantVector };
  Kind kind = Kind::UniformBall;
  double amplitude = 0.0;
  Vec direction;  ///< ConstantVector only; normalized at use, defaults to ones
  std::uint64_t seed = 0;
};

struct SolverConfig {
  double mu = 0.0;   ///< inner step size
  double nu = 0.0;   ///< outer step size
  int kappa = 10;    ///< inner iterations per outer step
  int max_outer = 10000;
  double stop_tol = 1e-9;  ///< on outer increment and inner fixed-point residual
  bool warm_start = true;  ///< false restarts the inner loop from u0 each outer step
  bool log_inner = false;  ///< record inner iterates per outer step
  std::optional<NoiseSpec> noise;
};

enum class RunStatus { Converged, MaxIterations, Diverged };

std::string to_string(RunStatus s);

/// Iteration state of the bilevel loop. p_prev is the parameter the current
/// inner iterate was optimized against; after the first iteration both p and
/// u lie in their penalty domains (prox outputs land in-domain).
struct BilevelState {
  Vec p;
  Vec p_prev;
  Vec u;
  int ell = 0;
};

/// One outer iteration of a bilevel run. Oracle-dependent entries are absent
/// when no oracle was attached. grad_err and d_norm describe the step taken
/// *from* this row and are absent on the final row.
struct TraceRow {
  int ell = 0;
  Vec p;
  Vec u;  ///< empty when the trace was loaded from CSV
  double dp_norm = 0.0;
  std::optional<double> lambda_p;
  std::optional<double> cost_outer;  ///< (Jbar + P)(p); may be +inf outside dom P
  std::optional<double> omega_u;
  std::optional<double> grad_err;
  Vec d;  ///< disturbance injected into the step from this row (in-memory only)
  std::optional<double> d_norm;
  std::string status = "ok";
  std::vector<Vec> inner_iterates;  ///< u_0..u_kappa at this row's p (when logged)
};

struct Trace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::MaxIterations;
  double mu = 0.0, nu = 0.0;
  int kappa = 0;
  double stop_tol = 0.0;
  std::uint64_t seed = 0;
  bool oracle_attached = false;
  bool warm_start = true;
  int param_dim = 0;
  double final_inner_residual = std::numeric_limits<double>::quiet_NaN();
};

struct StepSizes {
  double mu = 0.0;
  double nu = 0.0;
  double lipschitz_u = 0.0;  ///< sampled Lipschitz constant of grad_u
  double lipschitz_p = 0.0;  ///< sampled Lipschitz constant of grad Jbar (before safety factor)
};

/**
 * @brief Selects step sizes satisfying the inverse-Lipschitz rule.
 *
 * mu = 1/L_u with L_u the max of 2*lambda_max(H(p)) over a low-discrepancy
 * sample of dom P; nu = 1/(2*L_p) with L_p an empirical Lipschitz constant of
 * the exact value-function gradient (safety factor 2).
 */
StepSizes step_sizes(const ParametrizedModel& model, const ProxOperator& prox_p,
                     const ProxOperator& prox_u, int grid, std::uint64_t seed,
                     const OracleConfig& oracle_cfg);

/// One proximal gradient step on the condensed cost: prox_{mu U}(u - mu (2Hu + g)).
Vec inner_step(const CondensedQP& qp, const ProxOperator& prox_u, double mu, const Vec& u);

/// kappa-fold composition of inner_step at fixed parameter. When `iterates`
/// is given it receives u_0..u_kappa.
Vec run_inner(const CondensedQP& qp, const ProxOperator& prox_u, double mu, int kappa,
              Vec u, std::vector<Vec>* iterates = nullptr);

/// Perturbed outer update: prox_{nu P}(p - nu (grad + d)).
Vec outer_step_perturbed(const Vec& p, const Vec& grad, const Vec& d, double nu,
                         const ProxOperator& prox_p);

/**
 * @brief Runs the bilevel proximal gradient descent loop.
 *
 * Per outer iteration: condense at p, run kappa inner steps (warm-started),
 * estimate the parameter gradient at the new inner iterate, take the
 * (optionally disturbed) outer prox step. Stops when both the outer increment
 * and the inner fixed-point residual fall below stop_tol, or at max_outer.
 * Budget exhaustion is a status, not an error; non-finite iterates abort with
 * Diverged status.
 *
 * When `oracle` is given, rows additionally record Lambda(p), (Jbar+P)(p),
 * omega_u and the gradient-estimate error.
 */
Trace run_bilevel(const ParametrizedModel& model, const ProxOperator& prox_p,
                  const ProxOperator& prox_u, const SolverConfig& cfg,
                  const Vec& p0, const Vec& u0, const Oracle* oracle = nullptr);

}  // namespace bpgd

#endif  // BPGD_SOLVER_HPP_
