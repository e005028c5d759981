#ifndef BPGD_ORACLE_HPP_
#define BPGD_ORACLE_HPP_

#include "bpgd/common.hpp"
#include "bpgd/model.hpp"
#include "bpgd/prox.hpp"

#include <vector>

namespace bpgd {

struct OracleConfig {
  double tol = 1e-12;      ///< fixed-point residual tolerance
  long max_iter = 1000000;
  double fd_step = 1e-5;   ///< step for finite-difference gradients of Jbar
  int multistart = 16;
  std::uint64_t seed = 0;
};

struct InnerSolution {
  Vec u_bar;
  double j_bar = 0.0;  ///< J(u_bar, p) + U(u_bar)
  long iterations = 0;
};

/// Empirical approximation of the optimal parameter set, obtained by
/// clustering multistart endpoints of the exact-gradient outer iteration.
struct OptimalSet {
  std::vector<Vec> candidates;  ///< cluster representatives, sorted by value
  std::vector<double> values;
  double j_star = 0.0;
  double cluster_radius = 1e-6;
  bool isolated = true;  ///< false when stationary endpoints span several clusters
};

/**
 * @brief High-accuracy reference solutions of the inner problem and the
 * exact-gradient outer problem.
 *
 * The inner reference iterates the proximal gradient map until the
 * fixed-point residual reaches `tol` (an active-set polish then sharpens the
 * solution to machine precision where possible). Exhausting max_iter raises
 * OracleError; tolerances are never silently degraded.
 */
class Oracle {
 public:
  Oracle(const ParametrizedModel& model, const ProxOperator& prox_u, OracleConfig cfg);

  /// ubar(p) and Jbar(p). Restarting from ubar(p) takes 0 iterations.
  InnerSolution solve_inner(const Vec& p, const Vec* warm_start = nullptr) const;

  /// Exact value-function gradient: grad_p J at the inner optimum.
  Vec grad_Jbar(const Vec& p, const Vec* warm_start = nullptr) const;

  /// Central finite differences of p -> Jbar(p); independent verification of
  /// grad_Jbar.
  Vec fd_grad_Jbar(const Vec& p) const;

  /// Multistart exact-gradient outer solve; endpoints clustered at radius 1e-6.
  OptimalSet solve_outer(const ProxOperator& prox_p) const;

  /// Max local difference quotient of grad_Jbar over dom P (multi-scale
  /// directional probes); used for automatic outer step-size selection.
  double lipschitz_grad_Jbar(const ProxOperator& prox_p, int samples,
                             std::uint64_t seed) const;

  const OracleConfig& config() const { return cfg_; }
  const ParametrizedModel& model() const { return *model_; }
  const ProxOperator& prox_u() const { return *prox_u_; }

 private:
  const ParametrizedModel* model_;
  const ProxOperator* prox_u_;
  OracleConfig cfg_;
};

/// Componentwise activity pattern of u against the domain of `prox`:
/// 0 free, 1 at lower bound, 2 at upper bound, 3 at zero (L1 part);
/// for a ball, a single entry (0 interior, 1 on the boundary).
std::vector<int> active_pattern(const ProxOperator& prox, const Vec& u);

/// True when the inner active set is unchanged under +-step perturbations of
/// every parameter coordinate; finite differences of Jbar are only trusted at
/// such points.
bool active_set_stable(const Oracle& oracle, const Vec& p, double step);

}  // namespace bpgd

#endif  // BPGD_ORACLE_HPP_
