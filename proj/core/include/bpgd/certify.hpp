#ifndef BPGD_CERTIFY_HPP_
#define BPGD_CERTIFY_HPP_

#include "bpgd/common.hpp"
#include "bpgd/model.hpp"
#include "bpgd/oracle.hpp"
#include "bpgd/prox.hpp"
#include "bpgd/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bpgd {

// ---------------------------------------------------------------------------
// Measurement functions
// ---------------------------------------------------------------------------

/// |u - ubar(p_tilde)|.
double omega_u(const Vec& u, const Vec& p_tilde, const Oracle& oracle);

/// (Jbar + P)(p) - j_star; +infinity outside dom P.
double j_star_fn(const Vec& p, const Oracle& oracle, double j_star_value,
                 const ProxOperator& prox_p);

/// Fixed-point residual of the exact-gradient outer map: |T_nu(p, 0) - p|.
double lambda_fn(const Vec& p, double nu, const ProxOperator& prox_p, const Oracle& oracle);

/// Distance to the candidate optimal set; errors on an empty set.
double dist_to_Pstar(const Vec& p, const OptimalSet& set);

// ---------------------------------------------------------------------------
// Constants and gains
// ---------------------------------------------------------------------------

/// Inner contraction rate: max over sampled p of
/// max(|1 - 2 mu lmin(H(p))|, |1 - 2 mu lmax(H(p))|). Throws when >= 1.
double contraction_rate(const ParametrizedModel& model, const std::vector<Vec>& p_samples,
                        double mu);

/// Empirical Lipschitz constant of ubar(.) on dom P (multi-scale directional
/// quotients over the samples), inflated by safety factor 1.5.
double estimate_lambda_star(const ParametrizedModel& model, const ProxOperator& prox_u,
                            const std::vector<Vec>& p_samples, const Oracle& oracle);

/// Conservative gradient-error bound: F_i = max over samples of
/// 2 |dH/dp_i| max|U| + |dg/dp_i|, combined as sqrt(sum F_i^2).
double estimate_F(const ParametrizedModel& model, const ProxOperator& prox_u,
                  const std::vector<Vec>& p_samples);

struct GammaKappa {
  double alpha_kappa = 0.0;
  double gamma_kappa = 0.0;
};

/// Inner ISS gains with epsilon = (1 - eta^kappa)/2:
/// alpha_kappa = 1 - epsilon, gamma_kappa = lambda_star eta^k (eta^k + 1) / epsilon.
GammaKappa gamma_kappa_gain(double eta, int kappa, double lambda_star);

struct OuterGains {
  double alpha0 = 0.0;
  double gamma0 = 0.0;
  double b1 = 0.0;  ///< lower comparison slope; reported but unused downstream
  double b2 = 0.0;  ///< upper comparison slope Lambda <= b2 Jstar
};

/// Falsification fit of J_star(T_nu(p, d)) <= max(alpha0 J_star(p), gamma0 |d|)
/// over sampled (p, d) with |d| spanning decades, plus the comparison slopes.
/// alpha0 gets a gap-halving margin toward 1 and gamma0, b2 a 1.5 safety factor.
OuterGains estimate_outer_gains(const ParametrizedModel& model, const ProxOperator& prox_p,
                                const ProxOperator& prox_u, double nu, const Oracle& oracle,
                                int samples, double j_star_value, std::uint64_t seed);

struct CompositeGains {
  double a = 0.0;      ///< nu F lambda_star eta^kappa
  double rho = 0.0;    ///< (1 + a)/2
  double theta = 0.0;  ///< 1 + 2a/(1 - a)
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// Increment-recursion constants via the max-splitting rule with
/// delta = (1 - a)/2. Throws when a >= 1 (kappa too small).
CompositeGains composite_gains(double eta, int kappa, double lambda_star, double f_bound,
                               double b2, double alpha0, double gamma0, double nu);

struct SmallGainMargins {
  bool pass = false;
  double margin_a = 0.0;            ///< 1 - nu F lambda_star eta^kappa
  double margin_u_cycle = 0.0;      ///< 1 - gamma2 gamma_kappa
  double margin_jstar_cycle = 0.0;  ///< 1 - gamma0 gamma1 gamma_kappa
};

SmallGainMargins small_gain_check(double a, double gamma_kappa, double gamma0, double gamma1,
                                  double gamma2);

/// Smallest kappa <= kappa_max passing the small-gain check given the
/// kappa-independent constants; -1 when none qualifies.
int min_kappa_from_constants(double eta, double lambda_star, double f_bound, double b2,
                             double alpha0, double gamma0, double nu, int kappa_max);

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

struct Certificate {
  double eta = 0.0;
  double lambda_star = 0.0;
  double f_bound = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double alpha0 = 0.0, gamma0 = 0.0;

  int kappa = 0;  ///< kappa at which the kappa-dependent gains below hold
  double alpha_kappa = 0.0, gamma_kappa = 0.0;
  double a = 0.0, rho = 0.0, theta = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0;

  int k_min = -1;  ///< smallest certified kappa; -1 when none <= kappa_max
  bool certified = false;
  SmallGainMargins margins;

  double mu = 0.0, nu = 0.0;
  double j_star = 0.0;
  std::vector<Vec> p_star;
  bool p_star_isolated = true;

  int domain_sample_count = 0;
  int gain_sample_count = 0;
  int kappa_max = 0;
  std::uint64_t seed = 0;
};

struct CertifyConfig {
  int domain_samples = 128;
  int gain_samples = 64;
  int kappa_max = 400;
  std::optional<int> kappa;  ///< evaluate gains at this kappa; defaults to k_min
  std::uint64_t seed = 0;
};

/// Full certification pipeline: contraction rate, empirical constants, outer
/// gains, minimal kappa, and the small-gain margins at the evaluation kappa.
/// All constants are sampling-based and deterministic given (config, seed);
/// outputs are labeled empirical, not formal bounds.
Certificate certify_problem(const ParametrizedModel& model, const ProxOperator& prox_p,
                            const ProxOperator& prox_u, double mu, double nu,
                            const Oracle& oracle, const CertifyConfig& cfg);

// ---------------------------------------------------------------------------
// Trace verification
// ---------------------------------------------------------------------------

struct CheckResult {
  bool checked = false;
  bool pass = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  int worst_row = -1;
  std::string note;
};

struct IssReport {
  CheckResult eq15_contraction;   ///< inner contraction within logged inner runs
  CheckResult lemma4_dissipation; ///< omega+ <= eta^k omega + lambda* eta^k |dp|
  CheckResult eq19a_omega;        ///< omega max-form ISS step
  CheckResult eq19b_jstar;        ///< J_star max-form ISS step
  CheckResult eq19c_increment;    ///< |dp| <= Lambda + nu F omega (+ nu |d|)
  CheckResult eq20_increment;     ///< increment max-form recursion
  CheckResult def2_envelope;      ///< decay-plus-gain envelope (noise runs)

  bool incomplete = false;       ///< required trace columns missing
  bool certified_kappa = false;  ///< trace kappa >= k_min and small-gain holds at it
  int kappa = 0;
  double envelope_rate = 0.0;
  double envelope_gain = 0.0;
  std::string note;     ///< e.g. step-size mismatch between trace and certificate
  std::string verdict;  ///< "pass" / "fail" over the checked inequalities
};

/// Replays the certified inequalities along a trace. All slacks use an
/// absolute floor of 1e-9. An oracle is only needed for the inner-contraction
/// check on traces with logged inner iterates.
IssReport verify_iss_trace(const Trace& trace, const Certificate& cert,
                           const Oracle* oracle = nullptr);

}  // namespace bpgd

#endif  // BPGD_CERTIFY_HPP_
