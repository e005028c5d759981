#ifndef BPGD_MODEL_HPP_
#define BPGD_MODEL_HPP_

#include "bpgd/common.hpp"

#include <vector>

namespace bpgd {

/**
 * @brief Finite-horizon linear-quadratic optimal control problem whose
 * dynamics depend affinely on a design parameter p.
 *
 * Dynamics: x_{k+1} = A(p) x_k + B(p) u_k + e(p), k = 0..N-1, with
 * A(p) = A[0] + sum_i p_i A[i] (same for B, e). Stage cost weights Q, R and
 * terminal weight S are constant in p; R must be positive definite and Q, S
 * positive semidefinite.
 */
struct ParametrizedModel {
  int n = 0;  ///< state dimension
  int m = 0;  ///< input dimension
  int l = 0;  ///< parameter dimension
  int N = 0;  ///< horizon length

  Vec x0;

  std::vector<Mat> A;  ///< l+1 coefficient matrices, n x n
  std::vector<Mat> B;  ///< l+1 coefficient matrices, n x m
  std::vector<Vec> e;  ///< l+1 coefficient vectors, length n

  Mat Q, R, S;

  /// Set by `special_case`: dynamics x+ = A x + B u + E p with constant A, B,
  /// enabling the closed-form parameter gradient.
  bool analytic_param_gradient = false;
  Mat E;  ///< n x l, only meaningful when analytic_param_gradient is set

  Mat eval_A(const Vec& p) const;
  Mat eval_B(const Vec& p) const;
  Vec eval_e(const Vec& p) const;
};

/// Validates dimensions and definiteness and returns the model.
ParametrizedModel make_model(int n, int m, int l, int N, Vec x0,
                             std::vector<Mat> A, std::vector<Mat> B, std::vector<Vec> e,
                             Mat Q, Mat R, Mat S);

/// Builds the additive-parameter model x+ = A x + B u + E p with weights
/// constant in p; flags it for the closed-form parameter gradient.
ParametrizedModel special_case(const Mat& A, const Mat& B, const Mat& E,
                               const Mat& Q, const Mat& R, const Mat& S,
                               int N, const Vec& x0);

/**
 * @brief Condensed form of the control cost at a fixed parameter:
 * J(u) = u' H u + g' u + c (note: no 1/2 on the quadratic term, so the
 * gradient in u is 2 H u + g).
 */
struct CondensedQP {
  Mat H;
  Vec g;
  double c = 0;
  Vec at_p;

  double eval(const Vec& u) const { return u.dot(H * u) + g.dot(u) + c; }
};

/// Eliminates the states by forward recursion and returns the condensed cost.
CondensedQP condense(const ParametrizedModel& model, const Vec& p);

/// Simulates the dynamics and accumulates the cost directly; the independent
/// reference for `condense`.
double eval_cost_rollout(const ParametrizedModel& model, const Vec& p, const Vec& u);

/// Gradient of the condensed cost in u: 2 H u + g.
Vec grad_u(const CondensedQP& qp, const Vec& u);

/// Partial gradient of J(u, p) in p with u held fixed. Central finite
/// differences of the condensed cost in general; closed form for models
/// built by `special_case`.
Vec grad_p(const ParametrizedModel& model, const Vec& p, const Vec& u);

}  // namespace bpgd

#endif  // BPGD_MODEL_HPP_
