#include "bpgd/oracle.hpp"

#include "bpgd/sampling.hpp"
#include "bpgd/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>

namespace bpgd {

namespace {

double strongly_convex_mu(const CondensedQP& qp) {
  Eigen::SelfAdjointEigenSolver<Mat> es(qp.H, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0)) {
    throw CertificationError("oracle: condensed Hessian is not positive definite");
  }
  return 1.0 / (2.0 * lmax);
}

/// Pins converged components at their bound (or zero for the L1 part) and
/// solves the free block of the stationarity system exactly.
std::optional<Vec> active_set_polish(const CondensedQP& qp, const ProxOperator& prox_u,
                                     const Vec& u) {
  if (prox_u.kind() == ProxOperator::Kind::Ball) return std::nullopt;
  const bool l1 = prox_u.kind() == ProxOperator::Kind::BoxL1;
  const int n = static_cast<int>(u.size());
  const Vec& lo = prox_u.lo();
  const Vec& hi = prox_u.hi();

  Vec pinned = u;
  std::vector<int> free_idx;
  free_idx.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double tol_i = 1e-11 * (1.0 + std::max(std::abs(lo[i]), std::abs(hi[i])));
    if (u[i] <= lo[i] + tol_i) {
      pinned[i] = lo[i];
    } else if (u[i] >= hi[i] - tol_i) {
      pinned[i] = hi[i];
    } else if (l1 && prox_u.weight()[i] > 0 && std::abs(u[i]) <= tol_i) {
      pinned[i] = 0.0;
    } else {
      free_idx.push_back(i);
    }
  }
  if (free_idx.empty()) return pinned;

  const int nf = static_cast<int>(free_idx.size());
  Mat Hff(nf, nf);
  Vec rhs(nf);
  for (int a = 0; a < nf; ++a) {
    const int i = free_idx[a];
    double r = -qp.g[i];
    if (l1) r -= prox_u.weight()[i] * (u[i] > 0 ? 1.0 : -1.0);
    for (int j = 0; j < n; ++j) r -= 2.0 * qp.H(i, j) * pinned[j];
    for (int b = 0; b < nf; ++b) {
      const int j = free_idx[b];
      Hff(a, b) = 2.0 * qp.H(i, j);
      r += 2.0 * qp.H(i, j) * pinned[j];  // free columns are unknowns, not pinned
    }
    rhs[a] = r;
  }
  Eigen::LLT<Mat> llt(Hff);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Vec uf = llt.solve(rhs);

  Vec out = pinned;
  for (int a = 0; a < nf; ++a) out[free_idx[a]] = uf[a];
  return out;
}

}  // namespace

Oracle::Oracle(const ParametrizedModel& model, const ProxOperator& prox_u, OracleConfig cfg)
    : model_(&model), prox_u_(&prox_u), cfg_(cfg) {
  if (!(cfg_.tol > 0)) throw std::invalid_argument("oracle: tol must be positive");
  if (cfg_.multistart < 1) throw std::invalid_argument("oracle: multistart must be >= 1");
}

InnerSolution Oracle::solve_inner(const Vec& p, const Vec* warm_start) const {
  const CondensedQP qp = condense(*model_, p);
  const double mu = strongly_convex_mu(qp);

  Vec u;
  if (warm_start != nullptr && warm_start->size() == qp.g.size() && warm_start->allFinite()) {
    u = *warm_start;
  } else {
    u = prox_u_->project(Vec::Zero(qp.g.size()));
  }

  long it = 0;
  double resid = 0.0;
  for (;; ++it) {
    const Vec un = inner_step(qp, *prox_u_, mu, u);
    resid = (un - u).norm();
    if (resid <= cfg_.tol) break;
    if (it >= cfg_.max_iter) {
      throw OracleError("oracle: inner solve exhausted max_iter at residual " +
                        std::to_string(resid));
    }
    u = un;
  }

  // Sharpen to machine precision when the active pattern is identified.
  if (auto polished = active_set_polish(qp, *prox_u_, u)) {
    const Vec up = inner_step(qp, *prox_u_, mu, *polished);
    if ((up - *polished).norm() <= resid) u = *polished;
  }

  InnerSolution sol;
  sol.u_bar = std::move(u);
  sol.j_bar = qp.eval(sol.u_bar) + prox_u_->value(sol.u_bar);
  sol.iterations = it;
  return sol;
}

Vec Oracle::grad_Jbar(const Vec& p, const Vec* warm_start) const {
  return grad_p(*model_, p, solve_inner(p, warm_start).u_bar);
}

Vec Oracle::fd_grad_Jbar(const Vec& p) const {
  const InnerSolution center = solve_inner(p);
  const double h = cfg_.fd_step;
  Vec g(model_->l);
  for (int i = 0; i < model_->l; ++i) {
    Vec pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    const double jp = solve_inner(pp, &center.u_bar).j_bar;
    const double jm = solve_inner(pm, &center.u_bar).j_bar;
    g[i] = (jp - jm) / (2.0 * h);
  }
  return g;
}

OptimalSet Oracle::solve_outer(const ProxOperator& prox_p) const {
  const double lip = lipschitz_grad_Jbar(prox_p, 64, derive_seed(cfg_.seed, "oracle-outer-lip"));
  const double nu = 1.0 / std::max(2.0 * lip, 1e-6);

  const auto starts = domain_samples(prox_p, cfg_.multistart, derive_seed(cfg_.seed, "oracle-multistart"));

  std::vector<Vec> endpoints;
  std::vector<double> values;
  std::vector<int> failed;
  for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
    Vec p = starts[s];
    Vec u_warm;
    bool reached = false;
    for (long it = 0; it < cfg_.max_iter; ++it) {
      const InnerSolution sol = solve_inner(p, u_warm.size() ? &u_warm : nullptr);
      u_warm = sol.u_bar;
      const Vec g = grad_p(*model_, p, sol.u_bar);
      const Vec pn = prox_p.apply(nu, p - nu * g);
      const double lambda = (pn - p).norm();
      if (lambda <= cfg_.tol) {
        endpoints.push_back(p);
        values.push_back(sol.j_bar + prox_p.value(p));
        reached = true;
        break;
      }
      p = pn;
    }
    if (!reached) failed.push_back(s);
  }
  if (!failed.empty()) {
    throw OracleError("oracle: " + std::to_string(failed.size()) + " of " +
                      std::to_string(starts.size()) +
                      " outer starts did not reach the fixed-point tolerance");
  }

  // Cluster endpoints, best value first; representatives are the first (and
  // thus lowest-value) member of each cluster.
  std::vector<int> order(endpoints.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return std::lexicographical_compare(endpoints[a].data(), endpoints[a].data() + endpoints[a].size(),
                                        endpoints[b].data(), endpoints[b].data() + endpoints[b].size());
  });

  OptimalSet set;
  set.cluster_radius = 1e-6;
  for (int idx : order) {
    bool merged = false;
    for (const Vec& rep : set.candidates) {
      if ((endpoints[idx] - rep).norm() <= set.cluster_radius) {
        merged = true;
        break;
      }
    }
    if (!merged) {
      set.candidates.push_back(endpoints[idx]);
      set.values.push_back(values[idx]);
    }
  }
  set.j_star = set.values.front();
  set.isolated = set.candidates.size() == 1;
  return set;
}

std::vector<int> active_pattern(const ProxOperator& prox, const Vec& u) {
  std::vector<int> pat;
  if (prox.kind() == ProxOperator::Kind::Ball) {
    pat.push_back((u - prox.center()).norm() >= prox.radius() - 1e-7 ? 1 : 0);
    return pat;
  }
  const bool l1 = prox.kind() == ProxOperator::Kind::BoxL1;
  pat.resize(u.size(), 0);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double tol_i =
        1e-7 * (1.0 + std::max(std::abs(prox.lo()[i]), std::abs(prox.hi()[i])));
    if (u[i] <= prox.lo()[i] + tol_i) {
      pat[i] = 1;
    } else if (u[i] >= prox.hi()[i] - tol_i) {
      pat[i] = 2;
    } else if (l1 && prox.weight()[i] > 0 && std::abs(u[i]) <= tol_i) {
      pat[i] = 3;
    }
  }
  return pat;
}

bool active_set_stable(const Oracle& oracle, const Vec& p, double step) {
  const InnerSolution center = oracle.solve_inner(p);
  const auto ref = active_pattern(oracle.prox_u(), center.u_bar);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (double sgn : {1.0, -1.0}) {
      Vec q = p;
      q[i] += sgn * step;
      const InnerSolution sol = oracle.solve_inner(q, &center.u_bar);
      if (active_pattern(oracle.prox_u(), sol.u_bar) != ref) return false;
    }
  }
  return true;
}

double Oracle::lipschitz_grad_Jbar(const ProxOperator& prox_p, int samples,
                                   std::uint64_t seed) const {
  const auto base = domain_samples(prox_p, samples, seed);
  const double span = std::max(prox_p.domain_diameter(), 1e-3);
  const double scales[] = {1e-3 * span, 1e-2 * span, 1e-1 * span};

  double lip = 0.0;
  Vec u_warm;
  Vec g_prev;
  Vec p_prev;
  for (const Vec& p0 : base) {
    InnerSolution sol = solve_inner(p0, u_warm.size() ? &u_warm : nullptr);
    u_warm = sol.u_bar;
    const Vec g0 = grad_p(*model_, p0, sol.u_bar);
    if (p_prev.size()) {
      const double dist = (p0 - p_prev).norm();
      if (dist > 1e-12) lip = std::max(lip, (g0 - g_prev).norm() / dist);
    }
    p_prev = p0;
    g_prev = g0;
    for (double h : scales) {
      for (int i = 0; i < model_->l; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vec p1 = p0;
          p1[i] += sgn * h;
          const Vec g1 = grad_Jbar(p1, &u_warm);
          lip = std::max(lip, (g1 - g0).norm() / h);
        }
      }
    }
  }
  return lip;
}

}  // namespace bpgd
