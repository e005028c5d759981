#include "bpgd/solver.hpp"

#include "bpgd/oracle.hpp"
#include "bpgd/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace bpgd {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIterations: return "max_outer";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

StepSizes step_sizes(const ParametrizedModel& model, const ProxOperator& prox_p,
                     const ProxOperator& prox_u, int grid, std::uint64_t seed,
                     const OracleConfig& oracle_cfg) {
  if (grid < 1) throw std::invalid_argument("step_sizes: grid must be >= 1");
  if (prox_p.dim() != model.l) throw std::invalid_argument("step_sizes: prox_p dimension mismatch");

  const auto samples = domain_samples(prox_p, grid, derive_seed(seed, "step-sizes-domain"));
  if (samples.empty()) throw CertificationError("step_sizes: empty parameter domain sample");

  double l_u = 0.0;
  for (const Vec& p : samples) {
    const CondensedQP qp = condense(model, p);
    Eigen::SelfAdjointEigenSolver<Mat> es(qp.H, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0)) {
      throw CertificationError("step_sizes: H(p) is not positive definite at a sampled p");
    }
    l_u = std::max(l_u, 2.0 * es.eigenvalues().maxCoeff());
  }

  Oracle oracle(model, prox_u, oracle_cfg);
  const double l_p = oracle.lipschitz_grad_Jbar(prox_p, std::min(grid, 32),
                                                derive_seed(seed, "step-sizes-lip"));

  StepSizes out;
  out.lipschitz_u = l_u;
  out.lipschitz_p = l_p;
  out.mu = 1.0 / l_u;
  out.nu = 1.0 / std::max(2.0 * l_p, 1e-6);  // safety factor 2; capped when grad Jbar is constant
  return out;
}

Vec inner_step(const CondensedQP& qp, const ProxOperator& prox_u, double mu, const Vec& u) {
  if (!(mu > 0)) throw std::invalid_argument("inner_step: mu must be positive");
  return prox_u.apply(mu, u - mu * (2.0 * (qp.H * u) + qp.g));
}

Vec run_inner(const CondensedQP& qp, const ProxOperator& prox_u, double mu, int kappa,
              Vec u, std::vector<Vec>* iterates) {
  if (kappa < 1) throw std::invalid_argument("run_inner: kappa must be >= 1");
  if (iterates != nullptr) {
    iterates->clear();
    iterates->push_back(u);
  }
  for (int k = 0; k < kappa; ++k) {
    u = inner_step(qp, prox_u, mu, u);
    if (iterates != nullptr) iterates->push_back(u);
  }
  return u;
}

Vec outer_step_perturbed(const Vec& p, const Vec& grad, const Vec& d, double nu,
                         const ProxOperator& prox_p) {
  if (!(nu > 0)) throw std::invalid_argument("outer_step_perturbed: nu must be positive");
  if (grad.size() != p.size() || d.size() != p.size()) {
    throw std::invalid_argument("outer_step_perturbed: dimension mismatch");
  }
  return prox_p.apply(nu, p - nu * (grad + d));
}

namespace {

Vec draw_noise(const NoiseSpec& spec, int dim, std::mt19937_64& rng) {
  switch (spec.kind) {
    case NoiseSpec::Kind::UniformBall:
      return sample_ball(dim, spec.amplitude, rng);
    case NoiseSpec::Kind::ConstantVector: {
      Vec dir = spec.direction.size() == dim ? spec.direction : Vec::Ones(dim);
      const double n = dir.norm();
      if (n == 0.0) return Vec::Zero(dim);
      return (spec.amplitude / n) * dir;
    }
  }
  return Vec::Zero(dim);
}

bool finite_state(const Vec& p, const Vec& u) {
  return p.allFinite() && u.allFinite() && p.norm() <= 1e12 && u.norm() <= 1e12;
}

}  // namespace

Trace run_bilevel(const ParametrizedModel& model, const ProxOperator& prox_p,
                  const ProxOperator& prox_u, const SolverConfig& cfg,
                  const Vec& p0, const Vec& u0, const Oracle* oracle) {
  if (!(cfg.mu > 0) || !(cfg.nu > 0)) {
    throw std::invalid_argument("run_bilevel: mu and nu must be positive (resolve them first)");
  }
  if (cfg.kappa < 1) throw std::invalid_argument("run_bilevel: kappa must be >= 1");
  if (p0.size() != model.l) throw std::invalid_argument("run_bilevel: p0 must have length l");
  if (u0.size() != static_cast<Eigen::Index>(model.N) * model.m) {
    throw std::invalid_argument("run_bilevel: u0 must have length N*m");
  }

  Trace tr;
  tr.mu = cfg.mu;
  tr.nu = cfg.nu;
  tr.kappa = cfg.kappa;
  tr.stop_tol = cfg.stop_tol;
  tr.warm_start = cfg.warm_start;
  tr.param_dim = model.l;
  tr.oracle_attached = oracle != nullptr;

  const bool use_noise = cfg.noise.has_value() && cfg.noise->amplitude > 0;
  std::mt19937_64 noise_rng(use_noise ? cfg.noise->seed : 0);

  BilevelState st;
  st.p = p0;
  st.p_prev = p0;  // p_tilde_0 = p^0 by convention
  st.u = u0;
  Vec ubar_prev;  // ubar(p_tilde), carried between iterations
  RunStatus status = RunStatus::MaxIterations;
  bool done = false;

  while (true) {
    TraceRow row;
    row.ell = st.ell;
    row.p = st.p;
    row.u = st.u;
    row.dp_norm = (st.p - st.p_prev).norm();

    InnerSolution here;
    Vec grad_exact;
    if (oracle != nullptr) {
      here = oracle->solve_inner(st.p, st.u.allFinite() ? &st.u : nullptr);
      if (st.ell == 0) ubar_prev = here.u_bar;
      row.omega_u = (st.u - ubar_prev).norm();
      row.cost_outer = here.j_bar + prox_p.value(st.p);
      grad_exact = grad_p(model, st.p, here.u_bar);
      row.lambda_p =
          (outer_step_perturbed(st.p, grad_exact, Vec::Zero(model.l), cfg.nu, prox_p) - st.p)
              .norm();
    }

    if (done || st.ell >= cfg.max_outer) {
      row.status = to_string(status);
      tr.rows.push_back(std::move(row));
      break;
    }

    const CondensedQP qp = condense(model, st.p);
    std::vector<Vec> iterates;
    const Vec u_next = run_inner(qp, prox_u, cfg.mu, cfg.kappa, cfg.warm_start ? st.u : u0,
                                 cfg.log_inner ? &iterates : nullptr);
    row.inner_iterates = std::move(iterates);

    const Vec grad_est = grad_p(model, st.p, u_next);
    if (oracle != nullptr) row.grad_err = (grad_est - grad_exact).norm();

    Vec d = Vec::Zero(model.l);
    if (use_noise) d = draw_noise(*cfg.noise, model.l, noise_rng);
    row.d_norm = d.norm();
    row.d = d;

    const Vec p_next = outer_step_perturbed(st.p, grad_est, d, cfg.nu, prox_p);

    if (!finite_state(p_next, u_next)) {
      status = RunStatus::Diverged;
      row.status = to_string(status);
      tr.rows.push_back(std::move(row));
      break;
    }

    const double inner_resid = (inner_step(qp, prox_u, cfg.mu, u_next) - u_next).norm();
    tr.final_inner_residual = inner_resid;
    const double dp = (p_next - st.p).norm();

    tr.rows.push_back(std::move(row));
    st.u = u_next;
    st.p_prev = st.p;
    st.p = p_next;
    if (oracle != nullptr) ubar_prev = here.u_bar;
    ++st.ell;

    if (dp <= cfg.stop_tol && inner_resid <= cfg.stop_tol) {
      status = RunStatus::Converged;
      done = true;
    }
  }

  tr.status = status;
  return tr;
}

}  // namespace bpgd
