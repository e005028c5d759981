#include "bpgd/certify.hpp"

#include "bpgd/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace bpgd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlackTol = 1e-9;

double spectral_norm_sym(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double omega_u(const Vec& u, const Vec& p_tilde, const Oracle& oracle) {
  return (u - oracle.solve_inner(p_tilde).u_bar).norm();
}

double j_star_fn(const Vec& p, const Oracle& oracle, double j_star_value,
                 const ProxOperator& prox_p) {
  const double penalty = prox_p.value(p);
  if (std::isinf(penalty)) return kInf;
  return oracle.solve_inner(p).j_bar + penalty - j_star_value;
}

double lambda_fn(const Vec& p, double nu, const ProxOperator& prox_p, const Oracle& oracle) {
  const Vec g = oracle.grad_Jbar(p);
  return (prox_p.apply(nu, p - nu * g) - p).norm();
}

double dist_to_Pstar(const Vec& p, const OptimalSet& set) {
  if (set.candidates.empty()) throw std::invalid_argument("dist_to_Pstar: empty optimal set");
  double best = kInf;
  for (const Vec& c : set.candidates) best = std::min(best, (p - c).norm());
  return best;
}

double contraction_rate(const ParametrizedModel& model, const std::vector<Vec>& p_samples,
                        double mu) {
  if (p_samples.empty()) throw std::invalid_argument("contraction_rate: no samples");
  if (!(mu > 0)) throw std::invalid_argument("contraction_rate: mu must be positive");
  double eta = 0.0;
  for (const Vec& p : p_samples) {
    const CondensedQP qp = condense(model, p);
    Eigen::SelfAdjointEigenSolver<Mat> es(qp.H, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0)) {
      throw CertificationError("contraction_rate: H(p) not positive definite at a sample");
    }
    eta = std::max(eta, std::max(std::abs(1.0 - 2.0 * mu * lmin), std::abs(1.0 - 2.0 * mu * lmax)));
  }
  if (eta >= 1.0) {
    throw CertificationError("contraction_rate: eta >= 1, step size violates the contraction condition");
  }
  return eta;
}

double estimate_lambda_star(const ParametrizedModel& model, const ProxOperator& prox_u,
                            const std::vector<Vec>& p_samples, const Oracle& oracle) {
  if (p_samples.empty()) throw std::invalid_argument("estimate_lambda_star: no samples");
  if (prox_u.dim() != model.N * model.m) {
    throw std::invalid_argument("estimate_lambda_star: prox_u dimension mismatch");
  }
  double span = 0.0;
  for (size_t i = 1; i < p_samples.size(); ++i) {
    span = std::max(span, (p_samples[i] - p_samples[0]).norm());
  }
  span = std::max(span, 1e-3);
  const double scales[] = {1e-3 * span, 1e-2 * span, 1e-1 * span};

  double quot = 0.0;
  Vec warm;
  Vec prev_p, prev_u;
  for (const Vec& p0 : p_samples) {
    const InnerSolution sol = oracle.solve_inner(p0, warm.size() ? &warm : nullptr);
    warm = sol.u_bar;
    if (prev_p.size()) {
      const double dist = (p0 - prev_p).norm();
      if (dist > 1e-12) quot = std::max(quot, (sol.u_bar - prev_u).norm() / dist);
    }
    prev_p = p0;
    prev_u = sol.u_bar;
    for (double h : scales) {
      for (int i = 0; i < model.l; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vec p1 = p0;
          p1[i] += sgn * h;
          const Vec u1 = oracle.solve_inner(p1, &warm).u_bar;
          quot = std::max(quot, (u1 - sol.u_bar).norm() / h);
        }
      }
    }
  }
  return 1.5 * quot;  // safety factor over the sampled quotients
}

double estimate_F(const ParametrizedModel& model, const ProxOperator& prox_u,
                  const std::vector<Vec>& p_samples) {
  if (p_samples.empty()) throw std::invalid_argument("estimate_F: no samples");
  const double u_max = prox_u.domain_max_norm();
  Vec f_i = Vec::Zero(model.l);
  for (const Vec& p : p_samples) {
    for (int i = 0; i < model.l; ++i) {
      const double h = std::max(1e-6, 1e-6 * std::abs(p[i]));
      Vec pp = p, pm = p;
      pp[i] += h;
      pm[i] -= h;
      const CondensedQP qpp = condense(model, pp);
      const CondensedQP qpm = condense(model, pm);
      const double dh_norm = spectral_norm_sym((qpp.H - qpm.H) / (2.0 * h));
      const double dg_norm = ((qpp.g - qpm.g) / (2.0 * h)).norm();
      f_i[i] = std::max(f_i[i], 2.0 * dh_norm * u_max + dg_norm);
    }
  }
  return f_i.norm() * (1.0 + 1e-6);  // tiny guard against finite-difference roundoff
}

GammaKappa gamma_kappa_gain(double eta, int kappa, double lambda_star) {
  if (!(eta >= 0.0) || eta >= 1.0) {
    throw CertificationError("gamma_kappa_gain: requires eta in [0, 1)");
  }
  if (kappa < 1) throw std::invalid_argument("gamma_kappa_gain: kappa must be >= 1");
  if (lambda_star < 0) throw std::invalid_argument("gamma_kappa_gain: lambda_star must be >= 0");
  const double ek = std::pow(eta, kappa);
  const double eps = 0.5 * (1.0 - ek);
  GammaKappa out;
  out.alpha_kappa = 1.0 - eps;
  out.gamma_kappa = lambda_star * ek * (ek + 1.0) / (1.0 - ek - eps);
  return out;
}

OuterGains estimate_outer_gains(const ParametrizedModel& model, const ProxOperator& prox_p,
                                const ProxOperator& prox_u, double nu, const Oracle& oracle,
                                int samples, double j_star_value, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("estimate_outer_gains: need at least 2 samples");
  if (!(nu > 0)) throw std::invalid_argument("estimate_outer_gains: nu must be positive");
  if (prox_u.dim() != model.N * model.m) {
    throw std::invalid_argument("estimate_outer_gains: prox_u dimension mismatch");
  }

  const auto ps = domain_samples(prox_p, samples, derive_seed(seed, "outer-gain-domain"));
  std::mt19937_64 rng(derive_seed(seed, "outer-gain-noise"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double mags[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};

  struct NoisySample {
    double v_next, jsp, d_norm;
  };
  std::vector<NoisySample> noisy;
  noisy.reserve(ps.size() * std::size(mags));

  double alpha_fit = 0.0;
  double b2_fit = 0.0;
  double b1_fit = kInf;
  Vec warm;

  auto jstar_at = [&](const Vec& q) {
    const InnerSolution s = oracle.solve_inner(q, warm.size() ? &warm : nullptr);
    return s.j_bar + prox_p.value(q) - j_star_value;
  };

  for (const Vec& p : ps) {
    const InnerSolution sol = oracle.solve_inner(p, warm.size() ? &warm : nullptr);
    warm = sol.u_bar;
    const double jsp = sol.j_bar + prox_p.value(p) - j_star_value;
    const Vec g = grad_p(model, p, sol.u_bar);

    const Vec t0 = prox_p.apply(nu, p - nu * g);
    const double lam = (t0 - p).norm();
    const double v0 = jstar_at(t0);

    if (jsp >= 1e-8) {  // exclude near-optimal points from ratio fits
      alpha_fit = std::max(alpha_fit, v0 / jsp);
      b2_fit = std::max(b2_fit, lam / jsp);
      b1_fit = std::min(b1_fit, lam / jsp);
    }

    for (double mag : mags) {
      Vec dir(model.l);
      for (int i = 0; i < model.l; ++i) dir[i] = gauss(rng);
      const double dn = dir.norm();
      if (dn == 0.0) continue;
      const Vec d = (mag / dn) * dir;
      const Vec td = prox_p.apply(nu, p - nu * (g + d));
      noisy.push_back({jstar_at(td), jsp, mag});
    }
  }

  if (alpha_fit >= 1.0) {
    throw CertificationError("estimate_outer_gains: no strict descent on samples (alpha0 >= 1)");
  }
  OuterGains og;
  // Halve the gap to 1 so the fitted branch also covers unsampled points.
  og.alpha0 = std::min(0.5 * (1.0 + alpha_fit), 0.9999);

  double gamma_fit = 0.0;
  for (const NoisySample& s : noisy) {
    const double alpha_branch = std::isfinite(s.jsp) ? og.alpha0 * s.jsp : kInf;
    if (s.v_next > alpha_branch) gamma_fit = std::max(gamma_fit, s.v_next / s.d_norm);
  }
  og.gamma0 = std::max(1.5 * gamma_fit, 1e-8);
  og.b2 = 1.5 * b2_fit;
  og.b1 = std::isfinite(b1_fit) ? b1_fit : 0.0;
  return og;
}

CompositeGains composite_gains(double eta, int kappa, double lambda_star, double f_bound,
                               double b2, double alpha0, double gamma0, double nu) {
  if (!(gamma0 > 0)) throw std::invalid_argument("composite_gains: gamma0 must be positive");
  const double ek = std::pow(eta, kappa);
  CompositeGains cg;
  cg.a = nu * f_bound * lambda_star * ek;
  if (cg.a >= 1.0) {
    throw CertificationError("composite_gains: kappa too small (nu*F*lambda*eta^kappa >= 1)");
  }
  const double delta = 0.5 * (1.0 - cg.a);
  cg.rho = cg.a + delta;
  cg.theta = 1.0 + cg.a / delta;
  cg.gamma1 = cg.theta * (b2 + nu * ek / gamma0) * alpha0;
  cg.gamma2 = cg.theta * (nu * ek + b2 * gamma0) * f_bound;
  return cg;
}

SmallGainMargins small_gain_check(double a, double gamma_kappa, double gamma0, double gamma1,
                                  double gamma2) {
  SmallGainMargins m;
  m.margin_a = 1.0 - a;
  m.margin_u_cycle = 1.0 - gamma2 * gamma_kappa;
  m.margin_jstar_cycle = 1.0 - gamma0 * gamma1 * gamma_kappa;
  m.pass = m.margin_a > 0 && m.margin_u_cycle > 0 && m.margin_jstar_cycle > 0 &&
           std::isfinite(gamma1) && std::isfinite(gamma2);
  return m;
}

int min_kappa_from_constants(double eta, double lambda_star, double f_bound, double b2,
                             double alpha0, double gamma0, double nu, int kappa_max) {
  if (!(eta >= 0.0) || eta >= 1.0) {
    throw CertificationError("min_kappa: requires eta in [0, 1)");
  }
  for (int kappa = 1; kappa <= kappa_max; ++kappa) {
    const double a = nu * f_bound * lambda_star * std::pow(eta, kappa);
    if (a >= 1.0) continue;
    const GammaKappa gk = gamma_kappa_gain(eta, kappa, lambda_star);
    const CompositeGains cg =
        composite_gains(eta, kappa, lambda_star, f_bound, b2, alpha0, gamma0, nu);
    if (small_gain_check(cg.a, gk.gamma_kappa, gamma0, cg.gamma1, cg.gamma2).pass) {
      return kappa;
    }
  }
  return -1;
}

Certificate certify_problem(const ParametrizedModel& model, const ProxOperator& prox_p,
                            const ProxOperator& prox_u, double mu, double nu,
                            const Oracle& oracle, const CertifyConfig& cfg) {
  Certificate c;
  c.mu = mu;
  c.nu = nu;
  c.seed = cfg.seed;
  c.kappa_max = cfg.kappa_max;
  c.domain_sample_count = cfg.domain_samples;
  c.gain_sample_count = cfg.gain_samples;

  const auto ps = domain_samples(prox_p, cfg.domain_samples, derive_seed(cfg.seed, "certify-domain"));
  c.eta = contraction_rate(model, ps, mu);
  c.lambda_star = estimate_lambda_star(model, prox_u, ps, oracle);
  c.f_bound = estimate_F(model, prox_u, ps);

  const OptimalSet oset = oracle.solve_outer(prox_p);
  c.j_star = oset.j_star;
  c.p_star = oset.candidates;
  c.p_star_isolated = oset.isolated;

  const OuterGains og = estimate_outer_gains(model, prox_p, prox_u, nu, oracle,
                                             cfg.gain_samples, oset.j_star, cfg.seed);
  c.alpha0 = og.alpha0;
  c.gamma0 = og.gamma0;
  c.b1 = og.b1;
  c.b2 = og.b2;

  c.k_min = min_kappa_from_constants(c.eta, c.lambda_star, c.f_bound, c.b2, c.alpha0,
                                     c.gamma0, nu, cfg.kappa_max);
  c.kappa = cfg.kappa.value_or(c.k_min > 0 ? c.k_min : cfg.kappa_max);

  const GammaKappa gk = gamma_kappa_gain(c.eta, c.kappa, c.lambda_star);
  c.alpha_kappa = gk.alpha_kappa;
  c.gamma_kappa = gk.gamma_kappa;
  try {
    const CompositeGains cg = composite_gains(c.eta, c.kappa, c.lambda_star, c.f_bound,
                                              c.b2, c.alpha0, c.gamma0, nu);
    c.a = cg.a;
    c.rho = cg.rho;
    c.theta = cg.theta;
    c.gamma1 = cg.gamma1;
    c.gamma2 = cg.gamma2;
    c.margins = small_gain_check(c.a, c.gamma_kappa, c.gamma0, c.gamma1, c.gamma2);
  } catch (const CertificationError&) {
    c.a = nu * c.f_bound * c.lambda_star * std::pow(c.eta, c.kappa);
    c.rho = c.theta = c.gamma1 = c.gamma2 = kInf;
    c.margins.pass = false;
    c.margins.margin_a = 1.0 - c.a;
    c.margins.margin_u_cycle = -kInf;
    c.margins.margin_jstar_cycle = -kInf;
  }
  c.certified = c.margins.pass;
  return c;
}

// ---------------------------------------------------------------------------
// Trace verification
// ---------------------------------------------------------------------------

namespace {

struct SlackAcc {
  CheckResult res;

  void add(double slack, int row) {
    res.checked = true;
    if (slack < res.worst_slack) {
      res.worst_slack = slack;
      res.worst_row = row;
    }
  }

  CheckResult finish() {
    res.pass = !res.checked || res.worst_slack >= -kSlackTol;
    return res;
  }
};

double slack_against(double bound, double lhs) {
  if (std::isinf(bound) && bound > 0) return kInf;
  return bound - lhs;
}

}  // namespace

IssReport verify_iss_trace(const Trace& trace, const Certificate& cert, const Oracle* oracle) {
  IssReport rep;
  rep.kappa = trace.kappa;
  rep.certified_kappa = cert.k_min > 0 && trace.kappa >= cert.k_min;

  const auto& rows = trace.rows;
  const int R = static_cast<int>(rows.size());
  if (R == 0) {
    rep.incomplete = true;
    rep.verdict = "incomplete";
    return rep;
  }

  bool have_omega = true, have_cost = true, have_lambda = true, have_d = true;
  for (int r = 0; r < R; ++r) {
    have_omega = have_omega && rows[r].omega_u.has_value();
    have_cost = have_cost && rows[r].cost_outer.has_value();
    have_lambda = have_lambda && rows[r].lambda_p.has_value();
    if (r + 1 < R) have_d = have_d && rows[r].d_norm.has_value();
  }
  rep.incomplete = !(have_omega && have_cost && have_lambda && have_d);

  if (trace.nu > 0 && std::abs(trace.nu - cert.nu) > 1e-12 * (1.0 + std::abs(cert.nu))) {
    rep.note = "trace nu differs from certificate nu; nu-dependent bounds use the certificate";
  }

  const double eta = cert.eta;
  const double nu = cert.nu;
  const double ek = std::pow(eta, trace.kappa);

  GammaKappa gk;
  bool have_gk = false;
  try {
    gk = gamma_kappa_gain(eta, trace.kappa, cert.lambda_star);
    have_gk = true;
  } catch (const std::exception&) {
  }
  CompositeGains cg;
  bool have_cg = false;
  try {
    cg = composite_gains(eta, trace.kappa, cert.lambda_star, cert.f_bound, cert.b2,
                         cert.alpha0, cert.gamma0, nu);
    have_cg = true;
  } catch (const std::exception&) {
  }

  const auto omega = [&](int r) { return *rows[r].omega_u; };
  const auto jst = [&](int r) { return *rows[r].cost_outer - cert.j_star; };
  const auto dpn = [&](int r) { return rows[r].dp_norm; };
  const auto dno = [&](int r) { return rows[r].d_norm.value_or(0.0); };

  bool noisy = false;
  for (int r = 0; r < R; ++r) noisy = noisy || dno(r) > 0.0;

  // Inner contraction along logged inner runs.
  {
    SlackAcc acc;
    bool any_logged = false;
    for (int r = 0; r < R; ++r) any_logged = any_logged || !rows[r].inner_iterates.empty();
    if (!any_logged) {
      acc.res.note = "no inner iterates logged";
    } else if (oracle == nullptr) {
      acc.res.note = "oracle required to evaluate logged inner iterates";
    } else {
      for (int r = 0; r < R; ++r) {
        const auto& its = rows[r].inner_iterates;
        if (its.empty()) continue;
        const Vec ub = oracle->solve_inner(rows[r].p, &its.back()).u_bar;
        const double w0 = (its.front() - ub).norm();
        for (size_t k = 0; k < its.size(); ++k) {
          const double wk = (its[k] - ub).norm();
          acc.add(std::pow(eta, static_cast<double>(k)) * w0 * (1.0 + 1e-9) - wk, r);
        }
      }
    }
    rep.eq15_contraction = acc.finish();
  }

  // The u-recursion checks presume warm starts (u^{l+1} produced from u^l).
  const bool recursion_ok = trace.warm_start;

  {
    SlackAcc acc;
    if (!recursion_ok) {
      acc.res.note = "skipped: cold-start trace";
    } else if (have_omega) {
      for (int r = 1; r < R; ++r) {
        const double bound = ek * omega(r - 1) + cert.lambda_star * ek * dpn(r - 1);
        acc.add(slack_against(bound, omega(r)), r);
      }
    } else {
      acc.res.note = "omega_u column missing";
    }
    rep.lemma4_dissipation = acc.finish();
  }

  {
    SlackAcc acc;
    if (!recursion_ok) {
      acc.res.note = "skipped: cold-start trace";
    } else if (have_omega && have_gk) {
      for (int r = 1; r < R; ++r) {
        const double bound = std::max(gk.alpha_kappa * omega(r - 1), gk.gamma_kappa * dpn(r - 1));
        acc.add(slack_against(bound, omega(r)), r);
      }
    } else {
      acc.res.note = have_omega ? "gains unavailable (eta >= 1)" : "omega_u column missing";
    }
    rep.eq19a_omega = acc.finish();
  }

  {
    SlackAcc acc;
    if (have_cost && have_omega && have_d) {
      for (int r = 1; r < R; ++r) {
        const double pert = cert.f_bound * omega(r) + dno(r - 1);
        const double bound = std::max(cert.alpha0 * jst(r - 1), cert.gamma0 * pert);
        acc.add(slack_against(bound, jst(r)), r);
      }
    } else {
      acc.res.note = "cost/omega/d columns missing";
    }
    rep.eq19b_jstar = acc.finish();
  }

  {
    SlackAcc acc;
    if (have_lambda && have_omega && have_d) {
      for (int r = 1; r < R; ++r) {
        const double bound =
            *rows[r - 1].lambda_p + nu * cert.f_bound * omega(r) + nu * dno(r - 1);
        acc.add(slack_against(bound, dpn(r)), r);
      }
    } else {
      acc.res.note = "lambda/omega/d columns missing";
    }
    rep.eq19c_increment = acc.finish();
  }

  {
    SlackAcc acc;
    if (!recursion_ok) {
      acc.res.note = "skipped: cold-start trace";
    } else if (have_cg && have_cost && have_omega && have_d) {
      for (int r = 2; r < R; ++r) {
        double bound;
        if (!noisy) {
          bound = std::max({cg.rho * dpn(r - 1), cg.gamma1 * jst(r - 2), cg.gamma2 * omega(r - 1)});
        } else {
          const double dmax = std::max(dno(r - 1), dno(r - 2));
          bound = std::max({cg.rho * dpn(r - 1),
                            3.0 * cg.theta * cert.b2 * cert.alpha0 * jst(r - 2),
                            3.0 * cg.theta * std::max(2.0 * cert.b2 * cert.gamma0, nu * ek) *
                                cert.f_bound * omega(r - 1),
                            3.0 * cg.theta * std::max(2.0 * cert.b2 * cert.gamma0, nu) * dmax});
        }
        acc.add(slack_against(bound, dpn(r)), r);
      }
      if (noisy) acc.res.note = "noise-split arms";
    } else {
      acc.res.note = have_cg ? "cost/omega/d columns missing" : "gains unavailable at this kappa";
    }
    rep.eq20_increment = acc.finish();
  }

  // Decay-plus-gain envelope via a weighted max of the three measurements.
  {
    SlackAcc acc;
    if (!noisy) {
      acc.res.note = "noiseless run; envelope not applicable";
    } else if (!recursion_ok) {
      acc.res.note = "skipped: cold-start trace";
    } else if (!(have_cg && have_gk && have_cost && have_omega && have_d)) {
      acc.res.note = "gains or columns unavailable";
    } else {
      const double g13 = gk.gamma_kappa;
      const double g21 = 2.0 * cert.gamma0 * cert.f_bound;
      const double g2d = 2.0 * cert.gamma0;
      const double g32 = 3.0 * cg.theta * cert.b2 * cert.alpha0;
      const double g31 = 3.0 * cg.theta * std::max(2.0 * cert.b2 * cert.gamma0, nu * ek) * cert.f_bound;
      const double g3d = 3.0 * cg.theta * std::max(2.0 * cert.b2 * cert.gamma0, nu);

      const double cycle1 = std::sqrt(g31 * g13);
      const double cycle2 = std::cbrt(g21 * g32 * g13);
      const double abar = std::max({gk.alpha_kappa, cert.alpha0, cg.rho, cycle1, cycle2});
      if (abar >= 1.0) {
        acc.res.note = "weighted cycle gains >= 1 at this kappa";
      } else {
        const double s1 = 1.0;
        const double s2 = g21 > 0 ? abar / g21 : 1.0;
        const double c1 = g32 > 0 ? abar * s2 / g32 : kInf;
        const double c2 = g31 > 0 ? abar * s1 / g31 : kInf;
        const double lo3 = g13 > 0 ? s1 * g13 / abar : 0.0;
        double s3 = std::min(c1, c2);
        if (std::isinf(s3)) s3 = std::max(lo3, 1.0);
        const double gain = std::max(s2 * g2d, s3 * g3d);
        rep.envelope_rate = abar;
        rep.envelope_gain = gain;

        double d_sup = 0.0;
        for (int r = 0; r < R; ++r) d_sup = std::max(d_sup, dno(r));
        const auto w_hat = [&](int r) {
          if (r == 0) return std::max(s1 * omega(0), s2 * jst(0));
          return std::max({s1 * omega(r), s2 * jst(r - 1), s3 * dpn(r)});
        };
        const double w0 = w_hat(0);
        for (int r = 0; r < R; ++r) {
          const double bound = std::max(w0 * std::pow(abar, r), gain * d_sup);
          acc.add(slack_against(bound, w_hat(r)), r);
        }
      }
    }
    rep.def2_envelope = acc.finish();
  }

  bool any_checked = false;
  bool all_pass = true;
  for (const CheckResult* cr :
       {&rep.eq15_contraction, &rep.lemma4_dissipation, &rep.eq19a_omega, &rep.eq19b_jstar,
        &rep.eq19c_increment, &rep.eq20_increment, &rep.def2_envelope}) {
    any_checked = any_checked || cr->checked;
    all_pass = all_pass && cr->pass;
  }
  rep.verdict = !any_checked ? "incomplete" : (all_pass ? "pass" : "fail");
  return rep;
}

}  // namespace bpgd
