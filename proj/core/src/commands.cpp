#include "bpgd/commands.hpp"

#include "bpgd/certify.hpp"
#include "bpgd/io.hpp"
#include "bpgd/sampling.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <random>
#include <thread>

namespace bpgd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 1;
  } catch (const OracleError& e) {
    std::cerr << "oracle failure: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

ExperimentConfig load_and_finalize(const CliOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("missing --config <path>");
  ExperimentConfig cfg = load_config(opt.config_path);
  if (opt.noise_override) {
    if (*opt.noise_override < 0) throw ConfigError("--noise must be nonnegative");
    if (!cfg.solver.noise) {
      cfg.solver.noise = NoiseSpec{};
      cfg.noise_seed_set = false;
    }
    cfg.solver.noise->amplitude = *opt.noise_override;
  }
  finalize_config(cfg, opt.seed);
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (cfg.out_dir.empty()) cfg.out_dir = "out";
  return cfg;
}

void resolve_step_sizes(ExperimentConfig& cfg) {
  if (cfg.solver.mu > 0 && cfg.solver.nu > 0) return;
  const StepSizes ss = step_sizes(cfg.model, cfg.prox_p, cfg.prox_u, cfg.step_size_grid,
                                  cfg.seed, cfg.oracle);
  if (cfg.solver.mu <= 0) cfg.solver.mu = ss.mu;
  if (cfg.solver.nu <= 0) cfg.solver.nu = ss.nu;
}

Vec initial_u(const ExperimentConfig& cfg) {
  if (cfg.u0.size()) return cfg.u0;
  return cfg.prox_u.project(Vec::Zero(static_cast<Eigen::Index>(cfg.model.N) * cfg.model.m));
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json opt_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (!std::isfinite(*v)) return format_double(*v);
  return *v;
}

json build_summary(const ExperimentConfig& cfg, const Trace& trace,
                   const std::optional<double>& dist_pstar, const std::optional<double>& j_star) {
  const TraceRow& last = trace.rows.back();
  json j;
  j["status"] = to_string(trace.status);
  j["iterations"] = static_cast<int>(trace.rows.size()) - 1;
  j["mu"] = trace.mu;
  j["nu"] = trace.nu;
  j["kappa"] = trace.kappa;
  j["stop_tol"] = trace.stop_tol;
  j["warm_start"] = trace.warm_start;
  j["seed"] = trace.seed;
  j["oracle_attached"] = trace.oracle_attached;
  if (cfg.solver.noise) {
    j["noise"] = {{"amplitude", cfg.solver.noise->amplitude},
                  {"distribution",
                   cfg.solver.noise->kind == NoiseSpec::Kind::UniformBall ? "uniform-ball"
                                                                          : "constant-vector"},
                  {"seed", cfg.solver.noise->seed}};
  } else {
    j["noise"] = nullptr;
  }
  json fin;
  fin["p"] = vec_to_json(last.p);
  fin["u"] = vec_to_json(last.u);
  fin["dp_norm"] = last.dp_norm;
  fin["inner_residual"] =
      std::isfinite(trace.final_inner_residual) ? json(trace.final_inner_residual) : json(nullptr);
  fin["lambda_p"] = opt_to_json(last.lambda_p);
  fin["cost_outer"] = opt_to_json(last.cost_outer);
  fin["omega_u"] = opt_to_json(last.omega_u);
  fin["dist_pstar"] = opt_to_json(dist_pstar);
  fin["j_star"] = opt_to_json(j_star);
  j["final"] = fin;
  return j;
}

void print_check_line(const char* name, const CheckResult& r) {
  std::cout << "  " << name << ": ";
  if (!r.checked) {
    std::cout << "not checked" << (r.note.empty() ? "" : " (" + r.note + ")") << "\n";
    return;
  }
  std::cout << (r.pass ? "pass" : "FAIL") << "  worst slack " << format_double(r.worst_slack)
            << " at row " << r.worst_row << (r.note.empty() ? "" : " (" + r.note + ")") << "\n";
}

}  // namespace

int cmd_run(const CliOptions& options) {
  return guarded([&]() {
    ExperimentConfig cfg = load_and_finalize(options);
    resolve_step_sizes(cfg);

    std::optional<Oracle> oracle;
    if (options.with_oracle) oracle.emplace(cfg.model, cfg.prox_u, cfg.oracle);

    Trace trace = run_bilevel(cfg.model, cfg.prox_p, cfg.prox_u, cfg.solver, cfg.p0,
                              initial_u(cfg), oracle ? &*oracle : nullptr);
    trace.seed = cfg.seed;

    std::optional<double> dist_pstar, j_star;
    if (oracle) {
      const OptimalSet oset = oracle->solve_outer(cfg.prox_p);
      dist_pstar = dist_to_Pstar(trace.rows.back().p, oset);
      j_star = oset.j_star;
    }

    const fs::path out(cfg.out_dir);
    write_trace_csv((out / "trace.csv").string(), trace);
    write_text_file((out / "summary.json").string(),
                    build_summary(cfg, trace, dist_pstar, j_star).dump(2) + "\n");

    std::cout << "run: status=" << to_string(trace.status)
              << " iterations=" << trace.rows.size() - 1
              << " final_dp=" << format_double(trace.rows.back().dp_norm);
    if (dist_pstar) std::cout << " dist_pstar=" << format_double(*dist_pstar);
    std::cout << "\n";
    return trace.status == RunStatus::Converged ? 0 : 1;
  });
}

int cmd_certify(const CliOptions& options) {
  return guarded([&]() {
    ExperimentConfig cfg = load_and_finalize(options);
    resolve_step_sizes(cfg);

    Oracle oracle(cfg.model, cfg.prox_u, cfg.oracle);
    const Certificate cert = certify_problem(cfg.model, cfg.prox_p, cfg.prox_u, cfg.solver.mu,
                                             cfg.solver.nu, oracle, cfg.certify);

    const fs::path out(cfg.out_dir);
    write_text_file((out / "certificate.json").string(), certificate_to_json(cert));

    std::cout << "empirical certificate (sampling-based constants)\n";
    std::cout << "  mu=" << format_double(cert.mu) << "  nu=" << format_double(cert.nu) << "\n";
    std::cout << "  eta=" << format_double(cert.eta)
              << "  lambda_star=" << format_double(cert.lambda_star)
              << "  F=" << format_double(cert.f_bound) << "\n";
    std::cout << "  b1=" << format_double(cert.b1) << "  b2=" << format_double(cert.b2)
              << "  alpha0=" << format_double(cert.alpha0)
              << "  gamma0=" << format_double(cert.gamma0) << "\n";
    std::cout << "  kappa=" << cert.kappa << "  alpha_kappa=" << format_double(cert.alpha_kappa)
              << "  gamma_kappa=" << format_double(cert.gamma_kappa) << "\n";
    std::cout << "  a=" << format_double(cert.a) << "  rho=" << format_double(cert.rho)
              << "  theta=" << format_double(cert.theta)
              << "  gamma1=" << format_double(cert.gamma1)
              << "  gamma2=" << format_double(cert.gamma2) << "\n";
    std::cout << "  margins: a=" << format_double(cert.margins.margin_a)
              << "  gamma2*gamma_kappa=" << format_double(cert.margins.margin_u_cycle)
              << "  gamma0*gamma1*gamma_kappa=" << format_double(cert.margins.margin_jstar_cycle)
              << "\n";
    std::cout << "  K_min=" << cert.k_min << "  certified=" << (cert.certified ? "yes" : "no")
              << "\n";
    return cert.certified ? 0 : 1;
  });
}

int cmd_verify(const CliOptions& options) {
  return guarded([&]() {
    ExperimentConfig cfg = load_and_finalize(options);
    if (options.trace_path.empty()) throw ConfigError("verify requires --trace <trace.csv>");

    const fs::path trace_path(options.trace_path);
    Trace trace = read_trace_csv(trace_path.string());
    apply_run_summary((trace_path.parent_path() / "summary.json").string(), trace);

    const std::string cert_path = options.certificate_path.empty()
                                      ? (trace_path.parent_path() / "certificate.json").string()
                                      : options.certificate_path;
    const Certificate cert = load_certificate(cert_path);

    if (!cert.p_star.empty() &&
        cert.p_star.front().size() != static_cast<Eigen::Index>(trace.param_dim)) {
      throw ConfigError("schema mismatch: trace parameter dimension differs from certificate");
    }
    if (trace.param_dim != cfg.model.l) {
      throw ConfigError("schema mismatch: trace parameter dimension differs from config");
    }

    const IssReport report = verify_iss_trace(trace, cert, nullptr);
    const fs::path out(cfg.out_dir);
    write_text_file((out / "iss_report.json").string(), iss_report_to_json(report));

    std::cout << "iss verification: " << report.verdict
              << (report.certified_kappa ? " (certified kappa)" : " (observed only)") << "\n";
    print_check_line("eq15_contraction", report.eq15_contraction);
    print_check_line("lemma4_dissipation", report.lemma4_dissipation);
    print_check_line("eq19a_omega", report.eq19a_omega);
    print_check_line("eq19b_jstar", report.eq19b_jstar);
    print_check_line("eq19c_increment", report.eq19c_increment);
    print_check_line("eq20_increment", report.eq20_increment);
    print_check_line("def2_envelope", report.def2_envelope);
    return report.verdict == "pass" ? 0 : 1;
  });
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
/// captured exception. Outputs must be written to per-index slots.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double plateau_dist(const Trace& trace, const std::vector<Vec>& candidates) {
  OptimalSet set;
  set.candidates = candidates;
  const int rows = static_cast<int>(trace.rows.size());
  const int tail = std::max(1, rows / 10);
  double acc = 0.0;
  for (int r = rows - tail; r < rows; ++r) acc += dist_to_Pstar(trace.rows[r].p, set);
  return acc / tail;
}

}  // namespace

int cmd_sweep(const CliOptions& options) {
  return guarded([&]() {
    ExperimentConfig cfg = load_and_finalize(options);
    resolve_step_sizes(cfg);
    const fs::path out(cfg.out_dir);

    Oracle oracle(cfg.model, cfg.prox_u, cfg.oracle);

    if (cfg.has_kappa_sweep) {
      CertifyConfig ccfg = cfg.certify;
      ccfg.kappa.reset();
      const Certificate base = certify_problem(cfg.model, cfg.prox_p, cfg.prox_u, cfg.solver.mu,
                                               cfg.solver.nu, oracle, ccfg);

      std::vector<int> kappas;
      for (int k = cfg.sweep_kappa_lo; k <= cfg.sweep_kappa_hi; k += cfg.sweep_kappa_step) {
        kappas.push_back(k);
      }

      struct Row {
        int kappa = 0;
        double gamma_kappa = 0;
        SmallGainMargins margins;
        int iterations = 0;
        double final_dist = 0;
        RunStatus status = RunStatus::MaxIterations;
      };
      std::vector<Row> rows(kappas.size());

      parallel_for(static_cast<int>(kappas.size()), options.jobs, [&](int i) {
        const int kappa = kappas[i];
        Row row;
        row.kappa = kappa;
        const GammaKappa gk = gamma_kappa_gain(base.eta, kappa, base.lambda_star);
        row.gamma_kappa = gk.gamma_kappa;
        try {
          const CompositeGains cg = composite_gains(base.eta, kappa, base.lambda_star,
                                                    base.f_bound, base.b2, base.alpha0,
                                                    base.gamma0, base.nu);
          row.margins = small_gain_check(cg.a, gk.gamma_kappa, base.gamma0, cg.gamma1, cg.gamma2);
        } catch (const CertificationError&) {
          row.margins.pass = false;
          row.margins.margin_a = -std::numeric_limits<double>::infinity();
          row.margins.margin_u_cycle = -std::numeric_limits<double>::infinity();
          row.margins.margin_jstar_cycle = -std::numeric_limits<double>::infinity();
        }

        SolverConfig sc = cfg.solver;
        sc.kappa = kappa;
        Trace trace = run_bilevel(cfg.model, cfg.prox_p, cfg.prox_u, sc, cfg.p0, initial_u(cfg));
        trace.seed = cfg.seed;
        row.iterations = static_cast<int>(trace.rows.size()) - 1;
        OptimalSet set;
        set.candidates = base.p_star;
        row.final_dist = dist_to_Pstar(trace.rows.back().p, set);
        row.status = trace.status;
        write_trace_csv((out / ("kappa_" + std::to_string(kappa)) / "trace.csv").string(), trace);
        rows[i] = row;
      });

      std::ostringstream csv;
      csv << "kappa,gamma_kappa,margin_a,margin_u_cycle,margin_jstar_cycle,certified,iterations,"
             "final_dist_pstar,status\n";
      bool any_diverged = false;
      for (const Row& r : rows) {
        any_diverged = any_diverged || r.status == RunStatus::Diverged;
        csv << r.kappa << ',' << format_double(r.gamma_kappa) << ','
            << format_double(r.margins.margin_a) << ',' << format_double(r.margins.margin_u_cycle)
            << ',' << format_double(r.margins.margin_jstar_cycle) << ','
            << (r.margins.pass ? 1 : 0) << ',' << r.iterations << ','
            << format_double(r.final_dist) << ',' << to_string(r.status) << '\n';
      }
      write_text_file((out / "sweep.csv").string(), csv.str());
      std::cout << "sweep: " << kappas.size() << " kappa points -> "
                << (out / "sweep.csv").string() << "\n";
      return any_diverged ? 1 : 0;
    }

    if (!cfg.sweep_noise_amplitudes.empty()) {
      const OptimalSet oset = oracle.solve_outer(cfg.prox_p);

      struct Row {
        double amplitude = 0;
        double plateau = 0;
        int iterations = 0;
        RunStatus status = RunStatus::MaxIterations;
      };
      std::vector<Row> rows(cfg.sweep_noise_amplitudes.size());

      parallel_for(static_cast<int>(cfg.sweep_noise_amplitudes.size()), options.jobs, [&](int i) {
        const double amp = cfg.sweep_noise_amplitudes[i];
        SolverConfig sc = cfg.solver;
        NoiseSpec spec = cfg.solver.noise.value_or(NoiseSpec{});
        spec.amplitude = amp;
        if (!cfg.noise_seed_set) {
          spec.seed = derive_seed(cfg.seed, "sweep-noise-" + std::to_string(i));
        }
        sc.noise = spec;
        Trace trace = run_bilevel(cfg.model, cfg.prox_p, cfg.prox_u, sc, cfg.p0, initial_u(cfg));
        trace.seed = cfg.seed;
        rows[i] = Row{amp, plateau_dist(trace, oset.candidates),
                      static_cast<int>(trace.rows.size()) - 1, trace.status};
        write_trace_csv((out / ("noise_" + std::to_string(i)) / "trace.csv").string(), trace);
      });

      std::ostringstream csv;
      csv << "amplitude,plateau_dist_pstar,iterations,status\n";
      bool any_diverged = false;
      for (const Row& r : rows) {
        any_diverged = any_diverged || r.status == RunStatus::Diverged;
        csv << format_double(r.amplitude) << ',' << format_double(r.plateau) << ','
            << r.iterations << ',' << to_string(r.status) << '\n';
      }
      write_text_file((out / "sweep.csv").string(), csv.str());
      std::cout << "sweep: " << rows.size() << " noise points -> "
                << (out / "sweep.csv").string() << "\n";
      return any_diverged ? 1 : 0;
    }

    throw ConfigError("sweep requires sweep.kappa_range or sweep.noise_amplitudes");
  });
}

// ---------------------------------------------------------------------------
// check: property suites on the configured problem
// ---------------------------------------------------------------------------

namespace {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double worst_slack = std::numeric_limits<double>::infinity();
  int samples = 0;
  std::string note;
};

Vec random_point_near(const ProxOperator& op, std::mt19937_64& rng) {
  Vec lo, hi;
  op.bounding_box(lo, hi);
  const double w = 1.0 + 0.5 * op.domain_diameter();
  const Vec lo_wide = lo.array() - w;
  const Vec hi_wide = hi.array() + w;
  return sample_box(lo_wide, hi_wide, rng);
}

SuiteResult suite_nonexpansive(const ProxOperator& op, const char* label, std::uint64_t seed) {
  SuiteResult res;
  res.name = std::string("prox_nonexpansive_") + label;
  res.samples = 10000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale_dist(0.01, 2.0);
  for (int i = 0; i < res.samples; ++i) {
    const Vec x1 = random_point_near(op, rng);
    const Vec x2 = random_point_near(op, rng);
    const double s = scale_dist(rng);
    const double slack =
        (x1 - x2).norm() + 1e-12 - (op.apply(s, x1) - op.apply(s, x2)).norm();
    res.worst_slack = std::min(res.worst_slack, slack);
  }
  res.pass = res.worst_slack >= 0.0;
  return res;
}

SuiteResult suite_perturbation(const ProxOperator& op, const char* label, std::uint64_t seed) {
  SuiteResult res;
  res.name = std::string("prox_perturbation_") + label;
  res.samples = 10000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale_dist(0.01, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < res.samples; ++i) {
    const Vec x = random_point_near(op, rng);
    Vec h(op.dim());
    for (int k = 0; k < op.dim(); ++k) h[k] = gauss(rng);
    const double s = scale_dist(rng);
    const double slack = h.norm() + 1e-12 - (op.apply(s, x + h) - op.apply(s, x)).norm();
    res.worst_slack = std::min(res.worst_slack, slack);
  }
  res.pass = res.worst_slack >= 0.0;
  return res;
}

SuiteResult suite_prox_optimality(const ProxOperator& op, const char* label, std::uint64_t seed) {
  SuiteResult res;
  res.name = std::string("prox_optimality_") + label;
  res.samples = 1000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale_dist(0.05, 2.0);
  for (int i = 0; i < res.samples; ++i) {
    const Vec xi = random_point_near(op, rng);
    const Vec xi_prime = op.project(random_point_near(op, rng));
    const double s = scale_dist(rng);
    const Vec y = op.apply(s, xi);
    const double lhs = op.value(y) - op.value(xi_prime);
    const double rhs = -(1.0 / s) * (y - xi_prime).dot(y - xi);
    const double slack = rhs + 1e-9 - lhs;
    res.worst_slack = std::min(res.worst_slack, slack);
  }
  res.pass = res.worst_slack >= 0.0;
  return res;
}

SuiteResult suite_value_gradient(const ExperimentConfig& cfg, const Oracle& oracle) {
  SuiteResult res;
  res.name = "eq13_value_gradient";
  const auto points = domain_samples(cfg.prox_p, 64, derive_seed(cfg.seed, "check-eq13"));
  int stable = 0, ok = 0;
  double worst_rel = 0.0;
  for (const Vec& p : points) {
    if (stable >= 50) break;
    if (!active_set_stable(oracle, p, cfg.oracle.fd_step)) continue;
    ++stable;
    const Vec g = oracle.grad_Jbar(p);
    const Vec gfd = oracle.fd_grad_Jbar(p);
    const double rel = (g - gfd).norm() / (1.0 + g.norm());
    worst_rel = std::max(worst_rel, rel);
    if (rel <= 1e-5) ++ok;
  }
  res.samples = stable;
  res.worst_slack = 1e-5 - worst_rel;
  res.pass = stable > 0 && ok >= static_cast<int>(std::ceil(0.95 * stable));
  if (stable == 0) res.note = "no active-set-stable points among samples";
  return res;
}

SuiteResult suite_contraction(const ExperimentConfig& cfg, const Oracle& oracle) {
  SuiteResult res;
  res.name = "eq15_contraction";
  const auto points = domain_samples(cfg.prox_p, 16, derive_seed(cfg.seed, "check-eq15"));
  double eta = 0.0;
  try {
    eta = contraction_rate(cfg.model, points, cfg.solver.mu);
  } catch (const CertificationError& e) {
    res.pass = false;
    res.worst_slack = -std::numeric_limits<double>::infinity();
    res.note = e.what();
    return res;
  }
  std::mt19937_64 rng(derive_seed(cfg.seed, "check-eq15-starts"));
  Vec lo, hi;
  cfg.prox_u.bounding_box(lo, hi);
  int count = 0;
  for (size_t i = 0; i < points.size() && i < 10; ++i) {
    const CondensedQP qp = condense(cfg.model, points[i]);
    const Vec ub = oracle.solve_inner(points[i]).u_bar;
    Vec u = cfg.prox_u.project(sample_box(lo, hi, rng));
    const double w0 = (u - ub).norm();
    for (int k = 1; k <= 50; ++k) {
      u = inner_step(qp, cfg.prox_u, cfg.solver.mu, u);
      const double wk = (u - ub).norm();
      res.worst_slack =
          std::min(res.worst_slack, std::pow(eta, k) * w0 * (1.0 + 1e-9) - wk);
      ++count;
    }
  }
  res.samples = count;
  res.pass = res.worst_slack >= -1e-12;
  return res;
}

json suite_to_json(const SuiteResult& r) {
  json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["worst_slack"] = std::isfinite(r.worst_slack) ? json(r.worst_slack)
                                                  : json(format_double(r.worst_slack));
  j["samples"] = r.samples;
  j["note"] = r.note;
  return j;
}

}  // namespace

int cmd_check(const CliOptions& options) {
  return guarded([&]() {
    ExperimentConfig cfg = load_and_finalize(options);
    resolve_step_sizes(cfg);
    Oracle oracle(cfg.model, cfg.prox_u, cfg.oracle);

    std::vector<SuiteResult> suites;
    suites.push_back(suite_nonexpansive(cfg.prox_p, "p", derive_seed(cfg.seed, "check-nonexp-p")));
    suites.push_back(suite_nonexpansive(cfg.prox_u, "u", derive_seed(cfg.seed, "check-nonexp-u")));
    suites.push_back(suite_perturbation(cfg.prox_p, "p", derive_seed(cfg.seed, "check-pert-p")));
    suites.push_back(suite_perturbation(cfg.prox_u, "u", derive_seed(cfg.seed, "check-pert-u")));
    suites.push_back(suite_prox_optimality(cfg.prox_p, "p", derive_seed(cfg.seed, "check-opt-p")));
    suites.push_back(suite_prox_optimality(cfg.prox_u, "u", derive_seed(cfg.seed, "check-opt-u")));
    suites.push_back(suite_value_gradient(cfg, oracle));
    suites.push_back(suite_contraction(cfg, oracle));

    bool all_pass = true;
    json arr = json::array();
    for (const SuiteResult& s : suites) {
      all_pass = all_pass && s.pass;
      arr.push_back(suite_to_json(s));
      std::cout << "  " << s.name << ": " << (s.pass ? "pass" : "FAIL") << "  worst slack "
                << format_double(s.worst_slack) << "  (" << s.samples << " samples)"
                << (s.note.empty() ? "" : "  " + s.note) << "\n";
    }
    json report;
    report["suites"] = arr;
    report["verdict"] = all_pass ? "pass" : "fail";
    const fs::path out(cfg.out_dir);
    write_text_file((out / "check_report.json").string(), report.dump(2) + "\n");
    std::cout << "check: " << (all_pass ? "pass" : "FAIL") << "\n";
    return all_pass ? 0 : 1;
  });
}

}  // namespace bpgd
