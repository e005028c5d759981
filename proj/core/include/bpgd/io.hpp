#ifndef BPGD_IO_HPP_
#define BPGD_IO_HPP_

#include "bpgd/certify.hpp"
#include "bpgd/common.hpp"
#include "bpgd/model.hpp"
#include "bpgd/oracle.hpp"
#include "bpgd/prox.hpp"
#include "bpgd/solver.hpp"

#include <string>
#include <vector>

namespace bpgd {

/**
 * @brief One parsed experiment description (a single JSON document).
 *
 * Parsing is strict: unknown fields are rejected with a field-precise
 * message. Sub-seeds (oracle, noise) are derived from the top-level seed
 * unless given explicitly; call finalize_config after any seed override.
 */
struct ExperimentConfig {
  std::uint64_t seed = 0;

  ParametrizedModel model;
  ProxOperator prox_p;
  ProxOperator prox_u;

  SolverConfig solver;  ///< mu/nu of 0 mean "select automatically"
  OracleConfig oracle;
  CertifyConfig certify;
  int step_size_grid = 64;

  Vec p0;
  Vec u0;  ///< empty: projected zero vector

  std::vector<double> sweep_noise_amplitudes;
  bool has_kappa_sweep = false;
  int sweep_kappa_lo = 1, sweep_kappa_hi = 1, sweep_kappa_step = 1;

  std::string out_dir;

  bool oracle_seed_set = false;
  bool noise_seed_set = false;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

/// Applies a seed override and derives any sub-seeds not set explicitly.
void finalize_config(ExperimentConfig& cfg, std::optional<std::uint64_t> seed_override);

/// 17-significant-digit formatting; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double x);

void write_trace_csv(const std::string& path, const Trace& trace);

/// Reads rows back (p columns, scalars, NA cells); run parameters must be
/// restored separately via apply_run_summary.
Trace read_trace_csv(const std::string& path);

/// Restores mu/nu/kappa/stop_tol/seed/warm_start from a run's summary.json.
void apply_run_summary(const std::string& summary_path, Trace& trace);

std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);
Certificate load_certificate(const std::string& path);

std::string iss_report_to_json(const IssReport& report);
std::string optimal_set_to_json(const OptimalSet& set);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bpgd

#endif  // BPGD_IO_HPP_
