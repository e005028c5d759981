#ifndef BPGD_COMMANDS_HPP_
#define BPGD_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <string>

namespace bpgd {

/// Parsed command-line options shared by all subcommands.
struct CliOptions {
  std::string config_path;
  std::string out_dir;  ///< overrides the config's "out" when nonempty
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool with_oracle = false;
  std::optional<double> noise_override;  ///< run/sweep: overrides noise amplitude
  std::string trace_path;                ///< verify
  std::string certificate_path;          ///< verify
};

// Exit codes: 0 success, 1 analytical/convergence failure, 2 usage/config failure.
int cmd_run(const CliOptions& options);
int cmd_certify(const CliOptions& options);
int cmd_verify(const CliOptions& options);
int cmd_sweep(const CliOptions& options);
int cmd_check(const CliOptions& options);

}  // namespace bpgd

#endif  // BPGD_COMMANDS_HPP_
