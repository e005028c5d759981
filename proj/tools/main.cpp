#include "bpgd/commands.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Bilevel proximal gradient descent with ISS small-gain certification"};
  app.require_subcommand(1);
  app.fallthrough();

  bpgd::CliOptions opt;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double noise = 0.0;
  bool noise_given = false;

  app.add_option("--config", opt.config_path, "Path to the experiment JSON document");
  app.add_option("--out", opt.out_dir, "Output directory (overrides the config's 'out')");
  auto* seed_opt = app.add_option("--seed", seed, "Override the top-level seed");
  app.add_option("--jobs", opt.jobs, "Max concurrent sweep points")->check(CLI::PositiveNumber);
  app.add_flag("--with-oracle", opt.with_oracle,
               "Attach the reference solver to runs (fills oracle trace columns)");

  auto* run = app.add_subcommand("run", "Execute one bilevel run; writes trace.csv and summary.json");
  auto* run_noise = run->add_option("--noise", noise, "Override the noise amplitude");

  auto* certify = app.add_subcommand(
      "certify", "Estimate constants and gains, find the minimal kappa; writes certificate.json");

  auto* verify = app.add_subcommand(
      "verify", "Re-check the ISS inequalities on a stored trace; writes iss_report.json");
  verify->add_option("--trace", opt.trace_path, "Path to a stored trace.csv")->required();
  verify->add_option("--certificate", opt.certificate_path,
                     "Path to certificate.json (default: next to the trace)");

  auto* sweep = app.add_subcommand("sweep", "Sweep kappa or noise amplitudes; writes sweep.csv");
  auto* sweep_noise = sweep->add_option("--noise", noise, "Override the noise amplitude");

  auto* check = app.add_subcommand("check", "Run the property suites on the configured problem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  seed_given = seed_opt->count() > 0;
  if (seed_given) opt.seed = seed;
  noise_given = run_noise->count() > 0 || sweep_noise->count() > 0;
  if (noise_given) opt.noise_override = noise;

  if (run->parsed()) return bpgd::cmd_run(opt);
  if (certify->parsed()) return bpgd::cmd_certify(opt);
  if (verify->parsed()) return bpgd::cmd_verify(opt);
  if (sweep->parsed()) return bpgd::cmd_sweep(opt);
  if (check->parsed()) return bpgd::cmd_check(opt);
  return 2;
}
