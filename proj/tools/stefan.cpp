// stefan: command-line front end for runs, sweeps, audits and property suites.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stefan/harness.hpp"
#include "stefan/verify.hpp"

namespace h = stefan::harness;

int main(int argc, char** argv) {
  CLI::App app{"Maxwell-Stefan cross-diffusion toolkit"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the property suites");
  std::optional<std::string> suite;
  bool mutant = false;
  verify->add_option("--suite", suite, "run a single suite");
  verify->add_flag("--mutant", mutant)->group("");  // sign-flip smoke check

  auto* run = app.add_subcommand("run", "integrate one configuration and write its CSV");
  std::string config;
  std::optional<std::string> reference;
  run->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--reference", reference, "reference configuration for H_rel")
      ->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "relative-entropy scaling over perturbation sizes");
  std::string sweep_config;
  std::vector<double> epsilons;
  std::optional<std::uint64_t> seed;
  sweep->add_option("--config", sweep_config, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--epsilons", epsilons, "comma-separated, each half the previous")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seed", seed, "perturbation seed (default: config seed)");

  auto* audit = app.add_subcommand("audit", "audit entropy hypotheses and coupling structure");
  h::AuditRequest req;
  audit->add_option("model", req.model, "classic-ms | pvd | tumor | porous-medium | molar-mass")
      ->required();
  audit->add_option("--n", req.n, "species count")->capture_default_str();
  audit->add_option("--gamma", req.gamma, "porous-medium exponent")->capture_default_str();
  audit->add_option("--beta", req.beta, "tumor beta")->capture_default_str();
  audit->add_option("--theta", req.theta, "tumor theta")->capture_default_str();
  audit->add_option("--k", req.k, "uniform off-diagonal D_ij (k_ij for tumor)")->capture_default_str();
  audit->add_option("--masses", req.masses, "molar masses")->delimiter(',');
  audit->add_option("--samples", req.samples, "random compositions")->capture_default_str();
  audit->add_option("--floor", req.floor, "composition floor s")->capture_default_str();
  audit->add_option("--seed", req.seed, "sampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*verify) return h::cmd_verify(suite, mutant, std::cout, std::cerr);
  if (*run) return h::cmd_run(config, reference, std::cout, std::cerr);
  if (*sweep) return h::cmd_sweep(sweep_config, epsilons, seed, std::cout, std::cerr);
  if (*audit) return h::cmd_audit(req, std::cout, std::cerr);
  return 2;
}
