#pragma once

// Scenario execution behind the stefan CLI: single runs, epsilon sweeps and
// model audits. Commands return process exit codes and write to the given
// streams.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/diagnostics.hpp"
#include "stefan/solver.hpp"

namespace stefan::harness {

/// Parallelism bound from STEFAN_THREADS (positive integer), otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_budget();

struct RunOutput {
  pde::Trajectory trajectory;
  std::vector<diag::DiagnosticsRecord> records;  // one per snapshot
};

/// Runs `initial` under the config. With `times`, snapshots land exactly on
/// them; with `reference`, records carry H_rel against its snapshots.
RunOutput simulate(const RunConfig& config, const pde::Field& initial,
                   const std::vector<double>& times = {}, const pde::Trajectory* reference = nullptr);

/// Snapshot times after the initial one.
std::vector<double> snapshot_times(const pde::Trajectory& trajectory);

/// `output` key if set, else the config path with its extension replaced by .csv.
std::string output_path(const std::string& config_path, const RunConfig& config);

struct SweepResult {
  diag::RelEntropyReport report;
  double control_max_h_rel = 0.0;  // max_t H(t) for epsilon = 0
  std::vector<Vector> series;      // H(t) per epsilon
  Vector times;                    // shared snapshot times, starting at t0
};

/// Reference run once, then one perturbed run per epsilon plus an epsilon = 0
/// control, at most `threads` at a time. When `stem` is nonempty, writes
/// <stem>.eps<k>.csv per epsilon and <stem>.control.csv.
SweepResult run_sweep(const RunConfig& config, const Vector& epsilons, std::uint64_t seed,
                      std::size_t threads, const std::string& stem = {});

/// key=value report: epsilons, h0, sup_ratio, fitted_order, control_max_h_rel.
std::string render_sweep_report(const SweepResult& result);

int cmd_run(const std::string& config_path, const std::optional<std::string>& reference_path,
            std::ostream& out, std::ostream& err);

int cmd_sweep(const std::string& config_path, const Vector& epsilons,
              const std::optional<std::uint64_t>& seed, std::ostream& out, std::ostream& err);

struct AuditRequest {
  std::string model;
  std::size_t n = 3;
  double gamma = 2.0;
  double beta = 1.0;
  double theta = 0.0;
  double k = 1.0;  // uniform off-diagonal D_ij (k_ij for tumor)
  Vector masses;   // default all 1
  std::size_t samples = 2000;
  double floor = 0.05;
  std::uint64_t seed = 0;
  std::size_t grid_points = 10000;
};

/// Prints the hypothesis audit of the entropies and the structural report of
/// the coupling, one PASS/FAIL line per clause. Returns 0 unless the request
/// itself is invalid.
int cmd_audit(const AuditRequest& request, std::ostream& out, std::ostream& err);

}  // namespace stefan::harness
