#pragma once

// Run configuration: a flat `key = value` file (TOML subset with bare keys,
// numbers, double-quoted strings, one-line arrays and # comments).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stefan/dense.hpp"
#include "stefan/models.hpp"
#include "stefan/solver.hpp"

namespace stefan::harness {

struct RunConfig {
  std::string model;
  std::size_t n = 0;
  Vector d;  // upper-triangular D_ij, n(n-1)/2 entries
  std::optional<double> gamma;
  std::optional<double> beta;
  std::optional<double> theta;
  Vector masses;

  std::size_t cells = 0;
  double length = 1.0;
  double dt_init = 1e-4;
  double safety = 0.4;
  double t_end = 0.0;
  std::size_t max_rejects = 40;
  double entropy_tolerance = 1e-10;

  std::string initial = "cosine";  // uniform | cosine | random-smooth
  Vector base;                     // default: uniform 1/n
  Vector direction;                // default: e_1 - e_2
  double amplitude = 0.1;
  double wavenumber = 1.0;
  double perturb_wavenumber = 2.0;

  std::size_t snapshot_stride = 1;
  std::uint64_t seed = 0;
  std::string output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ParseError("line N: ...") on syntax errors and ValidationError
/// naming the key on unknown, missing, duplicate or out-of-range keys.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& config);

thermo::ModelSpec build_model(const RunConfig& config);
pde::SolverConfig build_solver_config(const RunConfig& config);
pde::Grid1D build_grid(const RunConfig& config);
/// Initial field from the profile keys (base, direction, amplitude, wavenumber, seed).
pde::Field build_initial(const RunConfig& config);

}  // namespace stefan::harness
