#pragma once

// Cell-centred finite-volume solver for d_t c = div(sqrt(c) M sqrt(c) grad h'(c))
// on [0, L] with no-flux boundaries and adaptive forward Euler steps.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "stefan/dense.hpp"
#include "stefan/models.hpp"
#include "stefan/simplex.hpp"

namespace stefan::pde {

inline constexpr double kCellSumTolerance = 1e-12;
inline constexpr double kNegativeStepTolerance = 1e-14;
inline constexpr double kDerivativeFloor = 1e-12;

struct Grid1D {
  std::size_t cells = 0;
  double length = 1.0;

  /// Needs cells >= 4 and length > 0.
  static Grid1D make(std::size_t cells, double length);

  double dx() const noexcept { return length / static_cast<double>(cells); }
  double center(std::size_t k) const noexcept {
    return (static_cast<double>(k) + 0.5) * dx();
  }
  std::size_t faces() const noexcept { return cells + 1; }
};

/// Compositions on a grid, stored cell-major: data[k * n + i] = c_i in cell k.
class Field {
 public:
  Field(Grid1D grid, std::size_t species, Vector data, double time = 0.0);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t species() const noexcept { return n_; }
  std::size_t cells() const noexcept { return grid_.cells; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  double operator()(std::size_t k, std::size_t i) const noexcept { return data_[k * n_ + i]; }
  double& operator()(std::size_t k, std::size_t i) noexcept { return data_[k * n_ + i]; }
  std::span<const double> cell(std::size_t k) const noexcept { return {data_.data() + k * n_, n_}; }
  std::span<const double> data() const noexcept { return data_; }
  Composition composition(std::size_t k) const { return make_composition(cell(k)); }

  /// dx * sum_k c_i(k)
  Vector masses() const;
  double min_value() const;
  /// max_k |sum_i c_i(k) - 1|
  double max_sum_deviation() const;

 private:
  Grid1D grid_;
  std::size_t n_;
  Vector data_;
  double time_;
};

using Profile = std::function<Vector(double x)>;

/// Evaluates the profile at cell centres. Entries down to -1e-12 are clamped
/// to zero; anything else off the simplex is a SimplexViolation naming the cell.
Field init_field(const Grid1D& grid, std::size_t species, const Profile& profile);

struct SolverConfig {
  thermo::ModelSpec model;
  double dt_init = 1e-4;
  double safety = 0.4;
  double t_end = 0.1;
  std::size_t max_rejects = 40;
  double entropy_tolerance = 1e-10;
  /// 0 rejects steps with entries below -1e-14; a positive value rejects
  /// entries below it.
  double positivity_floor = 0.0;

  void validate() const;
};

struct StepReport {
  double time = 0.0;  // time after the step
  double dt_used = 0.0;
  double dt_next = 0.0;
  std::size_t rejected_count = 0;
  double min_c = 0.0;
  double sum_deviation_max = 0.0;
  double entropy_change = 0.0;
};

/// Discrete entropy sum_k dx sum_i h_i(c_i(k)).
double discrete_entropy(const Field& field, const thermo::ModelSpec& model);

/// Arithmetic mean of cells f-1 and f, the neighbours of interior face f
/// (1 <= f <= N-1).
Composition face_composition(const Field& field, std::size_t face);

/// Mobility core M at interior face f.
Matrix face_mobility(const Field& field, const thermo::ModelSpec& model, std::size_t face);

/// Numerical flux through face f (0 and N are the walls and carry zero flux).
Vector face_flux(const Field& field, const SolverConfig& config, std::size_t face);

struct StepOutcome {
  Field field;
  StepReport report;
};

/// One accepted forward Euler step starting from dt_try, halving on rejection.
/// The step is clipped so the new time does not pass t_limit.
StepOutcome step(const Field& field, const SolverConfig& config, double dt_try,
                 double t_limit = std::numeric_limits<double>::infinity());

struct RunOptions {
  /// Snapshot every `snapshot_stride` accepted steps (0 disables).
  std::size_t snapshot_stride = 1;
  /// When nonempty, steps land exactly on these times and snapshots are
  /// taken there instead of by stride. Must be increasing within (0, t_end].
  std::vector<double> output_times;
};

struct Trajectory {
  std::vector<Field> snapshots;  // first is the initial field, last is at t_end
  std::vector<double> snapshot_dt;  // dt of the step that produced each snapshot
  std::vector<StepReport> steps;
};

Trajectory run(const SolverConfig& config, const Field& initial, const RunOptions& options = {});

/// c0 = reference + epsilon * phi, phi_i = w_i mode(x) minus its species mean,
/// with weights w_i in [0.5, 1.5] drawn from `seed`. Needs
/// min reference >= 2 epsilon |phi|_inf.
Field perturb_initial(const Field& reference, double epsilon, const std::function<double(double)>& mode,
                      std::uint64_t seed);
/// Same with an explicit per-species profile; its species mean is removed.
Field perturb_initial(const Field& reference, double epsilon, const Profile& phi);

}  // namespace stefan::pde
