#include "stefan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "stefan/error.hpp"
#include "stefan/rng.hpp"

namespace stefan::pde {

Grid1D Grid1D::make(std::size_t cells, double length) {
  if (cells < 4) throw Error(ErrorCode::InvalidArgument, "grid needs at least 4 cells");
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error(ErrorCode::InvalidArgument, "grid length must be positive");
  return Grid1D{cells, length};
}

Field::Field(Grid1D grid, std::size_t species, Vector data, double time)
    : grid_(grid), n_(species), data_(std::move(data)), time_(time) {
  if (n_ < 2) throw Error(ErrorCode::InvalidArgument, "field needs n >= 2 species");
  if (data_.size() != grid_.cells * n_)
    throw Error(ErrorCode::DimensionMismatch, "field data size differs from cells * species");
}

Vector Field::masses() const {
  Vector m(n_, 0.0);
  for (std::size_t k = 0; k < grid_.cells; ++k)
    for (std::size_t i = 0; i < n_; ++i) m[i] += data_[k * n_ + i];
  for (double& x : m) x *= grid_.dx();
  return m;
}

double Field::min_value() const { return *std::min_element(data_.begin(), data_.end()); }

double Field::max_sum_deviation() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < grid_.cells; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += data_[k * n_ + i];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

Field init_field(const Grid1D& grid, std::size_t species, const Profile& profile) {
  Vector data(grid.cells * species);
  for (std::size_t k = 0; k < grid.cells; ++k) {
    const Vector c = profile(grid.center(k));
    if (c.size() != species)
      throw Error(ErrorCode::DimensionMismatch, "profile returned the wrong number of species");
    double sum = 0.0;
    for (std::size_t i = 0; i < species; ++i) {
      double v = c[i];
      if (!std::isfinite(v) || v < -kNegativeEntryTolerance || v > 1.0 + kCellSumTolerance) {
        std::ostringstream os;
        os << "cell " << k << ": c_" << i + 1 << " = " << v;
        throw Error(ErrorCode::SimplexViolation, os.str());
      }
      v = std::max(v, 0.0);
      data[k * species + i] = v;
      sum += v;
    }
    if (std::abs(sum - 1.0) > kCellSumTolerance) {
      std::ostringstream os;
      os << "cell " << k << ": fractions sum to " << sum;
      throw Error(ErrorCode::SimplexViolation, os.str());
    }
  }
  return Field(grid, species, std::move(data), 0.0);
}

void SolverConfig::validate() const {
  if (!(dt_init > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt_init must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw Error(ErrorCode::InvalidArgument, "safety in (0,1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw Error(ErrorCode::InvalidArgument, "t_end must be finite and nonnegative");
  if (max_rejects == 0) throw Error(ErrorCode::InvalidArgument, "max_rejects must be positive");
  if (!(entropy_tolerance >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "entropy_tolerance must be nonnegative");
  if (!(positivity_floor >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "positivity_floor must be nonnegative");
}

double discrete_entropy(const Field& field, const thermo::ModelSpec& model) {
  const std::size_t n = field.species();
  double h = 0.0;
  for (std::size_t k = 0; k < field.cells(); ++k)
    for (std::size_t i = 0; i < n; ++i) h += model.entropy(i).h(field(k, i));
  return h * field.grid().dx();
}

Composition face_composition(const Field& field, std::size_t face) {
  if (face == 0 || face >= field.cells())
    throw Error(ErrorCode::InvalidArgument, "face composition needs an interior face");
  const std::size_t n = field.species();
  Vector c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 * (field(face - 1, i) + field(face, i));
  return make_composition(c);
}

Matrix face_mobility(const Field& field, const thermo::ModelSpec& model, std::size_t face) {
  return model.mobility_core(face_composition(field, face));
}

namespace {

void require_floor(const Field& field, std::size_t k) {
  for (std::size_t i = 0; i < field.species(); ++i)
    if (field(k, i) < kDerivativeFloor) {
      std::ostringstream os;
      os << "cell " << k << ": c_" << i + 1 << " = " << field(k, i) << " below " << kDerivativeFloor;
      throw Error(ErrorCode::FloorViolation, os.str());
    }
}

/// Flux at an interior face; `stiffness` is raised to |M|_2 * max_i c_i h_i''(c_i)
/// when that is larger.
Vector interior_flux(const Field& field, const thermo::ModelSpec& model, std::size_t face,
                     double* stiffness) {
  const std::size_t n = field.species();
  const double dx = field.grid().dx();
  const std::size_t left = face - 1;
  const std::size_t right = face;
  const Composition cf = face_composition(field, face);
  const Vector& sf = cf.sqrt_values();

  Vector y(n);
  double scale = 2.0;
  if (model.uses_sqrt_form()) {
    for (std::size_t j = 0; j < n; ++j)
      y[j] = (std::sqrt(field(right, j)) - std::sqrt(field(left, j))) / dx;
  } else {
    require_floor(field, left);
    require_floor(field, right);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& h = model.entropy(j);
      y[j] = sf[j] * (h.dh(field(right, j)) - h.dh(field(left, j))) / dx;
    }
    scale = 1.0;
  }

  const Matrix m = model.mobility_core(cf);
  const Vector my = m * std::span<const double>(y);
  Vector flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = -scale * sf[i] * my[i];

  if (stiffness) {
    double ch2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (cf[i] > 0.0) ch2 = std::max(ch2, cf[i] * model.entropy(i).d2h(cf[i]));
    // |M|_2 <= |M|_F: faces that cannot raise the running maximum skip the eigensolve
    if (frobenius_norm(m) * ch2 <= *stiffness) return flux;
    double norm = 0.0;
    if (asymmetry(m) <= 1e-12 * std::max(1.0, max_abs(m))) {
      const Vector ev = symmetric_eigen(m).values;
      norm = std::max(std::abs(ev.front()), std::abs(ev.back()));
    } else {
      norm = spectral_norm(m);
    }
    *stiffness = std::max(*stiffness, norm * ch2);
  }
  return flux;
}

}  // namespace

Vector face_flux(const Field& field, const SolverConfig& config, std::size_t face) {
  const std::size_t cells = field.cells();
  if (face > cells) throw Error(ErrorCode::InvalidArgument, "face index out of range");
  if (config.model.size() != field.species())
    throw Error(ErrorCode::DimensionMismatch, "model and field species differ");
  if (face == 0 || face == cells) return Vector(field.species(), 0.0);
  return interior_flux(field, config.model, face, nullptr);
}

StepOutcome step(const Field& field, const SolverConfig& config, double dt_try, double t_limit) {
  if (!(dt_try > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (config.model.size() != field.species())
    throw Error(ErrorCode::DimensionMismatch, "model and field species differ");
  const std::size_t n = field.species();
  const std::size_t cells = field.cells();
  const double dx = field.grid().dx();
  const bool generalized = !config.model.uses_sqrt_form();

  // fluxes depend only on the current state, so rejected steps reuse them
  std::vector<Vector> flux(cells + 1, Vector(n, 0.0));
  double stiffness = 0.0;
  for (std::size_t f = 1; f < cells; ++f) flux[f] = interior_flux(field, config.model, f, &stiffness);
  const double h_old = discrete_entropy(field, config.model);

  const double t0 = field.time();
  double dt = dt_try;
  bool clipped = false;
  if (t0 + dt > t_limit) {
    dt = t_limit - t0;
    clipped = true;
  }
  const double neg_limit =
      config.positivity_floor > 0.0 ? config.positivity_floor : -kNegativeStepTolerance;

  StepReport rep;
  std::size_t rejects = 0;
  for (;;) {
    Field next = field;
    bool ok = true;
    double worst_sum = 0.0;
    for (std::size_t k = 0; k < cells && ok; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double v = field(k, i) - dt * (flux[k + 1][i] - flux[k][i]) / dx;
        if (v < neg_limit || (generalized && v < kDerivativeFloor)) {
          ok = false;
          break;
        }
        if (v < 0.0) v = 0.0;
        next(k, i) = v;
        s += v;
      }
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
    if (ok && worst_sum > kCellSumTolerance) ok = false;
    double dh = 0.0;
    if (ok) {
      dh = discrete_entropy(next, config.model) - h_old;
      if (!(dh <= config.entropy_tolerance)) ok = false;
    }
    if (ok) {
      next.set_time(clipped ? t_limit : t0 + dt);
      rep.time = next.time();
      rep.dt_used = dt;
      rep.rejected_count = rejects;
      rep.min_c = next.min_value();
      rep.sum_deviation_max = worst_sum;
      rep.entropy_change = dh;
      const double base = (clipped && rejects == 0) ? std::max(dt_try, dt) : dt;
      double next_dt = 1.2 * base;
      if (stiffness > 0.0) next_dt = std::min(next_dt, config.safety * dx * dx / (2.0 * stiffness));
      rep.dt_next = next_dt;
      return StepOutcome{std::move(next), rep};
    }
    ++rejects;
    if (rejects >= config.max_rejects) {
      std::ostringstream os;
      os << "no acceptable step after " << rejects << " rejections at t = " << t0
         << " (last dt = " << dt << ")";
      throw Error(ErrorCode::StepStalled, os.str());
    }
    dt *= 0.5;
    clipped = false;
  }
}

Trajectory run(const SolverConfig& config, const Field& initial, const RunOptions& options) {
  config.validate();
  if (config.model.size() != initial.species())
    throw Error(ErrorCode::DimensionMismatch, "model and field species differ");

  std::vector<double> targets = options.output_times;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!(targets[k] > initial.time()) || targets[k] > config.t_end ||
        (k > 0 && !(targets[k] > targets[k - 1])))
      throw Error(ErrorCode::InvalidArgument, "output times must increase within (t0, t_end]");
  }
  const bool by_time = !targets.empty();
  if (targets.empty() || targets.back() < config.t_end) targets.push_back(config.t_end);

  Trajectory traj;
  traj.snapshots.push_back(initial);
  traj.snapshot_dt.push_back(0.0);

  Field current = initial;
  double dt = config.dt_init;
  std::size_t target = 0;
  std::size_t accepted = 0;
  while (target < targets.size() && current.time() < targets[target]) {
    StepOutcome out = [&] {
      try {
        return step(current, config, dt, targets[target]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::StepStalled) throw;
        std::ostringstream os;
        os << "run stalled at t = " << current.time() << ": " << e.what();
        throw Error(ErrorCode::StepStalled, os.str());
      }
    }();
    current = std::move(out.field);
    dt = out.report.dt_next;
    traj.steps.push_back(out.report);
    ++accepted;

    bool snap = false;
    if (current.time() == targets[target]) {
      ++target;
      snap = by_time || target == targets.size();
    }
    if (!by_time && options.snapshot_stride > 0 && accepted % options.snapshot_stride == 0)
      snap = true;
    if (snap) {
      traj.snapshots.push_back(current);
      traj.snapshot_dt.push_back(out.report.dt_used);
    }
  }
  return traj;
}

Field perturb_initial(const Field& reference, double epsilon, const Profile& phi) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and nonnegative");
  if (epsilon == 0.0) return reference;
  const std::size_t n = reference.species();
  const std::size_t cells = reference.cells();
  std::vector<Vector> values(cells);
  double sup = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    Vector p = phi(reference.grid().center(k));
    if (p.size() != n) throw Error(ErrorCode::DimensionMismatch, "perturbation species count");
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : p) {
      v -= mean;
      sup = std::max(sup, std::abs(v));
    }
    values[k] = std::move(p);
  }
  const double margin = reference.min_value();
  if (margin < 2.0 * epsilon * sup) {
    std::ostringstream os;
    os << "perturbation epsilon |phi| = " << epsilon * sup << " exceeds half the interior margin "
       << margin;
    throw Error(ErrorCode::SimplexViolation, os.str());
  }
  Field out = reference;
  for (std::size_t k = 0; k < cells; ++k)
    for (std::size_t i = 0; i < n; ++i) out(k, i) += epsilon * values[k][i];
  return out;
}

Field perturb_initial(const Field& reference, double epsilon,
                      const std::function<double(double)>& mode, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  const std::size_t n = reference.species();
  Vector w(n);
  for (double& x : w) x = rng.uniform(0.5, 1.5);
  return perturb_initial(reference, epsilon, Profile([&](double x) {
                           const double m = mode(x);
                           Vector p(n);
                           for (std::size_t i = 0; i < n; ++i) p[i] = w[i] * m;
                           return p;
                         }));
}

}  // namespace stefan::pde
