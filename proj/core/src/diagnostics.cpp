#include "stefan/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stefan/entropy.hpp"
#include "stefan/error.hpp"
#include "stefan/rng.hpp"

namespace stefan::diag {

namespace {

void require_same_grid(const Field& a, const Field& b) {
  if (a.cells() != b.cells() || a.species() != b.species() ||
      a.grid().length != b.grid().length)
    throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

void require_same_time(const Field& a, const Field& b) {
  if (std::abs(a.time() - b.time()) > 1e-12 * std::max(1.0, std::abs(a.time()))) {
    std::ostringstream os;
    os << "fields at different times " << a.time() << " and " << b.time();
    throw Error(ErrorCode::GridMismatch, os.str());
  }
}

/// Face gradient vector entering the dissipation quadratic form.
Vector face_gradient(const Field& field, const ModelSpec& model, std::size_t face,
                     const Composition& cf) {
  const std::size_t n = field.species();
  const double dx = field.grid().dx();
  Vector y(n);
  if (model.uses_sqrt_form()) {
    for (std::size_t j = 0; j < n; ++j)
      y[j] = (std::sqrt(field(face, j)) - std::sqrt(field(face - 1, j))) / dx;
  } else {
    const Vector& s = cf.sqrt_values();
    for (std::size_t j = 0; j < n; ++j) {
      const auto& h = model.entropy(j);
      y[j] = s[j] * (h.dh(field(face, j)) - h.dh(field(face - 1, j))) / dx;
    }
  }
  return y;
}

}  // namespace

double entropy(const Field& field, const ModelSpec& model) {
  if (model.size() != field.species())
    throw Error(ErrorCode::DimensionMismatch, "model and field species differ");
  return pde::discrete_entropy(field, model);
}

double relative_entropy(const Field& field, const Field& ref, const ModelSpec& model) {
  require_same_grid(field, ref);
  require_same_time(field, ref);
  if (ref.min_value() < 1e-10)
    throw Error(ErrorCode::EvaluationDomain, "reference field must satisfy min >= 1e-10");
  const std::size_t n = field.species();
  double sum = 0.0;
  for (std::size_t k = 0; k < field.cells(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      sum += thermo::relative_entropy_density(model.entropy(i), field(k, i), ref(k, i));
  return sum * field.grid().dx();
}

Vector dissipation_density(const Field& field, const ModelSpec& model) {
  const std::size_t cells = field.cells();
  Vector out(cells - 1);
  const double scale = model.uses_sqrt_form() ? 4.0 : 1.0;
  for (std::size_t f = 1; f < cells; ++f) {
    const Composition cf = pde::face_composition(field, f);
    const Vector y = face_gradient(field, model, f, cf);
    out[f - 1] = scale * quadratic_form(model.mobility_core(cf), y, y);
  }
  return out;
}

double dissipation(const Field& field, const ModelSpec& model) {
  const Vector d = dissipation_density(field, model);
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum * field.grid().dx();
}

Vector entropy_production_rs(const Field& field, const ModelSpec& model) {
  if (model.kind() == thermo::ModelKind::Tumor)
    throw Error(ErrorCode::InvalidArgument, "entropy production needs a symmetric coupling");
  const std::size_t cells = field.cells();
  const std::size_t n = field.species();
  Vector out(cells - 1);
  for (std::size_t f = 1; f < cells; ++f) {
    const Composition cf = pde::face_composition(field, f);
    const Matrix pl = projectors(cf).p_l;
    Vector force = face_gradient(field, model, f, cf);  // sqrt(c) grad mu
    Vector flux_over_sqrt;                              // J_i / sqrt(c_i) = sqrt(c_i) u_i
    if (model.uses_sqrt_form()) {
      for (double& v : force) v *= 2.0;
      const Vector g = pl * std::span<const double>(force);
      Vector half(n);
      for (std::size_t i = 0; i < n; ++i) half[i] = 0.5 * g[i];
      flux_over_sqrt = invert_fluxes(cf, half, model.table());
    } else {
      flux_over_sqrt = model.mobility_core(cf) * std::span<const double>(force);
      for (double& v : flux_over_sqrt) v = -v;
    }
    const Vector projected = pl * std::span<const double>(force);
    out[f - 1] = -dot(flux_over_sqrt, projected);
  }
  return out;
}

VelocityBound velocity_bound(const Composition& c, std::span<const double> grad_sqrt_c,
                             const DiffusionTable& d) {
  const Matrix pl = projectors(c).p_l;
  const Vector g = pl * grad_sqrt_c;
  const Vector w = invert_fluxes(c, g, d);
  VelocityBound b;
  b.lhs = dot(w, w);
  const double mu = d.mu_bound();
  b.rhs = 4.0 / (mu * mu) * dot(grad_sqrt_c, grad_sqrt_c);
  return b;
}

double velocity_bound_check(const Field& field, const DiffusionTable& d) {
  const std::size_t n = field.species();
  const double dx = field.grid().dx();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 1; f < field.cells(); ++f) {
    const Composition cf = pde::face_composition(field, f);
    Vector g(n);
    for (std::size_t j = 0; j < n; ++j)
      g[j] = (std::sqrt(field(f, j)) - std::sqrt(field(f - 1, j))) / dx;
    worst = std::max(worst, velocity_bound(cf, g, d).margin());
  }
  return worst;
}

DissipationBoundConstants dissipation_bound_constants(const ModelSpec& model, double m,
                                                      std::size_t samples, std::uint64_t seed) {
  const std::size_t n = model.size();
  const double floor = 0.5 * m;
  const double filled = static_cast<double>(n) * floor;
  if (!(m > 0.0) || !(filled <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "m must satisfy 0 < n m / 2 <= 1");
  if (model.kind() == thermo::ModelKind::Tumor)
    throw Error(ErrorCode::InvalidArgument, "lower bound constants need a symmetric coupling");

  DissipationBoundConstants k;
  k.m = m;
  k.eta = std::numeric_limits<double>::infinity();
  const double step = 1e-4;
  const auto points = static_cast<std::size_t>(std::ceil((1.0 - floor) / step));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p <= points; ++p) {
      const double c = std::min(1.0, floor + static_cast<double>(p) * step);
      k.eta = std::min(k.eta, model.entropy(i).d2h(c));
    }
  k.zeta = m * m * k.eta * k.eta / 32.0;

  Xorshift64Star rng(seed);
  auto visit = [&](const Vector& raw) {
    const Composition c = make_composition(raw);
    const Matrix b = model.coupling(c);
    if (asymmetry(b) > 1e-12 * std::max(1.0, max_abs(b)))
      throw Error(ErrorCode::InvalidArgument, "lower bound constants need a symmetric coupling");
    k.gamma_hat = std::max(k.gamma_hat, frobenius_norm(b));
  };
  for (std::size_t v = 0; v < n; ++v) {
    Vector p(n, floor);
    p[v] = 1.0 - static_cast<double>(n - 1) * floor;
    visit(p);
  }
  // n m / 2 == 1 leaves the single point already visited
  if (filled < 1.0)
    for (std::size_t s = 0; s < samples; ++s) visit(sample_simplex_floored(rng, n, floor));

  k.lambda = 1.0 / (k.gamma_hat * static_cast<double>(n) + 1.0);
  k.beta = 0.5 * k.zeta * k.lambda;
  return k;
}

DissipationBound dissipation_lower_bound_check(const Composition& c, std::span<const double> grad_c,
                                               const ModelSpec& model,
                                               const DissipationBoundConstants& k) {
  const std::size_t n = c.size();
  if (grad_c.size() != n || model.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "gradient, composition and model sizes differ");
  if (c.min() < 0.5 * k.m * (1.0 - 1e-12))
    throw Error(ErrorCode::InvalidArgument, "composition below m/2");
  double total = 0.0;
  for (double g : grad_c) total += g;
  if (std::abs(total) > 1e-10 * std::max(1.0, norm2(grad_c)))
    throw Error(ErrorCode::InvalidArgument, "gradients must sum to zero");

  Vector z(n);
  const Vector& s = c.sqrt_values();
  for (std::size_t i = 0; i < n; ++i) z[i] = s[i] * model.entropy(i).d2h(c[i]) * grad_c[i];
  DissipationBound b;
  b.lhs = quadratic_form(model.mobility_core(c), z, z);
  b.rhs = 2.0 * k.beta * dot(grad_c, grad_c);
  b.pass = b.lhs >= b.rhs - 1e-10;
  return b;
}

double CutoffFn::psi(double r) const noexcept {
  const double t = (r - 0.5 * m) / eps;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double CutoffFn::dpsi(double r) const noexcept {
  const double t = (r - 0.5 * m) / eps;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t) / eps;
}

double CutoffFn::d2psi(double r) const noexcept {
  const double t = (r - 0.5 * m) / eps;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (eps * eps);
}

double CutoffFn::chi(std::span<const double> c) const noexcept {
  double v = 1.0;
  for (double x : c) v *= psi(x);
  return v;
}

CutoffFn build_cutoff(double m, double eps) {
  if (!(eps > 0.0)) eps = 0.25 * m;
  if (!(m > 0.0) || !(0.5 * m + eps < 1.0))
    throw Error(ErrorCode::InvalidArgument, "cutoff needs 0 < m/2 and m/2 + eps < 1");
  return CutoffFn{m, eps};
}

SplitDissipation split_dissipation(const Field& field, const Field& ref, const ModelSpec& model,
                                   const CutoffFn& cutoff) {
  require_same_grid(field, ref);
  const std::size_t n = field.species();
  const double dx = field.grid().dx();
  SplitDissipation out;
  for (std::size_t f = 1; f < field.cells(); ++f) {
    const Composition cf = pde::face_composition(field, f);
    const double chi = cutoff.chi(cf.values());
    double grad2 = 0.0;
    Vector z(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dc = (field(f, i) - field(f - 1, i)) / dx;
      const double dd = dc - (ref(f, i) - ref(f - 1, i)) / dx;
      grad2 += dd * dd;
      if (chi < 1.0) z[i] = cf.sqrt_values()[i] * model.entropy(i).d2h(cf[i]) * dc;
    }
    if (chi < 1.0) out.low += (1.0 - chi) * quadratic_form(model.mobility_core(cf), z, z) * dx;
    out.high += chi * grad2 * dx;
  }
  return out;
}

DiagnosticsRecord record(const Field& field, const ModelSpec& model, const Field* ref) {
  DiagnosticsRecord r;
  r.t = field.time();
  r.entropy = entropy(field, model);
  r.dissipation = dissipation(field, model);
  if (ref) r.rel_entropy = relative_entropy(field, *ref, model);
  if (model.kind() == thermo::ModelKind::Tumor) {
    r.rs_min = std::numeric_limits<double>::quiet_NaN();
  } else {
    const Vector rs = entropy_production_rs(field, model);
    r.rs_min = *std::min_element(rs.begin(), rs.end());
  }
  r.mass = field.masses();
  r.min_c = field.min_value();
  r.sum_dev = field.max_sum_deviation();
  return r;
}

Vector relative_entropy_series(const std::vector<Field>& fields, const std::vector<Field>& refs,
                               const ModelSpec& model) {
  if (fields.size() != refs.size())
    throw Error(ErrorCode::GridMismatch, "trajectories have different snapshot counts");
  Vector out(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k)
    out[k] = relative_entropy(fields[k], refs[k], model);
  return out;
}

RelEntropyReport gronwall_report(std::span<const double> epsilons, const std::vector<Vector>& series) {
  if (epsilons.size() < 3) throw Error(ErrorCode::InvalidArgument, "need at least three epsilons");
  if (series.size() != epsilons.size())
    throw Error(ErrorCode::DimensionMismatch, "one relative-entropy series per epsilon");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilons must be positive");
    if (k > 0 && std::abs(epsilons[k - 1] / epsilons[k] - 2.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument, "each epsilon must halve the previous one");
    if (series[k].empty()) throw Error(ErrorCode::InvalidArgument, "empty relative-entropy series");
  }

  RelEntropyReport rep;
  rep.epsilons.assign(epsilons.begin(), epsilons.end());
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    const double h0 = series[k].front();
    if (!(h0 > 0.0)) {
      std::ostringstream os;
      os << "H(0) = " << h0 << " for epsilon = " << epsilons[k];
      throw Error(ErrorCode::NonPositiveH0, os.str());
    }
    rep.h0.push_back(h0);
    rep.sup_ratio.push_back(*std::max_element(series[k].begin(), series[k].end()) / h0);
  }

  const double count = static_cast<double>(epsilons.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    const double x = std::log(epsilons[k]);
    const double y = std::log(rep.h0[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.fitted_order = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return rep;
}

}  // namespace stefan::diag
