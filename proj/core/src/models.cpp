#include "stefan/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "stefan/error.hpp"
#include "stefan/rng.hpp"

namespace stefan::thermo {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 5> kRegistry{{
    {ModelKind::ClassicMs, "classic-ms"},
    {ModelKind::Pvd, "pvd"},
    {ModelKind::Tumor, "tumor"},
    {ModelKind::PorousMedium, "porous-medium"},
    {ModelKind::MolarMass, "molar-mass"},
}};

constexpr double kTumorFloor = 1e-12;

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  for (const auto& [k, id] : kRegistry)
    if (k == kind) return id;
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view id) noexcept {
  for (const auto& [k, name] : kRegistry)
    if (name == id) return k;
  return std::nullopt;
}

const std::vector<std::string_view>& model_ids() noexcept {
  static const std::vector<std::string_view> ids = [] {
    std::vector<std::string_view> v;
    for (const auto& entry : kRegistry) v.push_back(entry.second);
    return v;
  }();
  return ids;
}

ModelSpec::ModelSpec(ModelKind kind, ModelParams params) : kind_(kind), params_(std::move(params)) {
  const std::size_t n = params_.n;
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "model needs n >= 2 species");
  if (!params_.d) params_.d = DiffusionTable::uniform(n, 1.0);
  if (params_.d->size() != n)
    throw Error(ErrorCode::DimensionMismatch, "D table size differs from n");

  switch (kind_) {
    case ModelKind::ClassicMs:
    case ModelKind::Pvd:
      entropies_.assign(n, boltzmann_entropy());
      break;
    case ModelKind::Tumor:
      if (n != 3) throw Error(ErrorCode::InvalidArgument, "tumor model needs n = 3");
      if (!(params_.beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "tumor needs beta > 0");
      if (!(params_.theta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tumor needs theta >= 0");
      entropies_.assign(n, boltzmann_entropy());
      break;
    case ModelKind::PorousMedium:
      entropies_.assign(n, porous_entropy(params_.gamma));
      break;
    case ModelKind::MolarMass:
      if (params_.masses.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "molar-mass needs one mass per species");
      for (double m : params_.masses) entropies_.push_back(molar_mass_entropy(m));
      break;
  }
}

Matrix ModelSpec::mobility_core(const Composition& c) const {
  if (c.size() != params_.n) throw Error(ErrorCode::DimensionMismatch, "composition size");
  switch (kind_) {
    case ModelKind::ClassicMs:
      return bott_duffin(build_friction_matrix(c, *params_.d)).matrix;
    case ModelKind::Pvd:
    case ModelKind::PorousMedium:
      return build_friction_matrix(c, *params_.d).matrix;
    case ModelKind::Tumor:
      return tumor_mobility(c, params_.beta, params_.theta, *params_.d);
    case ModelKind::MolarMass:
      return bott_duffin(molar_mass_friction(c, params_.masses, *params_.d), c).matrix;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

Matrix ModelSpec::coupling(const Composition& c) const {
  if (c.size() != params_.n) throw Error(ErrorCode::DimensionMismatch, "composition size");
  switch (kind_) {
    case ModelKind::ClassicMs:
      return build_friction_matrix(c, *params_.d).matrix;
    case ModelKind::Pvd:
    case ModelKind::PorousMedium:
      return bott_duffin(build_friction_matrix(c, *params_.d)).matrix;
    case ModelKind::Tumor:
      return tumor_mobility(c, params_.beta, params_.theta, *params_.d);
    case ModelKind::MolarMass:
      return molar_mass_friction(c, params_.masses, *params_.d);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

double ModelSpec::coupling_eigen_bound(const Composition& c) const {
  switch (kind_) {
    case ModelKind::ClassicMs:
      return params_.d->mu_bound();
    case ModelKind::Pvd:
    case ModelKind::PorousMedium:
      return params_.d->lambda_bound();
    case ModelKind::MolarMass: {
      double conc = 0.0;
      for (std::size_t k = 0; k < params_.n; ++k) conc += c[k] / params_.masses[k];
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < params_.n; ++i)
        for (std::size_t j = 0; j < params_.n; ++j)
          if (i != j)
            bound = std::min(bound, 1.0 / (conc * conc * params_.masses[i] * params_.masses[j] *
                                           (*params_.d)(i, j)));
      return bound;
    }
    case ModelKind::Tumor:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

ModelSpec make_model(ModelKind kind, ModelParams params) { return ModelSpec(kind, std::move(params)); }

ModelSpec make_model(std::string_view id, ModelParams params) {
  const auto kind = parse_model_kind(id);
  if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(id) + "'");
  return ModelSpec(*kind, std::move(params));
}

Matrix tumor_w_matrix(const Composition& c, double beta, double theta) {
  if (c.size() != 3) throw Error(ErrorCode::InvalidArgument, "W(c) is defined for n = 3");
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
  if (!(theta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be nonnegative");
  const double c1 = c[0], c2 = c[1], c3 = c[2];
  const double bt = beta * theta;
  const double g = 1.0 + theta * c1;
  Matrix w(3, 3);
  w(0, 0) = 2.0 * c1 * (1.0 - c1) - bt * c1 * c2 * c2;
  w(0, 1) = -2.0 * beta * c1 * c2 * g;
  w(1, 0) = -2.0 * c1 * c2 + bt * (1.0 - c2) * c2 * c2;
  w(1, 1) = 2.0 * beta * c2 * (1.0 - c2) * g;
  w(2, 0) = -2.0 * c1 * c3 - bt * c3 * c2 * c2;
  w(2, 1) = -2.0 * beta * c3 * c2 * g;
  return w;
}

Matrix tumor_mobility(const Composition& c, double beta, double theta, const DiffusionTable& k) {
  if (c.min() < kTumorFloor) {
    std::ostringstream os;
    os << "tumor mobility needs min c >= " << kTumorFloor << ", got " << c.min();
    throw Error(ErrorCode::FloorViolation, os.str());
  }
  const Matrix w = tumor_w_matrix(c, beta, theta);
  const Matrix abd = bott_duffin(build_friction_matrix(c, k)).matrix;
  const Vector& s = c.sqrt_values();
  Matrix scaled(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) scaled(i, j) = w(i, j) * s[j] / s[i];
  return abd * scaled * projectors(c).p_l;
}

Matrix molar_mass_friction(const Composition& rho, std::span<const double> masses) {
  return molar_mass_friction(rho, masses, DiffusionTable::uniform(rho.size(), 1.0));
}

Matrix molar_mass_friction(const Composition& rho, std::span<const double> masses,
                           const DiffusionTable& d) {
  const std::size_t n = rho.size();
  if (masses.size() != n || d.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "masses and D table must match composition size");
  double conc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(masses[k] > 0.0) || !std::isfinite(masses[k]))
      throw Error(ErrorCode::InvalidArgument, "molar masses must be positive");
    conc += rho[k] / masses[k];
  }
  const double c2 = conc * conc;
  auto dt = [&](std::size_t i, std::size_t j) { return c2 * masses[i] * masses[j] * d(i, j); };
  const Vector& s = rho.sqrt_values();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) diag += rho[k] / dt(i, k);
    a(i, i) = diag;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) a(i, j) = -s[i] * s[j] / dt(i, j);
  }
  return a;
}

AssumptionReport audit_assumptions_B(const ModelSpec& spec, std::size_t samples, double floor,
                                     std::uint64_t seed) {
  const std::size_t n = spec.size();
  if (!(floor > 0.0) || !(static_cast<double>(n) * floor < 1.0))
    throw Error(ErrorCode::InvalidArgument, "floor must satisfy 0 < n*floor < 1");
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");

  Xorshift64Star rng(seed);
  AssumptionReport rep;
  rep.model = std::string(spec.id());
  rep.floor = floor;
  rep.eigen_margin = std::numeric_limits<double>::infinity();
  rep.min_nonzero_eigenvalue = std::numeric_limits<double>::infinity();
  rep.eigen_bound_claimed = false;

  std::vector<Vector> points;
  points.reserve(samples + n);
  // vertices of the floored simplex
  for (std::size_t v = 0; v < n; ++v) {
    Vector p(n, floor);
    p[v] = 1.0 - static_cast<double>(n - 1) * floor;
    points.push_back(std::move(p));
  }
  for (std::size_t k = 0; k < samples; ++k) points.push_back(sample_simplex_floored(rng, n, floor));

  std::vector<std::pair<double, double>> minc_norm;
  bool finite = true;
  bool positive = true;
  for (const Vector& raw : points) {
    const Composition c = make_composition(raw);
    const Matrix b = spec.coupling(c);
    const double scale = std::max(1.0, max_abs(b));
    rep.symmetry_defect = std::max(rep.symmetry_defect, asymmetry(b) / scale);
    const Vector r = b * std::span<const double>(c.sqrt_values());
    rep.kernel_residual = std::max(rep.kernel_residual, norm_inf(r) / scale);

    const double fro = frobenius_norm(b);
    if (!std::isfinite(fro)) finite = false;
    rep.sup_frobenius = std::max(rep.sup_frobenius, fro);
    minc_norm.emplace_back(c.min(), fro);

    const Vector eig = nonzero_eigenvalues(symmetric_part(b), c);
    const double lo = eig.front();
    rep.min_nonzero_eigenvalue = std::min(rep.min_nonzero_eigenvalue, lo);
    if (!(lo > 0.0)) positive = false;
    const double bound = spec.coupling_eigen_bound(c);
    if (!std::isnan(bound)) {
      rep.eigen_bound_claimed = true;
      rep.eigen_margin = std::min(rep.eigen_margin, lo - bound);
    }

    // paired sample at distance <= 1e-3
    Vector z = sample_zero_sum(rng, n);
    const double zn = norm2(z);
    if (zn > 0.0) {
      const double len = 1e-3 * rng.uniform(0.1, 1.0);
      Vector q(raw);
      bool inside = true;
      for (std::size_t i = 0; i < n; ++i) {
        q[i] += len * z[i] / zn;
        if (q[i] < floor) inside = false;
      }
      if (inside) {
        const Composition cq = make_composition(q);
        const Matrix bq = spec.coupling(cq);
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) dist += (cq[i] - c[i]) * (cq[i] - c[i]);
        dist = std::sqrt(dist);
        if (dist > 0.0)
          rep.lipschitz_estimate = std::max(rep.lipschitz_estimate, frobenius_norm(bq - b) / dist);
      }
    }
  }
  rep.samples = points.size();

  for (double m = floor; static_cast<double>(n) * m < 1.0; m *= 2.0) {
    double g = 0.0;
    bool any = false;
    for (const auto& [mc, fro] : minc_norm)
      if (mc >= m * (1.0 - 1e-12)) {
        g = std::max(g, fro);
        any = true;
      }
    if (!any) break;
    rep.envelope.emplace_back(m, g);
  }
  rep.envelope_monotone = !rep.envelope.empty();
  for (std::size_t k = 1; k < rep.envelope.size(); ++k)
    if (rep.envelope[k].second > rep.envelope[k - 1].second) rep.envelope_monotone = false;

  rep.symmetric = rep.symmetry_defect <= 1e-12;
  rep.kernel_ok = rep.kernel_residual <= kKernelTolerance;
  rep.bounded = finite && std::isfinite(rep.lipschitz_estimate);
  rep.positive_on_l = positive;
  if (rep.eigen_bound_claimed) {
    rep.eigen_ok = rep.eigen_margin >= -1e-9;
  } else {
    rep.eigen_margin = std::numeric_limits<double>::quiet_NaN();
    rep.eigen_ok = positive;
  }
  return rep;
}

}  // namespace stefan::thermo
