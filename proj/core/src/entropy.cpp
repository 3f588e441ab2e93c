#include "stefan/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "stefan/error.hpp"

namespace stefan::thermo {

EntropyModel::EntropyModel(std::string name, Functions f, bool closed_at_zero, double h_at_zero,
                           std::map<std::string, double> params)
    : name_(std::move(name)),
      f_(std::move(f)),
      closed_at_zero_(closed_at_zero),
      h_at_zero_(h_at_zero),
      params_(std::move(params)) {
  if (!f_.h || !f_.dh || !f_.d2h || !f_.d3h || !f_.p || !f_.dp)
    throw Error(ErrorCode::InvalidArgument, "entropy model '" + name_ + "' is missing a function");
}

void EntropyModel::require_positive(double c, const char* what) const {
  if (!(c > 0.0))
    throw Error(ErrorCode::EvaluationDomain,
                name_ + ": " + what + " evaluated at c = " + std::to_string(c));
}

double EntropyModel::h(double c) const {
  if (c == 0.0 && closed_at_zero_) return h_at_zero_;
  require_positive(c, "h");
  return f_.h(c);
}

double EntropyModel::dh(double c) const {
  require_positive(c, "h'");
  return f_.dh(c);
}

double EntropyModel::d2h(double c) const {
  require_positive(c, "h''");
  return f_.d2h(c);
}

double EntropyModel::d3h(double c) const {
  require_positive(c, "h'''");
  return f_.d3h(c);
}

double EntropyModel::pressure(double c) const {
  if (c == 0.0 && closed_at_zero_) return f_.p(0.0);
  require_positive(c, "p");
  return f_.p(c);
}

double EntropyModel::pressure_derivative(double c) const {
  require_positive(c, "p'");
  return f_.dp(c);
}

double EntropyModel::pressure_second_derivative(double c) const {
  require_positive(c, "p''");
  return f_.d2h(c) + c * f_.d3h(c);
}

EntropyModel boltzmann_entropy() {
  EntropyModel::Functions f;
  f.h = [](double c) { return c * (std::log(c) - 1.0); };
  f.dh = [](double c) { return std::log(c); };
  f.d2h = [](double c) { return 1.0 / c; };
  f.d3h = [](double c) { return -1.0 / (c * c); };
  f.p = [](double c) { return c; };
  f.dp = [](double) { return 1.0; };
  return EntropyModel("boltzmann", std::move(f), true, 0.0);
}

EntropyModel porous_entropy(double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidArgument, "porous entropy needs gamma > 1");
  EntropyModel::Functions f;
  f.h = [gamma](double c) { return std::pow(c, gamma) / (gamma - 1.0); };
  f.dh = [gamma](double c) { return gamma * std::pow(c, gamma - 1.0) / (gamma - 1.0); };
  f.d2h = [gamma](double c) { return gamma * std::pow(c, gamma - 2.0); };
  f.d3h = [gamma](double c) { return gamma * (gamma - 2.0) * std::pow(c, gamma - 3.0); };
  f.p = [gamma](double c) { return std::pow(c, gamma); };
  f.dp = [gamma](double c) { return gamma * std::pow(c, gamma - 1.0); };
  return EntropyModel("porous", std::move(f), true, 0.0, {{"gamma", gamma}});
}

EntropyModel molar_mass_entropy(double molar_mass) {
  if (!(molar_mass > 0.0) || !std::isfinite(molar_mass))
    throw Error(ErrorCode::InvalidArgument, "molar mass must be positive");
  const double m = molar_mass;
  EntropyModel::Functions f;
  f.h = [m](double r) { return (r / m) * (std::log(r / m) - 1.0); };
  f.dh = [m](double r) { return std::log(r / m) / m; };
  f.d2h = [m](double r) { return 1.0 / (m * r); };
  f.d3h = [m](double r) { return -1.0 / (m * r * r); };
  f.p = [m](double r) { return r / m; };
  f.dp = [m](double) { return 1.0 / m; };
  return EntropyModel("molar", std::move(f), true, 0.0, {{"M", m}});
}

double relative_entropy_density(const EntropyModel& model, double c, double cbar) {
  if (!(cbar > 0.0))
    throw Error(ErrorCode::EvaluationDomain, "reference value must be positive");
  if (c < 0.0) throw Error(ErrorCode::EvaluationDomain, "negative concentration");
  return model.h(c) - model.h(cbar) - model.dh(cbar) * (c - cbar);
}

PointwiseBound pointwise_bound_check(double c, double cbar) {
  PointwiseBound r;
  const double clog = c > 0.0 ? c * std::log(c / cbar) : 0.0;
  r.lhs = clog - (c - cbar);
  const double diff = c - cbar;
  r.bound1 = 0.5 * diff * diff;
  const double sdiff = std::sqrt(c) - std::sqrt(cbar);
  r.bound2 = sdiff * sdiff;
  r.margin = std::min(r.lhs - r.bound1, r.lhs - r.bound2);
  return r;
}

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  g.reserve(count + 2);
  for (std::size_t k = 0; k <= count; ++k) g.push_back(lo + static_cast<double>(k) * step);
  if (hi - g.back() > 1e-12) g.push_back(hi);
  g.back() = std::min(g.back(), hi);
  return g;
}

}  // namespace

double relenes_constant(const EntropyModel& model, double m, double step) {
  if (!(m > 0.0 && m <= 1.0)) throw Error(ErrorCode::InvalidArgument, "m must be in (0,1]");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  auto cs = grid(0.0, 1.0, step);
  if (!model.closed_at_zero()) cs.erase(cs.begin());
  const auto cbars = grid(m, 1.0, step);

  double best = std::numeric_limits<double>::infinity();
  for (double cbar : cbars) {
    const double hb = model.h(cbar);
    const double dhb = model.dh(cbar);
    best = std::min(best, 0.5 * model.d2h(cbar));
    for (double c : cs) {
      const double diff = c - cbar;
      if (std::abs(diff) < 1e-6) continue;
      const double rel = model.h(c) - hb - dhb * diff;
      best = std::min(best, rel / (diff * diff));
    }
  }
  return best;
}

HypothesisAudit audit_hypothesis_H(const EntropyModel& model, std::size_t grid_points,
                                   double delta) {
  if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two grid points");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta in (0,1)");

  HypothesisAudit a;
  a.k1_estimate = -std::numeric_limits<double>::infinity();
  a.k2_estimate = 0.0;
  a.min_c_h2 = std::numeric_limits<double>::infinity();
  bool positive = true;
  bool finite = true;

  auto visit = [&](double c) {
    const double h2 = model.d2h(c);
    const double ch2 = c * h2;
    const double p2 = model.pressure_second_derivative(c);
    a.k1_estimate = std::max(a.k1_estimate, ch2);
    a.min_c_h2 = std::min(a.min_c_h2, ch2);
    if (!(ch2 > 0.0)) positive = false;
    const double q = std::abs(p2) / h2;
    if (!std::isfinite(ch2) || !std::isfinite(q)) finite = false;
    a.k2_estimate = std::max(a.k2_estimate, q);
    ++a.samples;
  };

  const double n1 = static_cast<double>(grid_points - 1);
  const double log_lo = std::log(delta);
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double t = static_cast<double>(k) / n1;
    visit(delta + (1.0 - delta) * t);
    visit(std::exp(log_lo * (1.0 - t)));
  }
  a.pass = positive && finite;
  return a;
}

}  // namespace stefan::thermo
