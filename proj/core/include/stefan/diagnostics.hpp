#pragma once

// Entropy, dissipation and relative-entropy functionals on solver fields,
// plus pointwise checks of the velocity and dissipation lower bounds.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stefan/dense.hpp"
#include "stefan/models.hpp"
#include "stefan/simplex.hpp"
#include "stefan/solver.hpp"

namespace stefan::diag {

using pde::Field;
using thermo::ModelSpec;

/// sum_k dx sum_i h_i(c_i(k)).
double entropy(const Field& field, const ModelSpec& model);

/// sum_k dx sum_i h_i(c_i | cbar_i). Fields must share grid, species and
/// time; the reference must satisfy min >= 1e-10.
double relative_entropy(const Field& field, const Field& ref, const ModelSpec& model);

/// Dissipation integrand at each interior face (N-1 values):
/// classic 4 g^T A^BD g with g = grad sqrt(c); otherwise y^T M y with
/// y = sqrt(c_f) grad h'(c).
Vector dissipation_density(const Field& field, const ModelSpec& model);
/// dx * sum of dissipation_density.
double dissipation(const Field& field, const ModelSpec& model);

/// Entropy production at each interior face, -sum_i (J_i/sqrt c_i) (P_L sqrt(c) grad mu)_i
/// with J from the inverted force-flux relation. Classic models take
/// sqrt(c) grad mu = 2 grad sqrt(c). Needs a symmetric coupling.
Vector entropy_production_rs(const Field& field, const ModelSpec& model);

struct VelocityBound {
  double lhs = 0.0;  // sum_i c_i |u_i|^2
  double rhs = 0.0;  // (4/mu^2) sum_i |grad sqrt c_i|^2
  double margin() const noexcept { return lhs - rhs; }
};

/// Pointwise: sqrt(c_i) u_i = -2 A^BD P_L g with g = grad sqrt(c).
VelocityBound velocity_bound(const Composition& c, std::span<const double> grad_sqrt_c,
                             const DiffusionTable& d);
/// Max over interior faces of lhs - rhs (expected <= 1e-10).
double velocity_bound_check(const Field& field, const DiffusionTable& d);

struct DissipationBoundConstants {
  double m = 0.0;
  double eta = 0.0;        // min over species of h'' on [m/2, 1]
  double zeta = 0.0;       // m^2 eta^2 / 32
  double gamma_hat = 0.0;  // sampled sup |B|_F over min c >= m/2
  double lambda = 0.0;     // 1 / (gamma_hat n + 1)
  double beta = 0.0;       // zeta lambda / 2
};

/// Constants of the lower bound; eta on a 1e-4 grid, gamma_hat over
/// `samples` random points of {min c >= m/2} plus its vertices.
/// Rejects models whose coupling is not symmetric.
DissipationBoundConstants dissipation_bound_constants(const ModelSpec& model, double m,
                                                      std::size_t samples = 2000,
                                                      std::uint64_t seed = 0);

struct DissipationBound {
  double lhs = 0.0;  // Z^T B^BD Z, Z_i = sqrt(c_i) h_i''(c_i) grad c_i
  double rhs = 0.0;  // 2 beta |grad c|^2
  bool pass = false; // lhs >= rhs - 1e-10
};

/// Needs min c >= m/2 and sum_i grad c_i = 0.
DissipationBound dissipation_lower_bound_check(const Composition& c, std::span<const double> grad_c,
                                               const ModelSpec& model,
                                               const DissipationBoundConstants& k);

/// C^2 cutoff: psi = 0 on [0, m/2], 1 on [m/2 + eps, 1], quintic blend between.
struct CutoffFn {
  double m = 0.0;
  double eps = 0.0;

  double psi(double r) const noexcept;
  double dpsi(double r) const noexcept;
  double d2psi(double r) const noexcept;
  /// prod_i psi(c_i)
  double chi(std::span<const double> c) const noexcept;
};

/// eps defaults to m/4 when not positive.
CutoffFn build_cutoff(double m, double eps = 0.0);

struct SplitDissipation {
  double low = 0.0;   // integral of (1 - chi) Z^T B^BD Z
  double high = 0.0;  // integral of chi |grad (c - cbar)|^2
};

SplitDissipation split_dissipation(const Field& field, const Field& ref, const ModelSpec& model,
                                   const CutoffFn& cutoff);

struct DiagnosticsRecord {
  double t = 0.0;
  double entropy = 0.0;
  double dissipation = 0.0;
  std::optional<double> rel_entropy;
  double rs_min = 0.0;  // NaN when not defined for the model
  Vector mass;
  double min_c = 0.0;
  double sum_dev = 0.0;
};

DiagnosticsRecord record(const Field& field, const ModelSpec& model, const Field* ref = nullptr);

/// H(a_k | ref_k) for paired snapshots.
Vector relative_entropy_series(const std::vector<Field>& fields, const std::vector<Field>& refs,
                               const ModelSpec& model);

struct RelEntropyReport {
  Vector epsilons;
  Vector h0;
  Vector sup_ratio;  // sup_t H(t) / H(0)
  double fitted_order = 0.0;  // least-squares slope of log h0 against log epsilon
};

/// series[k] is H(t) for epsilons[k]. Needs >= 3 positive epsilons, each half
/// the previous.
RelEntropyReport gronwall_report(std::span<const double> epsilons, const std::vector<Vector>& series);

}  // namespace stefan::diag
