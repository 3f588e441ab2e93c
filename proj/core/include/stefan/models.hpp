#pragma once

// Registry of the concrete cross-diffusion models and their mobility rules.
//
// Every model is written as d_t c_i = div( sqrt(c_i) sum_j M_ij sqrt(c_j) grad h_j'(c_j) ).
// mobility_core() returns M at a composition; coupling() returns the matrix
// B whose constrained inverse is M, which is what the structural audits check.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stefan/dense.hpp"
#include "stefan/entropy.hpp"
#include "stefan/simplex.hpp"

namespace stefan::thermo {

enum class ModelKind { ClassicMs, Pvd, Tumor, PorousMedium, MolarMass };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view id) noexcept;
/// classic-ms, pvd, tumor, porous-medium, molar-mass
const std::vector<std::string_view>& model_ids() noexcept;

struct ModelParams {
  std::size_t n = 3;
  /// Off-diagonal coefficients; for tumor these are the k_ij of K(c).
  std::optional<DiffusionTable> d;
  double gamma = 2.0;   // porous-medium exponent
  double beta = 1.0;    // tumor
  double theta = 0.0;   // tumor
  Vector masses;        // molar-mass, size n
};

class ModelSpec {
 public:
  ModelSpec(ModelKind kind, ModelParams params);

  ModelKind kind() const noexcept { return kind_; }
  std::string_view id() const noexcept { return to_string(kind_); }
  std::size_t size() const noexcept { return params_.n; }
  const ModelParams& params() const noexcept { return params_; }
  const DiffusionTable& table() const noexcept { return *params_.d; }
  const EntropyModel& entropy(std::size_t species) const { return entropies_.at(species); }
  const std::vector<EntropyModel>& entropies() const noexcept { return entropies_; }

  /// Classic Maxwell-Stefan runs use the gradient-of-sqrt(c) flux.
  bool uses_sqrt_form() const noexcept { return kind_ == ModelKind::ClassicMs; }

  /// M(c) in the flux above.
  Matrix mobility_core(const Composition& c) const;
  /// B(c) with B^BD = M (the matrix carrying the structural assumptions).
  Matrix coupling(const Composition& c) const;
  /// Lower bound on the nonzero eigenvalues of B(c) on L claimed by the
  /// model's structure; NaN when none is claimed.
  double coupling_eigen_bound(const Composition& c) const;

 private:
  ModelKind kind_;
  ModelParams params_;
  std::vector<EntropyModel> entropies_;
};

/// Validates parameters for the kind; fills a unit D table when none is given.
ModelSpec make_model(ModelKind kind, ModelParams params);
ModelSpec make_model(std::string_view id, ModelParams params);

/// W(c) of the avascular tumor model; third column zero. n must be 3.
Matrix tumor_w_matrix(const Composition& c, double beta, double theta);

/// R = A^BD(c,k) diag(1/sqrt c) W(c) diag(sqrt c) P_L; needs min c >= 1e-12.
Matrix tumor_mobility(const Composition& c, double beta, double theta, const DiffusionTable& k);

/// A~(rho) with D~_ij = (sum_k rho_k/M_k)^2 M_i M_j.
Matrix molar_mass_friction(const Composition& rho, std::span<const double> masses);
/// Same with D~_ij = (sum_k rho_k/M_k)^2 M_i M_j D_ij, so that M = 1 recovers A(rho).
Matrix molar_mass_friction(const Composition& rho, std::span<const double> masses,
                           const DiffusionTable& d);

struct AssumptionReport {
  std::string model;
  std::size_t samples = 0;
  double floor = 0.0;

  double symmetry_defect = 0.0;  // max |B_ij - B_ji| / max(1, |B|_max)
  bool symmetric = false;
  double kernel_residual = 0.0;  // max |B sqrt(c)|_inf
  bool kernel_ok = false;
  double sup_frobenius = 0.0;
  double lipschitz_estimate = 0.0;  // max |B(c) - B(c')|_F / |c - c'|, |c - c'| <= 1e-3
  bool bounded = false;
  /// (m, gamma(m)) with gamma(m) = max |B|_F over samples with min c >= m.
  std::vector<std::pair<double, double>> envelope;
  bool envelope_monotone = false;
  /// min over samples of (smallest eigenvalue of sym(B) on L) - claimed bound.
  double eigen_margin = 0.0;
  double min_nonzero_eigenvalue = 0.0;
  bool eigen_bound_claimed = false;
  bool eigen_ok = false;
  /// sym(B) positive definite on L at every sample.
  bool positive_on_l = false;

  bool all_pass() const noexcept {
    return symmetric && kernel_ok && bounded && envelope_monotone && eigen_ok && positive_on_l;
  }
};

AssumptionReport audit_assumptions_B(const ModelSpec& spec, std::size_t samples, double floor,
                                     std::uint64_t seed = 0);

}  // namespace stefan::thermo
