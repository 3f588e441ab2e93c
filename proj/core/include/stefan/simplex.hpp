#pragma once

// Simplex-constrained linear algebra: compositions, friction matrices,
// orthogonal projectors onto L = {z : sqrt(c).z = 0} and its complement,
// the Bott-Duffin inverse with respect to L, and spectral certificates.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "stefan/dense.hpp"

namespace stefan {

inline constexpr double kNegativeEntryTolerance = 1e-12;
inline constexpr double kSumTolerance = 1e-9;
inline constexpr double kKernelTolerance = 1e-10;
inline constexpr double kSingularConditionLimit = 1e14;
inline constexpr double kPositivityFloor = 1e-14;

/// Volume fractions on the unit simplex. Construct through make_composition.
class Composition {
 public:
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const Vector& sqrt_values() const noexcept { return sqrt_; }
  double min() const noexcept;

 private:
  friend Composition make_composition(std::span<const double> raw);
  explicit Composition(Vector values);

  Vector values_;
  Vector sqrt_;
};

/// Validates raw fractions: n >= 2, entries >= -1e-12 (clamped to zero),
/// |sum - 1| <= 1e-9; the accepted vector is rescaled to unit sum.
Composition make_composition(std::span<const double> raw);
inline Composition make_composition(std::initializer_list<double> raw) {
  return make_composition(std::span<const double>(raw.begin(), raw.size()));
}

/// Symmetric, strictly positive off-diagonal diffusivities D_ij.
class DiffusionTable {
 public:
  /// Full n x n table; the diagonal is ignored.
  explicit DiffusionTable(Matrix entries);
  /// Upper-triangular row-major list of the n(n-1)/2 off-diagonal values.
  static DiffusionTable from_upper(std::size_t n, std::span<const double> upper);
  static DiffusionTable uniform(std::size_t n, double value);

  std::size_t size() const noexcept { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  const Matrix& entries() const noexcept { return entries_; }
  Vector upper() const;

  /// min_{i != j} 1/D_ij
  double mu_bound() const;
  /// (2 sum_{i != j} (1/D_ij + 1))^{-1}, ordered pairs
  double lambda_bound() const;

 private:
  Matrix entries_;
};

struct ProjectorPair {
  Matrix p_l;
  Matrix p_lperp;
};

struct FrictionMatrix {
  Matrix matrix;
  Composition composition;
  DiffusionTable table;
};

struct ConstrainedInverse {
  Matrix matrix;
  /// Lower bound for the nonzero eigenvalues of the forward matrix.
  double mu_bound = 0.0;
  /// Lower bound for the nonzero eigenvalues of the inverse.
  double lambda_bound = 0.0;
  Composition composition;
};

ProjectorPair projectors(const Composition& c);

FrictionMatrix build_friction_matrix(const Composition& c, const DiffusionTable& d);

/// Matrix-valued model callback K(c).
using KernelCallback = std::function<Matrix(const Composition&)>;

inline constexpr double kGeneralizedFloor = 1e-14;

/// B_ij = K_ij(c) sqrt(c_j) / sqrt(c_i); needs min c >= floor.
Matrix build_generalized_friction(const KernelCallback& k, const Composition& c,
                                  double floor = kGeneralizedFloor);

/// P_L (M P_L + P_perp)^{-1}. M must be symmetric with M sqrt(c) = 0.
/// Bounds come from Frobenius norms: lambda >= 1/||M P_L + P_perp||_F and
/// mu >= 1/||M^BD||_F.
ConstrainedInverse bott_duffin(const Matrix& m, const Composition& c);
/// Same inverse, with the classical bounds min 1/D_ij and lambda_bound().
ConstrainedInverse bott_duffin(const FrictionMatrix& a);

struct ConstrainedSolution {
  Vector x;  // in L
  Vector y;  // in L-perp
};

/// Solves M x + y = b with x in L and y in L-perp through
/// (M P_L + P_perp) z = b, x = P_L z, y = b - M x.
ConstrainedSolution solve_constrained_oracle(const Matrix& m, const Composition& c,
                                             std::span<const double> b);

enum class CertificateKind { Classic, Generalized };

struct SpectralCertificate {
  CertificateKind kind = CertificateKind::Classic;
  double min_nonzero = 0.0;          // forward matrix
  double inverse_min_nonzero = 0.0;  // Bott-Duffin inverse
  double max_nonzero = 0.0;
  double inverse_max_nonzero = 0.0;
  double mu = 0.0;      // bound for min_nonzero
  double lambda = 0.0;  // bound for inverse_min_nonzero
  bool forward_pass = false;
  bool inverse_pass = false;
  /// max relative mismatch between the sorted nonzero eigenvalues of the
  /// forward matrix and the reciprocals of the inverse's.
  double reciprocal_mismatch = 0.0;

  bool pass() const noexcept { return forward_pass && inverse_pass; }
};

/// Eigenvalues of the matrix restricted to L (the sqrt(c) direction removed).
Vector nonzero_eigenvalues(const Matrix& m, const Composition& c);

SpectralCertificate spectral_certificate(const FrictionMatrix& a);
/// Generalized kind: mu is taken from the caller (e.g. an audited eigenvalue
/// constant; NaN disables the check) and lambda = 1/(||B||_F n + 1).
SpectralCertificate spectral_certificate(const Matrix& b, const Composition& c,
                                         double mu = std::numeric_limits<double>::quiet_NaN());

/// sqrt(c_i) u_i = -2 sum_j A^BD_ij grad sqrt(c_j). Requires
/// |sqrt(c) . grad| <= 1e-10 max(1, |grad|).
Vector invert_fluxes(const Composition& c, std::span<const double> grad_sqrt_c,
                     const DiffusionTable& d);

}  // namespace stefan
