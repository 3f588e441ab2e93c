#include "stefan/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "stefan/error.hpp"

namespace stefan {

Composition::Composition(Vector values) : values_(std::move(values)), sqrt_(values_.size()) {
  for (std::size_t i = 0; i < values_.size(); ++i) sqrt_[i] = std::sqrt(values_[i]);
}

double Composition::min() const noexcept {
  return *std::min_element(values_.begin(), values_.end());
}

Composition make_composition(std::span<const double> raw) {
  if (raw.size() < 2) throw Error(ErrorCode::InvalidArgument, "composition needs n >= 2 species");
  Vector v(raw.begin(), raw.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw Error(ErrorCode::InvalidArgument, "non-finite fraction");
    if (v[i] < -kNegativeEntryTolerance) {
      std::ostringstream os;
      os << "entry " << i << " = " << v[i];
      throw Error(ErrorCode::NegativeEntry, os.str());
    }
    v[i] = std::max(v[i], 0.0);
    sum += v[i];
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "fractions sum to " << sum;
    throw Error(ErrorCode::SumViolation, os.str());
  }
  for (double& x : v) x /= sum;
  return Composition(std::move(v));
}

DiffusionTable::DiffusionTable(Matrix entries) : entries_(std::move(entries)) {
  if (!entries_.square() || entries_.rows() < 2)
    throw Error(ErrorCode::InvalidArgument, "diffusion table must be n x n with n >= 2");
  const std::size_t n = entries_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    entries_(i, i) = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = entries_(i, j);
      if (!(dij > 0.0) || !std::isfinite(dij))
        throw Error(ErrorCode::InvalidArgument, "D_ij must be positive and finite");
      if (dij != entries_(j, i)) throw Error(ErrorCode::InvalidArgument, "D_ij must equal D_ji");
    }
  }
}

DiffusionTable DiffusionTable::from_upper(std::size_t n, std::span<const double> upper) {
  if (n < 2 || upper.size() != n * (n - 1) / 2)
    throw Error(ErrorCode::InvalidArgument, "upper-triangular list needs n(n-1)/2 entries");
  Matrix m(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = upper[k];
      m(j, i) = upper[k];
      ++k;
    }
  return DiffusionTable(std::move(m));
}

DiffusionTable DiffusionTable::uniform(std::size_t n, double value) {
  Matrix m(n, n, value);
  return DiffusionTable(std::move(m));
}

Vector DiffusionTable::upper() const {
  Vector u;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) u.push_back(entries_(i, j));
  return u;
}

double DiffusionTable::mu_bound() const {
  double mu = std::numeric_limits<double>::infinity();
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) mu = std::min(mu, 1.0 / entries_(i, j));
  return mu;
}

double DiffusionTable::lambda_bound() const {
  double s = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += 1.0 / entries_(i, j) + 1.0;
  return 1.0 / (2.0 * s);
}

ProjectorPair projectors(const Composition& c) {
  const std::size_t n = c.size();
  const Vector& s = c.sqrt_values();
  ProjectorPair p{Matrix(n, n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double outer = s[i] * s[j];
      p.p_lperp(i, j) = outer;
      p.p_l(i, j) = (i == j ? 1.0 : 0.0) - outer;
    }
  return p;
}

FrictionMatrix build_friction_matrix(const Composition& c, const DiffusionTable& d) {
  const std::size_t n = c.size();
  if (d.size() != n) throw Error(ErrorCode::DimensionMismatch, "composition and D table sizes differ");
  const Vector& s = c.sqrt_values();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) diag += c[k] / d(i, k);
    a(i, i) = diag;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) a(i, j) = -s[i] * s[j] / d(i, j);
  }
  return FrictionMatrix{std::move(a), c, d};
}

Matrix build_generalized_friction(const KernelCallback& k, const Composition& c, double floor) {
  if (c.min() < floor) {
    std::ostringstream os;
    os << "min c = " << c.min() << " below floor " << floor;
    throw Error(ErrorCode::FloorViolation, os.str());
  }
  const Matrix kc = k(c);
  const std::size_t n = c.size();
  if (kc.rows() != n || kc.cols() != n) throw Error(ErrorCode::DimensionMismatch, "K(c) shape");
  const Vector& s = c.sqrt_values();
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = kc(i, j) * s[j] / s[i];
  return b;
}

namespace {

void check_forward(const Matrix& m, const Composition& c) {
  const std::size_t n = c.size();
  if (m.rows() != n || m.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "matrix and composition sizes differ");
  const double scale = std::max(1.0, max_abs(m));
  if (asymmetry(m) > kKernelTolerance * scale)
    throw Error(ErrorCode::InvalidArgument, "matrix is not symmetric");
  const Vector r = m * std::span<const double>(c.sqrt_values());
  if (norm_inf(r) > kKernelTolerance * scale) {
    std::ostringstream os;
    os << "|M sqrt(c)|_inf = " << norm_inf(r);
    throw Error(ErrorCode::KernelViolation, os.str());
  }
}

struct Augmented {
  Matrix x;          // M P_L + P_perp
  Matrix x_inverse;  // its inverse
  ProjectorPair p;
};

Augmented invert_augmented(const Matrix& m, const Composition& c) {
  ProjectorPair p = projectors(c);
  Matrix x = m * p.p_l + p.p_lperp;
  const LuDecomposition lu(x);
  if (lu.singular()) throw Error(ErrorCode::SingularSystem, "M P_L + P_perp is singular");
  Matrix inv = lu.inverse();
  const double cond = one_norm(x) * one_norm(inv);
  if (!(cond <= kSingularConditionLimit)) {
    std::ostringstream os;
    os << "condition number " << cond << " exceeds " << kSingularConditionLimit;
    throw Error(ErrorCode::SingularSystem, os.str());
  }
  return Augmented{std::move(x), std::move(inv), std::move(p)};
}

}  // namespace

ConstrainedInverse bott_duffin(const Matrix& m, const Composition& c) {
  check_forward(m, c);
  Augmented aug = invert_augmented(m, c);
  // P_L X^{-1} P_L equals P_L X^{-1}; the two-sided form keeps symmetry exact.
  Matrix bd = symmetric_part(aug.p.p_l * aug.x_inverse * aug.p.p_l);
  const double bd_norm = frobenius_norm(bd);
  ConstrainedInverse out{std::move(bd), 0.0, 0.0, c};
  out.lambda_bound = 1.0 / frobenius_norm(aug.x);
  out.mu_bound = bd_norm > 0.0 ? 1.0 / bd_norm : std::numeric_limits<double>::infinity();
  return out;
}

ConstrainedInverse bott_duffin(const FrictionMatrix& a) {
  ConstrainedInverse out = bott_duffin(a.matrix, a.composition);
  out.mu_bound = a.table.mu_bound();
  out.lambda_bound = a.table.lambda_bound();
  return out;
}

ConstrainedSolution solve_constrained_oracle(const Matrix& m, const Composition& c,
                                             std::span<const double> b) {
  check_forward(m, c);
  if (b.size() != c.size()) throw Error(ErrorCode::DimensionMismatch, "right-hand side size");
  ProjectorPair p = projectors(c);
  Matrix x = m * p.p_l + p.p_lperp;
  const LuDecomposition lu(x);
  if (lu.singular()) throw Error(ErrorCode::SingularSystem, "M P_L + P_perp is singular");
  const Vector z = lu.solve(b);
  ConstrainedSolution sol;
  sol.x = p.p_l * std::span<const double>(z);
  const Vector mx = m * std::span<const double>(sol.x);
  sol.y.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) sol.y[i] = b[i] - mx[i];
  return sol;
}

Vector nonzero_eigenvalues(const Matrix& m, const Composition& c) {
  const SymmetricEigen e = symmetric_eigen(m);
  const std::size_t n = e.values.size();
  const Vector& s = c.sqrt_values();
  std::size_t kernel = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double align = 0.0;
    for (std::size_t i = 0; i < n; ++i) align += e.vectors(i, k) * s[i];
    if (std::abs(align) > best) {
      best = std::abs(align);
      kernel = k;
    }
  }
  Vector out;
  out.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k)
    if (k != kernel) out.push_back(e.values[k]);
  return out;
}

namespace {

double reciprocal_mismatch(const Vector& forward, const Vector& inverse) {
  // Both ascending; the smallest forward eigenvalue pairs with the largest inverse one.
  double worst = 0.0;
  const std::size_t m = forward.size();
  for (std::size_t k = 0; k < m; ++k)
    worst = std::max(worst, std::abs(forward[k] * inverse[m - 1 - k] - 1.0));
  return worst;
}

SpectralCertificate certify(const Matrix& forward, const ConstrainedInverse& inv,
                            CertificateKind kind, double mu, double lambda) {
  const Vector fwd = nonzero_eigenvalues(forward, inv.composition);
  const Vector bwd = nonzero_eigenvalues(inv.matrix, inv.composition);
  SpectralCertificate cert;
  cert.kind = kind;
  cert.min_nonzero = fwd.front();
  cert.max_nonzero = fwd.back();
  cert.inverse_min_nonzero = bwd.front();
  cert.inverse_max_nonzero = bwd.back();
  cert.mu = mu;
  cert.lambda = lambda;
  cert.forward_pass = std::isnan(mu) ? cert.min_nonzero > 0.0 : cert.min_nonzero >= mu - 1e-9;
  cert.inverse_pass = cert.inverse_min_nonzero >= lambda - 1e-9;
  cert.reciprocal_mismatch = reciprocal_mismatch(fwd, bwd);
  return cert;
}

}  // namespace

SpectralCertificate spectral_certificate(const FrictionMatrix& a) {
  const ConstrainedInverse inv = bott_duffin(a);
  return certify(a.matrix, inv, CertificateKind::Classic, a.table.mu_bound(),
                 a.table.lambda_bound());
}

SpectralCertificate spectral_certificate(const Matrix& b, const Composition& c, double mu) {
  const ConstrainedInverse inv = bott_duffin(b, c);
  const double lambda = 1.0 / (frobenius_norm(b) * static_cast<double>(c.size()) + 1.0);
  return certify(b, inv, CertificateKind::Generalized, mu, lambda);
}

Vector invert_fluxes(const Composition& c, std::span<const double> grad_sqrt_c,
                     const DiffusionTable& d) {
  if (grad_sqrt_c.size() != c.size()) throw Error(ErrorCode::DimensionMismatch, "gradient size");
  const double along = dot(c.sqrt_values(), grad_sqrt_c);
  if (std::abs(along) > kKernelTolerance * std::max(1.0, norm2(grad_sqrt_c))) {
    std::ostringstream os;
    os << "gradient not in L: sqrt(c).grad = " << along;
    throw Error(ErrorCode::KernelViolation, os.str());
  }
  const ConstrainedInverse inv = bott_duffin(build_friction_matrix(c, d));
  Vector v = inv.matrix * grad_sqrt_c;
  for (double& x : v) x *= -2.0;
  return v;
}

}  // namespace stefan
