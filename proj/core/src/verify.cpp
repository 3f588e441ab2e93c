#include "stefan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "stefan/csv.hpp"
#include "stefan/diagnostics.hpp"
#include "stefan/entropy.hpp"
#include "stefan/error.hpp"
#include "stefan/models.hpp"
#include "stefan/simplex.hpp"

namespace stefan::harness {

namespace {

class Tally {
 public:
  explicit Tally(std::string name) { r_.name = std::move(name); }

  void add(double margin) {
    ++r_.cases;
    if (!(margin >= 0.0)) ++r_.failures;
    if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
    worst_ = std::min(worst_, margin);
  }

  SuiteResult result() {
    r_.worst_margin = r_.cases ? worst_ : 0.0;
    return r_;
  }

 private:
  SuiteResult r_;
  double worst_ = std::numeric_limits<double>::infinity();
};

std::size_t species(Xorshift64Star& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(rng.uniform_int(lo, hi));
}

DiffusionTable random_table(Xorshift64Star& rng, std::size_t n, double lo, double hi) {
  Vector up(n * (n - 1) / 2);
  for (double& v : up) v = rng.uniform(lo, hi);
  return DiffusionTable::from_upper(n, up);
}

/// P_L (G^T G + 0.1 I) P_L: PSD with kernel span{sqrt c}.
Matrix random_kernel_matrix(Xorshift64Star& rng, const Composition& c) {
  const std::size_t n = c.size();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = sample_normal(rng);
  Matrix core = g.transposed() * g;
  for (std::size_t i = 0; i < n; ++i) core(i, i) += 0.1;
  const Matrix pl = projectors(c).p_l;
  return symmetric_part(pl * core * pl);
}

double reciprocal_mismatch(const Vector& fwd, const Vector& inv) {
  double worst = 0.0;
  const std::size_t m = fwd.size();
  for (std::size_t k = 0; k < m; ++k)
    worst = std::max(worst, std::abs(fwd[k] * inv[m - 1 - k] - 1.0));
  return worst;
}

SuiteResult suite_spectral(std::uint64_t seed, bool mutant) {
  Tally t("spectral");
  Xorshift64Star rng(seed);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = species(rng, 2, 6);
    const Composition c = make_composition(sample_simplex_with_vertices(rng, n));
    const DiffusionTable d = random_table(rng, n, 0.1, 10.0);
    FrictionMatrix a = build_friction_matrix(c, d);
    if (mutant) a.matrix *= -1.0;
    const SpectralCertificate cert = spectral_certificate(a);
    t.add(std::min(cert.min_nonzero - (cert.mu - 1e-9),
                   cert.inverse_min_nonzero - (cert.lambda - 1e-9)));
  }
  return t.result();
}

SuiteResult suite_oracle(std::uint64_t seed, bool mutant) {
  Tally t("bott-duffin-oracle");
  Xorshift64Star rng(seed + 1);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = species(rng, 2, 6);
    const Composition c = make_composition(sample_simplex(rng, n));
    const Matrix m = random_kernel_matrix(rng, c);
    Matrix bd = bott_duffin(m, c).matrix;
    if (mutant) bd *= -1.0;
    const ProjectorPair p = projectors(c);

    Vector b(n);
    for (double& v : b) v = sample_normal(rng);
    Vector bl = p.p_l * std::span<const double>(b);
    const double nl = norm2(bl);
    for (double& v : bl) v /= nl;
    const Vector round = m * std::span<const double>(bd * std::span<const double>(bl));
    double e1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) e1 += (round[i] - bl[i]) * (round[i] - bl[i]);
    e1 = std::sqrt(e1);

    const Vector& bp = c.sqrt_values();  // unit vector spanning L-perp
    const double e2 = norm2(bd * std::span<const double>(bp));

    const double mis =
        reciprocal_mismatch(nonzero_eigenvalues(m, c), nonzero_eigenvalues(bd, c));
    t.add(std::min({1e-10 - e1, 1e-12 - e2, 1e-9 - mis}));
  }
  return t.result();
}

SuiteResult suite_pointwise(bool mutant) {
  Tally t("pointwise-bounds");
  const double sign = mutant ? -1.0 : 1.0;
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j) {
      const auto b = thermo::pointwise_bound_check(i / 100.0, j / 100.0);
      t.add(std::min(sign * b.lhs - b.bound1, sign * b.lhs - b.bound2) + 1e-12);
    }
  const thermo::EntropyModel boltz = thermo::boltzmann_entropy();
  for (double m : {0.1, 0.5, 1.0}) {
    const double kappa = thermo::relenes_constant(boltz, m);
    t.add(kappa);
    for (int j = 0; j <= 100; ++j) {
      const double cbar = m + (1.0 - m) * j / 100.0;
      for (int i = 0; i <= 100; ++i) {
        const double c = i / 100.0;
        const double rel = thermo::relative_entropy_density(boltz, c, cbar);
        t.add(sign * rel - kappa * (c - cbar) * (c - cbar) + 1e-12);
      }
    }
  }
  return t.result();
}

SuiteResult suite_reciprocal(std::uint64_t seed, bool mutant) {
  Tally t("reciprocal-eigenvalue");
  Xorshift64Star rng(seed + 2);
  const double sign = mutant ? -1.0 : 1.0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = species(rng, 2, 6);
    const Composition c = make_composition(sample_simplex_with_vertices(rng, n));
    const FrictionMatrix a = build_friction_matrix(c, random_table(rng, n, 0.1, 10.0));
    const Matrix bd = bott_duffin(a).matrix * sign;
    t.add(1e-9 - reciprocal_mismatch(nonzero_eigenvalues(a.matrix, c), nonzero_eigenvalues(bd, c)));
  }
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = species(rng, 2, 6);
    const Composition c = make_composition(sample_simplex(rng, n));
    const Matrix m = random_kernel_matrix(rng, c);
    const Matrix bd = bott_duffin(m, c).matrix * sign;
    t.add(1e-9 - reciprocal_mismatch(nonzero_eigenvalues(m, c), nonzero_eigenvalues(bd, c)));
  }
  return t.result();
}

SuiteResult suite_velocity(std::uint64_t seed, bool mutant) {
  Tally t("velocity-bound");
  Xorshift64Star rng(seed + 3);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = k < 500 ? 3 : species(rng, 2, 6);
    const Composition c = make_composition(sample_simplex_with_vertices(rng, n));
    const DiffusionTable d = random_table(rng, n, 0.1, 10.0);
    Vector g(n);
    for (double& v : g) v = rng.uniform(-1.0, 1.0);
    const auto b = diag::velocity_bound(c, g, d);
    const double rhs = mutant ? -b.rhs : b.rhs;
    t.add(rhs + 1e-10 - b.lhs);
  }
  return t.result();
}

SuiteResult suite_lower_bound(std::uint64_t seed, bool mutant) {
  Tally t("dissipation-lower-bound");
  Xorshift64Star rng(seed + 4);
  const double m = 0.2;
  for (std::size_t n : {2u, 3u}) {
    for (int table = 0; table < 10; ++table) {
      thermo::ModelParams p;
      p.n = n;
      p.d = random_table(rng, n, 0.5, 2.0);
      const thermo::ModelSpec model(thermo::ModelKind::ClassicMs, p);
      const auto k = diag::dissipation_bound_constants(model, m, 2000, rng());
      for (int s = 0; s < 500; ++s) {
        const Composition c = make_composition(sample_simplex_floored(rng, n, 0.5 * m));
        const Vector g = sample_zero_sum(rng, n);
        const auto b = diag::dissipation_lower_bound_check(c, g, model, k);
        const double lhs = mutant ? -b.lhs : b.lhs;
        t.add(lhs - b.rhs + 1e-10);
      }
    }
  }
  return t.result();
}

}  // namespace

std::size_t VerifySummary::failures() const noexcept {
  std::size_t f = 0;
  for (const auto& s : suites) f += s.failures;
  return f;
}

const std::vector<std::string_view>& suite_names() noexcept {
  static const std::vector<std::string_view> names{
      "spectral",       "bott-duffin-oracle", "pointwise-bounds", "reciprocal-eigenvalue",
      "velocity-bound", "dissipation-lower-bound"};
  return names;
}

VerifySummary run_verify(const std::optional<std::string>& suite, std::uint64_t seed, bool mutant) {
  if (suite && std::find(suite_names().begin(), suite_names().end(), *suite) == suite_names().end())
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + *suite + "'");
  const std::vector<std::function<SuiteResult()>> runners{
      [&] { return suite_spectral(seed, mutant); },
      [&] { return suite_oracle(seed, mutant); },
      [&] { return suite_pointwise(mutant); },
      [&] { return suite_reciprocal(seed, mutant); },
      [&] { return suite_velocity(seed, mutant); },
      [&] { return suite_lower_bound(seed, mutant); },
  };
  VerifySummary summary;
  for (std::size_t k = 0; k < runners.size(); ++k)
    if (!suite || *suite == suite_names()[k]) summary.suites.push_back(runners[k]());
  return summary;
}

std::string render_verify(const VerifySummary& summary) {
  std::string s;
  for (const auto& r : summary.suites)
    s += "suite=" + r.name + " cases=" + std::to_string(r.cases) +
         " failures=" + std::to_string(r.failures) + " worst_margin=" + format_double(r.worst_margin) +
         '\n';
  s += "total_failures=" + std::to_string(summary.failures()) + '\n';
  return s;
}

int cmd_verify(const std::optional<std::string>& suite, bool mutant, std::ostream& out,
               std::ostream& err) {
  VerifySummary summary;
  try {
    summary = run_verify(suite, kDefaultSeed, mutant);
  } catch (const Error& e) {
    err << "stefan verify: " << e.what() << '\n';
    return 2;
  }
  out << render_verify(summary);
  return summary.ok() ? 0 : 1;
}

}  // namespace stefan::harness
