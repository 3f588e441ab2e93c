#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stefan/diagnostics.hpp"
#include "stefan/error.hpp"
#include "stefan/rng.hpp"

namespace stefan::diag {
namespace {

using pde::Grid1D;
using pde::init_field;
using thermo::ModelKind;
using thermo::ModelParams;

ModelSpec make(ModelKind kind, std::size_t n, Vector upper = {}, double gamma = 2.0) {
  ModelParams p;
  p.n = n;
  if (!upper.empty()) p.d = DiffusionTable::from_upper(n, upper);
  p.gamma = gamma;
  p.masses = Vector(n, 1.0);
  return ModelSpec(kind, p);
}

Field constant(std::size_t cells, Vector c) {
  return init_field(Grid1D::make(cells, 1.0), c.size(), [c](double) { return c; });
}

Field binary_cosine(std::size_t cells, double amp = 0.1) {
  return init_field(Grid1D::make(cells, 1.0), 2, [amp](double x) {
    const double c1 = 0.5 + amp * std::cos(std::numbers::pi * x);
    return Vector{c1, 1.0 - c1};
  });
}

Field random_field(Xorshift64Star& rng, std::size_t cells, std::size_t n, double floor) {
  Vector data;
  for (std::size_t k = 0; k < cells; ++k)
    for (double v : sample_simplex_floored(rng, n, floor)) data.push_back(v);
  return Field(Grid1D::make(cells, 1.0), n, data);
}

TEST(Entropy, UniformValues) {
  const ModelSpec b2 = make(ModelKind::ClassicMs, 2);
  EXPECT_NEAR(entropy(constant(8, {0.5, 0.5}), b2), -std::log(2.0) - 1.0, 1e-14);
  const ModelSpec b3 = make(ModelKind::ClassicMs, 3);
  EXPECT_NEAR(entropy(constant(8, {1.0 / 3, 1.0 / 3, 1.0 / 3}), b3), -std::log(3.0) - 1.0, 1e-14);
  const ModelSpec porous = make(ModelKind::PorousMedium, 2);
  EXPECT_NEAR(entropy(constant(8, {0.5, 0.5}), porous), 0.5, 1e-15);
}

TEST(RelativeEntropy, Examples) {
  const ModelSpec m = make(ModelKind::ClassicMs, 2);
  const Field a = constant(4, {0.6, 0.4});
  const Field b = constant(4, {0.5, 0.5});
  EXPECT_EQ(relative_entropy(b, b, m), 0.0);
  const double expected = 0.6 * std::log(1.2) - 0.1 + 0.4 * std::log(0.8) + 0.1;
  EXPECT_NEAR(relative_entropy(a, b, m), expected, 1e-15);
  EXPECT_NEAR(relative_entropy(a, b, m), 0.0201357, 1e-6);
}

TEST(RelativeEntropy, NonnegativeOnRandomPairs) {
  Xorshift64Star rng(41);
  const ModelSpec m = make(ModelKind::ClassicMs, 3);
  for (int k = 0; k < 1000; ++k) {
    const Field a = random_field(rng, 4, 3, 0.0);
    const Field b = random_field(rng, 4, 3, 0.01);
    EXPECT_GE(relative_entropy(a, b, m), -1e-15);
  }
}

TEST(RelativeEntropy, RejectsMismatches) {
  const ModelSpec m = make(ModelKind::ClassicMs, 2);
  const Field a = constant(4, {0.5, 0.5});
  try {
    relative_entropy(a, constant(8, {0.5, 0.5}), m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
  Field later = a;
  later.set_time(1.0);
  EXPECT_THROW(relative_entropy(a, later, m), Error);
  EXPECT_THROW(relative_entropy(a, constant(4, {1.0, 0.0}), m), Error);
}

TEST(Dissipation, UniformIsZero) {
  for (double v : dissipation_density(constant(6, {0.2, 0.3, 0.5}), make(ModelKind::ClassicMs, 3)))
    EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Dissipation, BinaryClosedForm) {
  // d |dc1/dx|^2 (1/c1 + 1/c2) at each face, up to O(dx^2)
  const double d = 2.0;
  const ModelSpec m = make(ModelKind::ClassicMs, 2, {d});
  const Field c = binary_cosine(400, 0.2);
  const Vector dens = dissipation_density(c, m);
  const double dx = c.grid().dx();
  ASSERT_EQ(dens.size(), 399u);
  double worst = 0.0;
  for (std::size_t f = 1; f < 400; ++f) {
    const double g = (c(f, 0) - c(f - 1, 0)) / dx;
    const double c1 = 0.5 * (c(f, 0) + c(f - 1, 0));
    const double exact = d * g * g * (1.0 / c1 + 1.0 / (1.0 - c1));
    worst = std::max(worst, std::abs(dens[f - 1] - exact));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Dissipation, NonnegativeForEveryModel) {
  Xorshift64Star rng(42);
  for (ModelKind kind : {ModelKind::ClassicMs, ModelKind::Pvd, ModelKind::PorousMedium, ModelKind::MolarMass}) {
    const ModelSpec m = make(kind, 3, {0.5, 1.0, 2.0});
    for (int k = 0; k < 20; ++k)
      for (double v : dissipation_density(random_field(rng, 10, 3, 0.01), m)) EXPECT_GE(v, -1e-10);
  }
}

TEST(EntropyProduction, EqualsDissipationForClassic) {
  Xorshift64Star rng(43);
  for (std::size_t n : {2u, 3u, 5u}) {
    Vector up(n * (n - 1) / 2);
    for (double& v : up) v = rng.uniform(0.5, 2.0);
    const ModelSpec m = make(ModelKind::ClassicMs, n, up);
    for (int k = 0; k < 20; ++k) {
      const Field f = random_field(rng, 8, n, 0.02);
      const Vector rs = entropy_production_rs(f, m);
      const Vector dens = dissipation_density(f, m);
      for (std::size_t i = 0; i < rs.size(); ++i)
        EXPECT_NEAR(rs[i], dens[i], 1e-12 * std::max(1.0, dens[i]));
    }
  }
  for (double v : entropy_production_rs(constant(6, {0.2, 0.8}), make(ModelKind::ClassicMs, 2)))
    EXPECT_EQ(v, 0.0);
  EXPECT_THROW(entropy_production_rs(constant(6, {0.2, 0.3, 0.5}), make(ModelKind::Tumor, 3)), Error);
}

TEST(EntropyProduction, NonnegativeAlongCosineRun) {
  pde::SolverConfig cfg{make(ModelKind::ClassicMs, 2)};
  cfg.t_end = 0.05;
  const pde::Trajectory t = pde::run(cfg, binary_cosine(40, 0.3), {.snapshot_stride = 5});
  for (const Field& f : t.snapshots)
    for (double v : entropy_production_rs(f, cfg.model)) EXPECT_GE(v, -1e-10);
}

TEST(EntropyDissipation, BalanceAlongRun) {
  // H(0) - H(T) equals the time integral of the dissipation up to discretisation error
  pde::SolverConfig cfg{make(ModelKind::ClassicMs, 3, {0.5, 1.0, 2.0})};
  cfg.t_end = 0.02;
  const Field c0 = init_field(Grid1D::make(64, 1.0), 3, [](double x) {
    const double a = 0.1 * std::cos(std::numbers::pi * x);
    return Vector{0.3 + a, 0.3 - 0.5 * a, 0.4 - 0.5 * a};
  });
  const pde::Trajectory t = pde::run(cfg, c0);
  double integral = 0.0;
  for (std::size_t k = 1; k < t.snapshots.size(); ++k) {
    const double dt = t.snapshots[k].time() - t.snapshots[k - 1].time();
    integral += 0.5 * dt * (dissipation(t.snapshots[k], cfg.model) + dissipation(t.snapshots[k - 1], cfg.model));
  }
  const double drop = entropy(c0, cfg.model) - entropy(t.snapshots.back(), cfg.model);
  EXPECT_GT(drop, 0.0);
  EXPECT_NEAR(drop, integral, 1e-2 * integral);
}

TEST(VelocityBound, Examples) {
  const DiffusionTable d = DiffusionTable::from_upper(3, Vector{0.5, 1.0, 2.0});
  const Composition c = make_composition({0.2, 0.3, 0.5});
  const VelocityBound zero = velocity_bound(c, Vector(3, 0.0), d);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  // binary mixtures sit on the equality case, so only roundoff separates the sides
  EXPECT_LE(velocity_bound_check(binary_cosine(50), DiffusionTable::uniform(2, 1.0)), 1e-14);

  Xorshift64Star rng(44);
  for (int k = 0; k < 1000; ++k) {
    const Composition x = make_composition(sample_simplex(rng, 3));
    const Vector g{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    EXPECT_LE(velocity_bound(x, g, d).margin(), 1e-10);
  }
}

TEST(DissipationBound, ConstantsExample) {
  const ModelSpec m = make(ModelKind::ClassicMs, 2);
  const DissipationBoundConstants k = dissipation_bound_constants(m, 1.0);
  EXPECT_DOUBLE_EQ(k.eta, 1.0);
  EXPECT_DOUBLE_EQ(k.zeta, 1.0 / 32.0);
  const DissipationBound zero = dissipation_lower_bound_check(make_composition({0.5, 0.5}), Vector{0, 0}, m, k);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_TRUE(zero.pass);
  const DissipationBound b =
      dissipation_lower_bound_check(make_composition({0.5, 0.5}), Vector{0.7, -0.7}, m, k);
  EXPECT_TRUE(b.pass);
}

TEST(DissipationBound, HoldsOnRandomDraws) {
  Xorshift64Star rng(45);
  const double m = 0.2;
  for (ModelKind kind : {ModelKind::ClassicMs, ModelKind::Pvd, ModelKind::PorousMedium}) {
    const ModelSpec model = make(kind, 3, {0.5, 1.0, 2.0});
    const DissipationBoundConstants k = dissipation_bound_constants(model, m, 500, 3);
    for (int s = 0; s < 500; ++s) {
      const Composition c = make_composition(sample_simplex_floored(rng, 3, 0.5 * m));
      EXPECT_TRUE(dissipation_lower_bound_check(c, sample_zero_sum(rng, 3), model, k).pass);
    }
  }
}

TEST(DissipationBound, RejectsTumorAndBadInput) {
  EXPECT_THROW(dissipation_bound_constants(make(ModelKind::Tumor, 3), 0.2), Error);
  const ModelSpec m = make(ModelKind::ClassicMs, 2);
  const DissipationBoundConstants k = dissipation_bound_constants(m, 0.2, 100);
  EXPECT_THROW(dissipation_lower_bound_check(make_composition({0.5, 0.5}), Vector{1, 1}, m, k), Error);
  EXPECT_THROW(dissipation_lower_bound_check(make_composition({0.05, 0.95}), Vector{1, -1}, m, k), Error);
}

TEST(Cutoff, Values) {
  const CutoffFn f = build_cutoff(0.4);
  EXPECT_DOUBLE_EQ(f.eps, 0.1);
  EXPECT_EQ(f.psi(0.2), 0.0);
  EXPECT_NEAR(f.psi(0.3), 1.0, 1e-15);
  EXPECT_EQ(f.psi(0.31), 1.0);
  EXPECT_EQ(f.dpsi(0.2), 0.0);
  EXPECT_NEAR(f.dpsi(0.3), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(f.psi(0.25), 0.5);
  EXPECT_EQ(f.chi(Vector{0.1, 0.9, 0.9}), 0.0);
  EXPECT_EQ(f.chi(Vector{0.5, 0.6}), 1.0);
  for (double r = 0.205; r < 0.3; r += 0.01) {
    const double h = 1e-6;
    EXPECT_NEAR(f.dpsi(r), (f.psi(r + h) - f.psi(r - h)) / (2 * h), 1e-5);
    EXPECT_NEAR(f.d2psi(r), (f.dpsi(r + h) - f.dpsi(r - h)) / (2 * h), 1e-3);
  }
}

TEST(SplitDissipation, Terms) {
  const ModelSpec m = make(ModelKind::ClassicMs, 2);
  const Field u = constant(10, {0.5, 0.5});
  const SplitDissipation zero = split_dissipation(u, u, m, build_cutoff(0.2));
  EXPECT_EQ(zero.low, 0.0);
  EXPECT_EQ(zero.high, 0.0);

  const Field c = binary_cosine(10);
  const SplitDissipation above = split_dissipation(c, u, m, build_cutoff(0.2));
  EXPECT_EQ(above.low, 0.0);
  EXPECT_GT(above.high, 0.0);

  Xorshift64Star rng(46);
  const ModelSpec m3 = make(ModelKind::ClassicMs, 3);
  for (int k = 0; k < 50; ++k) {
    const SplitDissipation s =
        split_dissipation(random_field(rng, 10, 3, 0.0), random_field(rng, 10, 3, 0.05), m3, build_cutoff(0.3));
    EXPECT_GE(s.low, -1e-10);
    EXPECT_GE(s.high, -1e-10);
  }
}

TEST(Record, Fields) {
  const ModelSpec m = make(ModelKind::ClassicMs, 2);
  const Field c = binary_cosine(20);
  const DiagnosticsRecord r = record(c, m, &c);
  ASSERT_TRUE(r.rel_entropy);
  EXPECT_EQ(*r.rel_entropy, 0.0);
  EXPECT_EQ(r.entropy, entropy(c, m));
  EXPECT_GE(r.rs_min, 0.0);
  EXPECT_NEAR(r.mass[0] + r.mass[1], 1.0, 1e-15);
  EXPECT_FALSE(record(c, m).rel_entropy);

  const Field t = constant(6, {0.2, 0.3, 0.5});
  EXPECT_TRUE(std::isnan(record(t, make(ModelKind::Tumor, 3)).rs_min));
}

TEST(Gronwall, SyntheticQuadraticSeries) {
  const Vector eps{0.01, 0.005, 0.0025};
  std::vector<Vector> series;
  for (double e : eps) series.push_back({e * e, 0.9 * e * e, 1.1 * e * e});
  const RelEntropyReport r = gronwall_report(eps, series);
  EXPECT_NEAR(r.fitted_order, 2.0, 1e-12);
  for (double s : r.sup_ratio) EXPECT_NEAR(s, 1.1, 1e-12);
}

TEST(Gronwall, Rejections) {
  const std::vector<Vector> three{{1.0}, {1.0}, {1.0}};
  EXPECT_THROW(gronwall_report(Vector{0.01, 0.005}, {{1.0}, {1.0}}), Error);
  EXPECT_THROW(gronwall_report(Vector{0.01, 0.004, 0.002}, three), Error);
  try {
    gronwall_report(Vector{0.01, 0.005, 0.0025}, {{1.0}, {0.0}, {1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveH0);
  }
}

TEST(Gronwall, ZeroPerturbationGivesZeroSeries) {
  pde::SolverConfig cfg{make(ModelKind::ClassicMs, 2)};
  cfg.t_end = 0.01;
  const Field c = binary_cosine(20);
  const pde::Trajectory a = pde::run(cfg, c);
  const pde::Trajectory b = pde::run(cfg, c);
  for (double h : relative_entropy_series(a.snapshots, b.snapshots, cfg.model)) EXPECT_EQ(h, 0.0);
}

}  // namespace
}  // namespace stefan::diag
