#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stefan/diagnostics.hpp"
#include "stefan/error.hpp"
#include "stefan/rng.hpp"
#include "stefan/solver.hpp"

namespace stefan::pde {
namespace {

using thermo::ModelKind;
using thermo::ModelParams;
using thermo::ModelSpec;

ModelSpec classic(std::size_t n, double d = 1.0) {
  ModelParams p;
  p.n = n;
  p.d = DiffusionTable::uniform(n, d);
  return ModelSpec(ModelKind::ClassicMs, p);
}

Field binary_cosine(std::size_t cells, double amp = 0.1) {
  return init_field(Grid1D::make(cells, 1.0), 2, [amp](double x) {
    const double c1 = 0.5 + amp * std::cos(std::numbers::pi * x);
    return Vector{c1, 1.0 - c1};
  });
}

Field ternary_smooth(std::size_t cells) {
  return init_field(Grid1D::make(cells, 1.0), 3, [](double x) {
    const double a = 0.1 * std::cos(std::numbers::pi * x);
    const double b = 0.05 * std::cos(2 * std::numbers::pi * x);
    return Vector{0.3 + a, 0.3 - a + b, 0.4 - b};
  });
}

TEST(Grid, Validation) {
  EXPECT_THROW(Grid1D::make(3, 1.0), Error);
  EXPECT_THROW(Grid1D::make(10, 0.0), Error);
  const Grid1D g = Grid1D::make(8, 2.0);
  EXPECT_DOUBLE_EQ(g.dx(), 0.25);
  EXPECT_DOUBLE_EQ(g.center(0), 0.125);
  EXPECT_EQ(g.faces(), 9u);
}

TEST(InitField, Examples) {
  const Field u = init_field(Grid1D::make(8, 1.0), 2, [](double) { return Vector{0.5, 0.5}; });
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_EQ(u(k, 0), 0.5);
    EXPECT_EQ(u(k, 1), 0.5);
  }
  const Field c = binary_cosine(64);
  EXPECT_GE(c.min_value(), 0.4);
  EXPECT_LE(c.max_sum_deviation(), 1e-15);
  try {
    init_field(Grid1D::make(8, 1.0), 2, [](double) { return Vector{1.2, -0.2}; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SimplexViolation);
    EXPECT_NE(std::string(e.what()).find("cell 0"), std::string::npos) << e.what();
  }
  EXPECT_THROW(init_field(Grid1D::make(8, 1.0), 2, [](double) { return Vector{1.2, 0.0}; }), Error);
}

TEST(Flux, UniformFieldHasZeroFlux) {
  const Field u = init_field(Grid1D::make(10, 1.0), 3, [](double) { return Vector{0.2, 0.3, 0.5}; });
  const SolverConfig cfg{classic(3)};
  for (std::size_t f = 0; f <= 10; ++f)
    for (double v : face_flux(u, cfg, f)) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Flux, WallsCarryNoFlux) {
  const Field c = binary_cosine(16);
  const SolverConfig cfg{classic(2)};
  for (double v : face_flux(c, cfg, 0)) EXPECT_EQ(v, 0.0);
  for (double v : face_flux(c, cfg, 16)) EXPECT_EQ(v, 0.0);
}

TEST(Flux, SpeciesFluxesSumToZero) {
  Xorshift64Star rng(31);
  for (ModelKind kind : {ModelKind::ClassicMs, ModelKind::Pvd, ModelKind::PorousMedium,
                         ModelKind::MolarMass, ModelKind::Tumor}) {
    ModelParams p;
    p.n = 3;
    p.d = DiffusionTable::from_upper(3, Vector{0.5, 1.0, 2.0});
    p.masses = {1.0, 2.0, 3.0};
    p.theta = 1.0;
    const SolverConfig cfg{ModelSpec(kind, p)};
    Vector data;
    for (int k = 0; k < 12; ++k)
      for (double v : sample_simplex_floored(rng, 3, 0.05)) data.push_back(v);
    const Field f(Grid1D::make(12, 1.0), 3, data);
    for (std::size_t face = 1; face < 12; ++face) {
      const Vector flux = face_flux(f, cfg, face);
      EXPECT_NEAR(flux[0] + flux[1] + flux[2], 0.0, 1e-13) << cfg.model.id();
    }
  }
}

double fick_deviation(std::size_t cells, double d) {
  const Field c = binary_cosine(cells, 0.2);
  const SolverConfig cfg{classic(2, d)};
  const double dx = c.grid().dx();
  double worst = 0.0;
  for (std::size_t f = 1; f < cells; ++f) {
    const double fick = -d * (c(f, 0) - c(f - 1, 0)) / dx;
    worst = std::max(worst, std::abs(face_flux(c, cfg, f)[0] - fick));
  }
  return worst;
}

TEST(Flux, BinaryClassicIsDiscreteFickToSecondOrder) {
  const double d = 1.5;
  const double e1 = fick_deviation(40, d);
  const double e2 = fick_deviation(80, d);
  const double e3 = fick_deviation(160, d);
  EXPECT_LT(e1, 1e-3);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_GT(e2 / e3, 3.5);
}

TEST(Step, UniformFieldIsFixedPoint) {
  const Field u = init_field(Grid1D::make(10, 1.0), 3, [](double) { return Vector{0.2, 0.3, 0.5}; });
  const SolverConfig cfg{classic(3)};
  const StepOutcome s = step(u, cfg, 1e-4);
  for (std::size_t i = 0; i < u.data().size(); ++i) EXPECT_EQ(s.field.data()[i], u.data()[i]);
  EXPECT_GT(s.report.dt_next, 1e-4);
  EXPECT_EQ(s.report.rejected_count, 0u);
}

TEST(Step, HugeInitialStepIsHalvedUntilStable) {
  const Field c = binary_cosine(50, 0.35);
  SolverConfig cfg{classic(2)};
  const StepOutcome s = step(c, cfg, 1.0);
  EXPECT_GT(s.report.rejected_count, 0u);
  EXPECT_LT(s.report.dt_used, 1.0);
  EXPECT_GE(s.field.min_value(), 0.0);
  EXPECT_LE(s.field.max_sum_deviation(), 1e-12);
  EXPECT_LE(s.report.entropy_change, cfg.entropy_tolerance);
}

TEST(Step, StallsWhenRejectBudgetRunsOut) {
  const Field c = binary_cosine(50, 0.35);
  SolverConfig cfg{classic(2)};
  cfg.max_rejects = 2;
  try {
    step(c, cfg, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepStalled);
  }
}

TEST(Step, ClipsAtTimeLimit) {
  const Field c = binary_cosine(20);
  const SolverConfig cfg{classic(2)};
  const StepOutcome s = step(c, cfg, 1e-3, 2.5e-4);
  EXPECT_EQ(s.field.time(), 2.5e-4);
}

TEST(Run, ZeroEndTimeGivesInitialSnapshot) {
  SolverConfig cfg{classic(2)};
  cfg.t_end = 0.0;
  const Field c = binary_cosine(20);
  const Trajectory t = run(cfg, c);
  ASSERT_EQ(t.snapshots.size(), 1u);
  EXPECT_EQ(t.snapshots[0].data()[3], c.data()[3]);
  EXPECT_TRUE(t.steps.empty());
}

TEST(Run, ConservesMassAndStaysOnSimplex) {
  SolverConfig cfg{classic(3)};
  cfg.model = [] {
    ModelParams p;
    p.n = 3;
    p.d = DiffusionTable::from_upper(3, Vector{0.5, 1.0, 2.0});
    return ModelSpec(ModelKind::ClassicMs, p);
  }();
  cfg.t_end = 0.02;
  const Field c = ternary_smooth(40);
  const Vector m0 = c.masses();
  const Trajectory t = run(cfg, c, {.snapshot_stride = 5});
  EXPECT_EQ(t.snapshots.back().time(), 0.02);
  double prev = discrete_entropy(c, cfg.model);
  for (const Field& f : t.snapshots) {
    const Vector m = f.masses();
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(m[i] - m0[i]) / m0[i], 1e-12);
    EXPECT_LE(f.max_sum_deviation(), 1e-12);
    EXPECT_GE(f.min_value(), 0.0);
    const double h = discrete_entropy(f, cfg.model);
    EXPECT_LE(h, prev + 1e-10);
    prev = h;
  }
  for (const StepReport& s : t.steps) EXPECT_LE(s.entropy_change, 1e-10);
}

TEST(Run, GeneralizedModelsAdvance) {
  for (ModelKind kind : {ModelKind::Pvd, ModelKind::PorousMedium, ModelKind::MolarMass, ModelKind::Tumor}) {
    ModelParams p;
    p.n = 3;
    p.d = DiffusionTable::from_upper(3, Vector{0.5, 1.0, 2.0});
    p.masses = {1.0, 2.0, 3.0};
    p.theta = 0.5;
    SolverConfig cfg{ModelSpec(kind, p)};
    cfg.t_end = 0.005;
    const Field c = ternary_smooth(24);
    const Vector m0 = c.masses();
    const Trajectory t = run(cfg, c, {.snapshot_stride = 0});
    const Field& last = t.snapshots.back();
    EXPECT_EQ(last.time(), 0.005) << cfg.model.id();
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(last.masses()[i], m0[i], 1e-12 * m0[i]);
    EXPECT_LE(last.max_sum_deviation(), 1e-12);
    EXPECT_GT(last.min_value(), 0.0);
  }
}

TEST(Run, OutputTimesAreHitExactly) {
  SolverConfig cfg{classic(2)};
  cfg.t_end = 0.01;
  const Trajectory t = run(cfg, binary_cosine(20), {.snapshot_stride = 1, .output_times = {0.001, 0.005}});
  ASSERT_EQ(t.snapshots.size(), 4u);
  EXPECT_EQ(t.snapshots[1].time(), 0.001);
  EXPECT_EQ(t.snapshots[2].time(), 0.005);
  EXPECT_EQ(t.snapshots[3].time(), 0.01);
}

TEST(Perturb, ZeroEpsilonIsIdentity) {
  const Field c = binary_cosine(30);
  const Field p = perturb_initial(c, 0.0, [](double x) { return std::cos(2 * std::numbers::pi * x); }, 5);
  for (std::size_t i = 0; i < c.data().size(); ++i) EXPECT_EQ(p.data()[i], c.data()[i]);
}

TEST(Perturb, RelativeEntropyScalesQuadratically) {
  const Field c = binary_cosine(64);
  const ModelSpec m = classic(2);
  auto mode = [](double x) { return std::cos(2 * std::numbers::pi * x); };
  double prev = diag::relative_entropy(perturb_initial(c, 0.02, mode, 9), c, m);
  for (double eps : {0.01, 0.005, 0.0025}) {
    const double h = diag::relative_entropy(perturb_initial(c, eps, mode, 9), c, m);
    EXPECT_NEAR(prev / h, 4.0, 0.05) << eps;
    prev = h;
  }
}

TEST(Perturb, StaysOnSimplex) {
  const Field c = ternary_smooth(32);
  const Field p = perturb_initial(c, 0.01, [](double x) { return std::sin(3 * x); }, 4);
  EXPECT_LE(p.max_sum_deviation(), 1e-15);
  // a mode with zero spatial mean on the cell centres also keeps every mass
  const Field q = perturb_initial(c, 0.01, [](double x) { return std::cos(2 * std::numbers::pi * x); }, 4);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(q.masses()[i], c.masses()[i], 1e-15);
}

TEST(Perturb, TooLargeIsRejected) {
  const Field c = binary_cosine(30, 0.45);
  try {
    perturb_initial(c, 0.1, [](double) { return Vector{1.0, -1.0}; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SimplexViolation);
  }
}

TEST(Perturb, ExplicitProfileHasSpeciesMeanRemoved) {
  const Field c = binary_cosine(30);
  const Field flat = perturb_initial(c, 0.01, [](double) { return Vector{1.0, 1.0}; });
  for (std::size_t i = 0; i < c.data().size(); ++i) EXPECT_EQ(flat.data()[i], c.data()[i]);
  const Field p = perturb_initial(c, 0.01, [](double) { return Vector{3.0, 1.0}; });
  for (std::size_t k = 0; k < 30; ++k) {
    EXPECT_NEAR(p(k, 0), c(k, 0) + 0.01, 1e-15);
    EXPECT_NEAR(p(k, 1), c(k, 1) - 0.01, 1e-15);
  }
}

}  // namespace
}  // namespace stefan::pde
