#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "stefan/config.hpp"
#include "stefan/csv.hpp"
#include "stefan/error.hpp"
#include "stefan/rng.hpp"

namespace stefan::harness {
namespace {

constexpr const char* kMinimal = R"(
model = "classic-ms"
n = 2
d = [1.0]
cells = 50
length = 1.0
t_end = 0.1
)";

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TEST(Config, MinimalFileUsesDefaults) {
  const RunConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.model, "classic-ms");
  EXPECT_EQ(c.n, 2u);
  EXPECT_EQ(c.d, Vector{1.0});
  EXPECT_EQ(c.cells, 50u);
  EXPECT_EQ(c.t_end, 0.1);
  EXPECT_EQ(c.base, (Vector{0.5, 0.5}));
  EXPECT_EQ(c.direction, (Vector{1.0, -1.0}));
  EXPECT_EQ(c.initial, "cosine");
  EXPECT_EQ(c.dt_init, 1e-4);
}

TEST(Config, CommentsAndWhitespace) {
  const RunConfig c = parse_config(std::string("# header\n") + kMinimal + "seed = 42   # trailing\n\n");
  EXPECT_EQ(c.seed, 42u);
}

TEST(Config, PorousNeedsGamma) {
  std::string text = kMinimal;
  text.replace(text.find("classic-ms"), 10, "porous-medium");
  EXPECT_EQ(code_of(text), ErrorCode::ValidationError);
  EXPECT_NE(message_of(text).find("gamma"), std::string::npos);
  EXPECT_NO_THROW(parse_config(text + "gamma = 2.0\n"));
}

TEST(Config, TumorNeedsBetaThetaAndThreeSpecies) {
  const std::string tumor = R"(
model = "tumor"
n = 3
d = [1.0, 1.0, 1.0]
cells = 20
length = 1.0
t_end = 0.1
)";
  EXPECT_NE(message_of(tumor).find("beta"), std::string::npos);
  EXPECT_NO_THROW(parse_config(tumor + "beta = 1.0\ntheta = 0.5\n"));
}

TEST(Config, WrongTableLength) {
  std::string text = kMinimal;
  text.replace(text.find("[1.0]"), 5, "[1.0, 2.0]");
  EXPECT_EQ(code_of(text), ErrorCode::ValidationError);
  EXPECT_NE(message_of(text).find("d:"), std::string::npos) << message_of(text);
}

TEST(Config, UnknownAndDuplicateKeys) {
  EXPECT_EQ(code_of(std::string(kMinimal) + "t_ned = 1.0\n"), ErrorCode::ValidationError);
  EXPECT_NE(message_of(std::string(kMinimal) + "t_ned = 1.0\n").find("t_ned"), std::string::npos);
  EXPECT_EQ(code_of(std::string(kMinimal) + "n = 3\n"), ErrorCode::ValidationError);
}

TEST(Config, MissingRequiredKey) {
  std::string text = kMinimal;
  text.erase(text.find("cells"), 11);
  EXPECT_NE(message_of(text).find("cells"), std::string::npos);
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
  EXPECT_EQ(code_of("model = \"classic-ms\"\nn 2\n"), ErrorCode::ParseError);
  EXPECT_NE(message_of("model = \"classic-ms\"\nn 2\n").find("line 2"), std::string::npos);
  EXPECT_NE(message_of("model = \"classic-ms\nn = 2\n").find("line 1"), std::string::npos);
  EXPECT_NE(message_of("\n\nd = [1.0, \n").find("line 3"), std::string::npos);
}

TEST(Config, RejectsOutOfRangeValues) {
  EXPECT_EQ(code_of(std::string(kMinimal) + "safety = -1\n"), ErrorCode::ValidationError);
  EXPECT_EQ(code_of(std::string(kMinimal) + "base = [0.7, 0.7]\n"), ErrorCode::ValidationError);
  EXPECT_EQ(code_of(std::string(kMinimal) + "initial = \"wavy\"\n"), ErrorCode::ValidationError);
}

TEST(Config, RoundTripProperty) {
  Xorshift64Star rng(51);
  const char* kinds[] = {"classic-ms", "pvd", "porous-medium", "molar-mass", "tumor"};
  for (int k = 0; k < 200; ++k) {
    RunConfig c;
    c.model = kinds[k % 5];
    c.n = c.model == "tumor" ? 3 : 2 + rng.uniform_int(0, 3);
    for (std::size_t i = 0; i < c.n * (c.n - 1) / 2; ++i) c.d.push_back(rng.uniform(0.1, 10.0));
    if (c.model == "porous-medium") c.gamma = rng.uniform(1.1, 4.0);
    if (c.model == "tumor") {
      c.beta = rng.uniform(0.1, 2.0);
      c.theta = rng.uniform(0.0, 2.0);
    }
    if (c.model == "molar-mass")
      for (std::size_t i = 0; i < c.n; ++i) c.masses.push_back(rng.uniform(0.5, 5.0));
    c.cells = 4 + rng.uniform_int(0, 500);
    c.length = rng.uniform(0.1, 3.0);
    c.dt_init = rng.uniform(1e-7, 1e-3);
    c.t_end = rng.uniform(0.0, 1.0);
    c.initial = k % 3 == 0 ? "uniform" : (k % 3 == 1 ? "cosine" : "random-smooth");
    c.base = sample_simplex_floored(rng, c.n, 0.1);
    c.direction = sample_zero_sum(rng, c.n);
    c.amplitude = rng.uniform(0.0, 0.05);
    c.snapshot_stride = rng.uniform_int(1, 50);
    c.seed = rng();
    if (k % 2) c.output = "out dir/run " + std::to_string(k) + ".csv";
    const std::string text = render_config(c);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(back, c) << text;
    EXPECT_EQ(render_config(back), text);
  }
}

TEST(Config, BuildsModelAndInitialField) {
  const RunConfig c = parse_config(kMinimal);
  const auto model = build_model(c);
  EXPECT_EQ(model.id(), "classic-ms");
  const pde::Field f = build_initial(c);
  EXPECT_EQ(f.cells(), 50u);
  EXPECT_NEAR(f(0, 0), 0.5 + 0.1 * std::cos(std::numbers::pi * 0.01), 1e-15);
  EXPECT_EQ(build_solver_config(c).t_end, 0.1);
}

TEST(Config, RandomSmoothStaysWithinAmplitude) {
  RunConfig c = parse_config(std::string(kMinimal) + "initial = \"random-smooth\"\nseed = 9\n");
  const pde::Field f = build_initial(c);
  for (std::size_t k = 0; k < f.cells(); ++k) EXPECT_LE(std::abs(f(k, 0) - 0.5), 0.1 + 1e-15);
  const pde::Field g = build_initial(c);
  EXPECT_TRUE(std::equal(f.data().begin(), f.data().end(), g.data().begin()));
}

TEST(Csv, Format) {
  EXPECT_EQ(csv_header(2), "t,H,D,H_rel,rS_min,min_c,sum_dev,dt,mass_1,mass_2");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "");
  diag::DiagnosticsRecord r;
  r.t = 0.5;
  r.entropy = -1;
  r.dissipation = 2;
  r.rs_min = std::numeric_limits<double>::quiet_NaN();
  r.mass = {0.25, 0.75};
  EXPECT_EQ(csv_row(r, 0.125), "0.5,-1,2,,,0,0,0.125,0.25,0.75");
}

TEST(Csv, RunOutputIsDeterministic) {
  const RunConfig c = parse_config(std::string(kMinimal) + "snapshot_stride = 7\n");
  auto render = [&] {
    const pde::SolverConfig s = build_solver_config(c);
    pde::RunOptions o;
    o.snapshot_stride = c.snapshot_stride;
    pde::SolverConfig shorter = s;
    shorter.t_end = 0.01;
    const pde::Trajectory t = pde::run(shorter, build_initial(c), o);
    std::vector<diag::DiagnosticsRecord> rows;
    for (const auto& f : t.snapshots) rows.push_back(diag::record(f, s.model));
    std::ostringstream os;
    write_csv(os, rows, t.snapshot_dt, c.n);
    return os.str();
  };
  const std::string a = render();
  EXPECT_EQ(a, render());
  EXPECT_EQ(a.rfind("t,H,D", 0), 0u);
  EXPECT_EQ(a.find('\r'), std::string::npos);
}

}  // namespace
}  // namespace stefan::harness
