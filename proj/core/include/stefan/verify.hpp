#pragma once

// Deterministic property suites behind `stefan verify`.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stefan/rng.hpp"

namespace stefan::harness {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Smallest per-case margin; a case fails when its margin is negative.
  double worst_margin = 0.0;
};

struct VerifySummary {
  std::vector<SuiteResult> suites;

  std::size_t failures() const noexcept;
  bool ok() const noexcept { return failures() == 0; }
};

/// spectral, bott-duffin-oracle, pointwise-bounds, reciprocal-eigenvalue,
/// velocity-bound, dissipation-lower-bound
const std::vector<std::string_view>& suite_names() noexcept;

/// Runs every suite, or only `suite`. `mutant` flips the sign of the quantity
/// under test in each suite, which must make every suite fail.
VerifySummary run_verify(const std::optional<std::string>& suite, std::uint64_t seed = kDefaultSeed,
                         bool mutant = false);

/// One `suite=... cases=... failures=... worst_margin=...` line per suite.
std::string render_verify(const VerifySummary& summary);

/// Exit code 0 when all pass, 1 on any failure, 2 for an unknown suite.
int cmd_verify(const std::optional<std::string>& suite, bool mutant, std::ostream& out,
               std::ostream& err);

}  // namespace stefan::harness
