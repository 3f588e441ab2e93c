#include "stefan/rng.hpp"

#include <cmath>
#include <numbers>

#include "stefan/error.hpp"

namespace stefan {

Vector sample_simplex(Xorshift64Star& rng, std::size_t n) {
  Vector v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = -std::log1p(-rng.uniform());
    sum += x;
  }
  if (sum == 0.0) {
    v.assign(n, 1.0 / static_cast<double>(n));
    return v;
  }
  for (double& x : v) x /= sum;
  return v;
}

Vector sample_simplex_with_vertices(Xorshift64Star& rng, std::size_t n) {
  Vector v = sample_simplex(rng, n);
  const double u = rng.uniform();
  if (u < 0.2) {
    // zero a random proper subset, keep at least one entry
    const auto keep = rng.uniform_int(0, n - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (i != keep && rng.uniform() < 0.5) v[i] = 0.0;
  } else if (u < 0.3) {
    const auto keep = rng.uniform_int(0, n - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (i != keep && rng.uniform() < 0.5) v[i] *= 1e-9;
  } else {
    return v;
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return v;
}

Vector sample_simplex_floored(Xorshift64Star& rng, std::size_t n, double floor) {
  const double slack = 1.0 - static_cast<double>(n) * floor;
  if (!(slack > 0.0)) throw Error(ErrorCode::InvalidArgument, "floor too large for simplex");
  Vector v = sample_simplex(rng, n);
  for (double& x : v) x = floor + slack * x;
  return v;
}

Vector sample_zero_sum(Xorshift64Star& rng, std::size_t n) {
  Vector v(n);
  double mean = 0.0;
  for (double& x : v) {
    x = rng.uniform(-1.0, 1.0);
    mean += x;
  }
  mean /= static_cast<double>(n);
  for (double& x : v) x -= mean;
  return v;
}

double sample_normal(Xorshift64Star& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace stefan
