#pragma once

// Per-species free energies h(c) with derivatives and pressures
// p = c h' - h, p' = c h''.

#include <cstddef>
#include <functional>
#include <map>
#include <string>

namespace stefan::thermo {

class EntropyModel {
 public:
  using Scalar = std::function<double(double)>;

  struct Functions {
    Scalar h, dh, d2h, d3h;  // h and its first three derivatives
    Scalar p, dp;            // pressure and its derivative
  };

  /// closed_at_zero: h extends continuously to c = 0 with value h_at_zero.
  EntropyModel(std::string name, Functions f, bool closed_at_zero, double h_at_zero = 0.0,
               std::map<std::string, double> params = {});

  const std::string& name() const noexcept { return name_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  bool closed_at_zero() const noexcept { return closed_at_zero_; }

  /// h(c); at c == 0 returns the continuous extension when it exists.
  double h(double c) const;
  double dh(double c) const;
  double d2h(double c) const;
  double d3h(double c) const;
  double pressure(double c) const;
  double pressure_derivative(double c) const;
  /// p''(c) = h''(c) + c h'''(c)
  double pressure_second_derivative(double c) const;

 private:
  void require_positive(double c, const char* what) const;

  std::string name_;
  Functions f_;
  bool closed_at_zero_;
  double h_at_zero_;
  std::map<std::string, double> params_;
};

/// h = c (log c - 1), p = c.
EntropyModel boltzmann_entropy();
/// h = c^gamma / (gamma - 1), p = c^gamma; gamma > 1.
EntropyModel porous_entropy(double gamma);
/// Boltzmann entropy of the molar concentration rho / M:
/// h = (rho/M)(log(rho/M) - 1), p = rho / M.
EntropyModel molar_mass_entropy(double molar_mass);

/// h(c) - h(cbar) - h'(cbar)(c - cbar); cbar must be positive.
double relative_entropy_density(const EntropyModel& model, double c, double cbar);

struct PointwiseBound {
  double lhs = 0.0;     // c log(c/cbar) - (c - cbar)
  double bound1 = 0.0;  // (c - cbar)^2 / 2
  double bound2 = 0.0;  // (sqrt(c) - sqrt(cbar))^2
  double margin = 0.0;  // min(lhs - bound1, lhs - bound2)
};

/// Both quadratic lower bounds of the Boltzmann relative entropy density.
PointwiseBound pointwise_bound_check(double c, double cbar);

/// min over c in [0,1], cbar in [m,1] (grid step `step`) of
/// h(c|cbar)/(c - cbar)^2, with h''(cbar)/2 used where |c - cbar| < 1e-6.
double relenes_constant(const EntropyModel& model, double m, double step = 1e-3);

struct HypothesisAudit {
  double k1_estimate = 0.0;  // sup c h''
  double k2_estimate = 0.0;  // sup |p''| / h''
  double min_c_h2 = 0.0;     // inf c h''
  std::size_t samples = 0;
  bool pass = false;
};

/// Samples (delta, 1] with `grid_points` uniform and `grid_points`
/// geometric points.
HypothesisAudit audit_hypothesis_H(const EntropyModel& model, std::size_t grid_points = 10000,
                                   double delta = 1e-6);

}  // namespace stefan::thermo
