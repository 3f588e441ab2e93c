#pragma once

// Trajectory CSV: header t,H,D,H_rel,rS_min,min_c,sum_dev,dt,mass_1..mass_n;
// '.' decimals, 17 significant digits, LF endings, empty cells for absent values.

#include <ostream>
#include <string>
#include <vector>

#include "stefan/diagnostics.hpp"

namespace stefan::harness {

/// printf %.17g equivalent without locale; NaN renders empty.
std::string format_double(double v);

std::string csv_header(std::size_t species);
std::string csv_row(const diag::DiagnosticsRecord& r, double dt);

void write_csv(std::ostream& out, const std::vector<diag::DiagnosticsRecord>& records,
               const std::vector<double>& dts, std::size_t species);
void write_csv(const std::string& path, const std::vector<diag::DiagnosticsRecord>& records,
               const std::vector<double>& dts, std::size_t species);

}  // namespace stefan::harness
