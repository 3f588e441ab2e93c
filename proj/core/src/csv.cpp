#include "stefan/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "stefan/error.hpp"

namespace stefan::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

std::string csv_header(std::size_t species) {
  std::string h = "t,H,D,H_rel,rS_min,min_c,sum_dev,dt";
  for (std::size_t i = 1; i <= species; ++i) h += ",mass_" + std::to_string(i);
  return h;
}

std::string csv_row(const diag::DiagnosticsRecord& r, double dt) {
  std::string s = format_double(r.t);
  s += ',' + format_double(r.entropy);
  s += ',' + format_double(r.dissipation);
  s += ',' + (r.rel_entropy ? format_double(*r.rel_entropy) : std::string());
  s += ',' + format_double(r.rs_min);
  s += ',' + format_double(r.min_c);
  s += ',' + format_double(r.sum_dev);
  s += ',' + format_double(dt);
  for (double m : r.mass) s += ',' + format_double(m);
  return s;
}

void write_csv(std::ostream& out, const std::vector<diag::DiagnosticsRecord>& records,
               const std::vector<double>& dts, std::size_t species) {
  if (dts.size() != records.size())
    throw Error(ErrorCode::DimensionMismatch, "one dt per CSV row");
  out << csv_header(species) << '\n';
  for (std::size_t k = 0; k < records.size(); ++k) out << csv_row(records[k], dts[k]) << '\n';
}

void write_csv(const std::string& path, const std::vector<diag::DiagnosticsRecord>& records,
               const std::vector<double>& dts, std::size_t species) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  write_csv(out, records, dts, species);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

}  // namespace stefan::harness
