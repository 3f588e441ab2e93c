#include "stefan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include "stefan/error.hpp"
#include "stefan/rng.hpp"

namespace stefan::harness {

namespace {

struct Scalar {
  std::string text;  // raw number token
  bool is_string = false;
};
using Array = std::vector<std::string>;
using Value = std::variant<Scalar, Array>;

struct Entry {
  Value value;
  std::size_t line = 0;
};

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::ValidationError, key + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool bare_key(std::string_view k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
           ch == '_' || ch == '-';
  });
}

bool number_token(std::string_view t) {
  if (t.empty()) return false;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
  return ec == std::errc() && p == t.data() + t.size();
}

/// Removes a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line, std::size_t lineno) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_string) {
      if (ch == '\\') ++i;
      else if (ch == '"') in_string = false;
    } else if (ch == '"') {
      in_string = true;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  if (in_string) parse_error(lineno, "unterminated string");
  return line;
}

Scalar parse_string(std::string_view v, std::size_t lineno) {
  Scalar s;
  s.is_string = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const char ch = v[i];
    if (ch == '"') {
      if (!trim(v.substr(i + 1)).empty()) parse_error(lineno, "trailing text after string");
      return s;
    }
    if (ch == '\\') {
      if (++i >= v.size()) break;
      switch (v[i]) {
        case '"': s.text += '"'; break;
        case '\\': s.text += '\\'; break;
        case 'n': s.text += '\n'; break;
        case 't': s.text += '\t'; break;
        default: parse_error(lineno, "unsupported escape");
      }
    } else {
      s.text += ch;
    }
  }
  parse_error(lineno, "unterminated string");
}

Value parse_value(std::string_view v, std::size_t lineno) {
  if (v.empty()) parse_error(lineno, "missing value");
  if (v.front() == '"') return parse_string(v, lineno);
  if (v.front() == '[') {
    if (v.back() != ']') parse_error(lineno, "unterminated array");
    Array out;
    std::string_view body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return out;
    while (true) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      if (item.empty()) {
        if (comma == std::string_view::npos && !out.empty()) break;  // trailing comma
        parse_error(lineno, "empty array element");
      }
      if (!number_token(item)) parse_error(lineno, "array elements must be numbers");
      out.emplace_back(item);
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return out;
  }
  if (!number_token(v)) parse_error(lineno, "expected a number, string or array");
  return Scalar{std::string(v), false};
}

double to_double(const std::string& key, std::string_view t) {
  const char* first = t.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
    invalid(key, "not a finite number");
  return v;
}

class Table {
 public:
  explicit Table(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Scalar& scalar(const std::string& key) const {
    const auto* s = std::get_if<Scalar>(&entries_.at(key).value);
    if (!s) invalid(key, "expected a scalar");
    return *s;
  }

  std::string string(const std::string& key) const {
    const Scalar& s = scalar(key);
    if (!s.is_string) invalid(key, "expected a string");
    return s.text;
  }

  double number(const std::string& key) const {
    const Scalar& s = scalar(key);
    if (s.is_string) invalid(key, "expected a number");
    return to_double(key, s.text);
  }

  std::uint64_t integer(const std::string& key) const {
    const Scalar& s = scalar(key);
    if (s.is_string) invalid(key, "expected an integer");
    std::string_view t = s.text;
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) invalid(key, "expected a nonnegative integer");
    return v;
  }

  Vector array(const std::string& key) const {
    const auto* a = std::get_if<Array>(&entries_.at(key).value);
    if (!a) invalid(key, "expected an array");
    Vector out;
    for (const auto& t : *a) out.push_back(to_double(key, t));
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model", "n", "d", "gamma", "beta", "theta", "masses", "cells", "length", "dt_init",
      "safety", "t_end", "max_rejects", "entropy_tolerance", "initial", "base", "direction",
      "amplitude", "wavenumber", "perturb_wavenumber", "snapshot_stride", "seed", "output"};
  return keys;
}

void require(const Table& t, const std::string& key) {
  if (!t.has(key)) invalid(key, "missing required key");
}

void validate(const RunConfig& c) {
  const auto kind = thermo::parse_model_kind(c.model);
  if (!kind) invalid("model", "unknown model '" + c.model + "'");
  if (c.n < 2) invalid("n", "need at least 2 species");
  if (c.d.size() != c.n * (c.n - 1) / 2)
    invalid("d", "needs exactly n(n-1)/2 = " + std::to_string(c.n * (c.n - 1) / 2) + " entries");
  for (double v : c.d)
    if (!(v > 0.0)) invalid("d", "entries must be positive");
  switch (*kind) {
    case thermo::ModelKind::PorousMedium:
      if (!c.gamma) invalid("gamma", "required for porous-medium");
      if (!(*c.gamma > 1.0)) invalid("gamma", "must exceed 1");
      break;
    case thermo::ModelKind::Tumor:
      if (c.n != 3) invalid("n", "tumor model needs n = 3");
      if (!c.beta) invalid("beta", "required for tumor");
      if (!c.theta) invalid("theta", "required for tumor");
      if (!(*c.beta > 0.0)) invalid("beta", "must be positive");
      if (!(*c.theta >= 0.0)) invalid("theta", "must be nonnegative");
      break;
    case thermo::ModelKind::MolarMass:
      if (c.masses.size() != c.n) invalid("masses", "needs one mass per species");
      for (double m : c.masses)
        if (!(m > 0.0)) invalid("masses", "must be positive");
      break;
    default:
      break;
  }
  if (c.cells < 4) invalid("cells", "need at least 4 cells");
  if (!(c.length > 0.0)) invalid("length", "must be positive");
  if (!(c.dt_init > 0.0)) invalid("dt_init", "must be positive");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) invalid("safety", "must lie in (0, 1]");
  if (!(c.t_end >= 0.0)) invalid("t_end", "must be nonnegative");
  if (c.max_rejects == 0) invalid("max_rejects", "must be positive");
  if (!(c.entropy_tolerance >= 0.0)) invalid("entropy_tolerance", "must be nonnegative");
  if (c.initial != "uniform" && c.initial != "cosine" && c.initial != "random-smooth")
    invalid("initial", "expected uniform, cosine or random-smooth");
  if (c.base.size() != c.n) invalid("base", "needs n entries");
  double sum = 0.0;
  for (double v : c.base) {
    if (v < 0.0) invalid("base", "entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) invalid("base", "entries must sum to 1");
  if (c.direction.size() != c.n) invalid("direction", "needs n entries");
  sum = 0.0;
  for (double v : c.direction) sum += v;
  if (std::abs(sum) > 1e-12) invalid("direction", "entries must sum to 0");
  if (!(c.amplitude >= 0.0)) invalid("amplitude", "must be nonnegative");
  if (!(c.wavenumber > 0.0)) invalid("wavenumber", "must be positive");
  if (!(c.perturb_wavenumber > 0.0)) invalid("perturb_wavenumber", "must be positive");
}

std::string format_number(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, p);
  // keep it a float token so integers and reals stay distinguishable to readers
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string format_array(const Vector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s + "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += ch;
    }
  }
  return out + "\"";
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    line = trim(strip_comment(line, lineno));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(lineno, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (!bare_key(key)) parse_error(lineno, "invalid key '" + std::string(key) + "'");
    Value value = parse_value(trim(line.substr(eq + 1)), lineno);
    const std::string k(key);
    if (!known_keys().count(k)) invalid(k, "unknown key (line " + std::to_string(lineno) + ")");
    if (entries.count(k)) invalid(k, "duplicate key (line " + std::to_string(lineno) + ")");
    entries.emplace(k, Entry{std::move(value), lineno});
  }

  const Table t(std::move(entries));
  for (const char* key : {"model", "n", "d", "cells", "length", "t_end"}) require(t, key);

  RunConfig c;
  c.model = t.string("model");
  c.n = t.integer("n");
  c.d = t.array("d");
  if (t.has("gamma")) c.gamma = t.number("gamma");
  if (t.has("beta")) c.beta = t.number("beta");
  if (t.has("theta")) c.theta = t.number("theta");
  if (t.has("masses")) c.masses = t.array("masses");
  c.cells = t.integer("cells");
  c.length = t.number("length");
  if (t.has("dt_init")) c.dt_init = t.number("dt_init");
  if (t.has("safety")) c.safety = t.number("safety");
  c.t_end = t.number("t_end");
  if (t.has("max_rejects")) c.max_rejects = t.integer("max_rejects");
  if (t.has("entropy_tolerance")) c.entropy_tolerance = t.number("entropy_tolerance");
  if (t.has("initial")) c.initial = t.string("initial");
  if (t.has("base")) {
    c.base = t.array("base");
  } else {
    c.base.assign(c.n, c.n ? 1.0 / static_cast<double>(c.n) : 0.0);
  }
  if (t.has("direction")) {
    c.direction = t.array("direction");
  } else {
    c.direction.assign(c.n, 0.0);
    if (c.n >= 2) {
      c.direction[0] = 1.0;
      c.direction[1] = -1.0;
    }
  }
  if (t.has("amplitude")) c.amplitude = t.number("amplitude");
  if (t.has("wavenumber")) c.wavenumber = t.number("wavenumber");
  if (t.has("perturb_wavenumber")) c.perturb_wavenumber = t.number("perturb_wavenumber");
  if (t.has("snapshot_stride")) c.snapshot_stride = t.integer("snapshot_stride");
  if (t.has("seed")) c.seed = t.integer("seed");
  if (t.has("output")) c.output = t.string("output");
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream os;
  os << "model = " << quote(c.model) << '\n';
  os << "n = " << c.n << '\n';
  os << "d = " << format_array(c.d) << '\n';
  if (c.gamma) os << "gamma = " << format_number(*c.gamma) << '\n';
  if (c.beta) os << "beta = " << format_number(*c.beta) << '\n';
  if (c.theta) os << "theta = " << format_number(*c.theta) << '\n';
  if (!c.masses.empty()) os << "masses = " << format_array(c.masses) << '\n';
  os << "cells = " << c.cells << '\n';
  os << "length = " << format_number(c.length) << '\n';
  os << "dt_init = " << format_number(c.dt_init) << '\n';
  os << "safety = " << format_number(c.safety) << '\n';
  os << "t_end = " << format_number(c.t_end) << '\n';
  os << "max_rejects = " << c.max_rejects << '\n';
  os << "entropy_tolerance = " << format_number(c.entropy_tolerance) << '\n';
  os << "initial = " << quote(c.initial) << '\n';
  os << "base = " << format_array(c.base) << '\n';
  os << "direction = " << format_array(c.direction) << '\n';
  os << "amplitude = " << format_number(c.amplitude) << '\n';
  os << "wavenumber = " << format_number(c.wavenumber) << '\n';
  os << "perturb_wavenumber = " << format_number(c.perturb_wavenumber) << '\n';
  os << "snapshot_stride = " << c.snapshot_stride << '\n';
  os << "seed = " << c.seed << '\n';
  if (!c.output.empty()) os << "output = " << quote(c.output) << '\n';
  return os.str();
}

thermo::ModelSpec build_model(const RunConfig& c) {
  thermo::ModelParams p;
  p.n = c.n;
  p.d = DiffusionTable::from_upper(c.n, c.d);
  if (c.gamma) p.gamma = *c.gamma;
  if (c.beta) p.beta = *c.beta;
  if (c.theta) p.theta = *c.theta;
  p.masses = c.masses;
  return thermo::make_model(c.model, std::move(p));
}

pde::SolverConfig build_solver_config(const RunConfig& c) {
  pde::SolverConfig s{build_model(c)};
  s.dt_init = c.dt_init;
  s.safety = c.safety;
  s.t_end = c.t_end;
  s.max_rejects = c.max_rejects;
  s.entropy_tolerance = c.entropy_tolerance;
  s.validate();
  return s;
}

pde::Grid1D build_grid(const RunConfig& c) { return pde::Grid1D::make(c.cells, c.length); }

pde::Field build_initial(const RunConfig& c) {
  const pde::Grid1D grid = build_grid(c);
  const std::size_t n = c.n;
  const double k = std::numbers::pi / c.length;
  if (c.initial == "uniform") {
    return pde::init_field(grid, n, [&](double) { return c.base; });
  }
  if (c.initial == "cosine") {
    return pde::init_field(grid, n, [&](double x) {
      Vector v = c.base;
      const double s = c.amplitude * std::cos(c.wavenumber * k * x);
      for (std::size_t i = 0; i < n; ++i) v[i] += s * c.direction[i];
      return v;
    });
  }
  // random-smooth: three cosine modes with seeded zero-sum directions,
  // scaled so that |profile - base|_inf <= amplitude
  Xorshift64Star rng(c.seed);
  std::vector<Vector> dirs;
  for (int m = 0; m < 3; ++m) dirs.push_back(sample_zero_sum(rng, n));
  double bound = 0.0;
  for (int m = 0; m < 3; ++m) bound += norm_inf(dirs[m]) / (m + 1);
  const double scale = bound > 0.0 ? c.amplitude / bound : 0.0;
  return pde::init_field(grid, n, [&](double x) {
    Vector v = c.base;
    for (int m = 0; m < 3; ++m) {
      const double s = scale * std::cos((m + 1) * k * x) / (m + 1);
      for (std::size_t i = 0; i < n; ++i) v[i] += s * dirs[m][i];
    }
    return v;
  });
}

}  // namespace stefan::harness
