#include "stefan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <thread>

#include "stefan/csv.hpp"
#include "stefan/entropy.hpp"
#include "stefan/error.hpp"
#include "stefan/models.hpp"

namespace stefan::harness {

std::size_t thread_budget() {
  if (const char* env = std::getenv("STEFAN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunOutput simulate(const RunConfig& config, const pde::Field& initial,
                   const std::vector<double>& times, const pde::Trajectory* reference) {
  const pde::SolverConfig solver = build_solver_config(config);
  pde::RunOptions options;
  options.snapshot_stride = config.snapshot_stride;
  options.output_times = times;
  RunOutput out;
  out.trajectory = pde::run(solver, initial, options);
  const auto& snaps = out.trajectory.snapshots;
  if (reference && reference->snapshots.size() != snaps.size())
    throw Error(ErrorCode::GridMismatch, "reference and run have different snapshot times");
  out.records.reserve(snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k)
    out.records.push_back(
        diag::record(snaps[k], solver.model, reference ? &reference->snapshots[k] : nullptr));
  return out;
}

std::vector<double> snapshot_times(const pde::Trajectory& trajectory) {
  std::vector<double> t;
  for (std::size_t k = 1; k < trajectory.snapshots.size(); ++k)
    t.push_back(trajectory.snapshots[k].time());
  return t;
}

std::string output_path(const std::string& config_path, const RunConfig& config) {
  if (!config.output.empty()) return config.output;
  std::filesystem::path p(config_path);
  p.replace_extension(".csv");
  return p.string();
}

namespace {

std::string stem_of(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  if (p.extension() == ".csv") p.replace_extension();
  return p.string();
}

void check_halving(const Vector& eps) {
  if (eps.size() < 3) throw Error(ErrorCode::InvalidArgument, "sweep needs at least three epsilons");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilons must be positive");
    if (k > 0 && std::abs(eps[k - 1] / eps[k] - 2.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument, "each epsilon must be half the previous one");
  }
}

Vector rel_series(const RunOutput& run) {
  Vector s;
  for (const auto& r : run.records) s.push_back(r.rel_entropy.value_or(0.0));
  return s;
}

void write_run_csv(const std::string& path, const RunOutput& run, std::size_t species) {
  write_csv(path, run.records, run.trajectory.snapshot_dt, species);
}

std::string join(const Vector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

SweepResult run_sweep(const RunConfig& config, const Vector& epsilons, std::uint64_t seed,
                      std::size_t threads, const std::string& stem) {
  check_halving(epsilons);
  const pde::Field initial = build_initial(config);
  const RunOutput ref = simulate(config, initial);
  const std::vector<double> times = snapshot_times(ref.trajectory);
  if (!stem.empty()) write_run_csv(stem + ".csv", ref, config.n);

  const double wave = config.perturb_wavenumber * std::numbers::pi / config.length;
  const auto mode = [wave](double x) { return std::cos(wave * x); };

  // jobs 0..E-1 are the epsilons, job E is the epsilon = 0 control
  const std::size_t jobs = epsilons.size() + 1;
  std::vector<Vector> series(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      try {
        const double eps = j < epsilons.size() ? epsilons[j] : 0.0;
        const pde::Field start = pde::perturb_initial(initial, eps, mode, seed);
        const RunOutput run = simulate(config, start, times, &ref.trajectory);
        series[j] = rel_series(run);
        if (!stem.empty()) {
          const std::string name =
              j < epsilons.size() ? stem + ".eps" + std::to_string(j) + ".csv" : stem + ".control.csv";
          write_run_csv(name, run, config.n);
        }
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const std::size_t pool = std::max<std::size_t>(1, std::min(threads, jobs));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < pool; ++t) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult result;
  result.control_max_h_rel = *std::max_element(series.back().begin(), series.back().end());
  series.pop_back();
  result.report = diag::gronwall_report(epsilons, series);
  result.series = std::move(series);
  result.times.push_back(initial.time());
  result.times.insert(result.times.end(), times.begin(), times.end());
  return result;
}

std::string render_sweep_report(const SweepResult& r) {
  std::string s;
  s += "epsilons=" + join(r.report.epsilons) + '\n';
  s += "h0=" + join(r.report.h0) + '\n';
  s += "sup_ratio=" + join(r.report.sup_ratio) + '\n';
  s += "fitted_order=" + format_double(r.report.fitted_order) + '\n';
  s += "control_max_h_rel=" + format_double(r.control_max_h_rel) + '\n';
  return s;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& reference_path,
            std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = load_config(config_path);
    const std::string path = output_path(config_path, config);
    RunOutput run;
    if (reference_path) {
      const RunConfig rc = load_config(*reference_path);
      if (rc.model != config.model || rc.n != config.n || rc.cells != config.cells ||
          rc.length != config.length || rc.t_end != config.t_end)
        throw Error(ErrorCode::GridMismatch, "reference config differs in model, n, grid or t_end");
      const RunOutput ref = simulate(rc, build_initial(rc));
      run = simulate(config, build_initial(config), snapshot_times(ref.trajectory), &ref.trajectory);
    } else {
      run = simulate(config, build_initial(config));
    }
    write_run_csv(path, run, config.n);
    out << "wrote " << path << " (" << run.records.size() << " rows, "
        << run.trajectory.steps.size() << " steps)\n";
    return 0;
  } catch (const std::exception& e) {
    err << "stefan run: " << e.what() << '\n';
    return 1;
  }
}

int cmd_sweep(const std::string& config_path, const Vector& epsilons,
              const std::optional<std::uint64_t>& seed, std::ostream& out, std::ostream& err) {
  try {
    check_halving(epsilons);
  } catch (const Error& e) {
    err << "stefan sweep: " << e.what() << '\n';
    return 2;
  }
  try {
    const RunConfig config = load_config(config_path);
    const std::string stem = stem_of(output_path(config_path, config));
    const SweepResult r =
        run_sweep(config, epsilons, seed.value_or(config.seed), thread_budget(), stem);
    const std::string report = render_sweep_report(r);
    const std::string report_path = stem + ".sweep.txt";
    std::ofstream f(report_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + report_path + "'");
    f << report;
    out << report;
    return 0;
  } catch (const std::exception& e) {
    err << "stefan sweep: " << e.what() << '\n';
    return 1;
  }
}

namespace {

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

int cmd_audit(const AuditRequest& req, std::ostream& out, std::ostream& err) {
  const auto kind = thermo::parse_model_kind(req.model);
  if (!kind) {
    err << "stefan audit: unknown model '" << req.model << "'; known:";
    for (auto id : thermo::model_ids()) err << ' ' << id;
    err << '\n';
    return 2;
  }
  try {
    thermo::ModelParams p;
    p.n = *kind == thermo::ModelKind::Tumor ? 3 : req.n;
    p.d = DiffusionTable::uniform(p.n, req.k);
    p.gamma = req.gamma;
    p.beta = req.beta;
    p.theta = req.theta;
    p.masses = req.masses.empty() ? Vector(p.n, 1.0) : req.masses;
    const thermo::ModelSpec model(*kind, p);

    out << "model=" << req.model << " n=" << p.n << '\n';
    thermo::HypothesisAudit h;
    h.pass = true;
    h.min_c_h2 = std::numeric_limits<double>::infinity();
    h.k1_estimate = -std::numeric_limits<double>::infinity();
    for (const auto& e : model.entropies()) {
      const auto a = thermo::audit_hypothesis_H(e, req.grid_points);
      h.k1_estimate = std::max(h.k1_estimate, a.k1_estimate);
      h.k2_estimate = std::max(h.k2_estimate, a.k2_estimate);
      h.min_c_h2 = std::min(h.min_c_h2, a.min_c_h2);
      h.samples += a.samples;
      h.pass = h.pass && a.pass;
    }
    out << "H   K1=" << format_double(h.k1_estimate) << " K2=" << format_double(h.k2_estimate)
        << " min_c_h2=" << format_double(h.min_c_h2) << " samples=" << h.samples << ' '
        << verdict(h.pass) << '\n';

    const auto b = thermo::audit_assumptions_B(model, req.samples, req.floor, req.seed);
    out << "B1  symmetry defect=" << format_double(b.symmetry_defect) << ' '
        << verdict(b.symmetric) << '\n';
    out << "B1  kernel residual=" << format_double(b.kernel_residual) << ' ' << verdict(b.kernel_ok)
        << '\n';
    out << "B2  sup_frobenius=" << format_double(b.sup_frobenius)
        << " lipschitz=" << format_double(b.lipschitz_estimate) << ' ' << verdict(b.bounded) << '\n';
    out << "B3  envelope";
    for (const auto& [m, g] : b.envelope) out << " gamma(" << format_double(m) << ")=" << format_double(g);
    out << ' ' << verdict(b.envelope_monotone) << '\n';
    out << "B4  min_nonzero_eigenvalue=" << format_double(b.min_nonzero_eigenvalue);
    if (b.eigen_bound_claimed) out << " bound_margin=" << format_double(b.eigen_margin);
    else out << " bound=none";
    out << ' ' << verdict(b.eigen_ok) << '\n';
    out << "L+  positivity_on_L " << verdict(b.positive_on_l) << '\n';
    out << "samples=" << b.samples << " floor=" << format_double(b.floor) << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "stefan audit: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace stefan::harness
