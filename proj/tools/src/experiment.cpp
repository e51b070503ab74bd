#include "lowrank/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <cmath>
#include <thread>

#include "json.hpp"
#include "lowrank/asym_gd.hpp"
#include "lowrank/eigenspace.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/harness/output.hpp"
#include "lowrank/sym_gd.hpp"

namespace lowrank::harness {
namespace {

using nlohmann::json;

struct Job {
  std::size_t variant = 0;
  std::size_t repeat = 0;
};

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : path_(path), out_(path) {
    if (!out_) throw OutputError("cannot open " + path.string() + " for writing");
  }
  void row(std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out_ << ',';
      out_ << f;
      first = false;
    }
    out_ << '\n';
  }
  void close() {
    out_.close();
    if (!out_) throw OutputError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }

std::string csv_name(const Variant& v, std::size_t repeat, std::uint64_t seed) {
  return v.name + "_rep" + std::to_string(repeat) + "_seed" + std::to_string(seed) + ".csv";
}

std::string regime_of(const InitPlan& plan, double alpha, const Target& target, double eta) {
  if (plan.scheme == InitScheme::explicit_matrix) return "explicit";
  try {
    return alpha <= small_alpha_bound(target, eta, plan.multiplier) ? "small" : "moderate";
  } catch (const std::exception&) {
    return "moderate";
  }
}

double record_error(const TraceRecord& r) { return r.error; }
double record_error(const AsymRecord& r) { return r.error; }
double record_error(const EigRecord& r) { return r.proj_error; }

template <typename TraceT>
void fill_outcome(RunSummary& s, const TraceT& trace, double epsilon, bool diverged) {
  s.iterations = trace.iterations;
  s.wall_seconds = trace.wall_seconds;
  s.outcome = diverged ? RunOutcome::diverged
                       : (trace.converged() ? RunOutcome::converged : RunOutcome::budget_exhausted);
  s.final_error = trace.records.empty() ? 0.0 : record_error(trace.records.back());
  for (const auto& r : trace.records) {
    if (record_error(r) <= epsilon) {
      s.iterations_to_tolerance = r.iter;
      break;
    }
  }
}

void write_sym_csv(const std::filesystem::path& path, const SymTrace& trace) {
  CsvFile csv(path);
  csv.row({"iter", "error", "sigma1_x", "sigma1_j", "sigmar_u", "ratio", "sigma1_p", "in_r", "in_r2"});
  for (const auto& r : trace.records) {
    csv.row({fmt(r.iter), fmt(r.error), fmt(r.sigma1_x), fmt(r.sigma1_j), fmt(r.sigmar_u),
             fmt(r.ratio), fmt(r.sigma1_p), fmt(r.in_r), fmt(r.in_r2)});
  }
  csv.close();
}

void write_asym_csv(const std::filesystem::path& path, const AsymTrace& trace) {
  CsvFile csv(path);
  csv.row({"iter", "error", "balance"});
  for (const auto& r : trace.records) csv.row({fmt(r.iter), fmt(r.error), fmt(r.balance)});
  csv.close();
}

void write_eig_csv(const std::filesystem::path& path, const EigTrace& trace) {
  CsvFile csv(path);
  csv.row({"iter", "proj_error"});
  for (const auto& r : trace.records) csv.row({fmt(r.iter), fmt(r.proj_error)});
  csv.close();
}

RunSummary run_one(const ExperimentConfig& config, const Target& target, const Variant& variant,
                   std::size_t repeat) {
  const SolverConfig solver = solver_config(config);
  const InitPlan plan = plan_for(config, variant, repeat);
  RunSummary s;
  s.variant = variant.name;
  s.repeat = repeat;
  s.seed = plan.seed;
  s.alpha = resolve_alpha(plan, target, config.eta);
  s.csv = config.out_dir / csv_name(variant, repeat, plan.seed);

  switch (config.kind) {
    case ExperimentKind::sym: {
      s.regime = regime_of(plan, s.alpha, target, config.eta);
      const FactorState x0 = initialize(plan, target, config.eta);
      SymTrace trace;
      bool diverged = false;
      try {
        trace = run(x0, target, solver);
      } catch (const DivergedRun<SymTrace>& e) {
        trace = e.trace();
        diverged = true;
      }
      write_sym_csv(s.csv, trace);
      fill_outcome(s, trace, config.epsilon, diverged);
      break;
    }
    case ExperimentKind::asym: {
      const bool regularized = variant.regularized.value_or(config.regularized);
      Matrix sigma = Matrix::Zero(static_cast<Eigen::Index>(config.dim),
                                  static_cast<Eigen::Index>(config.dim));
      sigma.diagonal() = Eigen::Map<const Vector>(target.eigenvalues().data(),
                                                  static_cast<Eigen::Index>(config.dim));
      const AsymTarget asym_target(std::move(sigma), config.rank);
      Rng rng(plan.seed);
      Matrix n0 = gaussian_factor(config.dim, config.rank, config.dim, rng);
      Matrix n1 = gaussian_factor(config.dim, config.rank, config.dim, rng);
      const AsymState s0(s.alpha * n0, s.alpha * n1);
      AsymTrace trace;
      bool diverged = false;
      try {
        trace = run_asym(s0, asym_target, solver, regularized);
      } catch (const DivergedRun<AsymTrace>& e) {
        trace = e.trace();
        diverged = true;
      }
      s.regime = regularized ? "regularized" : "unregularized";
      write_asym_csv(s.csv, trace);
      fill_outcome(s, trace, config.epsilon, diverged);
      break;
    }
    case ExperimentKind::eig: {
      s.regime = regime_of(plan, s.alpha, target, config.eta);
      const EigMethod method = variant.method.value_or(config.method);
      const EigState l0(initialize(plan, target, config.eta).x());
      EigTrace trace;
      bool diverged = false;
      try {
        trace = run_eig(l0, target, solver, method);
      } catch (const DivergedRun<EigTrace>& e) {
        trace = e.trace();
        diverged = true;
      }
      write_eig_csv(s.csv, trace);
      fill_outcome(s, trace, config.epsilon, diverged);
      break;
    }
    case ExperimentKind::bench:
      throw ConfigError("kind", "bench configs run through run_bench");
  }
  return s;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw OutputError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  out.close();
  if (!out) throw OutputError("write failed: " + path.string());
}

json config_header(const ExperimentConfig& config, const Target& target) {
  const double bound = max_step_size(target);
  return json{{"kind", to_string(config.kind)},
              {"description", config.description},
              {"dim", config.dim},
              {"rank", config.rank},
              {"eta", config.eta},
              {"epsilon", config.epsilon},
              {"max_iters", config.max_iters},
              {"eigengap", target.eigengap()},
              {"max_step_size", bound},
              {"eta_within_theory", config.eta <= bound}};
}

}  // namespace

const char* to_string(RunOutcome outcome) noexcept {
  switch (outcome) {
    case RunOutcome::converged: return "converged";
    case RunOutcome::budget_exhausted: return "budget_exhausted";
    case RunOutcome::diverged: return "diverged";
  }
  return "unknown";
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("LOWRANK_GD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".lowrank_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw OutputError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.kind == ExperimentKind::bench) {
    throw ConfigError("kind", "bench configs run through run_bench");
  }
  const Target target = build_target(config);
  const std::vector<Variant> variants = effective_variants(config);
  prepare_output_dir(config.out_dir);

  std::vector<Job> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (std::size_t r = 0; r < config.repeats; ++r) jobs.push_back({v, r});

  std::vector<RunSummary> results(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        results[k] = run_one(config, target, variants[jobs[k].variant], jobs[k].repeat);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(worker_threads(), jobs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  ExperimentResult result;
  result.runs = std::move(results);
  json runs = json::array();
  for (const auto& s : result.runs) {
    result.any_diverged = result.any_diverged || s.outcome == RunOutcome::diverged;
    runs.push_back({{"variant", s.variant},
                    {"repeat", s.repeat},
                    {"seed", s.seed},
                    {"alpha", finite_or_null(s.alpha)},
                    {"regime", s.regime},
                    {"csv", s.csv.filename().string()},
                    {"status", to_string(s.outcome)},
                    {"iterations", s.iterations},
                    {"iterations_to_tolerance", s.iterations_to_tolerance
                                                    ? json(*s.iterations_to_tolerance)
                                                    : json(nullptr)},
                    {"final_error", finite_or_null(s.final_error)},
                    {"wall_seconds", s.wall_seconds}});
  }
  json doc = config_header(config, target);
  doc["any_diverged"] = result.any_diverged;
  doc["runs"] = std::move(runs);
  result.summary_path = config.out_dir / "summary.json";
  write_json(result.summary_path, doc);
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

BenchResult run_bench(const ExperimentConfig& config) {
  const Target target = build_target(config);
  prepare_output_dir(config.out_dir);
  SolverConfig solver = solver_config(config);
  solver.record_every = solver.max_iters;

  BenchResult result;
  result.rgd.method = EigMethod::rgd;
  result.retraction_free.method = EigMethod::retraction_free;
  CsvFile csv(config.out_dir / "bench.csv");
  csv.row({"repeat", "seed", "method", "iterations", "converged", "wall_seconds"});

  const Variant base;
  for (std::size_t i = 0; i < config.repeats; ++i) {
    const InitPlan plan = plan_for(config, base, i);
    const EigState l0(initialize(plan, target, config.eta).x());
    for (BenchMethodStats* stats : {&result.rgd, &result.retraction_free}) {
      const EigTrace trace = run_eig(l0, target, solver, stats->method);
      stats->wall_seconds.push_back(trace.wall_seconds);
      stats->iterations.push_back(trace.iterations);
      stats->converged += trace.converged() ? 1 : 0;
      csv.row({fmt(i), std::to_string(plan.seed), to_string(stats->method), fmt(trace.iterations),
               fmt(trace.converged()), fmt(trace.wall_seconds)});
    }
  }
  csv.close();

  for (BenchMethodStats* stats : {&result.rgd, &result.retraction_free}) {
    for (double w : stats->wall_seconds) stats->total_seconds += w;
    stats->median_seconds = median(stats->wall_seconds);
  }
  result.saving_percent =
      result.rgd.total_seconds > 0.0
          ? 100.0 * (1.0 - result.retraction_free.total_seconds / result.rgd.total_seconds)
          : 0.0;

  auto method_json = [](const BenchMethodStats& s) {
    return json{{"runs", s.wall_seconds.size()},
                {"converged", s.converged},
                {"total_seconds", s.total_seconds},
                {"median_seconds", s.median_seconds},
                {"median_iterations",
                 median(std::vector<double>(s.iterations.begin(), s.iterations.end()))}};
  };
  json doc = config_header(config, target);
  doc["repeats"] = config.repeats;
  doc["rgd"] = method_json(result.rgd);
  doc["retraction_free"] = method_json(result.retraction_free);
  doc["saving_percent"] = result.saving_percent;
  result.summary_path = config.out_dir / "summary.json";
  write_json(result.summary_path, doc);
  return result;
}

}  // namespace lowrank::harness
