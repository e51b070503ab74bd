#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lowrank/harness/config.hpp"

namespace lowrank::harness {

/// Output directory could not be created or written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunOutcome { converged, budget_exhausted, diverged };

const char* to_string(RunOutcome outcome) noexcept;

struct RunSummary {
  std::string variant;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::filesystem::path csv;
  RunOutcome outcome = RunOutcome::budget_exhausted;
  std::size_t iterations = 0;
  /// Iteration column of the first CSV row whose error is <= epsilon.
  std::optional<std::size_t> iterations_to_tolerance;
  double final_error = 0.0;
  double wall_seconds = 0.0;
  /// "small" or "moderate" relative to small_alpha_bound (sym, eig).
  std::string regime;
};

struct ExperimentResult {
  std::vector<RunSummary> runs;
  std::filesystem::path summary_path;
  bool any_diverged = false;
};

/// Number of worker threads for repeats: LOWRANK_GD_THREADS when set to a
/// positive integer, otherwise the hardware concurrency.
std::size_t worker_threads();

/// Creates out_dir and checks it is writable. Throws OutputError.
void prepare_output_dir(const std::filesystem::path& dir);

/// Runs every (variant, repeat) pair of a sym/asym/eig config, writing one CSV
/// per run and summary.json into out_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct BenchMethodStats {
  EigMethod method = EigMethod::retraction_free;
  std::vector<double> wall_seconds;
  std::vector<std::size_t> iterations;
  std::size_t converged = 0;
  double total_seconds = 0.0;
  double median_seconds = 0.0;
};

struct BenchResult {
  BenchMethodStats rgd;
  BenchMethodStats retraction_free;
  /// 100 * (1 - total_rf / total_rgd).
  double saving_percent = 0.0;
  std::filesystem::path summary_path;
};

/// Wall-time comparison of RGD and the retraction-free iteration. Methods are
/// interleaved (RGD, RF, RGD, RF, ...) on one thread; repeat i uses seed
/// base + i for both methods.
BenchResult run_bench(const ExperimentConfig& config);

double median(std::vector<double> values);

}  // namespace lowrank::harness
