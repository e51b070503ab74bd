#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/harness/config.hpp"
#include "lowrank/harness/experiment.hpp"
#include "lowrank/harness/output.hpp"

#ifndef LOWRANK_GD_VERSION
#define LOWRANK_GD_VERSION "0.0.0"
#endif

namespace {

namespace h = lowrank::harness;

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 1;
constexpr int kExitConfig = 2;

h::ExperimentConfig load(const std::string& path, const std::optional<std::string>& out,
                         const std::optional<std::uint64_t>& seed) {
  h::ExperimentConfig config = h::load_config(path);
  if (out) config.out_dir = *out;
  if (seed) config.init.seed = *seed;
  return config;
}

int do_run(const h::ExperimentConfig& config, bool plot) {
  if (config.kind == h::ExperimentKind::bench) {
    std::fprintf(stderr, "error: kind \"bench\" must be run with `lowrank-gd bench`\n");
    return kExitConfig;
  }
  const h::ExperimentResult result = h::run_experiment(config);
  for (const auto& r : result.runs) {
    std::printf("%-24s rep %-3zu seed %-6llu %-16s iters %-6zu to_tol %-8s final %-12.4e %.3fs\n",
                r.variant.c_str(), r.repeat, static_cast<unsigned long long>(r.seed),
                h::to_string(r.outcome), r.iterations,
                r.iterations_to_tolerance ? std::to_string(*r.iterations_to_tolerance).c_str() : "-",
                r.final_error, r.wall_seconds);
  }
  std::printf("summary: %s\n", result.summary_path.string().c_str());
  if (plot) {
    std::vector<std::filesystem::path> csvs;
    for (const auto& r : result.runs) csvs.push_back(r.csv);
    const auto svg = config.out_dir / "plot.svg";
    h::emit_plot(csvs, svg, config.description);
    std::printf("plot: %s\n", svg.string().c_str());
  }
  return result.any_diverged ? kExitDiverged : kExitOk;
}

int do_bench(const h::ExperimentConfig& config) {
  const h::BenchResult b = h::run_bench(config);
  for (const auto* s : {&b.rgd, &b.retraction_free}) {
    std::printf("%-16s runs %-4zu converged %-4zu total %.3fs median %.5fs\n",
                lowrank::to_string(s->method), s->wall_seconds.size(), s->converged,
                s->total_seconds, s->median_seconds);
  }
  std::printf("saving: %.1f%%\nsummary: %s\n", b.saving_percent, b.summary_path.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient descent for low-rank matrix approximation and eigenspace computation"};
  app.set_version_flag("--version", std::string("lowrank-gd ") + LOWRANK_GD_VERSION);
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::string> run_out;
  std::optional<std::uint64_t> run_seed;
  bool run_plot = false;
  auto* run_cmd = app.add_subcommand("run", "Run a sym/asym/eig experiment config");
  run_cmd->add_option("--config", run_config, "JSON experiment config")->required();
  run_cmd->add_option("--out", run_out, "Override out_dir");
  run_cmd->add_option("--seed", run_seed, "Override the base seed");
  run_cmd->add_flag("--plot", run_plot, "Write plot.svg with every trace");

  std::string bench_config;
  auto* bench_cmd = app.add_subcommand("bench", "Wall-time comparison of RGD and retraction-free");
  bench_cmd->add_option("--config", bench_config, "JSON bench config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return do_run(load(run_config, run_out, run_seed), run_plot);
    return do_bench(load(bench_config, std::nullopt, std::nullopt));
  } catch (const h::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const h::OutputError& e) {
    std::fprintf(stderr, "output error: %s\n", e.what());
    return kExitConfig;
  } catch (const lowrank::PreconditionError& e) {
    std::fprintf(stderr, "invalid setup: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
