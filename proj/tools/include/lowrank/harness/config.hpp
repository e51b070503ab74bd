#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lowrank/eigenspace.hpp"
#include "lowrank/init.hpp"
#include "lowrank/spectrum.hpp"

namespace lowrank::harness {

enum class ExperimentKind { sym, asym, eig, bench };

const char* to_string(ExperimentKind kind) noexcept;

/// Invalid or unreadable configuration. `key()` names the offending entry
/// ("eta", "init.alpha", "variants[2].name", ...) or is empty for parse errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct SpectrumSpec {
  enum class Type { experiment, equal_top, explicit_values };
  Type type = Type::experiment;
  double hi = 0.0;
  double lo = 0.0;
  double value = 0.0;
  std::vector<double> values;
};

/// Per-curve overrides on top of the base config.
struct Variant {
  std::string name;
  std::optional<double> alpha;
  std::optional<InitScheme> scheme;
  std::optional<double> multiplier;
  std::optional<bool> regularized;
  std::optional<EigMethod> method;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sym;
  std::size_t dim = 0;
  std::size_t rank = 0;
  SpectrumSpec spectrum;
  double eta = 0.0;
  double epsilon = 0.0;
  std::size_t max_iters = 0;
  std::size_t record_every = 1;
  InitPlan init;
  std::size_t repeats = 1;
  bool regularized = true;
  EigMethod method = EigMethod::retraction_free;
  std::vector<Variant> variants;
  std::filesystem::path out_dir = "out";
  std::string description;
};

/// Default iteration budget when "max_iters" is absent.
std::size_t default_max_iters(ExperimentKind kind) noexcept;

/// Parses and validates a JSON document.
///
/// Schema (keys not listed are rejected):
///   kind          "sym" | "asym" | "eig" | "bench"            required
///   dim, rank     positive integers, rank < dim              required
///   spectrum      {"type": "experiment", "hi", "lo"}
///               | {"type": "equal_top", "value"}
///               | {"type": "explicit", "values": [...]}      required
///   eta, epsilon  positive reals                             required
///   max_iters     positive integer      default 20000 (sym/asym), 10000 (eig/bench)
///   record_every  positive integer      default 1
///   init          {"scheme": "small" | "moderate" | "explicit",
///                  "alpha", "seed", "multiplier", "matrix"}  required
///   repeats       positive integer      default 1
///   regularized   bool (asym)           default true
///   method        "retraction_free" | "rgd" (eig)
///   variants      [{"name", "alpha", "scheme", "multiplier",
///                   "regularized", "method"}, ...]
///   out_dir       string                default "out"
///   description   string
ExperimentConfig parse_config(const std::string& json_text);

ExperimentConfig load_config(const std::filesystem::path& path);

/// The effective variants: the configured list, or one variant named after
/// the kind when none are given.
std::vector<Variant> effective_variants(const ExperimentConfig& config);

/// Spectrum values of length `dim`.
std::vector<double> spectrum_values(const ExperimentConfig& config);

Target build_target(const ExperimentConfig& config);

/// The InitPlan for a variant and repeat (seed = base seed + repeat).
InitPlan plan_for(const ExperimentConfig& config, const Variant& variant, std::size_t repeat);

SolverConfig solver_config(const ExperimentConfig& config);

}  // namespace lowrank::harness
