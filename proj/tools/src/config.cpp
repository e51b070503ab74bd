#include "lowrank/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lowrank::harness {
namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  std::vector<std::string> unknown;
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) unknown.push_back(join(prefix, item.key()));
  }
  if (unknown.empty()) return;
  std::string names;
  for (const auto& u : unknown) names += (names.empty() ? "" : ", ") + ("\"" + u + "\"");
  throw ConfigError(unknown.front(), "unknown key(s): " + names);
}

const json& require(const json& obj, const std::string& key, const std::string& prefix) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(prefix, key), "missing required key");
  return *it;
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

double as_positive(const json& v, const std::string& key) {
  const double x = as_real(v, key);
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(key, "must be a positive finite number");
  return x;
}

std::size_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError(key, "expected a positive integer");
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 1) {
    throw ConfigError(key, "must be a positive integer");
  }
  return v.get<std::size_t>();
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  throw ConfigError(key, "expected a non-negative integer seed");
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

ExperimentKind parse_kind(const json& v) {
  const std::string s = as_string(v, "kind");
  if (s == "sym") return ExperimentKind::sym;
  if (s == "asym") return ExperimentKind::asym;
  if (s == "eig") return ExperimentKind::eig;
  if (s == "bench") return ExperimentKind::bench;
  throw ConfigError("kind", "expected one of sym, asym, eig, bench (got \"" + s + "\")");
}

InitScheme parse_scheme(const json& v, const std::string& key) {
  const std::string s = as_string(v, key);
  if (s == "small") return InitScheme::small;
  if (s == "moderate") return InitScheme::moderate;
  if (s == "explicit") return InitScheme::explicit_matrix;
  throw ConfigError(key, "expected one of small, moderate, explicit (got \"" + s + "\")");
}

EigMethod parse_method(const json& v, const std::string& key) {
  const std::string s = as_string(v, key);
  if (s == "retraction_free") return EigMethod::retraction_free;
  if (s == "rgd") return EigMethod::rgd;
  throw ConfigError(key, "expected retraction_free or rgd (got \"" + s + "\")");
}

SpectrumSpec parse_spectrum(const json& v) {
  if (!v.is_object()) throw ConfigError("spectrum", "expected an object");
  const std::string type = as_string(require(v, "type", "spectrum"), "spectrum.type");
  SpectrumSpec spec;
  if (type == "experiment") {
    reject_unknown(v, {"type", "hi", "lo"}, "spectrum");
    spec.type = SpectrumSpec::Type::experiment;
    spec.hi = as_real(require(v, "hi", "spectrum"), "spectrum.hi");
    spec.lo = as_real(require(v, "lo", "spectrum"), "spectrum.lo");
  } else if (type == "equal_top") {
    reject_unknown(v, {"type", "value"}, "spectrum");
    spec.type = SpectrumSpec::Type::equal_top;
    spec.value = as_real(require(v, "value", "spectrum"), "spectrum.value");
  } else if (type == "explicit") {
    reject_unknown(v, {"type", "values"}, "spectrum");
    spec.type = SpectrumSpec::Type::explicit_values;
    const json& vals = require(v, "values", "spectrum");
    if (!vals.is_array() || vals.empty()) {
      throw ConfigError("spectrum.values", "expected a non-empty array of numbers");
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      spec.values.push_back(as_real(vals[i], "spectrum.values[" + std::to_string(i) + "]"));
    }
  } else {
    throw ConfigError("spectrum.type",
                      "expected experiment, equal_top or explicit (got \"" + type + "\")");
  }
  return spec;
}

Matrix parse_matrix(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
    throw ConfigError(key, "expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(key, "rows must all have the same length");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = as_real(row[static_cast<std::size_t>(j)], key);
    }
  }
  return m;
}

InitPlan parse_init(const json& v) {
  if (!v.is_object()) throw ConfigError("init", "expected an object");
  reject_unknown(v, {"scheme", "alpha", "seed", "multiplier", "matrix"}, "init");
  InitPlan plan;
  plan.scheme = parse_scheme(require(v, "scheme", "init"), "init.scheme");
  if (v.contains("alpha")) plan.alpha = as_positive(v["alpha"], "init.alpha");
  else if (plan.scheme == InitScheme::moderate) throw ConfigError("init.alpha", "missing required key");
  if (v.contains("seed")) plan.seed = as_seed(v["seed"], "init.seed");
  if (v.contains("multiplier")) plan.multiplier = as_positive(v["multiplier"], "init.multiplier");
  if (v.contains("matrix")) plan.matrix = parse_matrix(v["matrix"], "init.matrix");
  if (plan.scheme == InitScheme::explicit_matrix && !plan.matrix) {
    throw ConfigError("init.matrix", "explicit scheme requires a matrix");
  }
  return plan;
}

Variant parse_variant(const json& v, const std::string& prefix) {
  if (!v.is_object()) throw ConfigError(prefix, "expected an object");
  reject_unknown(v, {"name", "alpha", "scheme", "multiplier", "regularized", "method"}, prefix);
  Variant out;
  out.name = as_string(require(v, "name", prefix), prefix + ".name");
  if (out.name.empty() || out.name.find_first_of("/\\ \t") != std::string::npos) {
    throw ConfigError(prefix + ".name", "must be non-empty without spaces or path separators");
  }
  if (v.contains("alpha")) out.alpha = as_positive(v["alpha"], prefix + ".alpha");
  if (v.contains("scheme")) out.scheme = parse_scheme(v["scheme"], prefix + ".scheme");
  if (v.contains("multiplier")) out.multiplier = as_positive(v["multiplier"], prefix + ".multiplier");
  if (v.contains("regularized")) out.regularized = as_bool(v["regularized"], prefix + ".regularized");
  if (v.contains("method")) out.method = parse_method(v["method"], prefix + ".method");
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::sym: return "sym";
    case ExperimentKind::asym: return "asym";
    case ExperimentKind::eig: return "eig";
    case ExperimentKind::bench: return "bench";
  }
  return "unknown";
}

std::size_t default_max_iters(ExperimentKind kind) noexcept {
  return kind == ExperimentKind::sym || kind == ExperimentKind::asym ? 20000 : 10000;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "top level must be a JSON object");
  reject_unknown(doc,
                 {"kind", "dim", "rank", "spectrum", "eta", "epsilon", "max_iters", "record_every",
                  "init", "repeats", "regularized", "method", "variants", "out_dir", "description"},
                 "");

  ExperimentConfig c;
  c.kind = parse_kind(require(doc, "kind", ""));
  c.dim = as_count(require(doc, "dim", ""), "dim");
  c.rank = as_count(require(doc, "rank", ""), "rank");
  if (c.rank >= c.dim) throw ConfigError("rank", "must be smaller than dim");
  c.spectrum = parse_spectrum(require(doc, "spectrum", ""));
  c.eta = as_positive(require(doc, "eta", ""), "eta");
  if (c.eta > 1.0) throw ConfigError("eta", "must not exceed 1");
  c.epsilon = as_positive(require(doc, "epsilon", ""), "epsilon");
  c.max_iters = doc.contains("max_iters") ? as_count(doc["max_iters"], "max_iters")
                                          : default_max_iters(c.kind);
  if (doc.contains("record_every")) c.record_every = as_count(doc["record_every"], "record_every");
  c.init = parse_init(require(doc, "init", ""));
  if (doc.contains("repeats")) c.repeats = as_count(doc["repeats"], "repeats");
  if (doc.contains("regularized")) c.regularized = as_bool(doc["regularized"], "regularized");
  if (doc.contains("method")) c.method = parse_method(doc["method"], "method");
  if (doc.contains("out_dir")) {
    const std::string dir = as_string(doc["out_dir"], "out_dir");
    if (dir.empty()) throw ConfigError("out_dir", "must not be empty");
    c.out_dir = dir;
  }
  if (doc.contains("description")) c.description = as_string(doc["description"], "description");
  if (doc.contains("variants")) {
    const json& vs = doc["variants"];
    if (!vs.is_array() || vs.empty()) throw ConfigError("variants", "expected a non-empty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string prefix = "variants[" + std::to_string(i) + "]";
      Variant v = parse_variant(vs[i], prefix);
      if (!names.insert(v.name).second) throw ConfigError(prefix + ".name", "duplicate name");
      c.variants.push_back(std::move(v));
    }
  }

  try {
    (void)build_target(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("spectrum", e.what());
  }
  if (c.init.matrix && (c.init.matrix->rows() != static_cast<Eigen::Index>(c.dim) ||
                        c.init.matrix->cols() != static_cast<Eigen::Index>(c.rank))) {
    throw ConfigError("init.matrix", "must be dim x rank");
  }
  if (c.init.scheme == InitScheme::explicit_matrix && c.kind == ExperimentKind::asym) {
    throw ConfigError("init.scheme", "explicit initialization is not supported for asym runs");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<Variant> effective_variants(const ExperimentConfig& config) {
  if (!config.variants.empty()) return config.variants;
  Variant v;
  v.name = to_string(config.kind);
  return {v};
}

std::vector<double> spectrum_values(const ExperimentConfig& config) {
  const auto& s = config.spectrum;
  switch (s.type) {
    case SpectrumSpec::Type::experiment:
      return experiment_spectrum(s.hi, s.lo, config.rank, config.dim);
    case SpectrumSpec::Type::equal_top:
      return equal_top_spectrum(s.value, config.rank, config.dim);
    case SpectrumSpec::Type::explicit_values:
      if (s.values.size() != config.dim) {
        throw ConfigError("spectrum.values", "expected " + std::to_string(config.dim) +
                                                 " values (got " + std::to_string(s.values.size()) + ")");
      }
      return s.values;
  }
  return {};
}

Target build_target(const ExperimentConfig& config) {
  return make_diagonal_target(spectrum_values(config), config.dim, config.rank);
}

InitPlan plan_for(const ExperimentConfig& config, const Variant& variant, std::size_t repeat) {
  InitPlan plan = config.init;
  if (variant.scheme) plan.scheme = *variant.scheme;
  if (variant.alpha) plan.alpha = *variant.alpha;
  if (variant.multiplier) plan.multiplier = *variant.multiplier;
  plan.seed = config.init.seed + repeat;
  return plan;
}

SolverConfig solver_config(const ExperimentConfig& config) {
  SolverConfig s;
  s.eta = config.eta;
  s.epsilon = config.epsilon;
  s.max_iters = config.max_iters;
  s.record_every = config.record_every;
  return s;
}

}  // namespace lowrank::harness
