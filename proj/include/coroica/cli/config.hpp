// Config documents for the command-line harness. See README.md for the
// full schema; every parser here rejects unknown keys.
#pragma once

#include "coroica/cli/schema.hpp"
#include "coroica/separation.hpp"
#include "coroica/simgen.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace coroica::cli {

inline Json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

// Specs are re-thrown as ConfigError so the message names the section.
template <class Spec>
void validate_spec(const Spec& spec, const std::string& path) {
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

inline BlockVarSpec parse_blockvar(Node& node, BlockVarSpec spec = {}) {
  spec.n = node.integer("n", spec.n, 1);
  spec.d = node.integer("d", spec.d, 1);
  spec.m = node.integer("m", spec.m, 1);
  spec.subsets_per_group = node.integer("subsets_per_group", spec.subsets_per_group, 1);
  spec.c1 = node.number("c1", spec.c1, 0.0);
  spec.c2 = node.number("c2", spec.c2, 0.0);
  node.finish();
  validate_spec(spec, node.path());
  return spec;
}

inline GarchSpec parse_garch(Node& node, GarchSpec spec = {}) {
  spec.setting = static_cast<int>(node.integer("setting", spec.setting, 1, 3));
  spec.noise = parse_garch_noise(node.choice("noise", {"ar", "iid"}, to_string(spec.noise)));
  spec.n = node.integer("n", spec.n, 2);
  spec.d = node.integer("d", spec.d, 1);
  spec.segment_length = node.integer("segment_length", spec.segment_length, 2);
  spec.burn_in = node.integer("burn_in", spec.burn_in, 0);
  node.finish();
  validate_spec(spec, node.path());
  return spec;
}

/// One estimator as configured in a document.
struct MethodSpec {
  std::string label;
  SeparationConfig config;
  Index group_length = 0;  // climate only: residual grouping
};

inline MethodSpec parse_method_spec(Node& node, bool allow_group_length = false) {
  MethodSpec out;
  auto& cfg = out.config;
  cfg.method = coroica::parse_method(node.choice("method", {"coroica", "choiica", "sobi", "random"}));
  cfg.signal = parse_signal(node.choice("signal", {"var", "td", "var_and_td"}, "var"));
  const auto max_lag = node.integer("max_lag", 1, 0);
  if (node.has("lags")) {
    cfg.lags.clear();
    for (auto l : node.integers("lags", std::nullopt, 0)) cfg.lags.push_back(static_cast<std::size_t>(l));
  } else {
    cfg.lags = default_lags(cfg.signal, static_cast<std::size_t>(max_lag));
  }
  cfg.max_lag = static_cast<std::size_t>(max_lag);
  cfg.strategy = parse_strategy(node.choice("strategy", {"all", "complement", "neighbor"}, "neighbor"));
  if (cfg.method == Method::coroica || cfg.method == Method::choiica) {
    EqualBlocks blocks;
    for (auto len : node.integers("partition_length", std::nullopt, 2)) blocks.lengths.push_back(len);
    cfg.partition = blocks;
  } else if (node.has("partition_length")) {
    node.integers("partition_length");
  }
  cfg.diag.max_iter = static_cast<int>(node.integer("max_iter", cfg.diag.max_iter, 1));
  cfg.diag.rel_tol = node.number("rel_tol", cfg.diag.rel_tol, 1e-300);
  cfg.whiten_with_data = node.boolean("whiten_with_data", cfg.whiten_with_data);
  if (allow_group_length) out.group_length = node.integer("group_length", 0, 0);

  std::string fallback = to_string(cfg.method);
  if (cfg.method != Method::sobi && cfg.method != Method::random) fallback += "_" + to_string(cfg.signal);
  out.label = node.string("label", fallback);
  if (out.label.empty() || out.label.find_first_of(",\n\"") != std::string::npos) {
    throw ConfigError(node.field("label"), "must be non-empty and contain no commas, quotes or newlines");
  }
  if (cfg.method != Method::random && cfg.method != Method::sobi) {
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(node.field("lags"), e.what());
    }
  }
  return out;
}

inline std::vector<MethodSpec> parse_methods(Node& node, const std::string& key, bool allow_group_length = false) {
  std::vector<MethodSpec> out;
  node.each_object(key, [&](Node& m) { out.push_back(parse_method_spec(m, allow_group_length)); });
  std::set<std::string> labels;
  for (const auto& m : out) {
    if (!labels.insert(m.label).second) throw ConfigError(node.field(key), "duplicate method label '" + m.label + "'");
  }
  return out;
}

/// Relative paths in a config resolve against the config file's directory.
inline std::filesystem::path resolve(const std::filesystem::path& config_path, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return path;
  return config_path.parent_path() / path;
}

}  // namespace coroica::cli
