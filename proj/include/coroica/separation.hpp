// Source separation estimators. Every method is a recipe for a MatrixSet
// that is handed to the joint diagonalizer:
//
//   coroica  differences of subgroup (auto-)covariances within groups
//   choiica  raw block (auto-)covariances over the whole series
//   sobi     auto-covariances of the whole series for lags 0..L
//   random   no fit; iid normal unmixing rows
#pragma once

#include "coroica/covstats.hpp"
#include "coroica/jointdiag.hpp"
#include "coroica/random.hpp"
#include "coroica/types.hpp"

#include <cstdint>
#include <numeric>
#include <set>
#include <variant>

namespace coroica {

enum class Method { coroica, choiica, sobi, random };
enum class Signal { var, td, var_and_td };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::coroica: return "coroica";
    case Method::choiica: return "choiica";
    case Method::sobi: return "sobi";
    case Method::random: return "random";
  }
  return "?";
}

inline std::string to_string(Signal s) {
  switch (s) {
    case Signal::var: return "var";
    case Signal::td: return "td";
    case Signal::var_and_td: return "var_and_td";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "coroica") return Method::coroica;
  if (s == "choiica") return Method::choiica;
  if (s == "sobi") return Method::sobi;
  if (s == "random") return Method::random;
  throw std::invalid_argument("unknown method '" + s + "'");
}

inline Signal parse_signal(const std::string& s) {
  if (s == "var") return Signal::var;
  if (s == "td") return Signal::td;
  if (s == "var_and_td") return Signal::var_and_td;
  throw std::invalid_argument("unknown signal '" + s + "'");
}

/// Lags {0}, {1..max_lag} or {0..max_lag} for the three signal types.
inline std::vector<std::size_t> default_lags(Signal signal, std::size_t max_lag = 1) {
  std::vector<std::size_t> out;
  const std::size_t first = signal == Signal::td ? 1 : 0;
  const std::size_t last = signal == Signal::var ? 0 : std::max<std::size_t>(max_lag, 1);
  for (std::size_t tau = first; tau <= last; ++tau) out.push_back(tau);
  return out;
}

/// Split each group into consecutive blocks of `length` samples, one grid
/// per requested length. A trailing remainder shorter than half a block is
/// merged into the last block.
struct EqualBlocks {
  std::vector<Index> lengths;
};

struct SeparationConfig {
  Method method = Method::coroica;
  Signal signal = Signal::var;
  std::vector<std::size_t> lags{0};
  std::size_t max_lag = 0;  // sobi only
  std::variant<EqualBlocks, GroupedPartition> partition = EqualBlocks{};
  Strategy strategy = Strategy::neighbor;
  DiagonalizerOptions diag;
  /// Start the diagonalizer from the whitening matrix of the total data
  /// covariance instead of the first matrix of the set.
  bool whiten_with_data = true;
  std::uint64_t seed = 0;  // random only

  void validate() const {
    diag.validate();
    if (method == Method::coroica || method == Method::choiica) {
      if (lags.empty()) throw std::invalid_argument("SeparationConfig: empty lag set");
      std::set<std::size_t> unique(lags.begin(), lags.end());
      if (unique.size() != lags.size()) throw std::invalid_argument("SeparationConfig: duplicate lags");
      const bool has_zero = unique.count(0) > 0;
      const bool has_positive = *unique.rbegin() > 0;
      switch (signal) {
        case Signal::var:
          if (unique != std::set<std::size_t>{0})
            throw std::invalid_argument("SeparationConfig: signal=var requires lags {0}");
          break;
        case Signal::td:
          if (has_zero) throw std::invalid_argument("SeparationConfig: signal=td requires positive lags");
          break;
        case Signal::var_and_td:
          if (!has_zero || !has_positive)
            throw std::invalid_argument("SeparationConfig: signal=var_and_td requires lag 0 and a positive lag");
          break;
      }
      if (const auto* eb = std::get_if<EqualBlocks>(&partition)) {
        if (eb->lengths.empty())
          throw std::invalid_argument("SeparationConfig: partition length is required");
        for (Index len : eb->lengths)
          if (len < 2) throw std::invalid_argument("SeparationConfig: partition length must be >= 2");
      }
    }
  }
};

/// Fitted unmixing. Immutable after construction.
struct SeparationModel {
  Matrix V;      // unit-norm, sign-canonical rows
  Matrix A_hat;  // V^-1
  SeparationConfig config;
  bool converged = false;
  int iterations = 0;
  double final_loss = 0.0;
  std::size_t matrix_count = 0;
};

/// Column indices of each distinct label, groups ordered by first appearance.
inline std::vector<IndexSet> groups_from_labels(const std::vector<std::int64_t>& labels) {
  std::vector<IndexSet> groups;
  std::vector<std::int64_t> keys;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(keys.begin(), keys.end(), labels[i]);
    if (it == keys.end()) {
      keys.push_back(labels[i]);
      groups.emplace_back();
      it = keys.end() - 1;
    }
    groups[static_cast<std::size_t>(it - keys.begin())].push_back(static_cast<Index>(i));
  }
  return groups;
}

inline std::vector<IndexSet> equal_blocks(const IndexSet& members, Index length) {
  if (length < 1) throw std::invalid_argument("equal_blocks: length must be positive");
  std::vector<IndexSet> blocks;
  const auto total = static_cast<Index>(members.size());
  for (Index start = 0; start < total; start += length) {
    const Index stop = std::min(total, start + length);
    blocks.emplace_back(members.begin() + start, members.begin() + stop);
  }
  if (blocks.size() > 1 && 2 * static_cast<Index>(blocks.back().size()) < length) {
    auto tail = std::move(blocks.back());
    blocks.pop_back();
    blocks.back().insert(blocks.back().end(), tail.begin(), tail.end());
  }
  return blocks;
}

namespace detail {

inline SeparationModel finish_model(const MatrixSet& set, const SignalMatrix& x, const SeparationConfig& cfg) {
  DiagonalizerOptions opts = cfg.diag;
  if (cfg.whiten_with_data && opts.init == DiagonalizerOptions::Init::whitening) {
    if (auto white = whitening_matrix(empirical_autocov(x.values(), 0))) {
      opts.init = DiagonalizerOptions::Init::user;
      opts.user_init = *white;
    }
  }
  const Diagonalizer diag = uwedge(set, opts);
  SeparationModel model;
  model.V = diag.V;
  model.A_hat = diag.V.inverse();
  model.config = cfg;
  model.converged = diag.converged;
  model.iterations = diag.iterations;
  model.final_loss = diag.final_loss;
  model.matrix_count = set.size();
  return model;
}

}  // namespace detail

/// Confounding-robust ICA. `group_labels` assigns each sample to a group;
/// it is ignored when the config carries an explicit GroupedPartition.
inline SeparationModel coroica_fit(const SignalMatrix& x, const std::vector<std::int64_t>& group_labels,
                                   SeparationConfig cfg) {
  cfg.method = Method::coroica;
  cfg.validate();

  MatrixSet set;
  std::size_t group_count = 0;
  if (const auto* explicit_gp = std::get_if<GroupedPartition>(&cfg.partition)) {
    GroupedPartition gp = *explicit_gp;
    gp.lags = cfg.lags;
    group_count = gp.groups.size();
    set = build_matrix_set(x, gp, cfg.strategy);
  } else {
    if (static_cast<Index>(group_labels.size()) != x.samples()) {
      throw std::invalid_argument("coroica_fit: need one group label per sample");
    }
    const auto groups = groups_from_labels(group_labels);
    group_count = groups.size();
    const auto& lengths = std::get<EqualBlocks>(cfg.partition).lengths;
    for (std::size_t grid = 0; grid < lengths.size(); ++grid) {
      GroupedPartition gp;
      gp.lags = cfg.lags;
      for (const auto& members : groups) gp.groups.push_back({equal_blocks(members, lengths[grid])});
      set.append(build_matrix_set(x, gp, cfg.strategy, grid));
    }
  }

  std::vector<std::size_t> per_group(group_count, 0);
  for (const auto& p : set.provenance) ++per_group[p.group];
  for (std::size_t g = 0; g < group_count; ++g) {
    if (per_group[g] == 0) {
      throw std::invalid_argument("coroica_fit: partition too coarse, group " + std::to_string(g) +
                                  " yields no matrices");
    }
  }
  if (set.empty()) throw std::invalid_argument("coroica_fit: empty matrix set");
  return detail::finish_model(set, x, cfg);
}

/// Baseline: joint diagonalization of raw block (auto-)covariances, the
/// whole series treated as one group.
inline SeparationModel choiica_fit(const SignalMatrix& x, SeparationConfig cfg) {
  cfg.method = Method::choiica;
  cfg.validate();
  MatrixSet set;
  if (const auto* explicit_gp = std::get_if<GroupedPartition>(&cfg.partition)) {
    std::vector<IndexSet> blocks;
    for (const auto& g : explicit_gp->groups)
      blocks.insert(blocks.end(), g.subgroups.begin(), g.subgroups.end());
    set = build_block_covariances(x, blocks, cfg.lags);
  } else {
    IndexSet all(static_cast<std::size_t>(x.samples()));
    std::iota(all.begin(), all.end(), Index{0});
    for (Index len : std::get<EqualBlocks>(cfg.partition).lengths) {
      set.append(build_block_covariances(x, equal_blocks(all, len), cfg.lags));
    }
  }
  if (set.empty()) throw std::invalid_argument("choiica_fit: empty matrix set");
  return detail::finish_model(set, x, cfg);
}

/// Baseline: auto-covariances of the full series for lags 0..max_lag.
inline SeparationModel sobi_fit(const SignalMatrix& x, std::size_t max_lag,
                                const DiagonalizerOptions& opts = {}) {
  if (x.samples() <= static_cast<Index>(max_lag) + 2) {
    throw std::invalid_argument("sobi_fit: need more than max_lag + 2 samples");
  }
  SeparationConfig cfg;
  cfg.method = Method::sobi;
  cfg.max_lag = max_lag;
  cfg.diag = opts;
  cfg.validate();
  IndexSet all(static_cast<std::size_t>(x.samples()));
  std::iota(all.begin(), all.end(), Index{0});
  std::vector<std::size_t> lags(max_lag + 1);
  std::iota(lags.begin(), lags.end(), std::size_t{0});
  return detail::finish_model(build_block_covariances(x, {all}, lags), x, cfg);
}

/// Baseline: iid standard normal unmixing, rows unit-normalized.
inline SeparationModel random_unmixing(Index d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("random_unmixing: d must be >= 1");
  Rng rng(seed);
  Matrix v(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) v(r, c) = rng.normal();
  detail::normalize_rows(v);
  detail::canonicalize_signs(v);
  SeparationModel model;
  model.config.method = Method::random;
  model.config.seed = seed;
  model.V = v;
  model.A_hat = v.inverse();
  model.converged = true;
  return model;
}

/// Dispatch on cfg.method.
inline SeparationModel fit(const SignalMatrix& x, const std::vector<std::int64_t>& group_labels,
                           const SeparationConfig& cfg) {
  switch (cfg.method) {
    case Method::coroica: return coroica_fit(x, group_labels, cfg);
    case Method::choiica: return choiica_fit(x, cfg);
    case Method::sobi: return sobi_fit(x, cfg.max_lag, cfg.diag);
    case Method::random: return random_unmixing(x.channels(), cfg.seed);
  }
  throw std::invalid_argument("fit: unknown method");
}

/// Unmixed sources V * X. Works on groups unseen during fitting.
inline SignalMatrix transform(const SeparationModel& model, const SignalMatrix& x) {
  if (model.V.cols() != x.channels()) throw std::invalid_argument("transform: dimension mismatch");
  return SignalMatrix(model.V * x.values());
}

}  // namespace coroica
