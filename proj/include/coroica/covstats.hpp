// Empirical (auto-)covariances on signal blocks and the matrix sets built
// from them.
#pragma once

#include "coroica/types.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace coroica {

enum class Strategy { all, complement, neighbor };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::all: return "all";
    case Strategy::complement: return "complement";
    case Strategy::neighbor: return "neighbor";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "all") return Strategy::all;
  if (s == "complement") return Strategy::complement;
  if (s == "neighbor") return Strategy::neighbor;
  throw std::invalid_argument("unknown strategy '" + s + "'");
}

/// Symmetrized lag-tau autocovariance of a d x m block, centered on the
/// block mean and normalized by 1/(m - tau).
inline Matrix empirical_autocov(const Eigen::Ref<const Matrix>& block, std::size_t lag) {
  const Index m = block.cols();
  const auto tau = static_cast<Index>(lag);
  if (m < tau + 2) {
    throw std::invalid_argument("empirical_autocov: block of " + std::to_string(m) +
                                " samples is too short for lag " + std::to_string(lag));
  }
  const Matrix centered = block.colwise() - block.rowwise().mean();
  const auto count = static_cast<double>(m - tau);
  if (tau == 0) {
    Matrix cov = (centered * centered.transpose()) / count;
    // Floating-point products are not guaranteed symmetric bit for bit.
    return (cov + cov.transpose()) * 0.5;
  }
  const Matrix c = (centered.rightCols(m - tau) * centered.leftCols(m - tau).transpose()) / count;
  return (c + c.transpose()) * 0.5;
}

namespace detail {

inline void check_lengths(const GroupedPartition& gp) {
  const auto need = gp.max_lag() + 2;
  for (std::size_t g = 0; g < gp.groups.size(); ++g) {
    const auto& subs = gp.groups[g].subgroups;
    for (std::size_t e = 0; e < subs.size(); ++e) {
      if (subs[e].size() < need) {
        throw std::invalid_argument("subgroup " + std::to_string(e) + " of group " +
                                    std::to_string(g) + " has " + std::to_string(subs[e].size()) +
                                    " samples, too short for lag " + std::to_string(gp.max_lag()));
      }
    }
  }
}

}  // namespace detail

/// Differences of subgroup (auto-)covariances within each group.
///
/// Output order: groups in input order, then subgroup (pair) order, then
/// lag order. For `neighbor` the last subgroup of a group has no right
/// neighbour and emits nothing.
inline MatrixSet build_matrix_set(const SignalMatrix& x, const GroupedPartition& gp,
                                  Strategy strategy, std::size_t grid = 0) {
  gp.validate(x.samples());
  detail::check_lengths(gp);

  MatrixSet out;
  for (std::size_t g = 0; g < gp.groups.size(); ++g) {
    const auto& subs = gp.groups[g].subgroups;
    const std::size_t k = subs.size();

    // cov[e][l] for subgroup e and the l-th lag
    std::vector<std::vector<Matrix>> cov(k);
    for (std::size_t e = 0; e < k; ++e) {
      const Matrix block = x.select(subs[e]);
      for (auto tau : gp.lags) cov[e].push_back(empirical_autocov(block, tau));
    }

    switch (strategy) {
      case Strategy::all:
        for (std::size_t e = 0; e < k; ++e)
          for (std::size_t f = e + 1; f < k; ++f)
            for (std::size_t l = 0; l < gp.lags.size(); ++l)
              out.push_back(cov[e][l] - cov[f][l],
                            {Provenance::Kind::pair, g, e, f, gp.lags[l], grid});
        break;
      case Strategy::neighbor:
        for (std::size_t e = 0; e + 1 < k; ++e)
          for (std::size_t l = 0; l < gp.lags.size(); ++l)
            out.push_back(cov[e][l] - cov[e + 1][l],
                          {Provenance::Kind::pair, g, e, e + 1, gp.lags[l], grid});
        break;
      case Strategy::complement: {
        if (k < 2) break;
        for (std::size_t e = 0; e < k; ++e) {
          IndexSet rest;
          for (std::size_t f = 0; f < k; ++f)
            if (f != e) rest.insert(rest.end(), subs[f].begin(), subs[f].end());
          std::sort(rest.begin(), rest.end());
          const Matrix block = x.select(rest);
          for (std::size_t l = 0; l < gp.lags.size(); ++l)
            out.push_back(cov[e][l] - empirical_autocov(block, gp.lags[l]),
                          {Provenance::Kind::complement, g, e, 0, gp.lags[l], grid});
        }
        break;
      }
    }
  }
  return out;
}

/// Raw (undifferenced) per-block (auto-)covariances, block-major then lag.
inline MatrixSet build_block_covariances(const SignalMatrix& x, const std::vector<IndexSet>& blocks,
                                         const std::vector<std::size_t>& lags) {
  if (blocks.empty()) throw std::invalid_argument("build_block_covariances: no blocks");
  if (lags.empty()) throw std::invalid_argument("build_block_covariances: empty lag set");
  MatrixSet out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (Index i : blocks[b]) {
      if (i < 0 || i >= x.samples())
        throw std::invalid_argument("build_block_covariances: index out of range");
    }
    const Matrix block = x.select(blocks[b]);
    for (auto tau : lags) {
      if (static_cast<std::size_t>(block.cols()) < tau + 2) {
        throw std::invalid_argument("block " + std::to_string(b) + " has " +
                                    std::to_string(block.cols()) +
                                    " samples, too short for lag " + std::to_string(tau));
      }
      out.push_back(empirical_autocov(block, tau), {Provenance::Kind::block, 0, b, 0, tau, 0});
    }
  }
  return out;
}

}  // namespace coroica
