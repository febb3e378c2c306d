// Evaluation scores: the minimum distance (MD) index against a known
// mixing, and the ground-truth-free covariance instability score (CIS).
#pragma once

#include "coroica/assignment.hpp"
#include "coroica/covstats.hpp"
#include "coroica/types.hpp"

#include <algorithm>
#include <numeric>

namespace coroica {

struct MdScore {
  double value = 0.0;
  /// Row j of V_hat * A is matched to column permutation[j].
  std::vector<Index> permutation;
};

namespace detail {

inline void check_md_inputs(const Matrix& v_hat, const Matrix& a, const char* who) {
  const Index d = v_hat.rows();
  if (v_hat.cols() != d || a.rows() != d || a.cols() != d) {
    throw std::invalid_argument(std::string(who) + ": inputs must be square and of equal size");
  }
  if (d < 2) throw std::invalid_argument(std::string(who) + ": dimension must be at least 2");
  if (!v_hat.allFinite() || !a.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite input");
  }
  if (Eigen::FullPivLU<Matrix>(v_hat).rank() < d) {
    throw std::invalid_argument(std::string(who) + ": V_hat is singular");
  }
  if (Eigen::FullPivLU<Matrix>(a).rank() < d) {
    throw std::invalid_argument(std::string(who) + ": A is singular");
  }
}

/// c(j, k) = 1 - G(j, k)^2 / |G(j, .)|^2: residual of row j against the
/// best multiple of the k-th unit vector.
inline Matrix md_cost(const Matrix& v_hat, const Matrix& a) {
  const Matrix g = v_hat * a;
  Matrix cost(g.rows(), g.cols());
  for (Index j = 0; j < g.rows(); ++j) {
    const double row_sq = g.row(j).squaredNorm();
    for (Index k = 0; k < g.cols(); ++k) {
      cost(j, k) = std::max(0.0, 1.0 - g(j, k) * g(j, k) / row_sq);
    }
  }
  return cost;
}

// Summing the selected costs in sorted order makes the result independent
// of row order.
inline double md_from_assignment(const Matrix& cost, const std::vector<Index>& perm) {
  std::vector<double> picked(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) picked[j] = cost(static_cast<Index>(j), perm[j]);
  std::sort(picked.begin(), picked.end());
  const double total = std::accumulate(picked.begin(), picked.end(), 0.0);
  const double md = std::sqrt(total / static_cast<double>(cost.rows() - 1));
  return std::min(1.0, md);
}

}  // namespace detail

/// MD index via linear sum assignment.
inline MdScore md_index(const Matrix& v_hat, const Matrix& a) {
  detail::check_md_inputs(v_hat, a, "md_index");
  const Matrix cost = detail::md_cost(v_hat, a);
  MdScore out;
  out.permutation = solve_assignment(cost);
  out.value = detail::md_from_assignment(cost, out.permutation);
  return out;
}

/// MD index by exhaustive search over all permutations (d <= 8).
inline MdScore md_index_bruteforce(const Matrix& v_hat, const Matrix& a) {
  detail::check_md_inputs(v_hat, a, "md_index_bruteforce");
  if (v_hat.rows() > 8) throw std::invalid_argument("md_index_bruteforce: dimension above 8");
  const Matrix cost = detail::md_cost(v_hat, a);
  std::vector<Index> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  MdScore best;
  best.value = std::numeric_limits<double>::infinity();
  do {
    const double value = detail::md_from_assignment(cost, perm);
    if (value < best.value) {
      best.value = value;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Covariance instability score matrix of the unmixed sources of one group.
struct CisMatrix {
  Matrix values;
  std::vector<IndexSet> partition;
};

namespace detail {

inline CisMatrix cis_from_covariances(const std::vector<Matrix>& cov, const Matrix& total_cov,
                                      const std::vector<IndexSet>& partition) {
  const Index d = total_cov.rows();
  const Vector sigma = total_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (Index i = 0; i < d; ++i) {
    if (!(sigma(i) > 0.0)) {
      throw std::invalid_argument("cis_matrix: component " + std::to_string(i) + " has zero variance");
    }
  }
  const Matrix scale = sigma * sigma.transpose();
  CisMatrix out{Matrix::Zero(d, d), partition};
  for (std::size_t e = 0; e + 1 < cov.size(); ++e) {
    out.values.array() += ((cov[e] - cov[e + 1]).array() / scale.array()).square();
  }
  out.values /= static_cast<double>(cov.size() - 1);
  return out;
}

inline IndexSet sorted_union(const std::vector<IndexSet>& partition) {
  IndexSet all;
  for (const auto& e : partition) all.insert(all.end(), e.begin(), e.end());
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace detail

/// `sources` holds one group's unmixed samples; `partition` indexes its
/// columns. Neighbouring elements are compared; the last has no right
/// neighbour and is skipped.
inline CisMatrix cis_matrix(const SignalMatrix& sources, const std::vector<IndexSet>& partition) {
  if (partition.size() < 2) throw std::invalid_argument("cis_matrix: need at least 2 partition elements");
  std::vector<Matrix> cov;
  cov.reserve(partition.size());
  for (const auto& e : partition) cov.push_back(empirical_autocov(sources.select(e), 0));
  return detail::cis_from_covariances(cov, empirical_autocov(sources.select(detail::sorted_union(partition)), 0),
                                      partition);
}

/// Covariances of one group's observations, reusable across many
/// candidate unmixings: cov(V X) = V cov(X) V^T.
struct CisPrecomputed {
  std::vector<Matrix> block_cov;
  Matrix total_cov;
  std::vector<IndexSet> partition;
};

inline CisPrecomputed precompute_cis(const SignalMatrix& x, const std::vector<IndexSet>& partition) {
  if (partition.size() < 2) throw std::invalid_argument("cis_matrix: need at least 2 partition elements");
  CisPrecomputed out;
  for (const auto& e : partition) out.block_cov.push_back(empirical_autocov(x.select(e), 0));
  out.total_cov = empirical_autocov(x.select(detail::sorted_union(partition)), 0);
  out.partition = partition;
  return out;
}

/// CIS of the sources V * X, computed from precomputed covariances of X.
inline CisMatrix cis_matrix(const Matrix& v, const CisPrecomputed& pre) {
  if (v.cols() != pre.total_cov.rows()) throw std::invalid_argument("cis_matrix: dimension mismatch");
  std::vector<Matrix> cov;
  cov.reserve(pre.block_cov.size());
  for (const auto& c : pre.block_cov) cov.push_back(v * c * v.transpose());
  return detail::cis_from_covariances(cov, v * pre.total_cov * v.transpose(), pre.partition);
}

/// Root of the mean off-diagonal CIS entry.
inline double mcis(const CisMatrix& cis) {
  const Index d = cis.values.rows();
  if (d < 2) throw std::invalid_argument("mcis: dimension must be at least 2");
  const double off = cis.values.sum() - cis.values.trace();
  return std::sqrt(std::max(0.0, off) / static_cast<double>(d * (d - 1)));
}

inline double mcis(const SignalMatrix& sources, const std::vector<IndexSet>& partition) {
  if (sources.channels() < 2) throw std::invalid_argument("mcis: dimension must be at least 2");
  return mcis(cis_matrix(sources, partition));
}

/// Sign-aligned sum over the set of M v_j^T, proportional to the j-th
/// column of the mixing matrix when V jointly diagonalizes the set.
inline Vector activation_map(const Matrix& v, const MatrixSet& set, Index component) {
  if (v.rows() != v.cols()) throw std::invalid_argument("activation_map: V must be square");
  if (component < 0 || component >= v.rows()) {
    throw std::invalid_argument("activation_map: component index out of range");
  }
  const Vector vj = v.row(component).transpose();
  Vector out = Vector::Zero(v.cols());
  for (const auto& m : set.matrices) {
    if (m.rows() != v.cols() || m.cols() != v.cols()) {
      throw std::invalid_argument("activation_map: dimension mismatch");
    }
    const Vector mv = m * vj;
    const double q = vj.dot(mv);
    if (q > 0.0) out += mv;
    else if (q < 0.0) out -= mv;
  }
  return out;
}

}  // namespace coroica
