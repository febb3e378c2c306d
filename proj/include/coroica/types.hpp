// Core data types shared by every module.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coroica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Ordered set of sample (column) indices. Order is temporal order.
using IndexSet = std::vector<Index>;

/// d x n observations: rows are channels, columns are samples in time order.
class SignalMatrix {
 public:
  SignalMatrix() = default;

  explicit SignalMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
      throw std::invalid_argument("SignalMatrix: need at least one channel and one sample");
    }
    if (!values_.allFinite()) {
      throw std::invalid_argument("SignalMatrix: non-finite entries");
    }
  }

  const Matrix& values() const noexcept { return values_; }
  Index channels() const noexcept { return values_.rows(); }
  Index samples() const noexcept { return values_.cols(); }

  /// Columns listed in `columns`, in the given order.
  Matrix select(const IndexSet& columns) const { return values_(Eigen::all, columns); }

 private:
  Matrix values_;
};

/// One group and its ordered partition into subgroups.
struct Group {
  std::vector<IndexSet> subgroups;

  IndexSet members() const {
    IndexSet out;
    for (const auto& e : subgroups) out.insert(out.end(), e.begin(), e.end());
    return out;
  }
};

/// Groups, per-group partitions and the lag set used to build matrix sets.
struct GroupedPartition {
  std::vector<Group> groups;
  std::vector<std::size_t> lags{0};

  std::size_t max_lag() const {
    std::size_t out = 0;
    for (auto tau : lags) out = std::max(out, tau);
    return out;
  }

  /// Throws std::invalid_argument if the structure does not exactly cover
  /// samples 0..n-1 with disjoint subgroups of at least max(2, max_lag + 2)
  /// samples.
  void validate(Index n) const {
    if (groups.empty()) throw std::invalid_argument("GroupedPartition: no groups");
    if (lags.empty()) throw std::invalid_argument("GroupedPartition: empty lag set");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    const auto min_len = static_cast<std::size_t>(max_lag() + 2);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].subgroups.empty()) {
        throw std::invalid_argument("GroupedPartition: group " + std::to_string(g) + " is empty");
      }
      for (std::size_t e = 0; e < groups[g].subgroups.size(); ++e) {
        const auto& sub = groups[g].subgroups[e];
        if (sub.size() < min_len) {
          std::ostringstream msg;
          msg << "GroupedPartition: subgroup " << e << " of group " << g << " has " << sub.size()
              << " samples, need at least " << min_len;
          throw std::invalid_argument(msg.str());
        }
        for (Index i : sub) {
          if (i < 0 || i >= n) throw std::invalid_argument("GroupedPartition: index out of range");
          auto& flag = seen[static_cast<std::size_t>(i)];
          if (flag) throw std::invalid_argument("GroupedPartition: overlapping subgroups");
          flag = 1;
        }
      }
    }
    for (Index i = 0; i < n; ++i) {
      if (!seen[static_cast<std::size_t>(i)]) {
        throw std::invalid_argument("GroupedPartition: sample " + std::to_string(i) +
                                    " not covered by any group");
      }
    }
  }
};

/// Where a matrix in a MatrixSet came from.
struct Provenance {
  enum class Kind { pair, complement, block };
  Kind kind = Kind::block;
  std::size_t group = 0;
  std::size_t first = 0;   // subgroup e (or block index)
  std::size_t second = 0;  // subgroup f; unused for complement and block
  std::size_t lag = 0;
  std::size_t grid = 0;  // partition grid when several grids are pooled
};

/// Ordered collection of symmetric d x d matrices to be jointly diagonalized.
struct MatrixSet {
  std::vector<Matrix> matrices;
  std::vector<Provenance> provenance;

  std::size_t size() const noexcept { return matrices.size(); }
  bool empty() const noexcept { return matrices.empty(); }
  Index dim() const noexcept { return matrices.empty() ? 0 : matrices.front().rows(); }

  void push_back(Matrix m, Provenance p) {
    matrices.push_back(std::move(m));
    provenance.push_back(p);
  }

  void append(const MatrixSet& other) {
    matrices.insert(matrices.end(), other.matrices.begin(), other.matrices.end());
    provenance.insert(provenance.end(), other.provenance.begin(), other.provenance.end());
  }
};

namespace detail {

inline void normalize_rows(Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (norm > 0.0) m.row(r) /= norm;
  }
}

/// Flip each row so its largest-magnitude entry is positive (lowest index wins ties).
inline void canonicalize_signs(Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    Index arg = 0;
    double best = -1.0;
    for (Index c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > best) {
        best = std::abs(m(r, c));
        arg = c;
      }
    }
    if (m(r, arg) < 0.0) m.row(r) *= -1.0;
  }
}

}  // namespace detail

}  // namespace coroica
