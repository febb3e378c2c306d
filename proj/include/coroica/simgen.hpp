// Seeded synthetic benchmarks.
//
//   gen_blockvar  block-wise shifting variance sources with group-wise
//                 stationary confounding: X = A (S + C H)
//   gen_garch     GARCH-type sources with AR or iid confounding: X = A S + A C H
//   gen_svar      bivariate structural VAR with instantaneous feedback,
//                 used to exercise the causal pipeline end to end
//
// Each generator draws from independent Philox streams keyed by the seed:
// stream 0 for the mixing matrices, 1 for structure (partitions and
// per-block parameters), 2 for the sources and 3 for the confounding.
#pragma once

#include "coroica/random.hpp"
#include "coroica/types.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cstdint>
#include <numeric>
#include <set>
#include <variant>

namespace coroica {

struct BlockVarSpec {
  Index n = 100000;
  Index d = 22;
  Index m = 10;
  Index subsets_per_group = 10;
  double c1 = 1.0;  // expected confounding variance
  double c2 = 1.0;  // expected |eta_e^2 - eta_f^2|
  std::uint64_t seed = 0;

  double b1() const { return 2.0 * c1 - 0.1; }
  double b2() const { return 3.0 * c2 + 0.1; }

  void validate() const {
    if (d < 1) throw std::invalid_argument("BlockVarSpec: d must be >= 1");
    if (m < 1) throw std::invalid_argument("BlockVarSpec: m must be >= 1");
    if (subsets_per_group < 1) throw std::invalid_argument("BlockVarSpec: subsets_per_group must be >= 1");
    if (n < 2 * m * subsets_per_group)
      throw std::invalid_argument("BlockVarSpec: n must be at least 2 * m * subsets_per_group");
    if (!(c1 >= 0.0)) throw std::invalid_argument("BlockVarSpec: c1 must be >= 0");
    if (c1 > 0.0 && c1 < 0.05)
      throw std::invalid_argument("BlockVarSpec: c1 in (0, 0.05) gives negative variances");
    if (!(c2 >= 0.0)) throw std::invalid_argument("BlockVarSpec: c2 must be >= 0");
  }
};

enum class GarchNoise { ar, iid };

inline std::string to_string(GarchNoise n) { return n == GarchNoise::ar ? "ar" : "iid"; }

inline GarchNoise parse_garch_noise(const std::string& s) {
  if (s == "ar") return GarchNoise::ar;
  if (s == "iid") return GarchNoise::iid;
  throw std::invalid_argument("unknown noise type '" + s + "'");
}

struct GarchSpec {
  int setting = 1;
  GarchNoise noise = GarchNoise::ar;
  Index n = 200000;
  Index d = 6;
  Index segment_length = 2000;  // settings 2 and 3 redraw the AR dynamics per segment
  Index burn_in = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (setting < 1 || setting > 3) throw std::invalid_argument("GarchSpec: setting must be 1, 2 or 3");
    if (d < 1) throw std::invalid_argument("GarchSpec: d must be >= 1");
    if (n < 2) throw std::invalid_argument("GarchSpec: n must be >= 2");
    if (segment_length < 2) throw std::invalid_argument("GarchSpec: segment_length must be >= 2");
    if (burn_in < 0) throw std::invalid_argument("GarchSpec: burn_in must be >= 0");
  }

  /// (a1, a2, a3) of the conditional variance recursion.
  std::array<double, 3> garch_params() const {
    if (setting == 2) return {1.0, 0.0, 0.0};
    return {0.005, 0.026, 0.97};
  }
};

/// Bivariate SVAR  Y_t = B0 Y_t + sum_k B_k Y_{t-k} + S_t + C H_t, with
/// Y = (log CO2, T) ordering so that B0 = [[0, beta], [alpha, 0]]. The lag
/// dynamics are given in reduced form, Y_t = sum_k Phi_k Y_{t-k} + ..., so
/// that stability does not depend on B0.
struct SvarSpec {
  Index n = 100000;
  double alpha = 4.33;
  double beta = 0.1;
  std::vector<Matrix> reduced_lags;  // Phi_1..Phi_p; empty selects a stable VAR(3)
  Index m = 10;                      // confounding groups
  Index subsets_per_group = 10;      // variance blocks per group
  double c1 = 1.0;
  double c2 = 2.0;
  Index burn_in = 1000;
  std::uint64_t seed = 0;

  static std::vector<Matrix> default_lags() {
    Matrix p1(2, 2), p2(2, 2), p3(2, 2);
    p1 << 0.5, 0.1, 0.2, 0.4;
    p2 << -0.2, 0.05, 0.05, -0.1;
    p3 << 0.1, 0.0, 0.0, 0.05;
    return {p1, p2, p3};
  }

  Matrix b0() const {
    Matrix b(2, 2);
    b << 0.0, beta, alpha, 0.0;
    return b;
  }
};

/// A generated data set together with everything needed to score it.
struct SimInstance {
  SignalMatrix X;
  Matrix A;             // true mixing
  Matrix S;             // true sources, d x n
  Matrix H;             // confounding after mixing, d x n
  std::vector<std::int64_t> group_labels;
  GroupedPartition partition;  // ground-truth blocks (lags {0})
  std::variant<BlockVarSpec, GarchSpec> spec;

  // Parameters drawn from the spec.
  std::vector<double> group_variances;   // sigma_g^2 per group
  std::vector<double> subset_variances;  // eta_e^2, subset-major then component
  Matrix conditional_variance;           // GARCH sigma_i^2 path, d x n
};

namespace detail {

inline Matrix normal_matrix(Rng& rng, Index rows, Index cols, double stddev) {
  Matrix out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) out(r, c) = stddev * rng.normal();
  return out;
}

/// Sizes of `total` split into `parts` pieces, each >= min_len, uniformly
/// over all such compositions.
inline std::vector<Index> random_composition(Rng& rng, Index total, Index parts, Index min_len) {
  const Index slack = total - parts * min_len;
  if (slack < 0) throw std::invalid_argument("random_composition: total too small");
  // choose parts-1 distinct bars among slack + parts - 1 slots
  std::set<Index> bars;
  const Index slots = slack + parts - 1;
  while (static_cast<Index>(bars.size()) < parts - 1) bars.insert(rng.uniform_int(0, slots - 1));
  std::vector<Index> sizes;
  Index prev = -1;
  for (Index b : bars) {
    sizes.push_back(min_len + (b - prev - 1));
    prev = b;
  }
  sizes.push_back(min_len + (slots - prev - 1));
  return sizes;
}

/// True if x_t = sum_k coef[k] x_{t-1-k} + noise is stationary.
inline bool ar_stable(const std::vector<double>& coef) {
  const auto p = static_cast<Index>(coef.size());
  if (p == 0) return true;
  Matrix companion = Matrix::Zero(p, p);
  for (Index k = 0; k < p; ++k) companion(0, k) = coef[static_cast<std::size_t>(k)];
  for (Index k = 1; k < p; ++k) companion(k, k - 1) = 1.0;
  Eigen::EigenSolver<Matrix> eig(companion, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

/// AR coefficients with random order in 1..10 and coef_i ~ N(0, 1/(i+1)^2),
/// redrawn until stable (at most 100 attempts; afterwards the order-1
/// coefficient is shrunk into the unit interval).
inline std::vector<double> draw_ar_coefficients(Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto order = rng.uniform_int(1, 10);
    std::vector<double> coef(static_cast<std::size_t>(order));
    for (std::int64_t i = 1; i <= order; ++i)
      coef[static_cast<std::size_t>(i - 1)] = rng.normal() / static_cast<double>(i + 1);
    if (ar_stable(coef)) return coef;
  }
  return {std::clamp(rng.normal() / 2.0, -0.9, 0.9)};
}


/// Unmixed ingredients of a block-variance instance.
struct BlockVarParts {
  Matrix A, S, CH;
  std::vector<std::int64_t> labels;
  GroupedPartition partition;
  std::vector<double> group_variances, subset_variances;
};

inline BlockVarParts blockvar_parts(const BlockVarSpec& spec) {
  spec.validate();
  const Index d = spec.d, n = spec.n, m = spec.m, k = spec.subsets_per_group;

  Rng mixing_rng(spec.seed, 0), structure_rng(spec.seed, 1), source_rng(spec.seed, 2),
      noise_rng(spec.seed, 3);

  BlockVarParts out;
  out.A = normal_matrix(mixing_rng, d, d, 1.0);
  const Matrix c = normal_matrix(mixing_rng, d, d, 1.0 / std::sqrt(static_cast<double>(d)));

  out.S.resize(d, n);
  Matrix hidden = Matrix::Zero(d, n);
  out.labels.resize(static_cast<std::size_t>(n));
  out.partition.lags = {0};

  Index start = 0;
  for (Index g = 0; g < m; ++g) {
    const Index size = n / m + (g < n % m ? 1 : 0);
    const double sigma2 = spec.c1 > 0.0 ? structure_rng.uniform(0.1, spec.b1()) : 0.0;
    out.group_variances.push_back(sigma2);

    const Index min_len = std::min<Index>(50, size / k);
    const auto sizes = random_composition(structure_rng, size, k, min_len);
    Group group;
    Index pos = start;
    for (Index len : sizes) {
      Vector eta(d);
      for (Index r = 0; r < d; ++r) {
        const double eta2 = structure_rng.uniform(0.1, spec.b2());
        out.subset_variances.push_back(eta2);
        eta(r) = std::sqrt(eta2);
      }
      IndexSet subset;
      for (Index i = pos; i < pos + len; ++i) {
        subset.push_back(i);
        for (Index r = 0; r < d; ++r) out.S(r, i) = eta(r) * source_rng.normal();
      }
      group.subgroups.push_back(std::move(subset));
      pos += len;
    }
    if (sigma2 > 0.0) {
      const double sigma = std::sqrt(sigma2);
      for (Index i = start; i < start + size; ++i)
        for (Index r = 0; r < d; ++r) hidden(r, i) = sigma * noise_rng.normal();
    }
    for (Index i = start; i < start + size; ++i) out.labels[static_cast<std::size_t>(i)] = g;
    out.partition.groups.push_back(std::move(group));
    start += size;
  }
  out.CH = c * hidden;
  return out;
}

}  // namespace detail

/// Block-wise shifting variance signals with group-wise stationary
/// confounding. Groups are contiguous and of size n/m (the first n mod m
/// groups take one extra sample); each group is cut into random subsets of
/// equal expected size and at least min(50, group/subsets) samples.
inline SimInstance gen_blockvar(const BlockVarSpec& spec) {
  auto parts = detail::blockvar_parts(spec);
  SimInstance inst;
  inst.spec = spec;
  inst.A = std::move(parts.A);
  inst.S = std::move(parts.S);
  inst.H = inst.A * parts.CH;
  inst.X = SignalMatrix(inst.A * inst.S + inst.H);
  inst.group_labels = std::move(parts.labels);
  inst.partition = std::move(parts.partition);
  inst.group_variances = std::move(parts.group_variances);
  inst.subset_variances = std::move(parts.subset_variances);
  return inst;
}

/// GARCH-type sources with AR or iid confounding.
///
/// Setting 1: a = (0.005, 0.026, 0.97), no autoregression.
/// Setting 2: a = (1, 0, 0) and AR dynamics redrawn per segment.
/// Setting 3: a = (0.005, 0.026, 0.97) and AR dynamics redrawn per segment.
/// All samples form one group; the ground-truth partition is the segment grid.
inline SimInstance gen_garch(const GarchSpec& spec) {
  spec.validate();
  const Index d = spec.d, n = spec.n;
  const auto a = spec.garch_params();
  const bool redraw = spec.setting != 1;

  Rng mixing_rng(spec.seed, 0), structure_rng(spec.seed, 1), source_rng(spec.seed, 2),
      noise_rng(spec.seed, 3);

  SimInstance inst;
  inst.spec = spec;
  inst.A = detail::normal_matrix(mixing_rng, d, d, 1.0);
  const Matrix c = detail::normal_matrix(mixing_rng, d, d, 1.0 / std::sqrt(static_cast<double>(d)));

  const Index segments = std::max<Index>(1, n / spec.segment_length);
  // coefficients[j][s]: AR coefficients of source j in segment s
  std::vector<std::vector<std::vector<double>>> coefficients(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) {
    for (Index s = 0; s < segments; ++s) {
      coefficients[static_cast<std::size_t>(j)].push_back(
          redraw ? detail::draw_ar_coefficients(structure_rng) : std::vector<double>{});
    }
  }
  std::vector<std::vector<double>> noise_coef(static_cast<std::size_t>(d));
  if (spec.noise == GarchNoise::ar)
    for (auto& coef : noise_coef) coef = detail::draw_ar_coefficients(structure_rng);

  inst.S.resize(d, n);
  inst.conditional_variance.resize(d, n);
  Matrix hidden(d, n);
  const double persistence = a[1] + a[2];
  const double sigma2_init = persistence < 1.0 ? a[0] / (1.0 - persistence) : a[0];
  const Index total = n + spec.burn_in;

  for (Index j = 0; j < d; ++j) {
    const auto& per_segment = coefficients[static_cast<std::size_t>(j)];
    std::vector<double> history(10, 0.0);  // history[k] = S_{t-1-k}
    double sigma2 = sigma2_init;
    double shock = 0.0;  // sigma_{t-1} eps_{t-1}
    for (Index t = 0; t < total; ++t) {
      const Index i = t - spec.burn_in;  // output index; negative during burn-in
      const Index seg = i < 0 ? 0 : std::min(segments - 1, i / spec.segment_length);
      const auto& coef = per_segment[static_cast<std::size_t>(seg)];
      // The variance recursion is driven by the innovation, not by the AR
      // output; with AR gain > 1 the latter is explosive.
      sigma2 = a[0] + a[1] * shock * shock + a[2] * sigma2;
      shock = std::sqrt(sigma2) * source_rng.normal();
      double value = shock;
      for (std::size_t k = 0; k < coef.size(); ++k) value += coef[k] * history[k];
      std::rotate(history.rbegin(), history.rbegin() + 1, history.rend());
      history[0] = value;
      if (i >= 0) {
        inst.S(j, i) = value;
        inst.conditional_variance(j, i) = sigma2;
      }
    }
  }

  for (Index j = 0; j < d; ++j) {
    const auto& coef = noise_coef[static_cast<std::size_t>(j)];
    std::vector<double> history(10, 0.0);
    for (Index t = 0; t < total; ++t) {
      const Index i = t - spec.burn_in;
      double value = noise_rng.normal();
      for (std::size_t k = 0; k < coef.size(); ++k) value += coef[k] * history[k];
      std::rotate(history.rbegin(), history.rbegin() + 1, history.rend());
      history[0] = value;
      if (i >= 0) hidden(j, i) = value;
    }
  }

  inst.group_labels.assign(static_cast<std::size_t>(n), 0);
  inst.partition.lags = {0};
  Group group;
  for (Index s = 0; s < segments; ++s) {
    const Index lo = s * spec.segment_length;
    const Index hi = s + 1 == segments ? n : lo + spec.segment_length;
    IndexSet seg(static_cast<std::size_t>(hi - lo));
    std::iota(seg.begin(), seg.end(), lo);
    group.subgroups.push_back(std::move(seg));
  }
  inst.partition.groups.push_back(std::move(group));

  inst.H = inst.A * (c * hidden);
  inst.X = SignalMatrix(inst.A * inst.S + inst.H);
  return inst;
}

/// Output of gen_svar.
struct SvarInstance {
  SignalMatrix Y;                       // observed series, 2 x n
  Matrix B0;                            // instantaneous effects
  Matrix mixing;                        // (I - B0)^-1
  std::vector<Matrix> reduced_lags;     // Phi_1..Phi_p
  Matrix innovations;                   // S + C H, 2 x n
  std::vector<std::int64_t> group_labels;
};

/// Bivariate SVAR with block-variance sources and group-wise stationary
/// confounding as innovations.
inline SvarInstance gen_svar(const SvarSpec& spec) {
  const std::vector<Matrix> lags = spec.reduced_lags.empty() ? SvarSpec::default_lags() : spec.reduced_lags;
  for (const auto& phi : lags)
    if (phi.rows() != 2 || phi.cols() != 2) throw std::invalid_argument("SvarSpec: lag matrices must be 2x2");
  if (spec.burn_in < 0) throw std::invalid_argument("SvarSpec: burn_in must be >= 0");

  BlockVarSpec innovations;
  innovations.n = spec.n + spec.burn_in;
  innovations.d = 2;
  innovations.m = spec.m;
  innovations.subsets_per_group = spec.subsets_per_group;
  innovations.c1 = spec.c1;
  innovations.c2 = spec.c2;
  innovations.seed = spec.seed;
  const auto parts = detail::blockvar_parts(innovations);
  const Matrix structural = parts.S + parts.CH;

  SvarInstance out;
  out.B0 = spec.b0();
  out.mixing = (Matrix::Identity(2, 2) - out.B0).inverse();
  out.reduced_lags = lags;

  const auto p = static_cast<Index>(lags.size());
  const Index total = innovations.n;
  Matrix y = Matrix::Zero(2, total);
  for (Index t = 0; t < total; ++t) {
    Vector value = out.mixing * structural.col(t);
    for (Index k = 1; k <= p && k <= t; ++k) value += lags[static_cast<std::size_t>(k - 1)] * y.col(t - k);
    y.col(t) = value;
  }
  out.Y = SignalMatrix(y.rightCols(spec.n));
  out.innovations = structural.rightCols(spec.n);
  out.group_labels.assign(parts.labels.end() - spec.n, parts.labels.end());
  return out;
}

}  // namespace coroica
