// Structural VAR pipeline: resample irregular series on a regular grid, fit
// a VAR by least squares, unmix the residuals with an ICA and read the
// instantaneous feedback matrix B0 off the estimated mixing.
#pragma once

#include "coroica/separation.hpp"
#include "coroica/types.hpp"

#include <Eigen/Eigenvalues>

#include <numbers>
#include <optional>

namespace coroica {

/// Samples (time, value) with strictly increasing times.
struct IrregularSeries {
  std::vector<double> times;
  std::vector<double> values;

  void validate() const {
    if (times.size() != values.size())
      throw std::invalid_argument("IrregularSeries: times and values differ in length");
    if (times.size() < 4) throw std::invalid_argument("IrregularSeries: need at least 4 points");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
        throw std::invalid_argument("IrregularSeries: non-finite entry at point " + std::to_string(i));
      if (i > 0 && !(times[i] > times[i - 1]))
        throw std::invalid_argument("IrregularSeries: times not strictly increasing at point " +
                                    std::to_string(i));
    }
  }
};

struct RegularSeries {
  double start = 0.0;
  double step = 1.0;
  std::vector<double> values;

  double time(std::size_t i) const { return start + step * static_cast<double>(i); }
};

enum class SplineBoundary { not_a_knot, natural };

/// Cubic interpolating spline through irregular knots.
class CubicSpline {
 public:
  explicit CubicSpline(const IrregularSeries& series,
                       SplineBoundary boundary = SplineBoundary::not_a_knot)
      : x_(series.times), y_(series.values) {
    series.validate();
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      slope[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    // Tridiagonal system for the interior second derivatives M_1..M_{n-2}:
    // h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = 6 (slope_i - slope_{i-1})
    const std::size_t k = n - 2;
    std::vector<double> lower(k, 0.0), diag(k, 0.0), upper(k, 0.0), rhs(k, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = r + 1;
      lower[r] = h[i - 1];
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      upper[r] = h[i];
      rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
    }
    if (boundary == SplineBoundary::not_a_knot) {
      // Continuous third derivative at x_1 and x_{n-2} eliminates the end values:
      //   M_0     = ((h_0 + h_1) M_1 - h_0 M_2) / h_1
      //   M_{n-1} = ((h_{n-2} + h_{n-3}) M_{n-2} - h_{n-2} M_{n-3}) / h_{n-3}
      const double h0 = h[0], h1 = h[1];
      diag[0] += h0 * (h0 + h1) / h1;
      upper[0] -= h0 * h0 / h1;
      const double ha = h[n - 2], hb = h[n - 3];
      diag[k - 1] += ha * (ha + hb) / hb;
      lower[k - 1] -= ha * ha / hb;
    }
    // Thomas algorithm.
    std::vector<double> m_inner(k);
    {
      std::vector<double> c(k), d(k);
      c[0] = upper[0] / diag[0];
      d[0] = rhs[0] / diag[0];
      for (std::size_t r = 1; r < k; ++r) {
        const double denom = diag[r] - lower[r] * c[r - 1];
        c[r] = upper[r] / denom;
        d[r] = (rhs[r] - lower[r] * d[r - 1]) / denom;
      }
      m_inner[k - 1] = d[k - 1];
      for (std::size_t r = k - 1; r-- > 0;) m_inner[r] = d[r] - c[r] * m_inner[r + 1];
    }
    second_.assign(n, 0.0);
    for (std::size_t r = 0; r < k; ++r) second_[r + 1] = m_inner[r];
    if (boundary == SplineBoundary::not_a_knot) {
      const double h0 = h[0], h1 = h[1];
      second_[0] = ((h0 + h1) * second_[1] - h0 * second_[2]) / h1;
      const double ha = h[n - 2], hb = h[n - 3];
      second_[n - 1] = ((ha + hb) * second_[n - 2] - ha * second_[n - 3]) / hb;
    }
  }

  double lower_bound() const { return x_.front(); }
  double upper_bound() const { return x_.back(); }

  double operator()(double t) const {
    if (t < x_.front() || t > x_.back())
      throw std::invalid_argument("CubicSpline: evaluation outside the knot range");
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double a = x_[i + 1] - t;
    const double b = t - x_[i];
    return second_[i] * a * a * a / (6.0 * h) + second_[i + 1] * b * b * b / (6.0 * h) +
           (y_[i] / h - second_[i] * h / 6.0) * a + (y_[i + 1] / h - second_[i + 1] * h / 6.0) * b;
  }

 private:
  std::vector<double> x_, y_, second_;
};

/// Evaluate the cubic interpolant on start, start + step, ... (count points).
inline RegularSeries cubic_resample(const IrregularSeries& series, double start, double step,
                                    std::size_t count,
                                    SplineBoundary boundary = SplineBoundary::not_a_knot) {
  if (!(step > 0.0)) throw std::invalid_argument("cubic_resample: step must be positive");
  if (count == 0) throw std::invalid_argument("cubic_resample: empty grid");
  const CubicSpline spline(series, boundary);
  const double stop = start + step * static_cast<double>(count - 1);
  if (start < spline.lower_bound() || stop > spline.upper_bound())
    throw std::invalid_argument("cubic_resample: grid exceeds the observed time range");
  RegularSeries out{start, step, {}};
  out.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.values.push_back(spline(out.time(i)));
  return out;
}

/// Number of grid points of spacing `step` from `start` that stay within `stop`.
inline std::size_t grid_size(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid_size: step must be positive");
  if (stop < start) return 0;
  const double span = (stop - start) / step;
  // tolerate rounding when the range is an exact multiple of the step
  return static_cast<std::size_t>(std::floor(span * (1.0 + 1e-12) + 1e-9)) + 1;
}

/// Resample over the whole observed range.
inline RegularSeries cubic_resample(const IrregularSeries& series, double step,
                                    SplineBoundary boundary = SplineBoundary::not_a_knot) {
  series.validate();
  if (!(step > 0.0)) throw std::invalid_argument("cubic_resample: step must be positive");
  const double start = series.times.front();
  std::size_t count = grid_size(start, series.times.back(), step);
  while (count > 1 && start + step * static_cast<double>(count - 1) > series.times.back()) --count;
  return cubic_resample(series, start, step, count, boundary);
}

struct VarFit {
  std::size_t lag_order = 0;
  Vector intercept;
  std::vector<Matrix> coefficients;  // B_1..B_p, each d x d
  Matrix residuals;                  // d x (n - p)
};

/// Least-squares VAR(p) with intercept: X_t = c + sum_k B_k X_{t-k} + R_t.
inline VarFit fit_var(const SignalMatrix& x, std::size_t lag_order) {
  const Index d = x.channels(), n = x.samples();
  const auto p = static_cast<Index>(lag_order);
  if (n <= d * p + 10) throw std::invalid_argument("fit_var: series too short for the lag order");
  const Index rows = n - p;
  const Index cols = 1 + d * p;
  Matrix design(rows, cols);
  design.col(0).setOnes();
  for (Index k = 1; k <= p; ++k) {
    design.middleCols(1 + (k - 1) * d, d) = x.values().middleCols(p - k, rows).transpose();
  }
  const Matrix target = x.values().rightCols(rows).transpose();

  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < cols) throw std::invalid_argument("fit_var: rank-deficient regressor matrix");
  const Matrix beta = qr.solve(target);  // cols x d

  VarFit out;
  out.lag_order = lag_order;
  out.intercept = beta.row(0).transpose();
  for (Index k = 1; k <= p; ++k) out.coefficients.push_back(beta.middleRows(1 + (k - 1) * d, d).transpose());
  out.residuals = (target - design * beta).transpose();
  return out;
}

/// Stability notion used to pick the admissible B0.
enum class FeedbackCriterion { spectral_radius, spectral_norm };

struct B0Candidate {
  Matrix B0;
  double alpha = 0.0;  // B0(1, 0): effect of the first variable on the second
  double beta = 0.0;   // B0(0, 1)
  double spectral_norm = 0.0;
  double spectral_radius = 0.0;
  bool admissible = false;
};

struct B0Identification {
  enum class Status { identified, ambiguous, unidentifiable };
  Status status = Status::unidentifiable;
  std::vector<B0Candidate> candidates;  // one per column permutation
  std::optional<B0Candidate> selected;  // set when identified
};

inline std::string to_string(B0Identification::Status s) {
  switch (s) {
    case B0Identification::Status::identified: return "ok";
    case B0Identification::Status::ambiguous: return "ambiguous";
    case B0Identification::Status::unidentifiable: return "unidentifiable";
  }
  return "?";
}

/// Try both column orders of a 2x2 mixing estimate. Each is inverted and
/// row-scaled to unit diagonal, V, giving B0 = I - V. The candidate whose
/// feedback loop is stable (criterion value < 1) is selected.
inline B0Identification identify_b0(const Matrix& a_hat,
                                    FeedbackCriterion criterion = FeedbackCriterion::spectral_radius) {
  if (a_hat.rows() != 2 || a_hat.cols() != 2) throw std::invalid_argument("identify_b0: A_hat must be 2x2");
  if (!a_hat.allFinite() || Eigen::FullPivLU<Matrix>(a_hat).rank() < 2)
    throw std::invalid_argument("identify_b0: A_hat must be invertible");

  B0Identification out;
  for (int swap = 0; swap < 2; ++swap) {
    Matrix permuted = a_hat;
    if (swap) permuted.col(0).swap(permuted.col(1));
    Matrix v = permuted.inverse();
    B0Candidate cand;
    if (v(0, 0) == 0.0 || v(1, 1) == 0.0) {
      cand.B0 = Matrix::Constant(2, 2, std::numeric_limits<double>::quiet_NaN());
      cand.spectral_norm = cand.spectral_radius = std::numeric_limits<double>::infinity();
      out.candidates.push_back(cand);
      continue;
    }
    v.row(0) /= v(0, 0);
    v.row(1) /= v(1, 1);
    cand.B0 = Matrix::Identity(2, 2) - v;
    cand.B0(0, 0) = 0.0;
    cand.B0(1, 1) = 0.0;
    cand.alpha = cand.B0(1, 0);
    cand.beta = cand.B0(0, 1);
    cand.spectral_norm = Eigen::JacobiSVD<Matrix>(cand.B0).singularValues()(0);
    // eigenvalues of [[0, b], [a, 0]] are +-sqrt(a b)
    cand.spectral_radius = std::sqrt(std::abs(cand.alpha * cand.beta));
    const double score = criterion == FeedbackCriterion::spectral_radius ? cand.spectral_radius : cand.spectral_norm;
    cand.admissible = score < 1.0;
    out.candidates.push_back(cand);
  }
  const int admissible = static_cast<int>(out.candidates[0].admissible) + static_cast<int>(out.candidates[1].admissible);
  if (admissible == 1) {
    out.status = B0Identification::Status::identified;
    out.selected = out.candidates[0].admissible ? out.candidates[0] : out.candidates[1];
  } else {
    out.status = admissible == 2 ? B0Identification::Status::ambiguous : B0Identification::Status::unidentifiable;
  }
  return out;
}

/// Equilibrium climate sensitivity from the effect of log CO2 on temperature.
inline double ecs_from_alpha(double alpha) { return std::numbers::ln2 * alpha; }

/// How the SVAR residuals are unmixed.
struct ClimateIcaConfig {
  std::string label = "coroica";
  SeparationConfig separation;
  /// Residuals are cut into consecutive groups of this many samples;
  /// 0 keeps them as a single group.
  Index group_length = 0;
};

struct ClimateRow {
  std::size_t lag = 0;
  std::string method;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double ecs = std::numeric_limits<double>::quiet_NaN();
  std::string status;
};

/// Unmix VAR residuals and identify (alpha, beta).
inline ClimateRow svar_identify(const Matrix& residuals, const ClimateIcaConfig& ica, std::size_t lag,
                                FeedbackCriterion criterion = FeedbackCriterion::spectral_radius) {
  ClimateRow row;
  row.lag = lag;
  row.method = ica.label;
  try {
    const SignalMatrix r(residuals);
    std::vector<std::int64_t> labels(static_cast<std::size_t>(r.samples()), 0);
    if (ica.group_length > 0)
      for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = static_cast<std::int64_t>(i / static_cast<std::size_t>(ica.group_length));
    const SeparationModel model = fit(r, labels, ica.separation);
    const auto id = identify_b0(model.A_hat, criterion);
    row.status = to_string(id.status);
    if (id.selected) {
      row.alpha = id.selected->alpha;
      row.beta = id.selected->beta;
      row.ecs = ecs_from_alpha(row.alpha);
    }
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

struct ClimateData {
  RegularSeries log_co2;
  RegularSeries temperature;
};

/// Resample both series on the common time range with the given step and
/// take the log of CO2.
inline ClimateData prepare_climate_series(const IrregularSeries& co2, const IrregularSeries& temp, double step) {
  co2.validate();
  temp.validate();
  const double start = std::max(co2.times.front(), temp.times.front());
  const double stop = std::min(co2.times.back(), temp.times.back());
  if (!(stop > start)) throw std::invalid_argument("climate: series do not overlap in time");
  std::size_t count = grid_size(start, stop, step);
  while (count > 1 && start + step * static_cast<double>(count - 1) > stop) --count;
  ClimateData out{cubic_resample(co2, start, step, count), cubic_resample(temp, start, step, count)};
  for (double& v : out.log_co2.values) {
    if (!(v > 0.0)) throw std::invalid_argument("climate: CO2 must be positive to take logs");
    v = std::log(v);
  }
  return out;
}

/// One row per (lag, ICA) combination, lag-major.
inline std::vector<ClimateRow> climate_pipeline(const IrregularSeries& co2, const IrregularSeries& temp,
                                                const std::vector<std::size_t>& lags,
                                                const std::vector<ClimateIcaConfig>& icas, double step = 500.0,
                                                FeedbackCriterion criterion = FeedbackCriterion::spectral_radius) {
  const ClimateData data = prepare_climate_series(co2, temp, step);
  const auto n = static_cast<Index>(data.log_co2.values.size());
  Matrix y(2, n);
  for (Index i = 0; i < n; ++i) {
    y(0, i) = data.log_co2.values[static_cast<std::size_t>(i)];
    y(1, i) = data.temperature.values[static_cast<std::size_t>(i)];
  }
  const SignalMatrix series(y);
  std::vector<ClimateRow> rows;
  for (auto p : lags) {
    std::optional<VarFit> var;
    std::string failure;
    try {
      var = fit_var(series, p);
    } catch (const std::exception& e) {
      failure = std::string("error: ") + e.what();
    }
    for (const auto& ica : icas) {
      if (!var) {
        ClimateRow row;
        row.lag = p;
        row.method = ica.label;
        row.status = failure;
        rows.push_back(row);
        continue;
      }
      rows.push_back(svar_identify(var->residuals, ica, p, criterion));
    }
  }
  return rows;
}

}  // namespace coroica
