#include "catch_amalgamated.hpp"
#include "coroica/metrics.hpp"
#include "coroica/random.hpp"

#include <numeric>

using namespace coroica;

namespace {

Matrix normal(Rng& rng, Index r, Index c) {
  Matrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

Matrix permutation(Rng& rng, Index d) {
  std::vector<Index> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), Index{0});
  for (Index i = d - 1; i > 0; --i) std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  Matrix out = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) out(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return out;
}

}  // namespace

TEST_CASE("md index examples", "[metrics]") {
  Matrix a(2, 2);
  a << 1, 1, 0, 1;
  CHECK(md_index(Matrix::Identity(2, 2), a).value == Catch::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(md_index_bruteforce(Matrix::Identity(2, 2), a).value == Catch::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(md_index(a.inverse(), a).value < 1e-15);
  CHECK(md_index_bruteforce(Matrix::Identity(3, 3), Matrix::Identity(3, 3)).value == 0.0);

  Rng rng(4);
  const Matrix m = normal(rng, 5, 5);
  Vector scale(5);
  scale << 2.0, -0.5, 7.0, 1e-3, -40.0;
  const Matrix v = scale.asDiagonal() * permutation(rng, 5) * m.inverse();
  CHECK(md_index(v, m).value < 1e-7);
}

TEST_CASE("md index agrees with exhaustive search", "[metrics]") {
  Rng rng(77);
  for (int rep = 0; rep < 300; ++rep) {
    const Index d = rng.uniform_int(2, 6);
    const Matrix v = normal(rng, d, d), a = normal(rng, d, d);
    const auto fast = md_index(v, a), slow = md_index_bruteforce(v, a);
    REQUIRE(std::abs(fast.value - slow.value) < 1e-12);
    CHECK(fast.value >= 0.0);
    CHECK(fast.value <= 1.0);
  }
}

TEST_CASE("md index is invariant to row scaling and order", "[metrics]") {
  Rng rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    const Index d = rng.uniform_int(2, 6);
    const Matrix v = normal(rng, d, d), a = normal(rng, d, d);
    Vector pow2(d);
    for (Index i = 0; i < d; ++i) pow2(i) = std::ldexp(rng.uniform() < 0.5 ? -1.0 : 1.0, static_cast<int>(rng.uniform_int(-8, 8)));
    const Matrix p = permutation(rng, d);
    // Power-of-two scaling is exact in floating point, so equality is bitwise.
    CHECK(md_index(pow2.asDiagonal() * p * v, a).value == md_index(v, a).value);
  }
}

TEST_CASE("md index input validation", "[metrics]") {
  CHECK_THROWS_AS(md_index(Matrix::Identity(1, 1), Matrix::Identity(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(md_index(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(md_index(Matrix::Zero(2, 2), Matrix::Identity(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(md_index_bruteforce(Matrix::Identity(9, 9), Matrix::Identity(9, 9)), std::invalid_argument);
}

TEST_CASE("assignment solver finds the optimum", "[metrics]") {
  Matrix cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto col = solve_assignment(cost);
  double total = 0.0;
  for (Index r = 0; r < 3; ++r) total += cost(r, col[static_cast<std::size_t>(r)]);
  CHECK(total == 5.0);
}

TEST_CASE("mcis of fixed CIS matrices", "[metrics]") {
  CisMatrix zero{Matrix::Identity(3, 3), {}};
  CHECK(mcis(zero) == 0.0);
  CisMatrix ones{Matrix::Ones(4, 4), {}};
  CHECK(mcis(ones) == Catch::Approx(1.0));
}

TEST_CASE("cis vanishes for identical block covariances", "[metrics]") {
  // Repeating the same block makes every partition element identical.
  Rng rng(2);
  const Matrix block = normal(rng, 3, 50);
  Matrix x(3, 200);
  for (int b = 0; b < 4; ++b) x.middleCols(b * 50, 50) = block;
  std::vector<IndexSet> parts;
  for (Index b = 0; b < 4; ++b) {
    IndexSet e(50);
    std::iota(e.begin(), e.end(), b * 50);
    parts.push_back(e);
  }
  const auto cis = cis_matrix(SignalMatrix(x), parts);
  CHECK(cis.values.cwiseAbs().maxCoeff() < 1e-24);
}

TEST_CASE("cis requires signal and a real partition", "[metrics]") {
  Matrix x = Matrix::Zero(2, 100);
  x.row(0).setOnes();
  x(0, 3) = 2.0;
  IndexSet a(50), b(50);
  std::iota(a.begin(), a.end(), Index{0});
  std::iota(b.begin(), b.end(), Index{50});
  CHECK_THROWS_AS(cis_matrix(SignalMatrix(x), {a, b}), std::invalid_argument);
  CHECK_THROWS_AS(cis_matrix(SignalMatrix(Matrix::Ones(2, 10) + Matrix::Identity(2, 10)), {a}), std::invalid_argument);
}

TEST_CASE("activation map recovers mixing columns", "[metrics]") {
  Rng rng(10);
  const Matrix a = normal(rng, 4, 4);
  MatrixSet set;
  for (int k = 0; k < 6; ++k) {
    Vector diag(4);
    for (Index i = 0; i < 4; ++i) diag(i) = rng.normal();
    set.push_back(a * diag.asDiagonal() * a.transpose(), {});
  }
  const Matrix v = a.inverse();
  for (Index j = 0; j < 4; ++j) {
    const Vector m = activation_map(v, set, j);
    const double cosine = m.dot(a.col(j)) / (m.norm() * a.col(j).norm());
    CHECK(std::abs(cosine) > 1.0 - 1e-9);
  }
  MatrixSet zeros;
  zeros.push_back(Matrix::Zero(4, 4), {});
  CHECK(activation_map(v, zeros, 0).norm() == 0.0);
  CHECK_THROWS_AS(activation_map(v, set, 4), std::invalid_argument);
}

TEST_CASE("cis from precomputed covariances matches direct evaluation", "[metrics]") {
  Rng rng(12);
  Matrix x = normal(rng, 3, 600);
  for (Index i = 0; i < 600; ++i) x.col(i) *= 1.0 + static_cast<double>(i / 100);
  std::vector<IndexSet> parts;
  for (Index b = 0; b < 6; ++b) {
    IndexSet e(100);
    std::iota(e.begin(), e.end(), b * 100);
    parts.push_back(e);
  }
  const Matrix v = normal(rng, 3, 3);
  const auto direct = cis_matrix(SignalMatrix(v * x), parts);
  const auto fast = cis_matrix(v, precompute_cis(SignalMatrix(x), parts));
  CHECK((direct.values - fast.values).cwiseAbs().maxCoeff() < 1e-10 * direct.values.cwiseAbs().maxCoeff());
}
