#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "cfrecs/matrix.hpp"
#include "cfrecs/rng.hpp"

using namespace cfrecs;

TEST_CASE("matmul matches a hand-computed product") {
  Matrix a{{1, 2}, {3, 4}};
  Matrix b{{5, 6}, {7, 8}};
  Matrix c = matmul(a, b);
  CHECK(c == Matrix{{19, 22}, {43, 50}});
}

TEST_CASE("matmul with identity is a no-op") {
  Matrix a{{2, -1, 0.5}, {0, 3, 7}};
  CHECK(matmul(a, Matrix::identity(3)) == a);
  CHECK(matmul(Matrix::identity(2), a) == a);
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
  CHECK_THROWS(matmul(Matrix(2, 3), Matrix(2, 3)));
}

TEST_CASE("transpose swaps indices") {
  Matrix a{{1, 2, 3}, {4, 5, 6}};
  Matrix t = transposed(a);
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 2);
  CHECK(t(0, 1) == 4);
  CHECK(t(2, 0) == 3);
  CHECK(transposed(t) == a);
}

TEST_CASE("constructors and fill") {
  Matrix z(2, 2);
  CHECK(z(0, 0) == 0.0);
  CHECK(z(1, 1) == 0.0);
  Matrix f = Matrix::filled(2, 3, 1.5);
  CHECK(f(1, 2) == 1.5);
  f.fill(-2.0);
  CHECK(f(0, 0) == -2.0);
  CHECK(shape_string(f) == "2x3");
}

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("split streams are stable regardless of parent consumption") {
  Rng parent(9);
  Rng before = parent.split(3);
  parent.next_u64();
  parent.uniform();
  Rng after = parent.split(3);
  for (int i = 0; i < 16; ++i) CHECK(before.next_u64() == after.next_u64());
}

TEST_CASE("split streams differ from each other and the parent") {
  Rng parent(9);
  Rng s0 = parent.split(0);
  Rng s1 = parent.split(1);
  CHECK(s0.next_u64() != s1.next_u64());
}

TEST_CASE("uniform stays in [0,1) and covers the range") {
  Rng rng(5);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("uniform_int is unbiased across a small range") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    int v = rng.uniform_int(7);
    REQUIRE(v >= 0);
    REQUIRE(v < 7);
    ++counts[v];
  }
  // each bucket within 5 sigma of draws/7
  const double expected = draws / 7.0;
  const double sigma = std::sqrt(expected * (1.0 - 1.0 / 7.0));
  for (int c : counts) CHECK(std::fabs(c - expected) < 5.0 * sigma);
}

TEST_CASE("uniform_int rejects non-positive n") {
  Rng rng(1);
  CHECK_THROWS(rng.uniform_int(0));
  CHECK_THROWS(rng.uniform_int(-3));
}

TEST_CASE("bernoulli degenerate probabilities") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("normal sample moments") {
  Rng rng(3);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("shifted normal") {
  Rng rng(4);
  const int n = 50000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.normal(5.0, 0.5);
  CHECK(std::fabs(sum / n - 5.0) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("gamma sample mean matches its shape") {
  Rng rng(6);
  for (double shape : {0.5, 1.0, 4.0}) {
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = rng.gamma(shape);
      REQUIRE(x >= 0.0);
      sum += x;
    }
    // mean = shape, var = shape for unit scale
    CHECK(std::fabs(sum / n - shape) < 4.0 * std::sqrt(shape / n));
  }
}

TEST_CASE("gamma rejects non-positive shape") {
  Rng rng(1);
  CHECK_THROWS(rng.gamma(0.0));
}

TEST_CASE("splitmix64 matches the reference first output") {
  // published test vector for the canonical finalizer at state 0
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}
