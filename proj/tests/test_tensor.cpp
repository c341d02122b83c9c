#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cfrecs/tensor.hpp"
#include "op_gradients.hpp"
#include "support.hpp"

using namespace cfrecs;
using testsupport::gradcheck;

TEST_CASE("every op passes randomized gradient checks") {
  Rng rng(2024);
  for (const testsupport::OpCase& c : testsupport::op_gradient_cases()) {
    INFO(c.name);
    for (int i = 0; i < 3; ++i) CHECK(c.run(rng));
  }
}

TEST_CASE("sigmoid forward and gradient at zero") {
  Tensor x = Tensor::variable(Matrix(1, 1));
  Tensor y = sigmoid(x);
  CHECK(y.item() == doctest::Approx(0.5).epsilon(1e-12));
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("bce of an even coin against a positive label is ln 2") {
  Tensor p = Tensor::constant(Matrix::filled(1, 1, 0.5));
  Tensor target = Tensor::constant(Matrix::filled(1, 1, 1.0));
  CHECK(bce(p, target).item() == doctest::Approx(0.6931471805599453).epsilon(1e-12));
}

TEST_CASE("bce stays finite at saturated predictions") {
  Tensor p = Tensor::variable(Matrix::filled(1, 2, 0.0));
  p.mutable_value()[1] = 1.0;
  Tensor target = Tensor::constant(Matrix{{1.0, 0.0}});
  Tensor loss = reduce_sum_all(bce(p, target));
  CHECK(std::isfinite(loss.item()));
  loss.backward();
  CHECK(std::isfinite(p.grad()[0]));
  CHECK(std::isfinite(p.grad()[1]));
}

TEST_CASE("kl divergence closed forms") {
  // N(0,1) vs N(0,1) -> 0
  Tensor mu0 = Tensor::variable(Matrix(1, 1));
  Tensor lv0 = Tensor::variable(Matrix(1, 1));
  CHECK(kl_diag_gaussian(mu0, lv0).item() == doctest::Approx(0.0).epsilon(1e-12));
  // mu=1, sigma=1 (log var 0), one dimension -> 1/2
  Tensor mu1 = Tensor::variable(Matrix::filled(1, 1, 1.0));
  CHECK(kl_diag_gaussian(mu1, lv0).item() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reparameterize with zero sigma returns mu exactly") {
  Matrix m{{0.3, -1.2}, {2.0, 0.0}};
  Tensor mu = Tensor::variable(m);
  Tensor sigma = Tensor::constant(Matrix(2, 2));
  Rng rng(7);
  Tensor z = reparameterize(mu, sigma, rng);
  CHECK(z.value() == m);
}

TEST_CASE("reparameterize is deterministic under a fixed seed") {
  Tensor mu = Tensor::constant(Matrix(2, 3));
  Tensor sigma = Tensor::constant(Matrix::filled(2, 3, 1.0));
  Rng r1(99), r2(99);
  Tensor a = reparameterize(mu, sigma, r1);
  Tensor b = reparameterize(mu, sigma, r2);
  CHECK(a.value() == b.value());
}

TEST_CASE("reparameterize sample mean approaches mu") {
  Tensor mu = Tensor::constant(Matrix::filled(1, 1, 2.5));
  Tensor sigma = Tensor::constant(Matrix::filled(1, 1, 1.0));
  Rng rng(123);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += reparameterize(mu, sigma, rng).item();
  CHECK(std::fabs(sum / n - 2.5) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("dropout is the identity when not training or rate is zero") {
  Matrix m{{1, 2}, {3, 4}};
  Tensor x = Tensor::variable(m);
  Rng rng(1);
  CHECK(dropout(x, 0.5, rng, false).value() == m);
  CHECK(dropout(x, 0.0, rng, true).value() == m);
}

TEST_CASE("dropout rejects rates outside [0,1)") {
  Tensor x = Tensor::variable(Matrix(1, 1));
  Rng rng(1);
  CHECK_THROWS(dropout(x, 1.0, rng, true));
  CHECK_THROWS(dropout(x, -0.1, rng, true));
}

TEST_CASE("dropout keeps surviving entries inverted-scaled") {
  Matrix m = Matrix::filled(4, 4, 2.0);
  Tensor x = Tensor::variable(m);
  Rng rng(5);
  Tensor y = dropout(x, 0.25, rng, true);
  for (int i = 0; i < y.value().size(); ++i) {
    const double v = y.value()[i];
    CHECK((v == 0.0 || v == doctest::Approx(2.0 / 0.75).epsilon(1e-12)));
  }
}

TEST_CASE("softmax rows sum to one and preserve order") {
  Tensor x = Tensor::variable(Matrix{{0.1, 2.0, -1.0}, {3.0, 3.0, 3.0}});
  Tensor s = softmax_rows(x);
  for (int r = 0; r < 2; ++r) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) sum += s.value()(r, c);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(s.value()(0, 1) > s.value()(0, 0));
  CHECK(s.value()(0, 0) > s.value()(0, 2));
  CHECK(s.value()(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gradients accumulate across backward calls until zeroed") {
  Tensor x = Tensor::variable(Matrix::filled(1, 1, 3.0));
  Tensor y = square(x);
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(12.0));
  x.zero_grad();
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("backward seed scales the adjoint") {
  Tensor x = Tensor::variable(Matrix::filled(1, 1, 3.0));
  Tensor y = square(x);
  y.backward(0.5);
  CHECK(x.grad()(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("backward requires a scalar root") {
  Tensor x = Tensor::variable(Matrix(2, 2));
  CHECK_THROWS(x.backward());
}

TEST_CASE("constants receive no gradient and spawn no backward work") {
  Tensor c = Tensor::constant(Matrix::filled(1, 1, 2.0));
  Tensor x = Tensor::variable(Matrix::filled(1, 1, 5.0));
  Tensor y = mul(c, x);
  CHECK_FALSE(c.requires_grad());
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("a diamond-shaped graph accumulates both paths") {
  // y = x*x + x*x  ->  dy/dx = 4x
  Tensor x = Tensor::variable(Matrix::filled(1, 1, 3.0));
  Tensor a = mul(x, x);
  Tensor y = add(a, a);
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(12.0));
}

TEST_CASE("requires_grad is frozen into ops at creation time") {
  Tensor x = Tensor::variable(Matrix::filled(1, 1, 2.0));
  Tensor w = Tensor::variable(Matrix::filled(1, 1, 4.0));
  Tensor y = mul(x, w);

  // freezing w after the op was built must not stop its recorded gradient
  w.node()->requires_grad = false;
  y.backward();
  CHECK(w.grad().size() == 1);  // already captured

  // ops built after freezing skip the frozen parent
  Tensor y2 = mul(x, w);
  x.zero_grad();
  y2.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("item rejects non-scalar tensors") {
  Tensor x = Tensor::variable(Matrix(2, 1));
  CHECK_THROWS(x.item());
}
