#include <doctest.h>

#include <cmath>

#include "hopqa/ops.hpp"
#include "op_gradchecks.hpp"

using namespace hopqa;
using hopqa::testing::run_op_gradchecks;

TEST_CASE("matmul identity and orthogonal cases") {
  Tensor id = Tensor::from({2, 2}, {1, 0, 0, 1});
  Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
  Tensor prod = matmul(id, a);
  CHECK(prod.values() == a.values());

  Tensor row = Tensor::from({1, 2}, {1, 0});
  Tensor col = Tensor::from({2, 1}, {0, 1});
  CHECK(matmul(row, col).item() == 0.0);
}

TEST_CASE("matmul matches a naive triple-loop oracle") {
  Rng rng(7);
  Tensor a = Tensor::randn({3, 4}, rng, 1.0);
  Tensor b = Tensor::randn({4, 2}, rng, 1.0);
  Tensor c = matmul(a, b);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      double expect = 0.0;
      for (int k = 0; k < 4; ++k) expect += a.at(i, k) * b.at(k, j);
      CHECK(c.at(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({4, 5});
  try {
    matmul(a, b);
    FAIL("expected a dimension error");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("[2 x 3]") != std::string::npos);
    CHECK(msg.find("[4 x 5]") != std::string::npos);
  }
}

TEST_CASE("softmax symmetry, stabilization and oracle") {
  Tensor flat = softmax_rows(Tensor::from({1, 2}, {0, 0}));
  CHECK(flat.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  Tensor spiky = softmax_rows(Tensor::from({1, 2}, {1000, 0}));
  CHECK(spiky.all_finite());
  CHECK(spiky.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spiky.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));

  Tensor probs = softmax_rows(Tensor::from({1, 3}, {1, 2, 3}));
  long double denom = 0.0L;
  for (int j = 0; j < 3; ++j) denom += std::exp(static_cast<long double>(j + 1));
  for (int j = 0; j < 3; ++j) {
    const long double expect = std::exp(static_cast<long double>(j + 1)) / denom;
    CHECK(probs.at(0, j) == doctest::Approx(static_cast<double>(expect)).epsilon(1e-12));
  }
}

TEST_CASE("softmax rows sum to one and shift-invariance holds") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + rng.uniform_int(4), n = 1 + rng.uniform_int(6);
    Tensor x = Tensor::randn({m, n}, rng, 3.0);
    Tensor y = softmax_rows(x);
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        row += y.at(i, j);
        CHECK(y.at(i, j) >= 0.0);
      }
      CHECK(std::fabs(row - 1.0) < 1e-9);
    }
    const double shift = rng.normal(0.0, 50.0);
    Tensor x2 = Tensor::from(x.shape(), x.values());
    for (std::size_t i = 0; i < x2.numel(); ++i) x2.at(i) += shift;
    Tensor y2 = softmax_rows(x2);
    for (std::size_t i = 0; i < y.numel(); ++i) {
      CHECK(std::fabs(y.at(i) - y2.at(i)) < 1e-9);
    }
  }
}

TEST_CASE("layer_norm collapses constant rows and keeps normalized rows") {
  Tensor gain = Tensor::full({4}, 1.0);
  Tensor bias = Tensor::zeros({4});
  Tensor constant = layer_norm(Tensor::full({1, 4}, 3.25), gain, bias);
  for (std::size_t i = 0; i < constant.numel(); ++i) CHECK(constant.at(i) == 0.0);

  Tensor g2 = Tensor::full({2}, 1.0);
  Tensor b2 = Tensor::zeros({2});
  Tensor pm = layer_norm(Tensor::from({1, 2}, {1, -1}), g2, b2);
  CHECK(pm.at(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(pm.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("layer_norm matches a two-pass mean/variance oracle") {
  Rng rng(13);
  const int n = 8;
  Tensor x = Tensor::randn({1, n}, rng, 5.0);
  Tensor gain = Tensor::randn({n}, rng, 1.0);
  Tensor bias = Tensor::randn({n}, rng, 1.0);
  Tensor y = layer_norm(x, gain, bias);
  double mu = 0.0;
  for (int j = 0; j < n; ++j) mu += x.at(0, j);
  mu /= n;
  double var = 0.0;
  for (int j = 0; j < n; ++j) var += (x.at(0, j) - mu) * (x.at(0, j) - mu);
  var /= n;
  for (int j = 0; j < n; ++j) {
    const double expect = (x.at(0, j) - mu) / std::sqrt(var + 1e-5) * gain.at(j) + bias.at(j);
    CHECK(y.at(0, j) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("layer_norm output rows have mean 0 and variance 1 before affine") {
  Rng rng(17);
  Tensor gain = Tensor::full({16}, 1.0);
  Tensor bias = Tensor::zeros({16});
  Tensor x = Tensor::randn({3, 16}, rng, 8.0);  // variance >> epsilon
  Tensor y = layer_norm(x, gain, bias);
  for (int i = 0; i < 3; ++i) {
    double mu = 0.0, var = 0.0;
    for (int j = 0; j < 16; ++j) mu += y.at(i, j);
    mu /= 16;
    for (int j = 0; j < 16; ++j) var += (y.at(i, j) - mu) * (y.at(i, j) - mu);
    var /= 16;
    CHECK(std::fabs(mu) < 1e-6);
    CHECK(std::fabs(var - 1.0) < 1e-6);
  }
}

TEST_CASE("binary cross-entropy analytic values") {
  CHECK(binary_cross_entropy(Tensor::scalar(1.0 - 1e-7), {1.0}).item() ==
        doctest::Approx(0.0).epsilon(1e-6));
  CHECK(binary_cross_entropy(Tensor::scalar(0.5), {1.0}).item() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(binary_cross_entropy(Tensor::scalar(0.9), {0.0}).item() ==
        doctest::Approx(-std::log(0.1)).epsilon(1e-9));
  // Clamping keeps extreme probabilities finite.
  CHECK(binary_cross_entropy(Tensor::scalar(1.0), {0.0}).item() ==
        doctest::Approx(-std::log(1e-7)).epsilon(1e-6));
}

TEST_CASE("cross-entropy from logits analytic and oracle") {
  for (int n : {2, 5, 9}) {
    Tensor uniform = Tensor::full({n}, 0.7);
    CHECK(cross_entropy_from_logits(uniform, n - 1).item() ==
          doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-12));
  }
  CHECK(cross_entropy_from_logits(Tensor::from({2}, {10, -10}), 0).item() ==
        doctest::Approx(0.0).epsilon(1e-8));

  Rng rng(23);
  Tensor logits = Tensor::randn({7}, rng, 2.0);
  const int target = 3;
  long double denom = 0.0L;
  for (std::size_t i = 0; i < logits.numel(); ++i) {
    denom += std::exp(static_cast<long double>(logits.at(i)));
  }
  const long double expect =
      -(static_cast<long double>(logits.at(3)) - std::log(denom));
  CHECK(cross_entropy_from_logits(logits, target).item() ==
        doctest::Approx(static_cast<double>(expect)).epsilon(1e-10));

  CHECK_THROWS(cross_entropy_from_logits(logits, 7));
  CHECK_THROWS(cross_entropy_from_logits(logits, -1));
}

TEST_CASE("every differentiable op passes finite-difference checks") {
  for (const auto& r : run_op_gradchecks(10, 99)) {
    INFO(r.name);
    CHECK(r.worst < 1e-4);
  }
}

TEST_CASE("forward and backward keep values finite") {
  Rng rng(31);
  Tensor a = Tensor::randn({4, 6}, rng, 2.0, true);
  Tensor b = Tensor::randn({6, 3}, rng, 2.0, true);
  Tape tape;
  Tensor out = softmax_rows(matmul(gelu(a), b));
  Tensor loss = mean(out);
  tape.backward(loss);
  CHECK(out.all_finite());
  for (double g : a.grad()) CHECK(std::isfinite(g));
  for (double g : b.grad()) CHECK(std::isfinite(g));
}
