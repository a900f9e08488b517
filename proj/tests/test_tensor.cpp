#include <doctest.h>

#include "hopqa/ops.hpp"
#include "hopqa/tensor.hpp"

using namespace hopqa;

TEST_CASE("tensor shape and data stay consistent") {
  Tensor t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.numel() == 6);
  CHECK(t.at(1, 2) == 6.0);
  CHECK_THROWS(Tensor::from({2, 2}, {1, 2, 3}));
  CHECK_THROWS(t.item());
}

TEST_CASE("grad buffer matches shape and accumulates") {
  Tensor x = Tensor::from({3}, {1, 2, 3}, true);
  CHECK_FALSE(x.has_grad());
  x.ensure_grad();
  CHECK(x.grad().size() == x.numel());

  {
    Tape tape;
    tape.backward(sum(x));
  }
  CHECK(x.grad() == std::vector<double>{1, 1, 1});
  {
    Tape tape;  // gradients from a second graph accumulate additively
    tape.backward(sum(x));
  }
  CHECK(x.grad() == std::vector<double>{2, 2, 2});
}

TEST_CASE("backward demands a scalar loss") {
  Tensor x = Tensor::from({2}, {1, 2}, true);
  Tape tape;
  Tensor y = scale(x, 2.0);
  CHECK_THROWS(tape.backward(y));
}

TEST_CASE("loss = sum(x) gives all-ones gradient; x*x at 3 gives 6") {
  Tensor x = Tensor::from({2, 2}, {1, -2, 0.5, 7}, true);
  {
    Tape tape;
    tape.backward(sum(x));
    for (double g : x.grad()) CHECK(g == 1.0);
  }
  Tensor w = Tensor::scalar(3.0, true);
  {
    Tape tape;
    tape.backward(sum(mul(w, w)));
    CHECK(w.grad()[0] == doctest::Approx(6.0).epsilon(1e-12));
  }
}

TEST_CASE("a value used twice doubles its gradient") {
  Tensor x = Tensor::from({2}, {1.5, -0.5}, true);
  Tape tape;
  Tensor y = add(x, x);
  tape.backward(sum(y));
  CHECK(x.grad() == std::vector<double>{2, 2});
}

TEST_CASE("no recording outside a tape") {
  Tensor x = Tensor::from({2}, {1, 2}, true);
  Tensor y = scale(x, 3.0);  // no tape active
  CHECK_FALSE(y.requires_grad());
}

TEST_CASE("independent tapes nest") {
  Tensor x = Tensor::scalar(2.0, true);
  Tape outer;
  Tensor a = scale(x, 3.0);
  {
    Tape inner;
    Tensor b = scale(x, 5.0);
    inner.backward(b);
    CHECK(x.grad()[0] == 5.0);
  }
  outer.backward(a);
  CHECK(x.grad()[0] == 8.0);
}
