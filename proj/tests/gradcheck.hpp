#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hopqa/ops.hpp"
#include "hopqa/rng.hpp"
#include "hopqa/tensor.hpp"

namespace hopqa::testing {

// Central finite-difference gradient oracle. fn must be a pure function of
// its inputs. Gradients of every requires_grad input are compared against
// (L(x+h) - L(x-h)) / 2h where L is a fixed random weighting of the output.
// Returns the worst relative error, |a - n| / max(1, |a|, |n|).
inline double max_gradcheck_error(
    const std::function<Tensor(const std::vector<Tensor>&)>& fn,
    std::vector<Tensor> inputs, Rng& rng, double h = 1e-5) {
  Tensor probe = fn(inputs);
  std::vector<double> weights(probe.numel());
  for (double& w : weights) w = rng.normal(0.0, 1.0);

  auto loss_value = [&]() {
    Tensor out = fn(inputs);
    double loss = 0.0;
    for (std::size_t i = 0; i < out.numel(); ++i) loss += weights[i] * out.at(i);
    return loss;
  };

  for (Tensor& t : inputs) t.zero_grad();
  {
    Tape tape;
    Tensor out = fn(inputs);
    Tensor w = Tensor::from(out.shape(), weights);
    tape.backward(sum(mul(out, w)));
  }

  double worst = 0.0;
  for (Tensor& t : inputs) {
    if (!t.requires_grad()) continue;
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const double keep = t.at(i);
      t.at(i) = keep + h;
      const double up = loss_value();
      t.at(i) = keep - h;
      const double down = loss_value();
      t.at(i) = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = t.has_grad() ? t.grad()[i] : 0.0;
      const double denom = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
      worst = std::max(worst, std::fabs(analytic - numeric) / denom);
    }
  }
  return worst;
}

inline Tensor random_tensor(Shape shape, Rng& rng, bool requires_grad = true,
                            double stddev = 1.0) {
  return Tensor::randn(std::move(shape), rng, stddev, requires_grad);
}

}  // namespace hopqa::testing
