#pragma once

#include <vector>

#include "hopqa/tensor.hpp"

namespace hopqa {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;       // decoupled, applied directly to weights
  double warmup_fraction = 0.0;    // fraction of total_steps spent warming up
  long total_steps = 0;            // 0 disables the schedule (constant lr)
};

/// Adam with decoupled weight decay and a linear warmup / linear decay
/// learning-rate schedule. Gradients must be populated by backward() before
/// each step; the caller zeroes them between steps.
class Adam {
 public:
  // apply_decay marks which parameters receive weight decay (all of them
  // when empty); biases and layer-norm parameters conventionally do not.
  Adam(std::vector<Tensor> params, AdamConfig cfg, std::vector<bool> apply_decay = {});

  void step();
  void zero_grad();
  long step_count() const { return step_; }

  // Scheduled learning rate at a 1-based step index.
  double learning_rate_at(long step) const;

 private:
  std::vector<Tensor> params_;
  AdamConfig cfg_;
  std::vector<bool> apply_decay_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long step_ = 0;
};

// Decay mask from parameter names: biases and normalization gains/biases
// are exempt.
std::vector<bool> decay_mask_from_names(const std::vector<std::string>& names);

}  // namespace hopqa
