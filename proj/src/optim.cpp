#include "hopqa/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace hopqa {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg, std::vector<bool> apply_decay)
    : params_(std::move(params)), cfg_(cfg), apply_decay_(std::move(apply_decay)) {
  if (apply_decay_.empty()) apply_decay_.assign(params_.size(), true);
  if (apply_decay_.size() != params_.size()) {
    throw std::invalid_argument("decay mask size does not match parameter count");
  }
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor& p : params_) {
    if (!p.requires_grad()) {
      throw std::invalid_argument("optimizer parameter does not require gradients");
    }
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

double Adam::learning_rate_at(long step) const {
  if (cfg_.total_steps <= 0) return cfg_.learning_rate;
  const long total = cfg_.total_steps;
  const long warmup = std::lround(cfg_.warmup_fraction * static_cast<double>(total));
  if (warmup > 0 && step <= warmup) {
    return cfg_.learning_rate * static_cast<double>(step) / static_cast<double>(warmup);
  }
  if (total == warmup) return cfg_.learning_rate;
  const double remaining = static_cast<double>(total - step) / static_cast<double>(total - warmup);
  return cfg_.learning_rate * std::max(0.0, remaining);
}

void Adam::step() {
  ++step_;
  const double lr = learning_rate_at(step_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = params_[pi];
    if (!p.has_grad()) {
      throw std::logic_error("optimizer step before backward: parameter " +
                             std::to_string(pi) + " has no gradient");
    }
    auto& w = p.values();
    const auto& g = p.grad();
    auto& m = m_[pi];
    auto& v = v_[pi];
    const double wd = apply_decay_[pi] ? cfg_.weight_decay : 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= lr * (mhat / (std::sqrt(vhat) + cfg_.epsilon) + wd * w[i]);
    }
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();  // allocated buffers only
}

std::vector<bool> decay_mask_from_names(const std::vector<std::string>& names) {
  std::vector<bool> mask;
  mask.reserve(names.size());
  for (const std::string& name : names) {
    const std::size_t dot = name.rfind('.');
    const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
    const bool no_decay = leaf == "gain" || leaf == "bias" ||
                          (!leaf.empty() && leaf[0] == 'b');
    mask.push_back(!no_decay);
  }
  return mask;
}

}  // namespace hopqa
