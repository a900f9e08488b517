#include "hopqa/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace hopqa {

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += " x ";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) {
    if (d < 0) throw std::invalid_argument("negative dimension in shape " + shape_str(s));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  Tensor t;
  t.d_ = std::make_shared<Data>();
  t.d_->v.assign(shape_numel(shape), value);
  t.d_->shape = std::move(shape);
  t.d_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw std::invalid_argument("tensor data size " + std::to_string(values.size()) +
                                " does not match shape " + shape_str(shape));
  }
  Tensor t;
  t.d_ = std::make_shared<Data>();
  t.d_->shape = std::move(shape);
  t.d_->v = std::move(values);
  t.d_->requires_grad = requires_grad;
  return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from({1}, {value}, requires_grad);
}

Tensor Tensor::randn(Shape shape, Rng& rng, double stddev, bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (double& x : t.values()) x = rng.normal(0.0, stddev);
  return t;
}

const Shape& Tensor::shape() const {
  if (!d_) throw std::logic_error("use of undefined tensor");
  return d_->shape;
}

int Tensor::dim(int i) const {
  const Shape& s = shape();
  if (i < 0 || i >= static_cast<int>(s.size())) {
    throw std::out_of_range("dim " + std::to_string(i) + " of shape " + shape_str(s));
  }
  return s[i];
}

std::size_t Tensor::numel() const { return values().size(); }

double Tensor::item() const {
  if (!is_scalar()) {
    throw std::invalid_argument("item() on non-scalar tensor of shape " + shape_str(shape()));
  }
  return values()[0];
}

std::vector<double>& Tensor::values() {
  if (!d_) throw std::logic_error("use of undefined tensor");
  return d_->v;
}

const std::vector<double>& Tensor::values() const {
  if (!d_) throw std::logic_error("use of undefined tensor");
  return d_->v;
}

double& Tensor::at(int r, int c) {
  return d_->v[static_cast<std::size_t>(r) * dim(1) + c];
}

double Tensor::at(int r, int c) const {
  return d_->v[static_cast<std::size_t>(r) * dim(1) + c];
}

bool Tensor::requires_grad() const { return d_ && d_->requires_grad; }

void Tensor::set_requires_grad(bool rg) {
  if (!d_) throw std::logic_error("use of undefined tensor");
  d_->requires_grad = rg;
}

bool Tensor::has_grad() const { return d_ && !d_->g.empty(); }

std::vector<double>& Tensor::grad() {
  if (!has_grad()) throw std::logic_error("gradient not populated; run backward first");
  return d_->g;
}

const std::vector<double>& Tensor::grad() const {
  if (!has_grad()) throw std::logic_error("gradient not populated; run backward first");
  return d_->g;
}

void Tensor::ensure_grad() {
  if (!d_) throw std::logic_error("use of undefined tensor");
  if (d_->g.empty()) d_->g.assign(d_->v.size(), 0.0);
}

void Tensor::zero_grad() {
  if (d_ && !d_->g.empty()) d_->g.assign(d_->v.size(), 0.0);
}

bool Tensor::all_finite() const {
  for (double x : values()) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

namespace {
thread_local Tape* g_current_tape = nullptr;
}

Tape::Tape() {
  prev_ = g_current_tape;
  g_current_tape = this;
}

Tape::~Tape() { g_current_tape = prev_; }

Tape* Tape::current() { return g_current_tape; }

void Tape::record(std::function<void()> step) { steps_.push_back(std::move(step)); }

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || !loss.is_scalar()) {
    throw std::invalid_argument("backward requires a scalar loss");
  }
  Tensor seed = loss;
  seed.ensure_grad();
  seed.grad()[0] += 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

bool track_grad(const Tensor& t) {
  return Tape::current() != nullptr && t.requires_grad();
}

}  // namespace hopqa
