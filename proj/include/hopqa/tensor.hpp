#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hopqa/rng.hpp"

namespace hopqa {

using Shape = std::vector<int>;

std::string shape_str(const Shape& s);
std::size_t shape_numel(const Shape& s);

/// Dense 64-bit float tensor, row-major. Copies share storage; the gradient
/// buffer lives next to the values and is allocated on first use.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor randn(Shape shape, Rng& rng, double stddev,
                      bool requires_grad = false);

  bool defined() const { return d_ != nullptr; }
  const Shape& shape() const;
  int dim(int i) const;
  std::size_t numel() const;
  int rows() const { return dim(0); }
  int cols() const { return dim(1); }
  bool is_scalar() const { return defined() && numel() == 1; }
  double item() const;

  std::vector<double>& values();
  const std::vector<double>& values() const;
  double& at(std::size_t i) { return values()[i]; }
  double at(std::size_t i) const { return values()[i]; }
  double& at(int r, int c);
  double at(int r, int c) const;

  bool requires_grad() const;
  void set_requires_grad(bool rg);
  bool has_grad() const;
  std::vector<double>& grad();
  const std::vector<double>& grad() const;
  void ensure_grad();
  void zero_grad();

  bool all_finite() const;

  // Storage identity (two Tensors sharing one buffer compare equal).
  const void* id() const { return d_.get(); }

 private:
  struct Data {
    Shape shape;
    std::vector<double> v;
    std::vector<double> g;  // empty until ensure_grad()
    bool requires_grad = false;
  };
  std::shared_ptr<Data> d_;
};

/// Records differentiable operations in execution order. backward() replays
/// them in reverse, accumulating gradients additively. One tape is owned by
/// one thread; independent tapes may live on different threads.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* current();

  void record(std::function<void()> step);
  std::size_t size() const { return steps_.size(); }

  // Seeds d(loss)/d(loss) = 1 and replays the tape in reverse order.
  // Throws if loss is not a scalar.
  void backward(const Tensor& loss);

 private:
  std::vector<std::function<void()>> steps_;
  Tape* prev_ = nullptr;
};

// True when a tape is active and the tensor participates in autodiff.
bool track_grad(const Tensor& t);

}  // namespace hopqa
