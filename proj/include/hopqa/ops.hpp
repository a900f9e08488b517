#pragma once

#include <vector>

#include "hopqa/rng.hpp"
#include "hopqa/tensor.hpp"

namespace hopqa {

enum class Reduction { Sum, Mean };

// Elementwise / structural -------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
// Sum of same-shape tensors.
Tensor add_n(const std::vector<Tensor>& xs);
// a: [m x n], v: n values (shape [n] or [1 x n]); adds v to every row.
Tensor add_row_vector(const Tensor& a, const Tensor& v);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor row_slice(const Tensor& a, int r0, int r1);
Tensor col_slice(const Tensor& a, int c0, int c1);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor reshape(const Tensor& a, Shape shape);
// Copy of base with rows [r0, r0+patch.rows()) replaced by patch.
Tensor paste_rows(const Tensor& base, const Tensor& patch, int r0);
// Rows of a at the given indices (duplicates allowed).
Tensor gather_rows(const Tensor& a, const std::vector<int>& idx);
// Embedding lookup: table [V x d], ids in [0, V).
Tensor embedding(const Tensor& table, const std::vector<int>& ids);

// Nonlinearities -----------------------------------------------------------

Tensor gelu(const Tensor& x);
Tensor tanh_t(const Tensor& x);
Tensor sigmoid(const Tensor& x);
// Row-wise softmax of a 2-D tensor, stabilized by row-max subtraction.
Tensor softmax_rows(const Tensor& x);
// Per-row normalization over the last dim followed by gain/bias.
// gain and bias hold d values where d = x.cols(). Variance epsilon 1e-5.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias);
// Inverted dropout; identity when rate == 0.
Tensor dropout(const Tensor& x, double rate, Rng& rng);

// Reductions / losses ------------------------------------------------------

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
// -log softmax(logits)[target]; logits treated as a flat vector.
Tensor cross_entropy_from_logits(const Tensor& logits, int target);
// -(t log p + (1-t) log(1-p)) with p clamped to [1e-7, 1 - 1e-7],
// reduced over all elements. targets must hold 0/1 values.
Tensor binary_cross_entropy(const Tensor& probs, const std::vector<double>& targets,
                            Reduction reduction = Reduction::Sum);

// Composite helper: x [m x din] * w [din x dout] + b.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

}  // namespace hopqa
