#pragma once

#include <vector>

#include "hopqa/ops.hpp"
#include "hopqa/tensor.hpp"

namespace hopqa {

/// Projection weights of one multi-head attention module. Biases are
/// optional (leave them undefined for bias-free projections).
struct AttentionParams {
  Tensor wq, wk, wv, wo;
  Tensor bq, bk, bv, bo;
};

// Additive score bias per key: 0 where mask is 1, large negative where 0.
// Keys with mask 0 receive zero attention weight.
Tensor key_mask_bias(const std::vector<int>& mask);

// Multi-head scaled dot-product attention. Queries come from queries_in
// [Lq x d], keys/values from keys_in [Lk x d]; d must be divisible by
// num_heads. key_bias (optional, [1 x Lk]) is added to every score row.
Tensor multi_head_attention(const Tensor& queries_in, const Tensor& keys_in,
                            const AttentionParams& p, int num_heads,
                            const Tensor& key_bias = Tensor());

}  // namespace hopqa
