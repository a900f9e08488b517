#include "hopqa/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace hopqa {

namespace {
constexpr double kMaskedScore = -1e30;
}

Tensor key_mask_bias(const std::vector<int>& mask) {
  Tensor bias = Tensor::zeros({1, static_cast<int>(mask.size())});
  for (std::size_t i = 0; i < mask.size(); ++i) {
    bias.at(i) = mask[i] ? 0.0 : kMaskedScore;
  }
  return bias;
}

Tensor multi_head_attention(const Tensor& queries_in, const Tensor& keys_in,
                            const AttentionParams& p, int num_heads,
                            const Tensor& key_bias) {
  const int d = queries_in.cols();
  if (keys_in.cols() != d) {
    throw std::invalid_argument("attention: query dim " + std::to_string(d) +
                                " vs key dim " + std::to_string(keys_in.cols()));
  }
  if (num_heads <= 0 || d % num_heads != 0) {
    throw std::invalid_argument("attention: hidden dim " + std::to_string(d) +
                                " not divisible by " + std::to_string(num_heads) + " heads");
  }
  const int dk = d / num_heads;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor q = matmul(queries_in, p.wq);
  Tensor k = matmul(keys_in, p.wk);
  Tensor v = matmul(keys_in, p.wv);
  if (p.bq.defined()) q = add_row_vector(q, p.bq);
  if (p.bk.defined()) k = add_row_vector(k, p.bk);
  if (p.bv.defined()) v = add_row_vector(v, p.bv);

  std::vector<Tensor> heads;
  heads.reserve(num_heads);
  for (int h = 0; h < num_heads; ++h) {
    Tensor qh = col_slice(q, h * dk, (h + 1) * dk);
    Tensor kh = col_slice(k, h * dk, (h + 1) * dk);
    Tensor vh = col_slice(v, h * dk, (h + 1) * dk);
    Tensor scores = scale(matmul(qh, transpose(kh)), inv_sqrt_dk);
    if (key_bias.defined()) scores = add_row_vector(scores, key_bias);
    heads.push_back(matmul(softmax_rows(scores), vh));
  }
  Tensor merged = concat_cols(heads);
  Tensor out = matmul(merged, p.wo);
  if (p.bo.defined()) out = add_row_vector(out, p.bo);
  return out;
}

}  // namespace hopqa
