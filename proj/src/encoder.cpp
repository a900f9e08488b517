#include "hopqa/encoder.hpp"

#include <stdexcept>

#include "hopqa/tokenizer.hpp"

namespace hopqa {

namespace {
constexpr double kInitStd = 0.02;
}

void EncoderConfig::validate() const {
  if (vocab_size <= 0) throw std::invalid_argument("encoder vocab_size must be positive");
  if (hidden_dim <= 0 || num_heads <= 0 || hidden_dim % num_heads != 0) {
    throw std::invalid_argument("hidden_dim " + std::to_string(hidden_dim) +
                                " must be divisible by num_heads " +
                                std::to_string(num_heads));
  }
  if (max_seq_len <= 0 || num_layers <= 0 || feed_forward_dim <= 0) {
    throw std::invalid_argument("encoder config has non-positive sizes");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("dropout_rate must lie in [0, 1)");
  }
}

Encoder::Encoder(const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  const int d = cfg_.hidden_dim;
  token_emb_ = Tensor::randn({cfg_.vocab_size, d}, rng, kInitStd, true);
  pos_emb_ = Tensor::randn({cfg_.max_seq_len, d}, rng, kInitStd, true);
  seg_emb_ = Tensor::randn({2, d}, rng, kInitStd, true);
  emb_ln_gain_ = Tensor::full({d}, 1.0, true);
  emb_ln_bias_ = Tensor::zeros({d}, true);
  for (int l = 0; l < cfg_.num_layers; ++l) {
    Layer layer;
    layer.attn.wq = Tensor::randn({d, d}, rng, kInitStd, true);
    layer.attn.bq = Tensor::zeros({d}, true);
    layer.attn.wk = Tensor::randn({d, d}, rng, kInitStd, true);
    layer.attn.bk = Tensor::zeros({d}, true);
    layer.attn.wv = Tensor::randn({d, d}, rng, kInitStd, true);
    layer.attn.bv = Tensor::zeros({d}, true);
    layer.attn.wo = Tensor::randn({d, d}, rng, kInitStd, true);
    layer.attn.bo = Tensor::zeros({d}, true);
    layer.ln1_gain = Tensor::full({d}, 1.0, true);
    layer.ln1_bias = Tensor::zeros({d}, true);
    layer.ffn_w1 = Tensor::randn({d, cfg_.feed_forward_dim}, rng, kInitStd, true);
    layer.ffn_b1 = Tensor::zeros({cfg_.feed_forward_dim}, true);
    layer.ffn_w2 = Tensor::randn({cfg_.feed_forward_dim, d}, rng, kInitStd, true);
    layer.ffn_b2 = Tensor::zeros({d}, true);
    layer.ln2_gain = Tensor::full({d}, 1.0, true);
    layer.ln2_bias = Tensor::zeros({d}, true);
    layers_.push_back(std::move(layer));
  }
  pool_w_ = Tensor::randn({d, d}, rng, kInitStd, true);
  pool_b_ = Tensor::zeros({d}, true);
}

Tensor Encoder::embed(const std::vector<int>& token_ids, const TrainCtx* ctx) const {
  const int L = static_cast<int>(token_ids.size());
  if (L == 0) throw std::invalid_argument("encode: empty token sequence");
  if (L > cfg_.max_seq_len) {
    throw std::invalid_argument("sequence length " + std::to_string(L) +
                                " exceeds max_seq_len " + std::to_string(cfg_.max_seq_len));
  }
  for (int id : token_ids) {
    if (id < 0 || id >= cfg_.vocab_size) {
      throw std::out_of_range("token id " + std::to_string(id) +
                              " outside vocabulary of size " +
                              std::to_string(cfg_.vocab_size));
    }
  }
  std::vector<int> positions(L), segments(L);
  int first_sep = L;
  for (int i = 0; i < L; ++i) {
    if (token_ids[i] == Tokenizer::kSep) {
      first_sep = i;
      break;
    }
  }
  for (int i = 0; i < L; ++i) {
    positions[i] = i;
    segments[i] = i < first_sep ? 0 : 1;
  }
  Tensor h = add(add(embedding(token_emb_, token_ids), embedding(pos_emb_, positions)),
                 embedding(seg_emb_, segments));
  h = layer_norm(h, emb_ln_gain_, emb_ln_bias_);
  if (ctx && ctx->rng && ctx->dropout_rate > 0.0) {
    h = dropout(h, ctx->dropout_rate, *ctx->rng);
  }
  return h;
}

Tensor Encoder::layer_forward(int layer, const Tensor& h,
                              const std::vector<int>& attention_mask,
                              const TrainCtx* ctx) const {
  const Layer& ly = layers_.at(layer);
  Tensor mask_bias = key_mask_bias(attention_mask);
  Tensor a = multi_head_attention(h, h, ly.attn, cfg_.num_heads, mask_bias);
  if (ctx && ctx->rng && ctx->dropout_rate > 0.0) a = dropout(a, ctx->dropout_rate, *ctx->rng);
  Tensor x = layer_norm(add(h, a), ly.ln1_gain, ly.ln1_bias);
  Tensor f = linear(gelu(linear(x, ly.ffn_w1, ly.ffn_b1)), ly.ffn_w2, ly.ffn_b2);
  if (ctx && ctx->rng && ctx->dropout_rate > 0.0) f = dropout(f, ctx->dropout_rate, *ctx->rng);
  return layer_norm(add(x, f), ly.ln2_gain, ly.ln2_bias);
}

EncoderOutput Encoder::encode(const std::vector<int>& token_ids,
                              const std::vector<int>& attention_mask,
                              const TrainCtx* ctx) const {
  if (attention_mask.size() != token_ids.size()) {
    throw std::invalid_argument("attention mask length " +
                                std::to_string(attention_mask.size()) +
                                " does not match sequence length " +
                                std::to_string(token_ids.size()));
  }
  Tensor h = embed(token_ids, ctx);
  for (int l = 0; l < cfg_.num_layers; ++l) h = layer_forward(l, h, attention_mask, ctx);
  Tensor cls = row_slice(h, 0, 1);
  Tensor pooled = tanh_t(linear(cls, pool_w_, pool_b_));
  return {h, pooled};
}

std::vector<NamedTensor> Encoder::named_params(const std::string& prefix,
                                               bool include_pooler) const {
  std::vector<NamedTensor> out;
  out.push_back({prefix + ".token_emb", token_emb_});
  out.push_back({prefix + ".pos_emb", pos_emb_});
  out.push_back({prefix + ".seg_emb", seg_emb_});
  out.push_back({prefix + ".emb_ln.gain", emb_ln_gain_});
  out.push_back({prefix + ".emb_ln.bias", emb_ln_bias_});
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::string lp = prefix + ".layer" + std::to_string(l);
    const Layer& ly = layers_[l];
    out.push_back({lp + ".attn.wq", ly.attn.wq});
    out.push_back({lp + ".attn.bq", ly.attn.bq});
    out.push_back({lp + ".attn.wk", ly.attn.wk});
    out.push_back({lp + ".attn.bk", ly.attn.bk});
    out.push_back({lp + ".attn.wv", ly.attn.wv});
    out.push_back({lp + ".attn.bv", ly.attn.bv});
    out.push_back({lp + ".attn.wo", ly.attn.wo});
    out.push_back({lp + ".attn.bo", ly.attn.bo});
    out.push_back({lp + ".ln1.gain", ly.ln1_gain});
    out.push_back({lp + ".ln1.bias", ly.ln1_bias});
    out.push_back({lp + ".ffn.w1", ly.ffn_w1});
    out.push_back({lp + ".ffn.b1", ly.ffn_b1});
    out.push_back({lp + ".ffn.w2", ly.ffn_w2});
    out.push_back({lp + ".ffn.b2", ly.ffn_b2});
    out.push_back({lp + ".ln2.gain", ly.ln2_gain});
    out.push_back({lp + ".ln2.bias", ly.ln2_bias});
  }
  if (include_pooler) {
    out.push_back({prefix + ".pool.w", pool_w_});
    out.push_back({prefix + ".pool.b", pool_b_});
  }
  return out;
}

}  // namespace hopqa
