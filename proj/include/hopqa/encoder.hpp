#pragma once

#include <string>
#include <vector>

#include "hopqa/attention.hpp"
#include "hopqa/checkpoint.hpp"
#include "hopqa/ops.hpp"
#include "hopqa/rng.hpp"
#include "hopqa/tensor.hpp"

namespace hopqa {

struct EncoderConfig {
  int vocab_size = 0;
  int max_seq_len = 256;
  int hidden_dim = 64;
  int num_layers = 2;
  int num_heads = 4;
  int feed_forward_dim = 128;
  double dropout_rate = 0.1;

  int head_dim() const { return hidden_dim / num_heads; }
  void validate() const;
};

struct EncoderOutput {
  Tensor hidden_states;  // L x d
  Tensor pooled_cls;     // 1 x d, tanh(affine(h_0))
};

/// Dropout/randomness context for a forward pass. Inference passes nullptr
/// and gets a deterministic pass.
struct TrainCtx {
  Rng* rng = nullptr;
  double dropout_rate = 0.0;
};

/// Small trained-from-scratch transformer encoder: learned token, absolute
/// position and segment embeddings, post-norm layers, tanh CLS pooler.
/// Segment B starts at the first [SEP].
class Encoder {
 public:
  Encoder() = default;
  Encoder(const EncoderConfig& cfg, Rng& rng);

  const EncoderConfig& config() const { return cfg_; }

  EncoderOutput encode(const std::vector<int>& token_ids,
                       const std::vector<int>& attention_mask,
                       const TrainCtx* ctx = nullptr) const;

  // One post-norm transformer layer: MHA + residual + LN, FFN + residual + LN.
  Tensor layer_forward(int layer, const Tensor& h, const std::vector<int>& attention_mask,
                       const TrainCtx* ctx = nullptr) const;

  // include_pooler: the CLS pooler only matters to models that read
  // pooled_cls; span-style heads leave it untrained and unsaved.
  std::vector<NamedTensor> named_params(const std::string& prefix,
                                        bool include_pooler = true) const;

 private:
  struct Layer {
    AttentionParams attn;
    Tensor ln1_gain, ln1_bias;
    Tensor ffn_w1, ffn_b1, ffn_w2, ffn_b2;
    Tensor ln2_gain, ln2_bias;
  };

  Tensor embed(const std::vector<int>& token_ids, const TrainCtx* ctx) const;

  EncoderConfig cfg_;
  Tensor token_emb_, pos_emb_, seg_emb_;
  Tensor emb_ln_gain_, emb_ln_bias_;
  std::vector<Layer> layers_;
  Tensor pool_w_, pool_b_;
};

}  // namespace hopqa
