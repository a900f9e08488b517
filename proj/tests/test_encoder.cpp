#include <doctest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "hopqa/encoder.hpp"
#include "hopqa/tokenizer.hpp"

using namespace hopqa;

namespace {

EncoderConfig tiny_config(int vocab = 20) {
  EncoderConfig cfg;
  cfg.vocab_size = vocab;
  cfg.max_seq_len = 16;
  cfg.hidden_dim = 8;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.feed_forward_dim = 16;
  cfg.dropout_rate = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("encode returns L x d hidden states and a pooled CLS") {
  Rng rng(1);
  Encoder enc(tiny_config(), rng);
  std::vector<int> ids = {1, 7, 8, 9, 2};
  std::vector<int> mask(ids.size(), 1);
  EncoderOutput out = enc.encode(ids, mask);
  CHECK(out.hidden_states.shape() == Shape{5, 8});
  CHECK(out.pooled_cls.shape() == Shape{1, 8});
  for (std::size_t i = 0; i < out.pooled_cls.numel(); ++i) {
    CHECK(std::fabs(out.pooled_cls.at(i)) <= 1.0);
  }
}

TEST_CASE("vocabulary and length contracts") {
  Rng rng(2);
  Encoder enc(tiny_config(), rng);
  std::vector<int> bad_id = {1, 25, 2};
  CHECK_THROWS_AS(enc.encode(bad_id, {1, 1, 1}), std::out_of_range);
  std::vector<int> too_long(17, 7);
  CHECK_THROWS_AS(enc.encode(too_long, std::vector<int>(17, 1)), std::invalid_argument);
  CHECK_THROWS(enc.encode({1, 7}, {1}));  // mask length mismatch
}

TEST_CASE("padding invariance: masked tail never changes real positions") {
  Rng rng(3);
  Encoder enc(tiny_config(), rng);
  std::vector<int> ids = {1, 7, 9, 11, 2};
  std::vector<int> mask(ids.size(), 1);
  Tensor base = enc.encode(ids, mask).hidden_states;

  std::vector<int> padded = ids;
  std::vector<int> padded_mask = mask;
  for (int i = 0; i < 4; ++i) {
    padded.push_back(Tokenizer::kPad);
    padded_mask.push_back(0);
  }
  Tensor with_pad = enc.encode(padded, padded_mask).hidden_states;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK(std::fabs(base.at(i, j) - with_pad.at(i, j)) < 1e-9);
    }
  }

  // Rewriting token ids under mask 0 is invisible as well.
  std::vector<int> swapped = padded;
  swapped[6] = 9;
  swapped[8] = 13;
  Tensor with_swap = enc.encode(swapped, padded_mask).hidden_states;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK(std::fabs(base.at(i, j) - with_swap.at(i, j)) < 1e-9);
    }
  }
}

TEST_CASE("changing one unmasked token changes the hidden states") {
  Rng rng(4);
  Encoder enc(tiny_config(), rng);
  std::vector<int> a = {1, 7, 9, 2};
  std::vector<int> b = {1, 7, 10, 2};
  std::vector<int> mask(4, 1);
  Tensor ha = enc.encode(a, mask).hidden_states;
  Tensor hb = enc.encode(b, mask).hidden_states;
  double max_diff = 0.0;
  for (std::size_t i = 0; i < ha.numel(); ++i) {
    max_diff = std::max(max_diff, std::fabs(ha.at(i) - hb.at(i)));
  }
  CHECK(max_diff > 0.0);
}

TEST_CASE("inference is bit-identical across calls") {
  Rng rng(5);
  Encoder enc(tiny_config(), rng);
  std::vector<int> ids = {1, 12, 13, 14, 2, 7};
  std::vector<int> mask(ids.size(), 1);
  Tensor h1 = enc.encode(ids, mask).hidden_states;
  Tensor h2 = enc.encode(ids, mask).hidden_states;
  CHECK(h1.values() == h2.values());
}

TEST_CASE("dropout is active only with a training context") {
  EncoderConfig cfg = tiny_config();
  cfg.dropout_rate = 0.5;
  Rng rng(6);
  Encoder enc(cfg, rng);
  std::vector<int> ids = {1, 7, 9, 2};
  std::vector<int> mask(4, 1);
  Tensor inference = enc.encode(ids, mask).hidden_states;
  Tensor inference2 = enc.encode(ids, mask).hidden_states;
  CHECK(inference.values() == inference2.values());

  Rng dropout_rng(7);
  TrainCtx ctx{&dropout_rng, cfg.dropout_rate};
  Tensor trained = enc.encode(ids, mask, &ctx).hidden_states;
  CHECK(trained.values() != inference.values());
}

TEST_CASE("encoder layer gradients match finite differences") {
  Rng rng(8);
  Encoder enc(tiny_config(), rng);
  std::vector<int> mask(4, 1);
  const double err = hopqa::testing::max_gradcheck_error(
      [&](const std::vector<Tensor>& in) { return enc.layer_forward(0, in[0], mask); },
      {hopqa::testing::random_tensor({4, 8}, rng)}, rng);
  CHECK(err < 1e-4);
}

TEST_CASE("full encode pass gradients reach the embeddings") {
  Rng rng(9);
  Encoder enc(tiny_config(), rng);
  std::vector<int> ids = {1, 7, 9, 2};
  std::vector<int> mask(4, 1);
  Tape tape;
  EncoderOutput out = enc.encode(ids, mask);
  tape.backward(mean(out.hidden_states));
  int with_grad = 0;
  for (const NamedTensor& nt : enc.named_params("enc")) {
    with_grad += nt.tensor.has_grad() ? 1 : 0;
  }
  CHECK(with_grad > 10);
}
