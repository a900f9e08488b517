#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hopqa/dataset.hpp"
#include "hopqa/encoder.hpp"
#include "hopqa/tokenizer.hpp"

namespace hopqa {

struct SentenceMarker {
  int pos = 0;  // token position of the [UNK] marker
  std::string title;
  int sent_id = 0;
};

/// Encoded reader sequence: "[CLS] yes no context [SEP] question [SEP]" with
/// a [UNK] marker before every context sentence. Character ranges into the
/// original context string make predicted spans recoverable verbatim.
struct ReaderInput {
  std::string question_id;
  std::vector<int> token_ids;
  int yes_pos = 1;
  int no_pos = 2;
  int context_begin = 3;
  int context_end = 3;     // [context_begin, context_end)
  int question_begin = 0;  // [question_begin, question_end)
  int question_end = 0;
  std::vector<SentenceMarker> markers;
  std::string context_text;
  std::vector<std::pair<int, int>> char_range;  // per position; (-1,-1) if none
  std::vector<char> is_context_word;            // valid span position

  bool has_gold = false;
  int gold_start = -1;
  int gold_end = -1;
  std::vector<int> support_labels;  // per marker

  int length() const { return static_cast<int>(token_ids.size()); }
};

struct ReaderOutput {
  Tensor start_logits;    // L x 1
  Tensor end_logits;      // L x 1
  Tensor support_logits;  // markers x 1
};

struct Prediction {
  std::string answer;
  std::vector<SupportingFact> supporting_facts;
};

enum class CrossAttentionMode { Full, LnOnly, PlainOnly, None };

struct ReaderConfig {
  EncoderConfig encoder;
  CrossAttentionMode cross_attention = CrossAttentionMode::Full;
  std::array<double, 3> gamma = {1.0, 1.0, 1.0};  // start, end, supporting facts
  int max_answer_len = 30;
  double support_threshold = 0.5;
};

// Raised when a gold answer cannot be aligned to the tokenized context;
// callers skip the example with a warning.
struct LabelingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Builds the reader sequence from the documents at doc_indices (selection
// order). Over-long contexts lose whole sentences from the end, never
// question tokens. with_gold also aligns the answer span (first occurrence)
// and fills per-sentence support labels.
ReaderInput build_reader_input(const Tokenizer& tok, const Example& ex,
                               const std::vector<int>& doc_indices, int max_seq_len,
                               bool with_gold);

/// Multi-task reader: encoder, asymmetric cross-attention block, span heads
/// over every position, support head over sentence markers.
class ReaderModel {
 public:
  ReaderModel() = default;
  ReaderModel(const ReaderConfig& cfg, Rng& rng);

  ReaderOutput predict(const ReaderInput& in, const TrainCtx* ctx = nullptr) const;

  // x1 = LayerNorm(Hc + CA_a(Hc, Hq)); x2 = x1 + CA_b(x1, Hq).
  Tensor cross_attention_block(const Tensor& h_context, const Tensor& h_question) const;

  Tensor loss(const ReaderOutput& out, const ReaderInput& in) const;

  const ReaderConfig& config() const { return cfg_; }
  std::vector<NamedTensor> named_params(const std::string& prefix) const;
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  ReaderConfig cfg_;
  Encoder encoder_;
  AttentionParams ca_ln_, ca_plain_;  // bias-free projections
  Tensor ca_ln_gain_, ca_ln_bias_;
  Tensor start_w_, start_b_, end_w_, end_b_, sup_w_, sup_b_;
};

// Best valid (start, end) pair by summed logits: both ends on context words
// with end - start < max_answer_len, or the yes/no positions. Returns the
// recovered answer string.
std::string decode_answer(const ReaderOutput& out, const ReaderInput& in,
                          int max_answer_len);

std::vector<SupportingFact> decode_supporting_facts(const ReaderOutput& out,
                                                    const ReaderInput& in,
                                                    double threshold);

}  // namespace hopqa
