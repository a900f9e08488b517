#pragma once

#include <string>
#include <vector>

#include "hopqa/dataset.hpp"
#include "hopqa/encoder.hpp"
#include "hopqa/tokenizer.hpp"

namespace hopqa {

/// Ordered pair of selected documents with per-candidate relevance scores.
/// stage2_scores carries -1 at the lead document (no score is computed there).
struct SelectionResult {
  int p1_index = -1;
  int p2_index = -1;
  std::vector<double> stage1_scores;
  std::vector<double> stage2_scores;
};

// "[CLS] question [SEP] document [SEP]"; over-long inputs lose document
// tokens from the end, never question tokens.
std::vector<int> build_stage1_input(const Tokenizer& tok, const std::string& question,
                                    const Document& doc, int max_seq_len);

// "[CLS] question [SEP] lead-document [SEP] candidate [SEP]"; truncation
// trims the candidate first (down to one token), then the lead document.
std::vector<int> build_stage2_input(const Tokenizer& tok, const std::string& question,
                                    const Document& lead, const Document& candidate,
                                    int max_seq_len);

// Argmax with ties broken toward the lowest index.
int select_p1(const std::vector<double>& stage1_scores);
// Argmax over j != p1_index.
int select_p2(const std::vector<double>& stage2_scores, int p1_index);

/// Binary relevance scorer: sigmoid(linear(pooled CLS)).
class RelevanceModel {
 public:
  RelevanceModel() = default;
  RelevanceModel(const EncoderConfig& cfg, Rng& rng);

  // Differentiable relevance probability, shape [1 x 1].
  Tensor probability(const std::vector<int>& token_ids, const TrainCtx* ctx = nullptr) const;
  // Inference-mode score.
  double score(const std::vector<int>& token_ids) const;

  const EncoderConfig& config() const { return encoder_.config(); }
  std::vector<NamedTensor> named_params(const std::string& prefix) const;
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  Encoder encoder_;
  Tensor head_w_, head_b_;
};

// Eq.-style binary cross-entropy sums over (probability, label) pairs.
Tensor selector_stage1_loss(const std::vector<Tensor>& probs,
                            const std::vector<int>& labels);
// Same, with the lead document excluded by the indicator.
Tensor selector_stage2_loss(const std::vector<Tensor>& probs,
                            const std::vector<int>& labels, int p1_index);

/// Two-stage iterative document selection.
class Selector {
 public:
  Selector() = default;
  Selector(RelevanceModel stage1, RelevanceModel stage2, Tokenizer tokenizer);

  SelectionResult select(const Example& ex) const;
  // Stage-1 scores for every candidate (used alone by the top-2 baseline).
  std::vector<double> stage1_scores(const Example& ex) const;

  const RelevanceModel& stage1() const { return stage1_; }
  const RelevanceModel& stage2() const { return stage2_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }

 private:
  RelevanceModel stage1_, stage2_;
  Tokenizer tokenizer_;
};

}  // namespace hopqa
