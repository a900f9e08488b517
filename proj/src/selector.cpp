#include "hopqa/selector.hpp"

#include <algorithm>
#include <stdexcept>

namespace hopqa {

namespace {

std::vector<int> doc_token_ids(const Tokenizer& tok, const Document& doc) {
  std::vector<int> ids;
  for (const std::string& s : doc.sentences) {
    std::vector<int> sent = tok.encode(s);
    ids.insert(ids.end(), sent.begin(), sent.end());
  }
  return ids;
}

}  // namespace

std::vector<int> build_stage1_input(const Tokenizer& tok, const std::string& question,
                                    const Document& doc, int max_seq_len) {
  std::vector<int> q = tok.encode(question);
  if (q.empty()) throw std::invalid_argument("empty question");
  std::vector<int> d = doc_token_ids(tok, doc);
  const int fixed = static_cast<int>(q.size()) + 3;  // [CLS] q [SEP] ... [SEP]
  if (fixed > max_seq_len) {
    throw std::invalid_argument("question of " + std::to_string(q.size()) +
                                " tokens does not fit max_seq_len " +
                                std::to_string(max_seq_len));
  }
  const int doc_budget = max_seq_len - fixed;
  if (static_cast<int>(d.size()) > doc_budget) d.resize(doc_budget);
  std::vector<int> ids;
  ids.reserve(fixed + d.size());
  ids.push_back(Tokenizer::kCls);
  ids.insert(ids.end(), q.begin(), q.end());
  ids.push_back(Tokenizer::kSep);
  ids.insert(ids.end(), d.begin(), d.end());
  ids.push_back(Tokenizer::kSep);
  return ids;
}

std::vector<int> build_stage2_input(const Tokenizer& tok, const std::string& question,
                                    const Document& lead, const Document& candidate,
                                    int max_seq_len) {
  if (lead.title == candidate.title) {
    throw std::invalid_argument("stage-2 candidate equals the lead document '" +
                                lead.title + "'");
  }
  std::vector<int> q = tok.encode(question);
  if (q.empty()) throw std::invalid_argument("empty question");
  std::vector<int> d1 = doc_token_ids(tok, lead);
  std::vector<int> d2 = doc_token_ids(tok, candidate);
  const int fixed = static_cast<int>(q.size()) + 4;  // [CLS] q [SEP] d1 [SEP] d2 [SEP]
  if (fixed + 1 > max_seq_len) {
    throw std::invalid_argument("question of " + std::to_string(q.size()) +
                                " tokens does not fit max_seq_len " +
                                std::to_string(max_seq_len));
  }
  int over = fixed + static_cast<int>(d1.size() + d2.size()) - max_seq_len;
  if (over > 0) {
    // Candidate shrinks first, but keeps at least one token.
    const int cut2 = std::min(over, static_cast<int>(d2.size()) - 1);
    if (cut2 > 0) {
      d2.resize(d2.size() - cut2);
      over -= cut2;
    }
    if (over > 0) {
      if (over >= static_cast<int>(d1.size())) {
        throw std::invalid_argument("stage-2 input cannot fit max_seq_len " +
                                    std::to_string(max_seq_len));
      }
      d1.resize(d1.size() - over);
    }
  }
  std::vector<int> ids;
  ids.push_back(Tokenizer::kCls);
  ids.insert(ids.end(), q.begin(), q.end());
  ids.push_back(Tokenizer::kSep);
  ids.insert(ids.end(), d1.begin(), d1.end());
  ids.push_back(Tokenizer::kSep);
  ids.insert(ids.end(), d2.begin(), d2.end());
  ids.push_back(Tokenizer::kSep);
  return ids;
}

int select_p1(const std::vector<double>& stage1_scores) {
  if (stage1_scores.empty()) throw std::invalid_argument("select_p1: no scores");
  int best = 0;
  for (int j = 1; j < static_cast<int>(stage1_scores.size()); ++j) {
    if (stage1_scores[j] > stage1_scores[best]) best = j;
  }
  return best;
}

int select_p2(const std::vector<double>& stage2_scores, int p1_index) {
  int best = -1;
  for (int j = 0; j < static_cast<int>(stage2_scores.size()); ++j) {
    if (j == p1_index) continue;
    if (best < 0 || stage2_scores[j] > stage2_scores[best]) best = j;
  }
  if (best < 0) throw std::invalid_argument("select_p2: no candidate besides the lead");
  return best;
}

RelevanceModel::RelevanceModel(const EncoderConfig& cfg, Rng& rng) : encoder_(cfg, rng) {
  head_w_ = Tensor::zeros({cfg.hidden_dim, 1}, true);
  head_b_ = Tensor::zeros({1}, true);
}

Tensor RelevanceModel::probability(const std::vector<int>& token_ids,
                                   const TrainCtx* ctx) const {
  std::vector<int> mask(token_ids.size(), 1);
  EncoderOutput out = encoder_.encode(token_ids, mask, ctx);
  return sigmoid(linear(out.pooled_cls, head_w_, head_b_));
}

double RelevanceModel::score(const std::vector<int>& token_ids) const {
  return probability(token_ids).item();
}

std::vector<NamedTensor> RelevanceModel::named_params(const std::string& prefix) const {
  std::vector<NamedTensor> out = encoder_.named_params(prefix + ".encoder");
  out.push_back({prefix + ".head.w", head_w_});
  out.push_back({prefix + ".head.b", head_b_});
  return out;
}

void RelevanceModel::save(const std::string& path) const {
  save_checkpoint(path, named_params("selector"));
}

void RelevanceModel::load(const std::string& path) {
  std::vector<NamedTensor> params = named_params("selector");
  load_checkpoint(path, params);
}

Tensor selector_stage1_loss(const std::vector<Tensor>& probs,
                            const std::vector<int>& labels) {
  if (probs.size() != labels.size()) {
    throw std::invalid_argument("stage-1 loss: " + std::to_string(probs.size()) +
                                " probabilities vs " + std::to_string(labels.size()) +
                                " labels");
  }
  std::vector<Tensor> terms;
  terms.reserve(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) {
    terms.push_back(binary_cross_entropy(probs[j], {static_cast<double>(labels[j])}));
  }
  return add_n(terms);
}

Tensor selector_stage2_loss(const std::vector<Tensor>& probs,
                            const std::vector<int>& labels, int p1_index) {
  if (probs.size() != labels.size()) {
    throw std::invalid_argument("stage-2 loss: " + std::to_string(probs.size()) +
                                " probabilities vs " + std::to_string(labels.size()) +
                                " labels");
  }
  std::vector<Tensor> terms;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (static_cast<int>(j) == p1_index) continue;  // indicator
    terms.push_back(binary_cross_entropy(probs[j], {static_cast<double>(labels[j])}));
  }
  if (terms.empty()) throw std::invalid_argument("stage-2 loss: no candidates besides lead");
  return add_n(terms);
}

Selector::Selector(RelevanceModel stage1, RelevanceModel stage2, Tokenizer tokenizer)
    : stage1_(std::move(stage1)), stage2_(std::move(stage2)),
      tokenizer_(std::move(tokenizer)) {}

std::vector<double> Selector::stage1_scores(const Example& ex) const {
  const int max_len = stage1_.config().max_seq_len;
  std::vector<double> scores;
  scores.reserve(ex.documents.size());
  for (const Document& doc : ex.documents) {
    scores.push_back(stage1_.score(build_stage1_input(tokenizer_, ex.question, doc, max_len)));
  }
  return scores;
}

SelectionResult Selector::select(const Example& ex) const {
  const int m = static_cast<int>(ex.documents.size());
  if (m < 2) {
    throw std::invalid_argument("selection needs at least 2 candidate documents, got " +
                                std::to_string(m));
  }
  SelectionResult result;
  result.stage1_scores = stage1_scores(ex);
  result.p1_index = select_p1(result.stage1_scores);
  result.stage2_scores.assign(m, -1.0);
  const int max_len = stage2_.config().max_seq_len;
  const Document& lead = ex.documents[result.p1_index];
  for (int j = 0; j < m; ++j) {
    if (j == result.p1_index) continue;
    std::vector<int> ids =
        build_stage2_input(tokenizer_, ex.question, lead, ex.documents[j], max_len);
    result.stage2_scores[j] = stage2_.score(ids);
  }
  result.p2_index = select_p2(result.stage2_scores, result.p1_index);
  return result;
}

}  // namespace hopqa
