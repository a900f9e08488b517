#include "hopqa/reader.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hopqa {

namespace {

constexpr double kInitStd = 0.02;

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double sigmoid_scalar(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

struct TokenizedSentence {
  std::string title;
  int sent_id = 0;
  std::vector<WordToken> tokens;  // offsets into the sentence string
  std::string text;
};

}  // namespace

ReaderInput build_reader_input(const Tokenizer& tok, const Example& ex,
                               const std::vector<int>& doc_indices, int max_seq_len,
                               bool with_gold) {
  std::vector<int> q_ids = tok.encode(ex.question);
  if (q_ids.empty()) throw std::invalid_argument("empty question");

  std::vector<TokenizedSentence> sentences;
  for (int di : doc_indices) {
    if (di < 0 || di >= static_cast<int>(ex.documents.size())) {
      throw std::out_of_range("document index " + std::to_string(di) +
                              " out of range for example " + ex.id);
    }
    const Document& doc = ex.documents[di];
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      TokenizedSentence ts;
      ts.title = doc.title;
      ts.sent_id = static_cast<int>(s);
      ts.text = doc.sentences[s];
      ts.tokens = word_tokenize(ts.text);
      sentences.push_back(std::move(ts));
    }
  }

  // [CLS] yes no ... [SEP] question [SEP]
  const int fixed = 3 + 1 + static_cast<int>(q_ids.size()) + 1;
  if (fixed > max_seq_len) {
    throw std::invalid_argument("question of " + std::to_string(q_ids.size()) +
                                " tokens does not fit max_seq_len " +
                                std::to_string(max_seq_len));
  }
  int budget = max_seq_len - fixed;
  std::size_t keep = 0;
  while (keep < sentences.size()) {
    const int cost = 1 + static_cast<int>(sentences[keep].tokens.size());
    if (cost > budget) break;
    budget -= cost;
    ++keep;
  }
  sentences.resize(keep);

  ReaderInput in;
  in.question_id = ex.id;
  in.token_ids = {Tokenizer::kCls, Tokenizer::kYes, Tokenizer::kNo};
  in.char_range.assign(3, {-1, -1});
  in.is_context_word.assign(3, 0);
  in.context_begin = 3;

  for (const TokenizedSentence& ts : sentences) {
    in.markers.push_back({static_cast<int>(in.token_ids.size()), ts.title, ts.sent_id});
    in.token_ids.push_back(Tokenizer::kUnk);
    in.char_range.push_back({-1, -1});
    in.is_context_word.push_back(0);
    const int base = static_cast<int>(in.context_text.size());
    for (const WordToken& w : ts.tokens) {
      in.token_ids.push_back(tok.id_of(w.text));
      in.char_range.push_back({base + w.begin, base + w.end});
      in.is_context_word.push_back(1);
    }
    in.context_text += ts.text;
    in.context_text += ' ';
  }
  in.context_end = static_cast<int>(in.token_ids.size());

  in.token_ids.push_back(Tokenizer::kSep);
  in.char_range.push_back({-1, -1});
  in.is_context_word.push_back(0);
  in.question_begin = static_cast<int>(in.token_ids.size());
  for (int id : q_ids) {
    in.token_ids.push_back(id);
    in.char_range.push_back({-1, -1});
    in.is_context_word.push_back(0);
  }
  in.question_end = static_cast<int>(in.token_ids.size());
  in.token_ids.push_back(Tokenizer::kSep);
  in.char_range.push_back({-1, -1});
  in.is_context_word.push_back(0);

  if (!with_gold) return in;

  in.has_gold = true;
  in.support_labels.assign(in.markers.size(), 0);
  for (std::size_t m = 0; m < in.markers.size(); ++m) {
    for (const SupportingFact& sf : ex.supporting_facts) {
      if (sf.title == in.markers[m].title && sf.sent_id == in.markers[m].sent_id) {
        in.support_labels[m] = 1;
      }
    }
  }

  if (ex.answer_type == AnswerType::Yes) {
    in.gold_start = in.gold_end = in.yes_pos;
    return in;
  }
  if (ex.answer_type == AnswerType::No) {
    in.gold_start = in.gold_end = in.no_pos;
    return in;
  }

  // First occurrence of the answer that aligns with token boundaries.
  const std::string haystack = lowercase(in.context_text);
  const std::string needle = lowercase(ex.answer);
  if (needle.empty()) throw LabelingError("example " + ex.id + " has an empty answer");
  std::size_t from = 0;
  while (true) {
    const std::size_t at = haystack.find(needle, from);
    if (at == std::string::npos) {
      throw LabelingError("answer '" + ex.answer + "' not found in context of example " +
                          ex.id);
    }
    const int span_begin = static_cast<int>(at);
    const int span_end = static_cast<int>(at + needle.size());
    int ts = -1, te = -1;
    for (int p = in.context_begin; p < in.context_end; ++p) {
      if (in.char_range[p].first == span_begin) ts = p;
      if (in.char_range[p].second == span_end) te = p;
    }
    if (ts >= 0 && te >= ts) {
      in.gold_start = ts;
      in.gold_end = te;
      return in;
    }
    from = at + 1;
  }
}

ReaderModel::ReaderModel(const ReaderConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.encoder.validate();
  const int d = cfg_.encoder.hidden_dim;
  auto proj = [&]() { return Tensor::randn({d, d}, rng, kInitStd, true); };
  encoder_ = Encoder(cfg_.encoder, rng);
  ca_ln_ = {proj(), proj(), proj(), proj(), Tensor(), Tensor(), Tensor(), Tensor()};
  ca_plain_ = {proj(), proj(), proj(), proj(), Tensor(), Tensor(), Tensor(), Tensor()};
  ca_ln_gain_ = Tensor::full({d}, 1.0, true);
  ca_ln_bias_ = Tensor::zeros({d}, true);
  start_w_ = Tensor::randn({d, 1}, rng, kInitStd, true);
  start_b_ = Tensor::zeros({1}, true);
  end_w_ = Tensor::randn({d, 1}, rng, kInitStd, true);
  end_b_ = Tensor::zeros({1}, true);
  sup_w_ = Tensor::randn({d, 1}, rng, kInitStd, true);
  sup_b_ = Tensor::zeros({1}, true);
}

Tensor ReaderModel::cross_attention_block(const Tensor& h_context,
                                          const Tensor& h_question) const {
  const int heads = cfg_.encoder.num_heads;
  switch (cfg_.cross_attention) {
    case CrossAttentionMode::None:
      return h_context;
    case CrossAttentionMode::LnOnly:
      return layer_norm(add(h_context, multi_head_attention(h_context, h_question,
                                                            ca_ln_, heads)),
                        ca_ln_gain_, ca_ln_bias_);
    case CrossAttentionMode::PlainOnly:
      return add(h_context,
                 multi_head_attention(h_context, h_question, ca_plain_, heads));
    case CrossAttentionMode::Full:
    default: {
      Tensor x1 = layer_norm(add(h_context, multi_head_attention(h_context, h_question,
                                                                 ca_ln_, heads)),
                             ca_ln_gain_, ca_ln_bias_);
      return add(x1, multi_head_attention(x1, h_question, ca_plain_, heads));
    }
  }
}

ReaderOutput ReaderModel::predict(const ReaderInput& in, const TrainCtx* ctx) const {
  std::vector<int> mask(in.token_ids.size(), 1);
  EncoderOutput enc = encoder_.encode(in.token_ids, mask, ctx);
  Tensor full = enc.hidden_states;
  const bool has_context = in.context_end > in.context_begin;
  const bool has_question = in.question_end > in.question_begin;
  if (cfg_.cross_attention != CrossAttentionMode::None && has_context && has_question) {
    Tensor hc = row_slice(full, in.context_begin, in.context_end);
    Tensor hq = row_slice(full, in.question_begin, in.question_end);
    full = paste_rows(full, cross_attention_block(hc, hq), in.context_begin);
  }
  ReaderOutput out;
  out.start_logits = linear(full, start_w_, start_b_);
  out.end_logits = linear(full, end_w_, end_b_);
  if (in.markers.empty()) {
    out.support_logits = Tensor::zeros({0, 1});
  } else {
    std::vector<int> marker_pos;
    marker_pos.reserve(in.markers.size());
    for (const SentenceMarker& m : in.markers) marker_pos.push_back(m.pos);
    out.support_logits = linear(gather_rows(full, marker_pos), sup_w_, sup_b_);
  }
  return out;
}

Tensor ReaderModel::loss(const ReaderOutput& out, const ReaderInput& in) const {
  if (!in.has_gold) {
    throw std::invalid_argument("reader loss needs gold labels for example " +
                                in.question_id);
  }
  Tensor l_start = cross_entropy_from_logits(out.start_logits, in.gold_start);
  Tensor l_end = cross_entropy_from_logits(out.end_logits, in.gold_end);
  Tensor total = add(scale(l_start, cfg_.gamma[0]), scale(l_end, cfg_.gamma[1]));
  if (!in.markers.empty()) {
    std::vector<double> targets(in.support_labels.begin(), in.support_labels.end());
    Tensor l_sf =
        binary_cross_entropy(sigmoid(out.support_logits), targets, Reduction::Mean);
    total = add(total, scale(l_sf, cfg_.gamma[2]));
  }
  return total;
}

std::vector<NamedTensor> ReaderModel::named_params(const std::string& prefix) const {
  std::vector<NamedTensor> out =
      encoder_.named_params(prefix + ".encoder", /*include_pooler=*/false);
  auto push_attn = [&out](const std::string& p, const AttentionParams& a) {
    out.push_back({p + ".wq", a.wq});
    out.push_back({p + ".wk", a.wk});
    out.push_back({p + ".wv", a.wv});
    out.push_back({p + ".wo", a.wo});
  };
  push_attn(prefix + ".ca_ln", ca_ln_);
  push_attn(prefix + ".ca_plain", ca_plain_);
  out.push_back({prefix + ".ca_ln.gain", ca_ln_gain_});
  out.push_back({prefix + ".ca_ln.bias", ca_ln_bias_});
  out.push_back({prefix + ".start.w", start_w_});
  out.push_back({prefix + ".start.b", start_b_});
  out.push_back({prefix + ".end.w", end_w_});
  out.push_back({prefix + ".end.b", end_b_});
  out.push_back({prefix + ".sup.w", sup_w_});
  out.push_back({prefix + ".sup.b", sup_b_});
  return out;
}

void ReaderModel::save(const std::string& path) const {
  save_checkpoint(path, named_params("reader"));
}

void ReaderModel::load(const std::string& path) {
  std::vector<NamedTensor> params = named_params("reader");
  load_checkpoint(path, params);
}

std::string decode_answer(const ReaderOutput& out, const ReaderInput& in,
                          int max_answer_len) {
  const std::vector<double>& s = out.start_logits.values();
  const std::vector<double>& e = out.end_logits.values();
  double best = -std::numeric_limits<double>::infinity();
  int best_start = -1, best_end = -1;
  auto consider = [&](int a, int b) {
    const double v = s[a] + e[b];
    if (v > best) {
      best = v;
      best_start = a;
      best_end = b;
    }
  };
  consider(in.yes_pos, in.yes_pos);
  consider(in.no_pos, in.no_pos);
  for (int a = in.context_begin; a < in.context_end; ++a) {
    if (!in.is_context_word[a]) continue;
    for (int b = a; b < in.context_end && b - a < max_answer_len; ++b) {
      if (!in.is_context_word[b]) continue;
      consider(a, b);
    }
  }
  if (best_start < 0) throw std::runtime_error("no valid answer span to decode");
  if (best_start == in.yes_pos) return "yes";
  if (best_start == in.no_pos) return "no";
  const int cb = in.char_range[best_start].first;
  const int ce = in.char_range[best_end].second;
  return in.context_text.substr(cb, ce - cb);
}

std::vector<SupportingFact> decode_supporting_facts(const ReaderOutput& out,
                                                    const ReaderInput& in,
                                                    double threshold) {
  std::vector<SupportingFact> facts;
  if (in.markers.empty()) return facts;
  const std::vector<double>& logits = out.support_logits.values();
  int best = 0;
  for (std::size_t m = 0; m < in.markers.size(); ++m) {
    if (logits[m] > logits[best]) best = static_cast<int>(m);
    if (sigmoid_scalar(logits[m]) > threshold) {
      facts.push_back({in.markers[m].title, in.markers[m].sent_id});
    }
  }
  if (facts.empty()) {
    facts.push_back({in.markers[best].title, in.markers[best].sent_id});
  }
  return facts;
}

}  // namespace hopqa
