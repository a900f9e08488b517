#include <doctest.h>

#include <cmath>

#include "hopqa/selector.hpp"

using namespace hopqa;

namespace {

Tokenizer demo_tokenizer() {
  return Tokenizer::build({"who wrote x ? x was written by y . extra words pad out the "
                           "vocabulary list for tests"});
}

EncoderConfig selector_config(const Tokenizer& tok, int max_len = 32) {
  EncoderConfig cfg;
  cfg.vocab_size = tok.vocab_size();
  cfg.max_seq_len = max_len;
  cfg.hidden_dim = 8;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.feed_forward_dim = 16;
  cfg.dropout_rate = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("stage-1 template is [CLS] question [SEP] document [SEP]") {
  Tokenizer tok = demo_tokenizer();
  Document doc{"x", {"x was written by y"}};
  std::vector<int> ids = build_stage1_input(tok, "who wrote x", doc, 64);
  std::vector<int> expect = {Tokenizer::kCls};
  for (int id : tok.encode("who wrote x")) expect.push_back(id);
  expect.push_back(Tokenizer::kSep);
  for (int id : tok.encode("x was written by y")) expect.push_back(id);
  expect.push_back(Tokenizer::kSep);
  CHECK(ids == expect);
}

TEST_CASE("stage-1 truncation trims the document, never the question") {
  Tokenizer tok = demo_tokenizer();
  std::string long_doc;
  for (int i = 0; i < 100; ++i) long_doc += "words ";
  Document doc{"d", {long_doc}};
  const int max_len = 20;
  std::vector<int> ids = build_stage1_input(tok, "who wrote x", doc, max_len);
  CHECK(static_cast<int>(ids.size()) == max_len);
  CHECK(ids.back() == Tokenizer::kSep);
  // question survives intact
  std::vector<int> q = tok.encode("who wrote x");
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(ids[i + 1] == q[i]);
}

TEST_CASE("stage-1 handles an empty document and rejects an empty question") {
  Tokenizer tok = demo_tokenizer();
  Document empty{"e", {}};
  std::vector<int> ids = build_stage1_input(tok, "who wrote x", empty, 64);
  std::vector<int> expect = {Tokenizer::kCls};
  for (int id : tok.encode("who wrote x")) expect.push_back(id);
  expect.push_back(Tokenizer::kSep);
  expect.push_back(Tokenizer::kSep);
  CHECK(ids == expect);
  CHECK_THROWS_AS(build_stage1_input(tok, "", empty, 64), std::invalid_argument);
}

TEST_CASE("stage-2 template carries both documents in order") {
  Tokenizer tok = demo_tokenizer();
  Document lead{"a", {"x was written"}};
  Document cand{"b", {"by y"}};
  std::vector<int> ids = build_stage2_input(tok, "who wrote x", lead, cand, 64);
  std::vector<int> expect = {Tokenizer::kCls};
  for (int id : tok.encode("who wrote x")) expect.push_back(id);
  expect.push_back(Tokenizer::kSep);
  for (int id : tok.encode("x was written")) expect.push_back(id);
  expect.push_back(Tokenizer::kSep);
  for (int id : tok.encode("by y")) expect.push_back(id);
  expect.push_back(Tokenizer::kSep);
  CHECK(ids == expect);
  CHECK_THROWS_AS(build_stage2_input(tok, "who wrote x", lead, lead, 64),
                  std::invalid_argument);
}

TEST_CASE("stage-2 truncation shrinks the candidate before the lead document") {
  Tokenizer tok = demo_tokenizer();
  std::string long_text;
  for (int i = 0; i < 50; ++i) long_text += "words ";
  Document lead{"a", {"x was written by y"}};
  Document cand{"b", {long_text}};
  std::vector<int> q = tok.encode("who wrote x");
  std::vector<int> d1 = tok.encode("x was written by y");

  const int max_len = static_cast<int>(q.size() + d1.size()) + 4 + 3;
  std::vector<int> ids = build_stage2_input(tok, "who wrote x", lead, cand, max_len);
  CHECK(static_cast<int>(ids.size()) == max_len);
  // lead document intact at its position
  for (std::size_t i = 0; i < d1.size(); ++i) CHECK(ids[2 + q.size() + i] == d1[i]);

  // Tighter budget: candidate keeps exactly one token, lead starts shrinking.
  const int tight = static_cast<int>(q.size()) + 4 + static_cast<int>(d1.size()) - 2 + 1;
  std::vector<int> tight_ids = build_stage2_input(tok, "who wrote x", lead, cand, tight);
  CHECK(static_cast<int>(tight_ids.size()) == tight);
  int seps = 0;
  for (int id : tight_ids) seps += id == Tokenizer::kSep ? 1 : 0;
  CHECK(seps == 3);
}

TEST_CASE("argmax selection breaks ties toward the lowest index") {
  CHECK(select_p1({0.1, 0.9, 0.3}) == 1);
  CHECK(select_p1({0.5, 0.5}) == 0);
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(2 + rng.uniform_int(9));
    for (double& s : scores) s = rng.next_double();
    int expect = 0;
    for (std::size_t j = 1; j < scores.size(); ++j) {
      if (scores[j] > scores[expect]) expect = static_cast<int>(j);
    }
    CHECK(select_p1(scores) == expect);
  }
}

TEST_CASE("argmax is invariant under strictly monotone transforms") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(3 + rng.uniform_int(7));
    for (double& s : scores) s = rng.next_double();
    const int base = select_p1(scores);
    std::vector<double> scaled = scores, logit = scores;
    const double k = 0.5 + rng.next_double() * 9.5;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      scaled[j] = scores[j] * k;
      logit[j] = std::log(scores[j] / (1.0 - scores[j] + 1e-12));
    }
    CHECK(select_p1(scaled) == base);
    CHECK(select_p1(logit) == base);
    const int p1 = base;
    CHECK(select_p2(scaled, p1) == select_p2(scores, p1));
  }
}

TEST_CASE("untrained model with zero head scores one half everywhere") {
  Tokenizer tok = demo_tokenizer();
  Rng rng(5);
  RelevanceModel model(selector_config(tok), rng);  // head is zero-initialized
  Document doc{"x", {"x was written by y"}};
  std::vector<int> ids = build_stage1_input(tok, "who wrote x", doc, 32);
  CHECK(model.score(ids) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.score(ids) == model.score(ids));  // deterministic
}

TEST_CASE("stage losses hit their analytic values at probability one half") {
  std::vector<Tensor> probs;
  std::vector<int> labels;
  for (int j = 0; j < 10; ++j) {
    probs.push_back(Tensor::from({1, 1}, {0.5}));
    labels.push_back(j < 2 ? 1 : 0);
  }
  CHECK(selector_stage1_loss(probs, labels).item() ==
        doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(selector_stage2_loss(probs, labels, 0).item() ==
        doctest::Approx(9.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("hand-computed batch loss") {
  std::vector<Tensor> probs = {Tensor::from({1, 1}, {0.9}), Tensor::from({1, 1}, {0.2}),
                               Tensor::from({1, 1}, {0.5})};
  std::vector<int> labels = {1, 0, 1};
  const double expect = -std::log(0.9) - std::log(0.8) - std::log(0.5);
  CHECK(selector_stage1_loss(probs, labels).item() ==
        doctest::Approx(expect).epsilon(1e-9));
  // excluding the first candidate removes its term
  CHECK(selector_stage2_loss(probs, labels, 0).item() ==
        doctest::Approx(-std::log(0.8) - std::log(0.5)).epsilon(1e-9));
}

TEST_CASE("the lead document's probability never affects the stage-2 loss") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Tensor> probs;
    std::vector<int> labels;
    const int m = 4 + rng.uniform_int(5);
    for (int j = 0; j < m; ++j) {
      probs.push_back(Tensor::from({1, 1}, {0.05 + 0.9 * rng.next_double()}));
      labels.push_back(rng.uniform_int(2));
    }
    const int p1 = rng.uniform_int(m);
    const double before = selector_stage2_loss(probs, labels, p1).item();
    probs[p1] = Tensor::from({1, 1}, {0.05 + 0.9 * rng.next_double()});
    const double after = selector_stage2_loss(probs, labels, p1).item();
    CHECK(before == after);
  }
}

TEST_CASE("perfect predictions give near-zero loss") {
  std::vector<Tensor> probs = {Tensor::from({1, 1}, {1.0 - 1e-7}),
                               Tensor::from({1, 1}, {1e-7})};
  std::vector<int> labels = {1, 0};
  CHECK(selector_stage1_loss(probs, labels).item() == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("select_documents returns two distinct indices and all scores") {
  Tokenizer tok = demo_tokenizer();
  Rng rng(7);
  EncoderConfig cfg = selector_config(tok);
  Selector selector(RelevanceModel(cfg, rng), RelevanceModel(cfg, rng), tok);
  Example ex;
  ex.id = "q";
  ex.question = "who wrote x ?";
  for (int j = 0; j < 4; ++j) {
    ex.documents.push_back({"doc" + std::to_string(j), {"x was written by y ."}});
  }
  ex.supporting_facts = {{"doc0", 0}, {"doc1", 0}};
  SelectionResult r = selector.select(ex);
  CHECK(r.p1_index != r.p2_index);
  CHECK(r.p1_index >= 0);
  CHECK(r.p1_index < 4);
  CHECK(r.p2_index >= 0);
  CHECK(r.p2_index < 4);
  CHECK(r.stage1_scores.size() == 4);
  CHECK(r.stage2_scores[r.p1_index] == -1.0);

  Example two_docs = ex;
  two_docs.documents.resize(2);
  SelectionResult r2 = selector.select(two_docs);
  CHECK(((r2.p1_index == 0 && r2.p2_index == 1) || (r2.p1_index == 1 && r2.p2_index == 0)));

  Example one_doc = ex;
  one_doc.documents.resize(1);
  CHECK_THROWS_AS(selector.select(one_doc), std::invalid_argument);
}
