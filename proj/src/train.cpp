#include "hopqa/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hopqa/metrics.hpp"
#include "hopqa/optim.hpp"

namespace hopqa {

using nlohmann::json;

CurriculumMode curriculum_from_string(const std::string& s) {
  if (s == "shd_then_mhd") return CurriculumMode::ShdThenMhd;
  if (s == "mhd_only") return CurriculumMode::MhdOnly;
  if (s == "shd_plus_mhd") return CurriculumMode::ShdPlusMhdMixed;
  if (s == "shd_then_mixed") return CurriculumMode::ShdThenMixed;
  throw std::invalid_argument("unknown curriculum mode '" + s + "'");
}

std::string curriculum_to_string(CurriculumMode m) {
  switch (m) {
    case CurriculumMode::ShdThenMhd: return "shd_then_mhd";
    case CurriculumMode::MhdOnly: return "mhd_only";
    case CurriculumMode::ShdPlusMhdMixed: return "shd_plus_mhd";
    case CurriculumMode::ShdThenMixed: return "shd_then_mixed";
  }
  return "shd_then_mhd";
}

void TrainLogger::log(const json& record) {
  if (os_) *os_ << record.dump() << "\n" << std::flush;
}

namespace {

struct ScoredPair {
  std::vector<int> token_ids;
  int label = 0;
};

long steps_per_epoch(std::size_t items, int batch_size) {
  return static_cast<long>((items + batch_size - 1) / batch_size);
}

// Shared mini-batch loop for both selector stages.
void train_relevance(RelevanceModel& model, std::vector<ScoredPair>& pairs,
                     const TrainConfig& cfg, const std::string& phase, Rng& rng,
                     TrainLogger* logger,
                     const std::function<json(int)>& dev_metrics_fn) {
  std::vector<Tensor> params;
  std::vector<std::string> names;
  for (NamedTensor& nt : model.named_params("m")) {
    params.push_back(nt.tensor);
    names.push_back(nt.name);
  }
  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  adam_cfg.weight_decay = cfg.weight_decay;
  adam_cfg.warmup_fraction = cfg.warmup_fraction;
  adam_cfg.total_steps = cfg.epochs * steps_per_epoch(pairs.size(), cfg.batch_size);
  Adam adam(params, adam_cfg, decay_mask_from_names(names));

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Rng dropout_rng = rng.fork(17);
  TrainCtx ctx{&dropout_rng, model.config().dropout_rate};

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    long batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      adam.zero_grad();
      Tape tape;
      std::vector<Tensor> probs;
      std::vector<int> labels;
      for (std::size_t i = start; i < stop; ++i) {
        const ScoredPair& pair = pairs[order[i]];
        probs.push_back(model.probability(pair.token_ids, &ctx));
        labels.push_back(pair.label);
      }
      Tensor loss = selector_stage1_loss(probs, labels);
      Tensor objective = scale(loss, 1.0 / static_cast<double>(stop - start));
      tape.backward(objective);
      adam.step();
      epoch_loss += objective.item();
      ++batches;
    }
    if (logger) {
      json rec{{"phase", phase},
               {"epoch", epoch},
               {"step", adam.step_count()},
               {"loss", batches ? epoch_loss / batches : 0.0},
               {"lr", adam.learning_rate_at(adam.step_count())}};
      if (dev_metrics_fn) rec["dev_metrics"] = dev_metrics_fn(epoch);
      logger->log(rec);
    }
  }
}

}  // namespace

double stage1_top1_accuracy(const RelevanceModel& stage1, const Tokenizer& tok,
                            const std::vector<Example>& examples) {
  if (examples.empty()) return 0.0;
  long hits = 0;
  for (const Example& ex : examples) {
    std::vector<double> scores;
    for (const Document& doc : ex.documents) {
      scores.push_back(
          stage1.score(build_stage1_input(tok, ex.question, doc, stage1.config().max_seq_len)));
    }
    const int p1 = select_p1(scores);
    const std::vector<int> labels = ex.relevance_labels();
    hits += labels[p1] == 1 ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

std::pair<double, double> selection_doc_metrics(const Selector& selector,
                                                const std::vector<Example>& examples) {
  if (examples.empty()) return {0.0, 0.0};
  double em = 0.0, f1 = 0.0;
  for (const Example& ex : examples) {
    SelectionResult r = selector.select(ex);
    std::set<std::string> pred = {ex.documents[r.p1_index].title,
                                  ex.documents[r.p2_index].title};
    std::set<std::string> gold;
    for (const SupportingFact& sf : ex.supporting_facts) gold.insert(sf.title);
    auto [e, f] = doc_em_f1(pred, gold);
    em += e;
    f1 += f;
  }
  em /= static_cast<double>(examples.size());
  f1 /= static_cast<double>(examples.size());
  return {em, f1};
}

RelevanceModel train_selector_stage1(const std::vector<Example>& train,
                                     const std::vector<Example>& dev,
                                     const Tokenizer& tok, const EncoderConfig& enc_cfg,
                                     const TrainConfig& cfg, TrainLogger* logger) {
  Rng rng(cfg.seed);
  Rng init_rng = rng.fork(1);
  RelevanceModel model(enc_cfg, init_rng);

  std::vector<ScoredPair> pairs;
  for (const Example& ex : train) {
    const std::vector<int> labels = ex.relevance_labels();
    for (std::size_t j = 0; j < ex.documents.size(); ++j) {
      pairs.push_back({build_stage1_input(tok, ex.question, ex.documents[j],
                                          enc_cfg.max_seq_len),
                       labels[j]});
    }
  }

  const std::vector<Example> dev_slice(
      dev.begin(), dev.begin() + std::min<std::size_t>(dev.size(), cfg.dev_log_limit));
  auto dev_fn = [&](int) {
    return json{{"top1_acc", stage1_top1_accuracy(model, tok, dev_slice)}};
  };
  train_relevance(model, pairs, cfg, "selector_stage1", rng, logger,
                  dev.empty() ? std::function<json(int)>() : dev_fn);
  return model;
}

RelevanceModel train_selector_stage2(const RelevanceModel& stage1,
                                     const std::vector<Example>& train,
                                     const std::vector<Example>& dev,
                                     const Tokenizer& tok, const EncoderConfig& enc_cfg,
                                     const TrainConfig& cfg, TrainLogger* logger) {
  Rng rng(cfg.seed);
  Rng init_rng = rng.fork(2);
  RelevanceModel model(enc_cfg, init_rng);

  // The lead document comes from the trained stage-1 model, not the gold
  // labels; when stage 1 errs, both gold documents stay positive.
  std::vector<ScoredPair> pairs;
  for (const Example& ex : train) {
    std::vector<double> scores;
    for (const Document& doc : ex.documents) {
      scores.push_back(
          stage1.score(build_stage1_input(tok, ex.question, doc, enc_cfg.max_seq_len)));
    }
    const int p1 = select_p1(scores);
    const std::vector<int> labels = ex.relevance_labels();
    for (std::size_t j = 0; j < ex.documents.size(); ++j) {
      if (static_cast<int>(j) == p1) continue;
      pairs.push_back({build_stage2_input(tok, ex.question, ex.documents[p1],
                                          ex.documents[j], enc_cfg.max_seq_len),
                       labels[j]});
    }
  }

  const std::vector<Example> dev_slice(
      dev.begin(), dev.begin() + std::min<std::size_t>(dev.size(), cfg.dev_log_limit));
  auto dev_fn = [&](int) {
    Selector sel(stage1, model, tok);
    auto [em, f1] = selection_doc_metrics(sel, dev_slice);
    return json{{"doc_em", em}, {"doc_f1", f1}};
  };
  train_relevance(model, pairs, cfg, "selector_stage2", rng, logger,
                  dev.empty() ? std::function<json(int)>() : dev_fn);
  return model;
}

nlohmann::json reader_oracle_predictions(const ReaderModel& reader, const Tokenizer& tok,
                                         const std::vector<Example>& examples) {
  json answers = json::object();
  json sps = json::object();
  for (const Example& ex : examples) {
    ReaderInput in = build_reader_input(tok, ex, ex.gold_doc_indices(),
                                        reader.config().encoder.max_seq_len, false);
    ReaderOutput out = reader.predict(in);
    answers[ex.id] = decode_answer(out, in, reader.config().max_answer_len);
    json sp = json::array();
    for (const SupportingFact& sf :
         decode_supporting_facts(out, in, reader.config().support_threshold)) {
      sp.push_back({sf.title, sf.sent_id});
    }
    sps[ex.id] = sp;
  }
  return json{{"answer", answers}, {"sp", sps}};
}

namespace {

struct ReaderPhase {
  std::string name;
  std::vector<ReaderInput> inputs;
};

std::vector<ReaderInput> build_inputs(const std::vector<Example>& examples,
                                      const Tokenizer& tok, int max_seq_len,
                                      int* skipped) {
  std::vector<ReaderInput> out;
  out.reserve(examples.size());
  for (const Example& ex : examples) {
    try {
      out.push_back(build_reader_input(tok, ex, ex.gold_doc_indices(), max_seq_len, true));
    } catch (const LabelingError&) {
      ++*skipped;
    }
  }
  return out;
}

std::vector<ReaderInput> mix_inputs(const std::vector<ReaderInput>& a,
                                    const std::vector<ReaderInput>& b) {
  std::vector<ReaderInput> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

ReaderModel train_reader(const std::vector<Example>& single_hop,
                         const std::vector<Example>& multi_hop,
                         const std::vector<Example>& dev_multi_hop,
                         const Tokenizer& tok, const ReaderConfig& reader_cfg,
                         const TrainConfig& cfg, TrainLogger* logger) {
  Rng rng(cfg.seed);
  Rng init_rng = rng.fork(3);
  ReaderConfig rc = reader_cfg;
  rc.gamma = cfg.gamma;
  ReaderModel model(rc, init_rng);

  int skipped = 0;
  const int max_len = rc.encoder.max_seq_len;
  std::vector<ReaderInput> sh = build_inputs(single_hop, tok, max_len, &skipped);
  std::vector<ReaderInput> mh = build_inputs(multi_hop, tok, max_len, &skipped);
  if (logger && skipped > 0) {
    logger->log(json{{"phase", "reader_data"}, {"skipped_unlabelable", skipped}});
  }

  std::vector<ReaderPhase> phases;
  switch (cfg.curriculum) {
    case CurriculumMode::ShdThenMhd:
      phases.push_back({"reader_shd", std::move(sh)});
      phases.push_back({"reader_mhd", std::move(mh)});
      break;
    case CurriculumMode::MhdOnly:
      phases.push_back({"reader_mhd", std::move(mh)});
      break;
    case CurriculumMode::ShdPlusMhdMixed:
      phases.push_back({"reader_mixed", mix_inputs(sh, mh)});
      break;
    case CurriculumMode::ShdThenMixed:
      phases.push_back({"reader_shd", sh});
      phases.push_back({"reader_mixed", mix_inputs(sh, mh)});
      break;
  }

  const std::vector<Example> dev_slice(
      dev_multi_hop.begin(),
      dev_multi_hop.begin() + std::min<std::size_t>(dev_multi_hop.size(), cfg.dev_log_limit));

  Rng dropout_rng = rng.fork(19);
  TrainCtx ctx{&dropout_rng, rc.encoder.dropout_rate};

  const int num_phases = static_cast<int>(phases.size());
  for (int pi = 0; pi < num_phases; ++pi) {
    ReaderPhase& phase = phases[pi];
    if (phase.inputs.empty()) continue;
    long budget = 0;
    if (cfg.total_step_budget > 0) {
      budget = cfg.total_step_budget / num_phases;
      if (pi == num_phases - 1) budget = cfg.total_step_budget - budget * (num_phases - 1);
    }
    const long epoch_steps = steps_per_epoch(phase.inputs.size(), cfg.batch_size);
    const long phase_steps = budget > 0 ? budget : cfg.epochs * epoch_steps;
    if (phase_steps <= 0) continue;

    std::vector<Tensor> params;
    std::vector<std::string> names;
    for (NamedTensor& nt : model.named_params("m")) {
      params.push_back(nt.tensor);
      names.push_back(nt.name);
    }
    AdamConfig adam_cfg;
    adam_cfg.learning_rate = cfg.learning_rate;
    adam_cfg.weight_decay = cfg.weight_decay;
    adam_cfg.warmup_fraction = cfg.warmup_fraction;
    adam_cfg.total_steps = phase_steps;
    Adam adam(params, adam_cfg, decay_mask_from_names(names));

    std::vector<std::size_t> order(phase.inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    int epoch = 0;
    while (adam.step_count() < phase_steps) {
      rng.shuffle(order);
      double epoch_loss = 0.0;
      long batches = 0;
      for (std::size_t start = 0;
           start < order.size() && adam.step_count() < phase_steps;
           start += cfg.batch_size) {
        const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
        adam.zero_grad();
        Tape tape;
        std::vector<Tensor> losses;
        for (std::size_t i = start; i < stop; ++i) {
          const ReaderInput& in = phase.inputs[order[i]];
          losses.push_back(model.loss(model.predict(in, &ctx), in));
        }
        Tensor objective = scale(add_n(losses), 1.0 / static_cast<double>(losses.size()));
        tape.backward(objective);
        adam.step();
        epoch_loss += objective.item();
        ++batches;
      }
      if (logger) {
        json rec{{"phase", phase.name},
                 {"epoch", epoch},
                 {"step", adam.step_count()},
                 {"loss", batches ? epoch_loss / batches : 0.0},
                 {"lr", adam.learning_rate_at(adam.step_count())}};
        if (!dev_slice.empty()) {
          MetricReport report =
              evaluate(reader_oracle_predictions(model, tok, dev_slice), dev_slice);
          rec["dev_metrics"] = {{"joint_f1", report.joint_f1},
                                {"joint_em", report.joint_em},
                                {"ans_em", report.ans_em}};
        }
        logger->log(rec);
      }
      ++epoch;
    }
  }
  return model;
}

}  // namespace hopqa
