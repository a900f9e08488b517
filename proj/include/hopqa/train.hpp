#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopqa/dataset.hpp"
#include "hopqa/reader.hpp"
#include "hopqa/selector.hpp"

namespace hopqa {

/// Reader training strategies: single-hop then multi-hop transfer, direct
/// multi-hop, proportional mixture, and single-hop followed by the mixture.
enum class CurriculumMode { ShdThenMhd, MhdOnly, ShdPlusMhdMixed, ShdThenMixed };

CurriculumMode curriculum_from_string(const std::string& s);
std::string curriculum_to_string(CurriculumMode m);

struct TrainConfig {
  int epochs = 3;  // per training phase
  int batch_size = 16;
  double learning_rate = 1e-3;
  double warmup_fraction = 0.1;
  double weight_decay = 0.01;
  std::uint64_t seed = 42;
  std::array<double, 3> gamma = {1.0, 1.0, 1.0};
  CurriculumMode curriculum = CurriculumMode::ShdThenMhd;
  // Optimizer-step budget across all phases (split evenly between the
  // phases of two-phase modes). 0 means epochs decide. Used to compare
  // curricula at equal total update counts.
  long total_step_budget = 0;
  int dev_log_limit = 200;  // dev examples scored for per-epoch logs
};

/// Line-oriented JSON training log.
class TrainLogger {
 public:
  explicit TrainLogger(std::ostream* os = nullptr) : os_(os) {}
  void log(const nlohmann::json& record);

 private:
  std::ostream* os_;
};

// Stage-1 relevance training (binary cross-entropy over every
// question-document pair).
RelevanceModel train_selector_stage1(const std::vector<Example>& train,
                                     const std::vector<Example>& dev,
                                     const Tokenizer& tok, const EncoderConfig& enc_cfg,
                                     const TrainConfig& cfg, TrainLogger* logger);

// Stage-2 training conditioned on the trained stage-1 model's predictions.
RelevanceModel train_selector_stage2(const RelevanceModel& stage1,
                                     const std::vector<Example>& train,
                                     const std::vector<Example>& dev,
                                     const Tokenizer& tok, const EncoderConfig& enc_cfg,
                                     const TrainConfig& cfg, TrainLogger* logger);

// Reader training under cfg.curriculum; examples that fail span labeling
// are skipped and counted in the log.
ReaderModel train_reader(const std::vector<Example>& single_hop,
                         const std::vector<Example>& multi_hop,
                         const std::vector<Example>& dev_multi_hop,
                         const Tokenizer& tok, const ReaderConfig& reader_cfg,
                         const TrainConfig& cfg, TrainLogger* logger);

// Gold-document (oracle) predictions in the submission shape.
nlohmann::json reader_oracle_predictions(const ReaderModel& reader, const Tokenizer& tok,
                                         const std::vector<Example>& examples);

// Fraction of examples whose top stage-1 score lands on a gold document.
double stage1_top1_accuracy(const RelevanceModel& stage1, const Tokenizer& tok,
                            const std::vector<Example>& examples);

// Mean document EM/F1 of full two-stage selection over a dataset.
std::pair<double, double> selection_doc_metrics(const Selector& selector,
                                                const std::vector<Example>& examples);

}  // namespace hopqa
