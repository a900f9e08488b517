#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopqa/encoder.hpp"
#include "hopqa/reader.hpp"
#include "hopqa/synthetic.hpp"
#include "hopqa/train.hpp"

namespace hopqa {

/// Merged run configuration: encoder + training + data + paths. Fully
/// serialized into every run directory for reproducibility.
struct PipelineConfig {
  std::uint64_t seed = 42;
  SyntheticConfig synthetic;
  // Optional dataset files (distractor-shaped JSON). When set they replace
  // the synthetic generator.
  std::string file_single_hop_train, file_single_hop_dev;
  std::string file_multi_hop_train, file_multi_hop_dev;

  EncoderConfig encoder;          // vocab_size filled from the tokenizer
  TrainConfig selector_train;
  TrainConfig reader_train;
  CrossAttentionMode cross_attention = CrossAttentionMode::Full;
  int max_answer_len = 30;
  double support_threshold = 0.5;

  static PipelineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static PipelineConfig load(const std::string& path);
};

CrossAttentionMode cross_attention_from_string(const std::string& s);
std::string cross_attention_to_string(CrossAttentionMode m);

/// Fixed file layout of one run directory.
struct RunPaths {
  explicit RunPaths(std::string root);
  std::string root;
  std::string config() const;
  std::string checkpoints() const;
  std::string tokenizer() const;
  std::string selector_stage1() const;
  std::string selector_stage2() const;
  std::string reader() const;
  std::string selections() const;
  std::string predictions() const;
  std::string metrics() const;
  std::string train_log() const;
};

struct DataBundle {
  std::vector<Example> single_hop_train, single_hop_dev;
  std::vector<Example> multi_hop_train, multi_hop_dev;
};

DataBundle resolve_data(const PipelineConfig& cfg);
Tokenizer build_tokenizer(const DataBundle& data);

// {question_id: {p1, p2, stage1_scores: {title: score},
//                stage2_scores: {title: score}}}
nlohmann::json selections_to_json(const std::vector<Example>& examples,
                                  const std::vector<SelectionResult>& results);

// Entry point shared by the binary and the tests. Returns the exit code.
int cli_run(std::vector<std::string> args);

}  // namespace hopqa
