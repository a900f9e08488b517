#pragma once

#include <cstdint>
#include <vector>

#include "hopqa/dataset.hpp"

namespace hopqa {

/// Synthetic corpus layout. Bridge questions are built so the second gold
/// document shares no tokens with the question: the bridge entity (the
/// author) appears only inside the documents, which is what makes one-shot
/// lexical selection fail and conditional selection necessary.
struct SyntheticConfig {
  int num_docs = 10;  // candidate documents per question
  int single_hop_train = 2000;
  int single_hop_dev = 500;
  int multi_hop_train = 2000;
  int multi_hop_dev = 500;
  int num_people = 40;
  int num_works = 60;
  int num_cities = 20;
  int num_fields = 16;
  double bridge_work_fraction = 0.40;
  double bridge_study_fraction = 0.35;  // remainder: yes/no comparison
};

struct SyntheticData {
  std::vector<Example> single_hop_train;
  std::vector<Example> single_hop_dev;
  std::vector<Example> multi_hop_train;
  std::vector<Example> multi_hop_dev;
};

SyntheticData generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed);

// True for bridge examples (answerable only through the lead document).
bool is_bridge_example(const Example& ex);

}  // namespace hopqa
