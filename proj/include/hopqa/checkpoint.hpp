#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hopqa/tensor.hpp"

namespace hopqa {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Checkpoint file: one JSON object mapping parameter name to
// {"shape": [...], "data": [...]}. Round-trips are bit-exact.
nlohmann::json checkpoint_to_json(const std::vector<NamedTensor>& params);
void checkpoint_from_json(const nlohmann::json& j, std::vector<NamedTensor>& params);

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& params);
// Loads values into already-constructed parameters; shapes must match.
void load_checkpoint(const std::string& path, std::vector<NamedTensor>& params);

}  // namespace hopqa
