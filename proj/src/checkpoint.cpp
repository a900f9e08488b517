#include "hopqa/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace hopqa {

using nlohmann::json;

json checkpoint_to_json(const std::vector<NamedTensor>& params) {
  json j = json::object();
  for (const NamedTensor& p : params) {
    j[p.name] = {{"shape", p.tensor.shape()}, {"data", p.tensor.values()}};
  }
  return j;
}

void checkpoint_from_json(const json& j, std::vector<NamedTensor>& params) {
  for (NamedTensor& p : params) {
    if (!j.contains(p.name)) {
      throw std::runtime_error("checkpoint missing parameter '" + p.name + "'");
    }
    const json& e = j.at(p.name);
    Shape shape = e.at("shape").get<Shape>();
    if (shape != p.tensor.shape()) {
      throw std::runtime_error("checkpoint parameter '" + p.name + "' has shape " +
                               shape_str(shape) + ", expected " +
                               shape_str(p.tensor.shape()));
    }
    std::vector<double> data = e.at("data").get<std::vector<double>>();
    if (data.size() != p.tensor.numel()) {
      throw std::runtime_error("checkpoint parameter '" + p.name + "' has wrong size");
    }
    p.tensor.values() = std::move(data);
  }
}

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint file " + path);
  out << checkpoint_to_json(params).dump(1) << "\n";
}

void load_checkpoint(const std::string& path, std::vector<NamedTensor>& params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint file " + path);
  json j;
  in >> j;
  checkpoint_from_json(j, params);
}

}  // namespace hopqa
