#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hopqa/checkpoint.hpp"
#include "hopqa/rng.hpp"

using namespace hopqa;
namespace fs = std::filesystem;

namespace {
std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST_CASE("checkpoint round-trip is bit-exact") {
  Rng rng(4242);
  std::vector<NamedTensor> params = {
      {"layer.weight", Tensor::randn({7, 5}, rng, 3.0, true)},
      {"layer.bias", Tensor::randn({5}, rng, 1e-12, true)},
      {"odd.values", Tensor::from({4}, {1.0 / 3.0, -0.0, 1e-300, 12345.678901234567})},
  };
  const std::string path = temp_path("hopqa_ckpt_test.json");
  save_checkpoint(path, params);

  std::vector<NamedTensor> loaded = {
      {"layer.weight", Tensor::zeros({7, 5}, true)},
      {"layer.bias", Tensor::zeros({5}, true)},
      {"odd.values", Tensor::zeros({4})},
  };
  load_checkpoint(path, loaded);
  for (std::size_t p = 0; p < params.size(); ++p) {
    REQUIRE(loaded[p].tensor.numel() == params[p].tensor.numel());
    for (std::size_t i = 0; i < params[p].tensor.numel(); ++i) {
      CHECK(loaded[p].tensor.at(i) == params[p].tensor.at(i));  // exact
    }
  }

  // Saving what was loaded reproduces the file byte for byte.
  const std::string path2 = temp_path("hopqa_ckpt_test2.json");
  save_checkpoint(path2, loaded);
  CHECK(slurp(path) == slurp(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("checkpoint load validates names and shapes") {
  Rng rng(1);
  const std::string path = temp_path("hopqa_ckpt_bad.json");
  save_checkpoint(path, {{"a", Tensor::zeros({2, 2})}});

  std::vector<NamedTensor> missing = {{"b", Tensor::zeros({2, 2})}};
  CHECK_THROWS_WITH_AS(load_checkpoint(path, missing),
                       doctest::Contains("missing parameter 'b'"), std::runtime_error);

  std::vector<NamedTensor> wrong_shape = {{"a", Tensor::zeros({4})}};
  CHECK_THROWS_AS(load_checkpoint(path, wrong_shape), std::runtime_error);
  std::remove(path.c_str());
}
