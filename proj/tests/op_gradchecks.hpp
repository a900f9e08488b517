#pragma once

#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "hopqa/attention.hpp"
#include "hopqa/ops.hpp"

namespace hopqa::testing {

struct OpCheck {
  std::string name;
  double worst = 0.0;
};

// Jacobian check of every differentiable op on `instances` random inputs
// each. Shared by the unit suite (few instances) and the acceptance suite
// (at least 100).
inline std::vector<OpCheck> run_op_gradchecks(int instances, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<OpCheck> results;

  auto check = [&](const std::string& name,
                   const std::function<double(Rng&)>& one_instance) {
    OpCheck r{name, 0.0};
    for (int i = 0; i < instances; ++i) r.worst = std::max(r.worst, one_instance(rng));
    results.push_back(r);
  };

  auto dims = [](Rng& r) { return 1 + r.uniform_int(5); };

  check("add", [&](Rng& r) {
    Shape s{dims(r), dims(r)};
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return add(in[0], in[1]); },
        {random_tensor(s, r), random_tensor(s, r)}, r);
  });
  check("sub", [&](Rng& r) {
    Shape s{dims(r), dims(r)};
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return sub(in[0], in[1]); },
        {random_tensor(s, r), random_tensor(s, r)}, r);
  });
  check("mul", [&](Rng& r) {
    Shape s{dims(r), dims(r)};
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return mul(in[0], in[1]); },
        {random_tensor(s, r), random_tensor(s, r)}, r);
  });
  check("scale", [&](Rng& r) {
    const double k = r.normal(0.0, 2.0);
    return max_gradcheck_error(
        [k](const std::vector<Tensor>& in) { return scale(in[0], k); },
        {random_tensor({dims(r), dims(r)}, r)}, r);
  });
  check("add_n", [&](Rng& r) {
    Shape s{dims(r)};
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) {
          return add_n({in[0], in[1], in[2]});
        },
        {random_tensor(s, r), random_tensor(s, r), random_tensor(s, r)}, r);
  });
  check("add_row_vector", [&](Rng& r) {
    const int m = dims(r), n = dims(r);
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return add_row_vector(in[0], in[1]); },
        {random_tensor({m, n}, r), random_tensor({n}, r)}, r);
  });
  check("matmul", [&](Rng& r) {
    const int m = dims(r), k = dims(r), n = dims(r);
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return matmul(in[0], in[1]); },
        {random_tensor({m, k}, r), random_tensor({k, n}, r)}, r);
  });
  check("transpose", [&](Rng& r) {
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return transpose(in[0]); },
        {random_tensor({dims(r), dims(r)}, r)}, r);
  });
  check("row_slice", [&](Rng& r) {
    const int m = 2 + r.uniform_int(4), n = dims(r);
    const int r0 = r.uniform_int(m - 1);
    const int r1 = r0 + 1 + r.uniform_int(m - r0 - 1 >= 1 ? m - r0 - 1 : 1);
    return max_gradcheck_error(
        [r0, r1](const std::vector<Tensor>& in) { return row_slice(in[0], r0, r1); },
        {random_tensor({m, n}, r)}, r);
  });
  check("col_slice", [&](Rng& r) {
    const int m = dims(r), n = 2 + r.uniform_int(4);
    const int c0 = r.uniform_int(n - 1);
    const int c1 = c0 + 1 + r.uniform_int(n - c0 - 1 >= 1 ? n - c0 - 1 : 1);
    return max_gradcheck_error(
        [c0, c1](const std::vector<Tensor>& in) { return col_slice(in[0], c0, c1); },
        {random_tensor({m, n}, r)}, r);
  });
  check("concat_cols", [&](Rng& r) {
    const int m = dims(r);
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) {
          return concat_cols({in[0], in[1]});
        },
        {random_tensor({m, dims(r)}, r), random_tensor({m, dims(r)}, r)}, r);
  });
  check("reshape", [&](Rng& r) {
    const int m = dims(r), n = dims(r);
    return max_gradcheck_error(
        [m, n](const std::vector<Tensor>& in) { return reshape(in[0], {n * m}); },
        {random_tensor({m, n}, r)}, r);
  });
  check("paste_rows", [&](Rng& r) {
    const int m = 2 + r.uniform_int(4), n = dims(r);
    const int pm = 1 + r.uniform_int(m - 1);
    const int r0 = r.uniform_int(m - pm + 1);
    return max_gradcheck_error(
        [r0](const std::vector<Tensor>& in) { return paste_rows(in[0], in[1], r0); },
        {random_tensor({m, n}, r), random_tensor({pm, n}, r)}, r);
  });
  check("gather_rows", [&](Rng& r) {
    const int m = 2 + r.uniform_int(4), n = dims(r);
    std::vector<int> idx(1 + r.uniform_int(4));
    for (int& i : idx) i = r.uniform_int(m);
    return max_gradcheck_error(
        [idx](const std::vector<Tensor>& in) { return gather_rows(in[0], idx); },
        {random_tensor({m, n}, r)}, r);
  });
  check("gelu", [&](Rng& r) {
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return gelu(in[0]); },
        {random_tensor({dims(r), dims(r)}, r)}, r);
  });
  check("tanh", [&](Rng& r) {
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return tanh_t(in[0]); },
        {random_tensor({dims(r)}, r)}, r);
  });
  check("sigmoid", [&](Rng& r) {
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return sigmoid(in[0]); },
        {random_tensor({dims(r)}, r)}, r);
  });
  check("softmax_rows", [&](Rng& r) {
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return softmax_rows(in[0]); },
        {random_tensor({dims(r), 1 + dims(r)}, r)}, r);
  });
  check("layer_norm", [&](Rng& r) {
    const int m = dims(r), n = 2 + r.uniform_int(5);
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return layer_norm(in[0], in[1], in[2]); },
        {random_tensor({m, n}, r), random_tensor({n}, r), random_tensor({n}, r)}, r);
  });
  check("sum", [&](Rng& r) {
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return sum(in[0]); },
        {random_tensor({dims(r), dims(r)}, r)}, r);
  });
  check("mean", [&](Rng& r) {
    return max_gradcheck_error(
        [](const std::vector<Tensor>& in) { return mean(in[0]); },
        {random_tensor({dims(r), dims(r)}, r)}, r);
  });
  check("cross_entropy_from_logits", [&](Rng& r) {
    const int n = 2 + r.uniform_int(6);
    const int target = r.uniform_int(n);
    return max_gradcheck_error(
        [target](const std::vector<Tensor>& in) {
          return cross_entropy_from_logits(in[0], target);
        },
        {random_tensor({n}, r)}, r);
  });
  check("binary_cross_entropy", [&](Rng& r) {
    const int n = 1 + r.uniform_int(6);
    Tensor p = Tensor::zeros({n}, true);
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) {
      p.at(static_cast<std::size_t>(i)) = 0.05 + 0.9 * r.next_double();
      t[i] = r.uniform_int(2);
    }
    const Reduction red = r.uniform_int(2) ? Reduction::Sum : Reduction::Mean;
    return max_gradcheck_error(
        [t, red](const std::vector<Tensor>& in) {
          return binary_cross_entropy(in[0], t, red);
        },
        {p}, r);
  });
  check("multi_head_attention", [&](Rng& r) {
    const int heads = 1 + r.uniform_int(2);
    const int d = heads * (1 + r.uniform_int(3));
    const int lq = 1 + r.uniform_int(4), lk = 1 + r.uniform_int(4);
    return max_gradcheck_error(
        [heads](const std::vector<Tensor>& in) {
          AttentionParams p{in[2], in[3], in[4], in[5], Tensor(), Tensor(), Tensor(),
                            Tensor()};
          return multi_head_attention(in[0], in[1], p, heads);
        },
        {random_tensor({lq, d}, r), random_tensor({lk, d}, r), random_tensor({d, d}, r),
         random_tensor({d, d}, r), random_tensor({d, d}, r), random_tensor({d, d}, r)},
        r);
  });

  return results;
}

}  // namespace hopqa::testing
