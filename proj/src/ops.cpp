#include "hopqa/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hopqa {

namespace {

constexpr double kProbEps = 1e-7;
constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluC = 0.044715;

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

void check_2d(const Tensor& a, const char* op) {
  if (a.shape().size() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected 2-D tensor, got " +
                                shape_str(a.shape()));
  }
}

// out.grad, or nullptr when the output never reached the loss.
const std::vector<double>* out_grad(const Tensor& out) {
  return out.has_grad() ? &out.grad() : nullptr;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out = Tensor::zeros(a.shape());
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = a.at(i) + b.at(i);
  if (track_grad(a) || track_grad(b)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, b, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      if (a.requires_grad()) {
        Tensor t = a;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i];
      }
      if (b.requires_grad()) {
        Tensor t = b;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i];
      }
    });
  }
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  Tensor out = Tensor::zeros(a.shape());
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = a.at(i) - b.at(i);
  if (track_grad(a) || track_grad(b)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, b, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      if (a.requires_grad()) {
        Tensor t = a;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i];
      }
      if (b.requires_grad()) {
        Tensor t = b;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] -= (*og)[i];
      }
    });
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  Tensor out = Tensor::zeros(a.shape());
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = a.at(i) * b.at(i);
  if (track_grad(a) || track_grad(b)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, b, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      if (a.requires_grad()) {
        Tensor t = a;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i] * b.at(i);
      }
      if (b.requires_grad()) {
        Tensor t = b;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i] * a.at(i);
      }
    });
  }
  return out;
}

Tensor scale(const Tensor& a, double s) {
  Tensor out = Tensor::zeros(a.shape());
  const std::size_t n = out.numel();
  for (std::size_t i = 0; i < n; ++i) out.at(i) = a.at(i) * s;
  if (track_grad(a)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, out, s]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = a;
      t.ensure_grad();
      for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i] * s;
    });
  }
  return out;
}

Tensor add_n(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw std::invalid_argument("add_n: empty input list");
  Tensor out = Tensor::zeros(xs[0].shape());
  bool any_grad = false;
  for (const Tensor& x : xs) {
    check_same_shape(xs[0], x, "add_n");
    for (std::size_t i = 0; i < out.numel(); ++i) out.at(i) += x.at(i);
    any_grad = any_grad || track_grad(x);
  }
  if (any_grad) {
    out.set_requires_grad(true);
    Tape::current()->record([xs, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      for (const Tensor& x : xs) {
        if (!x.requires_grad()) continue;
        Tensor t = x;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i];
      }
    });
  }
  return out;
}

Tensor add_row_vector(const Tensor& a, const Tensor& v) {
  check_2d(a, "add_row_vector");
  const int m = a.rows(), n = a.cols();
  if (static_cast<int>(v.numel()) != n) {
    throw std::invalid_argument("add_row_vector: vector " + shape_str(v.shape()) +
                                " does not match columns of " + shape_str(a.shape()));
  }
  Tensor out = Tensor::zeros(a.shape());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.values()[i * n + j] = a.values()[i * n + j] + v.at(j);
  if (track_grad(a) || track_grad(v)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, v, out, m, n]() {
      const auto* og = out_grad(out);
      if (!og) return;
      if (a.requires_grad()) {
        Tensor t = a;
        t.ensure_grad();
        for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i];
      }
      if (v.requires_grad()) {
        Tensor t = v;
        t.ensure_grad();
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) t.grad()[j] += (*og)[i * n + j];
      }
    });
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_2d(a, "matmul");
  check_2d(b, "matmul");
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = Tensor::zeros({m, n});
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  double* pc = out.values().data();
  for (int i = 0; i < m; ++i) {
    double* crow = pc + static_cast<std::size_t>(i) * n;
    for (int kk = 0; kk < k; ++kk) {
      const double av = pa[static_cast<std::size_t>(i) * k + kk];
      const double* brow = pb + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  if (track_grad(a) || track_grad(b)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, b, out, m, k, n]() {
      const auto* og = out_grad(out);
      if (!og) return;
      const double* pg = og->data();
      if (a.requires_grad()) {
        Tensor t = a;
        t.ensure_grad();
        double* da = t.grad().data();
        const double* pb2 = b.values().data();
        // dA = dC * B^T
        for (int i = 0; i < m; ++i) {
          const double* grow = pg + static_cast<std::size_t>(i) * n;
          for (int kk = 0; kk < k; ++kk) {
            const double* brow = pb2 + static_cast<std::size_t>(kk) * n;
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += grow[j] * brow[j];
            da[static_cast<std::size_t>(i) * k + kk] += s;
          }
        }
      }
      if (b.requires_grad()) {
        Tensor t = b;
        t.ensure_grad();
        double* db = t.grad().data();
        const double* pa2 = a.values().data();
        // dB = A^T * dC
        for (int i = 0; i < m; ++i) {
          const double* grow = pg + static_cast<std::size_t>(i) * n;
          for (int kk = 0; kk < k; ++kk) {
            const double av = pa2[static_cast<std::size_t>(i) * k + kk];
            double* drow = db + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) drow[j] += av * grow[j];
          }
        }
      }
    });
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  check_2d(a, "transpose");
  const int m = a.rows(), n = a.cols();
  Tensor out = Tensor::zeros({n, m});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out.values()[j * m + i] = a.values()[i * n + j];
  if (track_grad(a)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, out, m, n]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = a;
      t.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) t.grad()[i * n + j] += (*og)[j * m + i];
    });
  }
  return out;
}

Tensor row_slice(const Tensor& a, int r0, int r1) {
  check_2d(a, "row_slice");
  if (r0 < 0 || r1 > a.rows() || r0 >= r1) {
    throw std::invalid_argument("row_slice: range [" + std::to_string(r0) + ", " +
                                std::to_string(r1) + ") invalid for " + shape_str(a.shape()));
  }
  const int n = a.cols(), m = r1 - r0;
  Tensor out = Tensor::zeros({m, n});
  std::copy(a.values().begin() + static_cast<std::size_t>(r0) * n,
            a.values().begin() + static_cast<std::size_t>(r1) * n, out.values().begin());
  if (track_grad(a)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, out, r0, m, n]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = a;
      t.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) t.grad()[(r0 + i) * n + j] += (*og)[i * n + j];
    });
  }
  return out;
}

Tensor col_slice(const Tensor& a, int c0, int c1) {
  check_2d(a, "col_slice");
  if (c0 < 0 || c1 > a.cols() || c0 >= c1) {
    throw std::invalid_argument("col_slice: range [" + std::to_string(c0) + ", " +
                                std::to_string(c1) + ") invalid for " + shape_str(a.shape()));
  }
  const int m = a.rows(), n = a.cols(), w = c1 - c0;
  Tensor out = Tensor::zeros({m, w});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < w; ++j) out.values()[i * w + j] = a.values()[i * n + c0 + j];
  if (track_grad(a)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, out, c0, m, n, w]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = a;
      t.ensure_grad();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < w; ++j) t.grad()[i * n + c0 + j] += (*og)[i * w + j];
    });
  }
  return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty input list");
  const int m = parts[0].rows();
  int total = 0;
  bool any_grad = false;
  for (const Tensor& p : parts) {
    check_2d(p, "concat_cols");
    if (p.rows() != m) {
      throw std::invalid_argument("concat_cols: row mismatch " + shape_str(parts[0].shape()) +
                                  " vs " + shape_str(p.shape()));
    }
    total += p.cols();
    any_grad = any_grad || track_grad(p);
  }
  Tensor out = Tensor::zeros({m, total});
  int off = 0;
  for (const Tensor& p : parts) {
    const int w = p.cols();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < w; ++j) out.values()[i * total + off + j] = p.values()[i * w + j];
    off += w;
  }
  if (any_grad) {
    out.set_requires_grad(true);
    Tape::current()->record([parts, out, m, total]() {
      const auto* og = out_grad(out);
      if (!og) return;
      int off2 = 0;
      for (const Tensor& p : parts) {
        const int w = p.cols();
        if (p.requires_grad()) {
          Tensor t = p;
          t.ensure_grad();
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < w; ++j) t.grad()[i * w + j] += (*og)[i * total + off2 + j];
        }
        off2 += w;
      }
    });
  }
  return out;
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw std::invalid_argument("reshape: cannot view " + shape_str(a.shape()) + " as " +
                                shape_str(shape));
  }
  Tensor out = Tensor::from(std::move(shape), a.values());
  if (track_grad(a)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = a;
      t.ensure_grad();
      for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i];
    });
  }
  return out;
}

Tensor paste_rows(const Tensor& base, const Tensor& patch, int r0) {
  check_2d(base, "paste_rows");
  check_2d(patch, "paste_rows");
  if (base.cols() != patch.cols() || r0 < 0 || r0 + patch.rows() > base.rows()) {
    throw std::invalid_argument("paste_rows: patch " + shape_str(patch.shape()) +
                                " at row " + std::to_string(r0) + " does not fit " +
                                shape_str(base.shape()));
  }
  const int n = base.cols(), pm = patch.rows();
  Tensor out = Tensor::from(base.shape(), base.values());
  std::copy(patch.values().begin(), patch.values().end(),
            out.values().begin() + static_cast<std::size_t>(r0) * n);
  if (track_grad(base) || track_grad(patch)) {
    out.set_requires_grad(true);
    Tape::current()->record([base, patch, out, r0, pm, n]() {
      const auto* og = out_grad(out);
      if (!og) return;
      if (base.requires_grad()) {
        Tensor t = base;
        t.ensure_grad();
        const std::size_t lo = static_cast<std::size_t>(r0) * n;
        const std::size_t hi = lo + static_cast<std::size_t>(pm) * n;
        for (std::size_t i = 0; i < og->size(); ++i) {
          if (i >= lo && i < hi) continue;  // replaced rows belong to patch
          t.grad()[i] += (*og)[i];
        }
      }
      if (patch.requires_grad()) {
        Tensor t = patch;
        t.ensure_grad();
        for (int i = 0; i < pm; ++i)
          for (int j = 0; j < n; ++j) t.grad()[i * n + j] += (*og)[(r0 + i) * n + j];
      }
    });
  }
  return out;
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& idx) {
  check_2d(a, "gather_rows");
  const int m = a.rows(), n = a.cols();
  Tensor out = Tensor::zeros({static_cast<int>(idx.size()), n});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= m) {
      throw std::out_of_range("gather_rows: index " + std::to_string(idx[i]) +
                              " out of range for " + shape_str(a.shape()));
    }
    for (int j = 0; j < n; ++j) out.values()[i * n + j] = a.values()[idx[i] * n + j];
  }
  if (track_grad(a)) {
    out.set_requires_grad(true);
    Tape::current()->record([a, out, idx, n]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = a;
      t.ensure_grad();
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (int j = 0; j < n; ++j) t.grad()[idx[i] * n + j] += (*og)[i * n + j];
    });
  }
  return out;
}

Tensor embedding(const Tensor& table, const std::vector<int>& ids) {
  return gather_rows(table, ids);
}

Tensor gelu(const Tensor& x) {
  // tanh approximation
  const double s = std::sqrt(2.0 / M_PI);
  Tensor out = Tensor::zeros(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double v = x.at(i);
    out.at(i) = 0.5 * v * (1.0 + std::tanh(s * (v + kGeluC * v * v * v)));
  }
  if (track_grad(x)) {
    out.set_requires_grad(true);
    Tape::current()->record([x, out, s]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = x;
      t.ensure_grad();
      for (std::size_t i = 0; i < og->size(); ++i) {
        const double v = x.at(i);
        const double u = s * (v + kGeluC * v * v * v);
        const double th = std::tanh(u);
        const double sech2 = 1.0 - th * th;
        const double du = s * (1.0 + 3.0 * kGeluC * v * v);
        t.grad()[i] += (*og)[i] * (0.5 * (1.0 + th) + 0.5 * v * sech2 * du);
      }
    });
  }
  return out;
}

Tensor tanh_t(const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out.at(i) = std::tanh(x.at(i));
  if (track_grad(x)) {
    out.set_requires_grad(true);
    Tape::current()->record([x, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = x;
      t.ensure_grad();
      for (std::size_t i = 0; i < og->size(); ++i) {
        const double y = out.at(i);
        t.grad()[i] += (*og)[i] * (1.0 - y * y);
      }
    });
  }
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double v = x.at(i);
    out.at(i) = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                         : std::exp(v) / (1.0 + std::exp(v));
  }
  if (track_grad(x)) {
    out.set_requires_grad(true);
    Tape::current()->record([x, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = x;
      t.ensure_grad();
      for (std::size_t i = 0; i < og->size(); ++i) {
        const double y = out.at(i);
        t.grad()[i] += (*og)[i] * y * (1.0 - y);
      }
    });
  }
  return out;
}

Tensor softmax_rows(const Tensor& x) {
  check_2d(x, "softmax_rows");
  const int m = x.rows(), n = x.cols();
  Tensor out = Tensor::zeros(x.shape());
  for (int i = 0; i < m; ++i) {
    double mx = x.values()[static_cast<std::size_t>(i) * n];
    for (int j = 1; j < n; ++j) mx = std::max(mx, x.values()[i * n + j]);
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      const double e = std::exp(x.values()[i * n + j] - mx);
      out.values()[i * n + j] = e;
      denom += e;
    }
    for (int j = 0; j < n; ++j) out.values()[i * n + j] /= denom;
  }
  if (track_grad(x)) {
    out.set_requires_grad(true);
    Tape::current()->record([x, out, m, n]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = x;
      t.ensure_grad();
      for (int i = 0; i < m; ++i) {
        double dot = 0.0;
        for (int j = 0; j < n; ++j) dot += (*og)[i * n + j] * out.values()[i * n + j];
        for (int j = 0; j < n; ++j) {
          const double y = out.values()[i * n + j];
          t.grad()[i * n + j] += y * ((*og)[i * n + j] - dot);
        }
      }
    });
  }
  return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias) {
  check_2d(x, "layer_norm");
  const int m = x.rows(), n = x.cols();
  if (static_cast<int>(gain.numel()) != n || static_cast<int>(bias.numel()) != n) {
    throw std::invalid_argument("layer_norm: gain/bias must hold " + std::to_string(n) +
                                " values");
  }
  Tensor out = Tensor::zeros(x.shape());
  std::vector<double> invstd(m), xhat(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    double mu = 0.0;
    for (int j = 0; j < n; ++j) mu += x.values()[i * n + j];
    mu /= n;
    double var = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = x.values()[i * n + j] - mu;
      var += d * d;
    }
    var /= n;
    invstd[i] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (int j = 0; j < n; ++j) {
      const double h = (x.values()[i * n + j] - mu) * invstd[i];
      xhat[i * n + j] = h;
      out.values()[i * n + j] = h * gain.at(j) + bias.at(j);
    }
  }
  if (track_grad(x) || track_grad(gain) || track_grad(bias)) {
    out.set_requires_grad(true);
    Tape::current()->record(
        [x, gain, bias, out, m, n, invstd = std::move(invstd), xhat = std::move(xhat)]() {
          const auto* og = out_grad(out);
          if (!og) return;
          if (gain.requires_grad()) {
            Tensor t = gain;
            t.ensure_grad();
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < n; ++j) t.grad()[j] += (*og)[i * n + j] * xhat[i * n + j];
          }
          if (bias.requires_grad()) {
            Tensor t = bias;
            t.ensure_grad();
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < n; ++j) t.grad()[j] += (*og)[i * n + j];
          }
          if (x.requires_grad()) {
            Tensor t = x;
            t.ensure_grad();
            for (int i = 0; i < m; ++i) {
              double sum_dh = 0.0, sum_dh_xhat = 0.0;
              for (int j = 0; j < n; ++j) {
                const double dh = (*og)[i * n + j] * gain.at(j);
                sum_dh += dh;
                sum_dh_xhat += dh * xhat[i * n + j];
              }
              for (int j = 0; j < n; ++j) {
                const double dh = (*og)[i * n + j] * gain.at(j);
                t.grad()[i * n + j] +=
                    (dh - sum_dh / n - xhat[i * n + j] * sum_dh_xhat / n) * invstd[i];
              }
            }
          }
        });
  }
  return out;
}

Tensor dropout(const Tensor& x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  if (rate >= 1.0) throw std::invalid_argument("dropout: rate must be < 1");
  const double keep = 1.0 - rate;
  std::vector<double> mask(x.numel());
  for (double& v : mask) v = rng.next_double() < rate ? 0.0 : 1.0 / keep;
  Tensor out = Tensor::zeros(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out.at(i) = x.at(i) * mask[i];
  if (track_grad(x)) {
    out.set_requires_grad(true);
    Tape::current()->record([x, out, mask = std::move(mask)]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = x;
      t.ensure_grad();
      for (std::size_t i = 0; i < og->size(); ++i) t.grad()[i] += (*og)[i] * mask[i];
    });
  }
  return out;
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) total += x.at(i);
  Tensor out = Tensor::scalar(total);
  if (track_grad(x)) {
    out.set_requires_grad(true);
    Tape::current()->record([x, out]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = x;
      t.ensure_grad();
      for (std::size_t i = 0; i < t.grad().size(); ++i) t.grad()[i] += (*og)[0];
    });
  }
  return out;
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor cross_entropy_from_logits(const Tensor& logits, int target) {
  const int n = static_cast<int>(logits.numel());
  if (target < 0 || target >= n) {
    throw std::out_of_range("cross_entropy_from_logits: target " + std::to_string(target) +
                            " out of range [0, " + std::to_string(n) + ")");
  }
  double mx = logits.at(0);
  for (int j = 1; j < n; ++j) mx = std::max(mx, logits.at(static_cast<std::size_t>(j)));
  std::vector<double> p(n);
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    p[j] = std::exp(logits.at(static_cast<std::size_t>(j)) - mx);
    denom += p[j];
  }
  for (int j = 0; j < n; ++j) p[j] /= denom;
  Tensor out = Tensor::scalar(-(logits.at(static_cast<std::size_t>(target)) - mx -
                                std::log(denom)));
  if (track_grad(logits)) {
    out.set_requires_grad(true);
    Tape::current()->record([logits, out, target, p = std::move(p)]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = logits;
      t.ensure_grad();
      for (std::size_t j = 0; j < p.size(); ++j) {
        double g = p[j];
        if (static_cast<int>(j) == target) g -= 1.0;
        t.grad()[j] += (*og)[0] * g;
      }
    });
  }
  return out;
}

Tensor binary_cross_entropy(const Tensor& probs, const std::vector<double>& targets,
                            Reduction reduction) {
  if (probs.numel() != targets.size()) {
    throw std::invalid_argument("binary_cross_entropy: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(probs.numel()) + " probabilities");
  }
  const std::size_t n = probs.numel();
  const double norm = reduction == Reduction::Mean ? 1.0 / static_cast<double>(n) : 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(probs.at(i), kProbEps, 1.0 - kProbEps);
    total -= targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  Tensor out = Tensor::scalar(total * norm);
  if (track_grad(probs)) {
    out.set_requires_grad(true);
    Tape::current()->record([probs, out, targets, norm]() {
      const auto* og = out_grad(out);
      if (!og) return;
      Tensor t = probs;
      t.ensure_grad();
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const double raw = probs.at(i);
        if (raw <= kProbEps || raw >= 1.0 - kProbEps) continue;  // clamp region is flat
        t.grad()[i] += (*og)[0] * norm * (raw - targets[i]) / (raw * (1.0 - raw));
      }
    });
  }
  return out;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  return add_row_vector(matmul(x, w), b);
}

}  // namespace hopqa
