// src/tensor.cpp

// Copyright 2026 The mcihn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcihn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace mcihn {

namespace {

thread_local Tape *g_active_tape = nullptr;

std::size_t Product(const Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void ValidateShape(const Shape &shape) {
  if (shape.empty() || shape.size() > 3)
    throw ShapeError("tensor rank must be 1..3, got " + ShapeToString(shape));
  for (std::size_t e : shape)
    if (e == 0)
      throw ShapeError("tensor extents must be positive, got " +
                       ShapeToString(shape));
}

void RequireMatrix(const Tensor &t, const char *op) {
  if (t.rank() != 2)
    throw ShapeError(std::string(op) + ": expected a matrix, got " +
                     ShapeToString(t.shape()));
}

void RequireSameShape(const Tensor &a, const Tensor &b, const char *op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
}

void CheckFinite(const std::vector<double> &v, const char *op) {
  for (double x : v)
    if (!std::isfinite(x))
      throw NumericError(std::string(op) + ": non-finite result");
}

// Returns the active tape when at least one input needs gradients.
Tape *RecordingTape(std::initializer_list<const Tensor *> inputs) {
  if (g_active_tape == nullptr) return nullptr;
  for (const Tensor *t : inputs)
    if (t->requires_grad()) return g_active_tape;
  return nullptr;
}

Tensor Finish(Shape shape, std::vector<double> data, const char *op) {
  CheckFinite(data, op);
  return Tensor(std::move(shape), std::move(data));
}

}  // namespace

std::string ShapeToString(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor() = default;

Tensor::Tensor(Shape shape, bool requires_grad)
    : impl_(std::make_shared<TensorImpl>()) {
  ValidateShape(shape);
  impl_->data.assign(Product(shape), 0.0);
  impl_->shape = std::move(shape);
  set_requires_grad(requires_grad);
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : impl_(std::make_shared<TensorImpl>()) {
  ValidateShape(shape);
  if (Product(shape) != data.size())
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + ShapeToString(shape));
  impl_->shape = std::move(shape);
  impl_->data = std::move(data);
  set_requires_grad(requires_grad);
}

Tensor Tensor::Zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  return Tensor({rows, cols}, requires_grad);
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> data, bool requires_grad) {
  return Tensor({rows, cols}, std::move(data), requires_grad);
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return Tensor({1, 1}, {value}, requires_grad);
}

Tensor Tensor::Identity(std::size_t n, bool requires_grad) {
  Tensor t({n, n}, requires_grad);
  for (std::size_t i = 0; i < n; ++i) t.impl_->data[i * n + i] = 1.0;
  return t;
}

std::size_t Tensor::rows() const {
  const Shape &s = impl_->shape;
  if (s.size() == 1) return 1;
  return impl_->data.size() / s.back();
}

std::size_t Tensor::cols() const { return impl_->shape.back(); }

double Tensor::item() const {
  if (numel() != 1)
    throw ShapeError("item() on non-scalar tensor " + ShapeToString(shape()));
  return impl_->data[0];
}

void Tensor::set_requires_grad(bool on) {
  impl_->requires_grad = on;
  if (on)
    impl_->grad.assign(impl_->data.size(), 0.0);
  else
    impl_->grad.clear();
}

void Tensor::ZeroGrad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::Clone() const {
  Tensor t(impl_->shape, impl_->data, impl_->requires_grad);
  return t;
}

Tensor Tensor::Detach() const { return Tensor(impl_->shape, impl_->data); }

// ---------------------------------------------------------------------------
// Tape

void Tape::Record(Tensor output, Adjoint adjoint) {
  entries_.push_back({std::move(output), std::move(adjoint)});
}

void Tape::ReplayAdjoints() {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) it->adjoint();
}

Tape *Tape::Active() { return g_active_tape; }

Tape::Scope::Scope(Tape &tape) : previous_(g_active_tape) {
  g_active_tape = &tape;
}
Tape::Scope::~Scope() { g_active_tape = previous_; }

Tape::NoGrad::NoGrad() : previous_(g_active_tape) { g_active_tape = nullptr; }
Tape::NoGrad::~NoGrad() { g_active_tape = previous_; }

void Backward(const Tensor &loss, Tape &tape) {
  if (loss.numel() != 1)
    throw ShapeError("backward: loss must be scalar, got " +
                     ShapeToString(loss.shape()));
  if (!loss.requires_grad()) return;
  Tensor seed = loss;
  seed.mutable_grad()[0] = 1.0;
  tape.ReplayAdjoints();
}

void ZeroGrads(std::span<Tensor> tensors) {
  for (Tensor &t : tensors) t.ZeroGrad();
}

// ---------------------------------------------------------------------------
// Operations

Tensor MatMul(const Tensor &a, const Tensor &b) {
  RequireMatrix(a, "matmul");
  RequireMatrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k)
    throw ShapeError("matmul: inner extents differ, " +
                     ShapeToString(a.shape()) + " x " +
                     ShapeToString(b.shape()));
  std::vector<double> c(m * n, 0.0);
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      const double av = ad[i * k + l];
      const double *brow = &bd[l * n];
      double *crow = &c[i * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  Tensor out = Finish({m, n}, std::move(c), "matmul");
  if (Tape *tape = RecordingTape({&a, &b})) {
    out.set_requires_grad(true);
    tape->Record(out, [a, b, out, m, k, n]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        auto bd = b.data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t l = 0; l < k; ++l) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bd[l * n + j];
            ga[i * k + l] += s;
          }
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        auto ad = a.data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t l = 0; l < k; ++l) {
            const double av = ad[i * k + l];
            for (std::size_t j = 0; j < n; ++j) gb[l * n + j] += av * g[i * n + j];
          }
      }
    });
  }
  return out;
}

Tensor Transpose(const Tensor &a) {
  RequireMatrix(a, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> d(r * c);
  auto ad = a.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) d[j * r + i] = ad[i * c + j];
  Tensor out({c, r}, std::move(d));
  if (Tape *tape = RecordingTape({&a})) {
    out.set_requires_grad(true);
    tape->Record(out, [a, out, r, c]() mutable {
      auto g = out.grad();
      auto ga = a.mutable_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += g[j * r + i];
    });
  }
  return out;
}

namespace {

// Elementwise binary op with per-element partials.
template <typename F, typename Da, typename Db>
Tensor Elementwise2(const Tensor &a, const Tensor &b, const char *op, F f,
                    Da da, Db db) {
  RequireSameShape(a, b, op);
  const std::size_t n = a.numel();
  std::vector<double> d(n);
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < n; ++i) d[i] = f(ad[i], bd[i]);
  Tensor out = Finish(a.shape(), std::move(d), op);
  if (Tape *tape = RecordingTape({&a, &b})) {
    out.set_requires_grad(true);
    tape->Record(out, [a, b, out, n, da, db]() mutable {
      auto g = out.grad();
      auto ad = a.data();
      auto bd = b.data();
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * da(ad[i], bd[i]);
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * db(ad[i], bd[i]);
      }
    });
  }
  return out;
}

// Elementwise unary op; `df(x, y)` receives input and output values.
template <typename F, typename Df>
Tensor Elementwise1(const Tensor &x, const char *op, F f, Df df) {
  const std::size_t n = x.numel();
  std::vector<double> d(n);
  auto xd = x.data();
  for (std::size_t i = 0; i < n; ++i) d[i] = f(xd[i]);
  Tensor out = Finish(x.shape(), std::move(d), op);
  if (Tape *tape = RecordingTape({&x})) {
    out.set_requires_grad(true);
    tape->Record(out, [x, out, n, df]() mutable {
      auto g = out.grad();
      auto xd = x.data();
      auto yd = out.data();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < n; ++i) gx[i] += g[i] * df(xd[i], yd[i]);
    });
  }
  return out;
}

}  // namespace

Tensor Add(const Tensor &a, const Tensor &b) {
  return Elementwise2(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor Sub(const Tensor &a, const Tensor &b) {
  return Elementwise2(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor Mul(const Tensor &a, const Tensor &b) {
  return Elementwise2(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor Affine(const Tensor &a, double scale, double shift) {
  return Elementwise1(
      a, "affine", [=](double x) { return x * scale + shift; },
      [=](double, double) { return scale; });
}

Tensor AddRow(const Tensor &a, const Tensor &row) {
  RequireMatrix(a, "add_row");
  if (row.numel() != a.cols())
    throw ShapeError("add_row: bias " + ShapeToString(row.shape()) +
                     " does not match columns of " + ShapeToString(a.shape()));
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> d(a.data().begin(), a.data().end());
  auto bd = row.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) d[i * c + j] += bd[j];
  Tensor out = Finish(a.shape(), std::move(d), "add_row");
  if (Tape *tape = RecordingTape({&a, &row})) {
    out.set_requires_grad(true);
    tape->Record(out, [a, row, out, r, c]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        for (std::size_t i = 0; i < r * c; ++i) ga[i] += g[i];
      }
      if (row.requires_grad()) {
        auto gb = row.mutable_grad();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) gb[j] += g[i * c + j];
      }
    });
  }
  return out;
}

Tensor Relu(const Tensor &x) {
  return Elementwise1(
      x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Sigmoid(const Tensor &x) {
  return Elementwise1(
      x, "sigmoid",
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Exp(const Tensor &x) {
  return Elementwise1(
      x, "exp", [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor Abs(const Tensor &x) {
  return Elementwise1(
      x, "abs", [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor LogClamped(const Tensor &x, double floor) {
  return Elementwise1(
      x, "log", [=](double v) { return std::log(std::max(v, floor)); },
      [=](double v, double) { return v > floor ? 1.0 / v : 0.0; });
}

Tensor RowSoftmax(const Tensor &m) {
  RequireMatrix(m, "row_softmax");
  const std::size_t r = m.rows(), c = m.cols();
  auto md = m.data();
  std::vector<double> d(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    const double *row = &md[i * c];
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      d[i * c + j] = std::exp(row[j] - mx);
      z += d[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) d[i * c + j] /= z;
  }
  Tensor out = Finish(m.shape(), std::move(d), "row_softmax");
  if (Tape *tape = RecordingTape({&m})) {
    out.set_requires_grad(true);
    tape->Record(out, [m, out, r, c]() mutable {
      auto g = out.grad();
      auto y = out.data();
      auto gm = m.mutable_grad();
      for (std::size_t i = 0; i < r; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
        for (std::size_t j = 0; j < c; ++j)
          gm[i * c + j] += y[i * c + j] * (g[i * c + j] - dot);
      }
    });
  }
  return out;
}

Tensor ConcatCols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat: no parts");
  const std::size_t r = parts[0].rows();
  std::size_t total = 0;
  for (const Tensor &p : parts) {
    RequireMatrix(p, "concat");
    if (p.rows() != r)
      throw ShapeError("concat: row count mismatch " +
                       ShapeToString(parts[0].shape()) + " vs " +
                       ShapeToString(p.shape()));
    total += p.cols();
  }
  std::vector<double> d(r * total);
  std::size_t offset = 0;
  for (const Tensor &p : parts) {
    const std::size_t c = p.cols();
    auto pd = p.data();
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(&pd[i * c], c, &d[i * total + offset]);
    offset += c;
  }
  Tensor out({r, total}, std::move(d));
  Tape *tape = Tape::Active();
  const bool any = std::any_of(parts.begin(), parts.end(),
                               [](const Tensor &p) { return p.requires_grad(); });
  if (tape != nullptr && any) {
    out.set_requires_grad(true);
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape->Record(out, [inputs, out, r, total]() mutable {
      auto g = out.grad();
      std::size_t offset = 0;
      for (Tensor &p : inputs) {
        const std::size_t c = p.cols();
        if (p.requires_grad()) {
          auto gp = p.mutable_grad();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
              gp[i * c + j] += g[i * total + offset + j];
        }
        offset += c;
      }
    });
  }
  return out;
}

Tensor ConcatCols(std::initializer_list<Tensor> parts) {
  return ConcatCols(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor ConcatRows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no parts");
  const std::size_t c = parts[0].cols();
  std::size_t total = 0;
  for (const Tensor &p : parts) {
    RequireMatrix(p, "concat_rows");
    if (p.cols() != c)
      throw ShapeError("concat_rows: column count mismatch " +
                       ShapeToString(parts[0].shape()) + " vs " +
                       ShapeToString(p.shape()));
    total += p.rows();
  }
  std::vector<double> d;
  d.reserve(total * c);
  for (const Tensor &p : parts) d.insert(d.end(), p.data().begin(), p.data().end());
  Tensor out({total, c}, std::move(d));
  Tape *tape = Tape::Active();
  const bool any = std::any_of(parts.begin(), parts.end(),
                               [](const Tensor &p) { return p.requires_grad(); });
  if (tape != nullptr && any) {
    out.set_requires_grad(true);
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape->Record(out, [inputs, out]() mutable {
      auto g = out.grad();
      std::size_t offset = 0;
      for (Tensor &p : inputs) {
        if (p.requires_grad()) {
          auto gp = p.mutable_grad();
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g[offset + i];
        }
        offset += p.numel();
      }
    });
  }
  return out;
}

Tensor SliceCols(const Tensor &x, std::size_t begin, std::size_t end) {
  RequireMatrix(x, "slice_cols");
  if (begin >= end || end > x.cols())
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") outside " +
                     ShapeToString(x.shape()));
  const std::size_t r = x.rows(), c = x.cols(), w = end - begin;
  std::vector<double> d(r * w);
  auto xd = x.data();
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(&xd[i * c + begin], w, &d[i * w]);
  Tensor out({r, w}, std::move(d));
  if (Tape *tape = RecordingTape({&x})) {
    out.set_requires_grad(true);
    tape->Record(out, [x, out, r, c, w, begin]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < w; ++j) gx[i * c + begin + j] += g[i * w + j];
    });
  }
  return out;
}

Tensor MeanRows(const Tensor &x) {
  RequireMatrix(x, "mean_rows");
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> d(c, 0.0);
  auto xd = x.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) d[j] += xd[i * c + j];
  for (double &v : d) v /= static_cast<double>(r);
  Tensor out({1, c}, std::move(d));
  if (Tape *tape = RecordingTape({&x})) {
    out.set_requires_grad(true);
    tape->Record(out, [x, out, r, c]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      const double inv = 1.0 / static_cast<double>(r);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += g[j] * inv;
    });
  }
  return out;
}

Tensor Sum(const Tensor &x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  Tensor out = Finish({1, 1}, {s}, "sum");
  if (Tape *tape = RecordingTape({&x})) {
    out.set_requires_grad(true);
    tape->Record(out, [x, out]() mutable {
      const double g = out.grad()[0];
      for (double &gx : x.mutable_grad()) gx += g;
    });
  }
  return out;
}

Tensor Mean(const Tensor &x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  const double n = static_cast<double>(x.numel());
  Tensor out = Finish({1, 1}, {s / n}, "mean");
  if (Tape *tape = RecordingTape({&x})) {
    out.set_requires_grad(true);
    tape->Record(out, [x, out, n]() mutable {
      const double g = out.grad()[0] / n;
      for (double &gx : x.mutable_grad()) gx += g;
    });
  }
  return out;
}

Tensor PairwiseSquaredDistance(const Tensor &x, const Tensor &y) {
  RequireMatrix(x, "pairwise_sq_dist");
  RequireMatrix(y, "pairwise_sq_dist");
  if (x.cols() != y.cols())
    throw ShapeError("pairwise_sq_dist: column mismatch " +
                     ShapeToString(x.shape()) + " vs " +
                     ShapeToString(y.shape()));
  const std::size_t m = x.rows(), n = y.rows(), c = x.cols();
  auto xd = x.data();
  auto yd = y.data();
  std::vector<double> d(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        const double diff = xd[i * c + k] - yd[j * c + k];
        s += diff * diff;
      }
      d[i * n + j] = s;
    }
  Tensor out = Finish({m, n}, std::move(d), "pairwise_sq_dist");
  if (Tape *tape = RecordingTape({&x, &y})) {
    out.set_requires_grad(true);
    tape->Record(out, [x, y, out, m, n, c]() mutable {
      auto g = out.grad();
      auto xd = x.data();
      auto yd = y.data();
      const bool gx_on = x.requires_grad(), gy_on = y.requires_grad();
      std::span<double> gx, gy;
      if (gx_on) gx = x.mutable_grad();
      if (gy_on) gy = y.mutable_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double w = 2.0 * g[i * n + j];
          for (std::size_t k = 0; k < c; ++k) {
            const double diff = xd[i * c + k] - yd[j * c + k];
            if (gx_on) gx[i * c + k] += w * diff;
            if (gy_on) gy[j * c + k] -= w * diff;
          }
        }
    });
  }
  return out;
}

Tensor Dropout(const Tensor &x, double p, std::mt19937_64 &rng,
               bool training) {
  if (p < 0.0 || p >= 1.0)
    throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (!training || p == 0.0) return x;
  const std::size_t n = x.numel();
  const double keep_scale = 1.0 / (1.0 - p);
  std::bernoulli_distribution keep(1.0 - p);
  std::vector<double> mask(n);
  for (double &m : mask) m = keep(rng) ? keep_scale : 0.0;
  std::vector<double> d(n);
  auto xd = x.data();
  for (std::size_t i = 0; i < n; ++i) d[i] = xd[i] * mask[i];
  Tensor out(x.shape(), std::move(d));
  if (Tape *tape = RecordingTape({&x})) {
    out.set_requires_grad(true);
    tape->Record(out, [x, out, mask = std::move(mask)]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * mask[i];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------

double GradCheck(const std::function<Tensor()> &fn, std::span<Tensor> params,
                 double eps) {
  ZeroGrads(params);
  Tape tape;
  Tensor loss;
  {
    Tape::Scope scope(tape);
    loss = fn();
  }
  if (!std::isfinite(loss.item()))
    throw NumericError("grad_check: non-finite function value");
  Backward(loss, tape);

  auto eval = [&fn]() {
    Tape::NoGrad no_grad;
    const double v = fn().item();
    if (!std::isfinite(v))
      throw NumericError("grad_check: non-finite function value");
    return v;
  };

  double worst = 0.0;
  for (Tensor &p : params) {
    std::vector<double> analytic(p.grad().begin(), p.grad().end());
    auto data = p.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + eps;
      const double up = eval();
      data[i] = saved - eps;
      const double down = eval();
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double scale =
          std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
    }
  }
  return worst;
}

double GradCheck(const std::function<Tensor()> &fn, Tensor theta, double eps) {
  return GradCheck(fn, std::span<Tensor>(&theta, 1), eps);
}

Tensor GlorotUniform(std::size_t rows, std::size_t cols, std::mt19937_64 &rng,
                     bool requires_grad) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> d(rows * cols);
  for (double &v : d) v = dist(rng);
  return Tensor({rows, cols}, std::move(d), requires_grad);
}

Tensor RandomNormal(std::size_t rows, std::size_t cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> d(rows * cols);
  for (double &v : d) v = dist(rng);
  return Tensor({rows, cols}, std::move(d));
}

}  // namespace mcihn
