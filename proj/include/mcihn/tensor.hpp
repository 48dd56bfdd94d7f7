// include/mcihn/tensor.hpp

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

#ifndef MCIHN_TENSOR_HPP_
#define MCIHN_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcihn {

using Shape = std::vector<std::size_t>;

std::string ShapeToString(const Shape &shape);

/// Raised when operand extents are incompatible. The message names both shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation would store a NaN or Inf.
class NumericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty unless requires_grad
  bool requires_grad = false;
};

/// Dense row-major real tensor of rank 1..3 with an optional gradient
/// buffer. Copies share storage; use Clone() for a deep copy.
///
/// Matrix operations work on rank-2 tensors. Scalars are 1x1.
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor Zeros(std::size_t rows, std::size_t cols,
                      bool requires_grad = false);
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> data, bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);
  static Tensor Identity(std::size_t n, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape &shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t numel() const { return impl_->data.size(); }
  /// Extents of a rank-2 view. Rank-1 tensors read as one row.
  std::size_t rows() const;
  std::size_t cols() const;

  // Spans view shared storage; binding one from a temporary handle would
  // dangle once the handle dies, so rvalue access is disabled.
  std::span<const double> data() const & { return impl_->data; }
  std::span<const double> data() const && = delete;
  std::span<double> mutable_data() { return impl_->data; }
  std::span<const double> grad() const & { return impl_->grad; }
  std::span<const double> grad() const && = delete;
  // Handle semantics: grad storage is shared, so const handles may accumulate.
  std::span<double> mutable_grad() const { return impl_->grad; }

  double at(std::size_t r, std::size_t c) const {
    return impl_->data[r * cols() + c];
  }
  double item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool on);
  void ZeroGrad();

  /// Deep copy of data (and grad flag, with a zeroed grad buffer).
  Tensor Clone() const;
  /// Copies of data only, detached from any tape.
  Tensor Detach() const;

  bool SameStorage(const Tensor &other) const { return impl_ == other.impl_; }
  const TensorImpl *impl() const { return impl_.get(); }

 private:
  std::shared_ptr<TensorImpl> impl_;
};

/// Ordered record of executed differentiable operations. Operations record
/// into the tape that is active on the calling thread (see Tape::Scope);
/// when no tape is active nothing is recorded and no gradients flow.
class Tape {
 public:
  using Adjoint = std::function<void()>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  void Record(Tensor output, Adjoint adjoint);
  std::size_t size() const { return entries_.size(); }
  void Clear() { entries_.clear(); }

  /// Runs every recorded adjoint once, newest first.
  void ReplayAdjoints();

  static Tape *Active();

  class Scope {
   public:
    explicit Scope(Tape &tape);
    ~Scope();
    Scope(const Scope &) = delete;
    Scope &operator=(const Scope &) = delete;

   private:
    Tape *previous_;
  };

  /// Suspends recording on this thread for the lifetime of the guard.
  class NoGrad {
   public:
    NoGrad();
    ~NoGrad();
    NoGrad(const NoGrad &) = delete;
    NoGrad &operator=(const NoGrad &) = delete;

   private:
    Tape *previous_;
  };

 private:
  struct Entry {
    Tensor output;
    Adjoint adjoint;
  };
  std::vector<Entry> entries_;
};

/// Seeds d(loss)/d(loss) = 1 and replays the tape in reverse. Gradients
/// accumulate into leaves; call ZeroGrad on parameters beforehand.
void Backward(const Tensor &loss, Tape &tape);

void ZeroGrads(std::span<Tensor> tensors);

// Differentiable operations. All take rank-2 operands unless noted.

Tensor MatMul(const Tensor &a, const Tensor &b);
Tensor Transpose(const Tensor &a);
Tensor Add(const Tensor &a, const Tensor &b);
Tensor Sub(const Tensor &a, const Tensor &b);
/// Elementwise product.
Tensor Mul(const Tensor &a, const Tensor &b);
/// a * scale + shift, elementwise.
Tensor Affine(const Tensor &a, double scale, double shift = 0.0);
/// Adds a 1 x cols row vector to every row of a.
Tensor AddRow(const Tensor &a, const Tensor &row);
Tensor Relu(const Tensor &x);
Tensor Sigmoid(const Tensor &x);
Tensor Exp(const Tensor &x);
Tensor Abs(const Tensor &x);
/// log(max(x, floor)); the gradient is zero where the clamp is active.
Tensor LogClamped(const Tensor &x, double floor);
/// Softmax along each row, stabilized by subtracting the row max.
Tensor RowSoftmax(const Tensor &m);
/// Appends columns of every part, in argument order.
Tensor ConcatCols(std::span<const Tensor> parts);
Tensor ConcatCols(std::initializer_list<Tensor> parts);
/// Stacks rows of every part, in argument order.
Tensor ConcatRows(std::span<const Tensor> parts);
Tensor SliceCols(const Tensor &x, std::size_t begin, std::size_t end);
Tensor MeanRows(const Tensor &x);
Tensor Sum(const Tensor &x);
Tensor Mean(const Tensor &x);
/// out[i][j] = |x_i - y_j|^2 for row vectors of x and y.
Tensor PairwiseSquaredDistance(const Tensor &x, const Tensor &y);
/// Inverted dropout: kept entries are scaled by 1/(1-p). Identity when
/// training is false or p == 0.
Tensor Dropout(const Tensor &x, double p, std::mt19937_64 &rng, bool training);

/// Max over coordinates of |analytic - numeric| / max(1, |analytic|, |numeric|)
/// where numeric is the central difference with step eps. `fn` must build
/// its scalar result from the current values of `params`.
double GradCheck(const std::function<Tensor()> &fn, std::span<Tensor> params,
                 double eps = 1e-5);
double GradCheck(const std::function<Tensor()> &fn, Tensor theta,
                 double eps = 1e-5);

/// Glorot-uniform matrix, bound sqrt(6 / (rows + cols)).
Tensor GlorotUniform(std::size_t rows, std::size_t cols, std::mt19937_64 &rng,
                     bool requires_grad = true);
Tensor RandomNormal(std::size_t rows, std::size_t cols, std::mt19937_64 &rng);

}  // namespace mcihn

#endif  // MCIHN_TENSOR_HPP_
