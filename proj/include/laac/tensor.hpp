#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace laac {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t shape_size(const Shape& s);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same length as value
  bool requires_grad = false;
  std::string name;  // nonempty for named parameters
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // reads this->grad, accumulates into parents

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

bool grad_enabled();

}  // namespace detail

// Suppresses graph recording for its lifetime (current thread only).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

// Dense row-major tensor of doubles with reverse-mode autodiff. Ops attach
// backward closures when an operand requires gradients and recording is on;
// the resulting graph lives only as long as the tensors referencing it.
class Tensor {
 public:
  Tensor() = default;

  const Shape& shape() const { return n_->shape; }
  std::size_t size() const { return n_->value.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  const std::vector<double>& values() const { return n_->value; }
  std::vector<double>& mutable_values() { return n_->value; }
  const std::vector<double>& grad() const;
  std::vector<double>& mutable_grad();

  bool defined() const { return n_ != nullptr; }
  bool requires_grad() const { return n_->requires_grad; }
  const std::string& name() const { return n_->name; }

  double scalar() const;
  double at(std::size_t i) const { return n_->value[i]; }
  double at(std::size_t r, std::size_t c) const { return n_->value[r * cols() + c]; }

  Tensor detach() const;
  void zero_grad();

  std::shared_ptr<detail::Node> node() const { return n_; }
  explicit Tensor(std::shared_ptr<detail::Node> n) : n_(std::move(n)) {}

 private:
  std::shared_ptr<detail::Node> n_;
};

Tensor constant(Shape shape, std::vector<double> values);
Tensor full(Shape shape, double v);
Tensor zeros(Shape shape);
Tensor scalar_tensor(double v);
Tensor parameter(Shape shape, std::vector<double> values, std::string name);

// Elementwise/broadcast arithmetic. add() accepts equal shapes, a trailing
// row-vector broadcast against a matrix, or a scalar on either side.
Tensor add(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, double b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, double b);
Tensor sub(double a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, double b);

Tensor matmul(const Tensor& a, const Tensor& b);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor rowwise_sum(const Tensor& a);

// Softmax over the last axis. Columns listed in masked_cols get probability
// exactly 0 and are excluded from normalization. Rank 1 or 2.
Tensor softmax_rows(const Tensor& a, const std::vector<std::size_t>& masked_cols = {});
// Log-softmax with the same masking; masked columns hold 0 and must not be
// selected downstream.
Tensor log_softmax_rows(const Tensor& a, const std::vector<std::size_t>& masked_cols = {});

Tensor gather_rows(const Tensor& table, const std::vector<int>& row_ids);
Tensor take_per_row(const Tensor& m, const std::vector<int>& col_ids);
Tensor concat(const Tensor& a, const Tensor& b, int axis);

// Reverse-mode sweep from a scalar loss. Accumulates into .grad of every
// reachable tensor that requires gradients; visits each node exactly once.
void backward(const Tensor& loss);

}  // namespace laac
