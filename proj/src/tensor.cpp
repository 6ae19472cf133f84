#include "laac/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace laac {

std::string shape_str(const Shape& s) {
  if (s.empty()) return "[scalar]";
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  out += "]";
  return out;
}

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

namespace detail {

namespace {
thread_local int g_no_grad_depth = 0;
}

bool grad_enabled() { return g_no_grad_depth == 0; }

}  // namespace detail

NoGradGuard::NoGradGuard() { ++detail::g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --detail::g_no_grad_depth; }

namespace {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

NodePtr make_node(Shape shape, std::vector<double> value) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  return n;
}

bool track(std::initializer_list<const Tensor*> inputs) {
  if (!detail::grad_enabled()) return false;
  for (const Tensor* t : inputs)
    if (t->requires_grad()) return true;
  return false;
}

void attach(const NodePtr& out, std::initializer_list<Tensor> parents,
            std::function<void(Node&)> fn) {
  out->requires_grad = true;
  for (const Tensor& p : parents) out->parents.push_back(p.node());
  out->backprop = std::move(fn);
}

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_str(a) +
                              " and " + shape_str(b));
}

}  // namespace

std::size_t Tensor::rows() const {
  if (n_->shape.size() != 2) throw std::invalid_argument("rows(): tensor is not rank 2, shape " + shape_str(n_->shape));
  return n_->shape[0];
}

std::size_t Tensor::cols() const {
  if (n_->shape.size() != 2) throw std::invalid_argument("cols(): tensor is not rank 2, shape " + shape_str(n_->shape));
  return n_->shape[1];
}

const std::vector<double>& Tensor::grad() const {
  n_->ensure_grad();
  return n_->grad;
}

std::vector<double>& Tensor::mutable_grad() {
  n_->ensure_grad();
  return n_->grad;
}

double Tensor::scalar() const {
  if (size() != 1)
    throw std::invalid_argument("scalar(): tensor has shape " + shape_str(n_->shape));
  return n_->value[0];
}

Tensor Tensor::detach() const {
  return constant(n_->shape, n_->value);
}

void Tensor::zero_grad() {
  n_->grad.assign(n_->value.size(), 0.0);
}

Tensor constant(Shape shape, std::vector<double> values) {
  if (shape_size(shape) != values.size())
    throw std::invalid_argument("constant(): shape " + shape_str(shape) + " does not hold " +
                                std::to_string(values.size()) + " values");
  return Tensor(make_node(std::move(shape), std::move(values)));
}

Tensor full(Shape shape, double v) {
  std::vector<double> vals(shape_size(shape), v);
  return Tensor(make_node(std::move(shape), std::move(vals)));
}

Tensor zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor scalar_tensor(double v) { return Tensor(make_node({}, {v})); }

Tensor parameter(Shape shape, std::vector<double> values, std::string name) {
  Tensor t = constant(std::move(shape), std::move(values));
  t.node()->requires_grad = true;
  t.node()->name = std::move(name);
  return t;
}

// ---------------------------------------------------------------------------
// arithmetic

Tensor add(const Tensor& a, const Tensor& b) {
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  // scalar on either side
  if (b.size() == 1 && sb.empty()) {
    auto out = make_node(sa, a.values());
    for (auto& v : out->value) v += b.at(0);
    if (track({&a, &b}))
      attach(out, {a, b}, [](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
          pa.ensure_grad();
          for (std::size_t i = 0; i < n.grad.size(); ++i) pa.grad[i] += n.grad[i];
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          for (double g : n.grad) pb.grad[0] += g;
        }
      });
    return Tensor(out);
  }
  if (a.size() == 1 && sa.empty()) return add(b, a);
  // matrix + row vector broadcast
  if (sa.size() == 2 && sb.size() == 1 && sa[1] == sb[0]) {
    const std::size_t r = sa[0], c = sa[1];
    auto out = make_node(sa, a.values());
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out->value[i * c + j] += b.at(j);
    if (track({&a, &b}))
      attach(out, {a, b}, [r, c](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
          pa.ensure_grad();
          for (std::size_t i = 0; i < n.grad.size(); ++i) pa.grad[i] += n.grad[i];
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) pb.grad[j] += n.grad[i * c + j];
        }
      });
    return Tensor(out);
  }
  if (sa != sb) shape_error("add", sa, sb);
  auto out = make_node(sa, a.values());
  for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] += b.at(i);
  if (track({&a, &b}))
    attach(out, {a, b}, [](Node& n) {
      for (auto& p : n.parents) {
        if (!p->requires_grad) continue;
        p->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) p->grad[i] += n.grad[i];
      }
    });
  return Tensor(out);
}

Tensor add(const Tensor& a, double b) { return add(a, scalar_tensor(b)); }

Tensor neg(const Tensor& a) { return mul(a, -1.0); }

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, neg(b)); }

Tensor sub(const Tensor& a, double b) { return add(a, -b); }

Tensor sub(double a, const Tensor& b) { return add(neg(b), a); }

Tensor mul(const Tensor& a, const Tensor& b) {
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  if (b.size() == 1 && sb.empty()) {
    auto out = make_node(sa, a.values());
    const double s = b.at(0);
    for (auto& v : out->value) v *= s;
    if (track({&a, &b}))
      attach(out, {a, b}, [s](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
          pa.ensure_grad();
          for (std::size_t i = 0; i < n.grad.size(); ++i) pa.grad[i] += n.grad[i] * s;
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          for (std::size_t i = 0; i < n.grad.size(); ++i) pb.grad[0] += n.grad[i] * pa.value[i];
        }
      });
    return Tensor(out);
  }
  if (a.size() == 1 && sa.empty()) return mul(b, a);
  if (sa != sb) shape_error("mul", sa, sb);
  auto out = make_node(sa, a.values());
  for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] *= b.at(i);
  if (track({&a, &b}))
    attach(out, {a, b}, [](Node& n) {
      auto& pa = *n.parents[0];
      auto& pb = *n.parents[1];
      if (pa.requires_grad) {
        pa.ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) pa.grad[i] += n.grad[i] * pb.value[i];
      }
      if (pb.requires_grad) {
        pb.ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) pb.grad[i] += n.grad[i] * pa.value[i];
      }
    });
  return Tensor(out);
}

Tensor mul(const Tensor& a, double b) { return mul(a, scalar_tensor(b)); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.shape()[1] != b.shape()[0])
    shape_error("matmul", a.shape(), b.shape());
  const std::size_t r = a.shape()[0], k = a.shape()[1], c = b.shape()[1];
  std::vector<double> out(r * c, 0.0);
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = av[i * k + kk];
      if (aik == 0.0) continue;
      const double* brow = bv.data() + kk * c;
      double* orow = out.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) orow[j] += aik * brow[j];
    }
  }
  auto node = make_node({r, c}, std::move(out));
  if (track({&a, &b}))
    attach(node, {a, b}, [r, k, c](Node& n) {
      auto& pa = *n.parents[0];
      auto& pb = *n.parents[1];
      if (pa.requires_grad) {
        pa.ensure_grad();
        // ga += g . b^T
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) {
            const double g = n.grad[i * c + j];
            if (g == 0.0) continue;
            for (std::size_t kk = 0; kk < k; ++kk) pa.grad[i * k + kk] += g * pb.value[kk * c + j];
          }
      }
      if (pb.requires_grad) {
        pb.ensure_grad();
        // gb += a^T . g
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = pa.value[i * k + kk];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < c; ++j) pb.grad[kk * c + j] += av * n.grad[i * c + j];
          }
      }
    });
  return Tensor(node);
}

// ---------------------------------------------------------------------------
// unary elementwise

namespace {

Tensor unary(const Tensor& a, double (*f)(double),
             std::function<double(double y, double x)> dydx) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a.at(i));
  auto node = make_node(a.shape(), std::move(out));
  if (track({&a}))
    attach(node, {a}, [dydx = std::move(dydx)](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i)
        p.grad[i] += n.grad[i] * dydx(n.value[i], p.value[i]);
    });
  return Tensor(node);
}

}  // namespace

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double y, double) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, [](double x) { return std::tanh(x); }, [](double y, double) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double y, double) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(
      a, [](double x) { return std::log(x); }, [](double, double x) { return 1.0 / x; });
}

Tensor square(const Tensor& a) {
  return unary(
      a, [](double x) { return x * x; }, [](double, double x) { return 2.0 * x; });
}

// ---------------------------------------------------------------------------
// reductions

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.at(i);
  auto node = make_node({}, {s});
  if (track({&a}))
    attach(node, {a}, [](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      const double g = n.grad[0];
      for (auto& pg : p.grad) pg += g;
    });
  return Tensor(node);
}

Tensor mean_all(const Tensor& a) {
  if (a.size() == 0) throw std::invalid_argument("mean_all(): empty tensor");
  const double inv = 1.0 / static_cast<double>(a.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.at(i);
  auto node = make_node({}, {s * inv});
  if (track({&a}))
    attach(node, {a}, [inv](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      const double g = n.grad[0] * inv;
      for (auto& pg : p.grad) pg += g;
    });
  return Tensor(node);
}

Tensor rowwise_sum(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i] += a.at(i, j);
  auto node = make_node({r}, std::move(out));
  if (track({&a}))
    attach(node, {a}, [r, c](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) p.grad[i * c + j] += n.grad[i];
    });
  return Tensor(node);
}

// ---------------------------------------------------------------------------
// softmax

namespace {

struct RowsView {
  std::size_t rows, cols;
};

RowsView rows_view(const Tensor& a, const char* op) {
  if (a.shape().size() == 1) return {1, a.shape()[0]};
  if (a.shape().size() == 2) return {a.shape()[0], a.shape()[1]};
  throw std::invalid_argument(std::string(op) + ": expected rank 1 or 2, got shape " +
                              shape_str(a.shape()));
}

std::vector<char> mask_of(std::size_t cols, const std::vector<std::size_t>& masked,
                          const char* op) {
  std::vector<char> m(cols, 0);
  for (auto j : masked) {
    if (j >= cols)
      throw std::invalid_argument(std::string(op) + ": masked column " + std::to_string(j) +
                                  " out of range for " + std::to_string(cols) + " columns");
    m[j] = 1;
  }
  if (static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)) == cols)
    throw std::invalid_argument(std::string(op) + ": all columns masked");
  return m;
}

}  // namespace

Tensor softmax_rows(const Tensor& a, const std::vector<std::size_t>& masked_cols) {
  const auto v = rows_view(a, "softmax_rows");
  const auto mask = mask_of(v.cols, masked_cols, "softmax_rows");
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < v.rows; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < v.cols; ++j)
      if (!mask[j]) mx = std::max(mx, a.at(i * v.cols + j));
    double denom = 0.0;
    for (std::size_t j = 0; j < v.cols; ++j)
      if (!mask[j]) {
        out[i * v.cols + j] = std::exp(a.at(i * v.cols + j) - mx);
        denom += out[i * v.cols + j];
      }
    for (std::size_t j = 0; j < v.cols; ++j)
      if (!mask[j]) out[i * v.cols + j] /= denom;
  }
  auto node = make_node(a.shape(), std::move(out));
  if (track({&a}))
    attach(node, {a}, [v, mask](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      for (std::size_t i = 0; i < v.rows; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < v.cols; ++j)
          dot += n.grad[i * v.cols + j] * n.value[i * v.cols + j];
        for (std::size_t j = 0; j < v.cols; ++j) {
          if (mask[j]) continue;
          const double y = n.value[i * v.cols + j];
          p.grad[i * v.cols + j] += y * (n.grad[i * v.cols + j] - dot);
        }
      }
    });
  return Tensor(node);
}

Tensor log_softmax_rows(const Tensor& a, const std::vector<std::size_t>& masked_cols) {
  const auto v = rows_view(a, "log_softmax_rows");
  const auto mask = mask_of(v.cols, masked_cols, "log_softmax_rows");
  std::vector<double> out(a.size(), 0.0);
  std::vector<double> soft(a.size(), 0.0);  // saved for backward
  for (std::size_t i = 0; i < v.rows; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < v.cols; ++j)
      if (!mask[j]) mx = std::max(mx, a.at(i * v.cols + j));
    double denom = 0.0;
    for (std::size_t j = 0; j < v.cols; ++j)
      if (!mask[j]) denom += std::exp(a.at(i * v.cols + j) - mx);
    const double logz = mx + std::log(denom);
    for (std::size_t j = 0; j < v.cols; ++j)
      if (!mask[j]) {
        out[i * v.cols + j] = a.at(i * v.cols + j) - logz;
        soft[i * v.cols + j] = std::exp(out[i * v.cols + j]);
      }
  }
  auto node = make_node(a.shape(), std::move(out));
  if (track({&a}))
    attach(node, {a}, [v, mask, soft = std::move(soft)](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      for (std::size_t i = 0; i < v.rows; ++i) {
        double gsum = 0.0;
        for (std::size_t j = 0; j < v.cols; ++j) gsum += n.grad[i * v.cols + j];
        for (std::size_t j = 0; j < v.cols; ++j) {
          if (mask[j]) continue;
          p.grad[i * v.cols + j] += n.grad[i * v.cols + j] - gsum * soft[i * v.cols + j];
        }
      }
    });
  return Tensor(node);
}

// ---------------------------------------------------------------------------
// indexing

Tensor gather_rows(const Tensor& table, const std::vector<int>& row_ids) {
  const std::size_t r = table.rows(), c = table.cols();
  for (int id : row_ids)
    if (id < 0 || static_cast<std::size_t>(id) >= r)
      throw std::invalid_argument("gather_rows(): row index " + std::to_string(id) +
                                  " out of range for " + std::to_string(r) + " rows");
  std::vector<double> out(row_ids.size() * c);
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    std::copy_n(table.values().data() + static_cast<std::size_t>(row_ids[i]) * c, c,
                out.data() + i * c);
  auto node = make_node({row_ids.size(), c}, std::move(out));
  if (track({&table}))
    attach(node, {table}, [row_ids, c](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      for (std::size_t i = 0; i < row_ids.size(); ++i)
        for (std::size_t j = 0; j < c; ++j)
          p.grad[static_cast<std::size_t>(row_ids[i]) * c + j] += n.grad[i * c + j];
    });
  return Tensor(node);
}

Tensor take_per_row(const Tensor& m, const std::vector<int>& col_ids) {
  const std::size_t r = m.rows(), c = m.cols();
  if (col_ids.size() != r)
    throw std::invalid_argument("take_per_row(): " + std::to_string(col_ids.size()) +
                                " indices for " + std::to_string(r) + " rows");
  for (int id : col_ids)
    if (id < 0 || static_cast<std::size_t>(id) >= c)
      throw std::invalid_argument("take_per_row(): column index " + std::to_string(id) +
                                  " out of range for " + std::to_string(c) + " columns");
  std::vector<double> out(r);
  for (std::size_t i = 0; i < r; ++i) out[i] = m.at(i, static_cast<std::size_t>(col_ids[i]));
  auto node = make_node({r}, std::move(out));
  if (track({&m}))
    attach(node, {m}, [col_ids, c](Node& n) {
      auto& p = *n.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      for (std::size_t i = 0; i < col_ids.size(); ++i)
        p.grad[i * c + static_cast<std::size_t>(col_ids[i])] += n.grad[i];
    });
  return Tensor(node);
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  if (a.shape().size() == 1 && b.shape().size() == 1 && axis == 0) {
    std::vector<double> out(a.values());
    out.insert(out.end(), b.values().begin(), b.values().end());
    auto node = make_node({a.size() + b.size()}, std::move(out));
    if (track({&a, &b}))
      attach(node, {a, b}, [na = a.size()](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
          pa.ensure_grad();
          for (std::size_t i = 0; i < na; ++i) pa.grad[i] += n.grad[i];
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          for (std::size_t i = na; i < n.grad.size(); ++i) pb.grad[i - na] += n.grad[i];
        }
      });
    return Tensor(node);
  }
  if (a.shape().size() != 2 || b.shape().size() != 2 || (axis != 0 && axis != 1))
    shape_error("concat", a.shape(), b.shape());
  if (axis == 0) {
    if (a.cols() != b.cols()) shape_error("concat", a.shape(), b.shape());
    std::vector<double> out(a.values());
    out.insert(out.end(), b.values().begin(), b.values().end());
    auto node = make_node({a.rows() + b.rows(), a.cols()}, std::move(out));
    if (track({&a, &b}))
      attach(node, {a, b}, [na = a.size()](Node& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
          pa.ensure_grad();
          for (std::size_t i = 0; i < na; ++i) pa.grad[i] += n.grad[i];
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          for (std::size_t i = na; i < n.grad.size(); ++i) pb.grad[i - na] += n.grad[i];
        }
      });
    return Tensor(node);
  }
  if (a.rows() != b.rows()) shape_error("concat", a.shape(), b.shape());
  const std::size_t r = a.rows(), ca = a.cols(), cb = b.cols();
  std::vector<double> out(r * (ca + cb));
  for (std::size_t i = 0; i < r; ++i) {
    std::copy_n(a.values().data() + i * ca, ca, out.data() + i * (ca + cb));
    std::copy_n(b.values().data() + i * cb, cb, out.data() + i * (ca + cb) + ca);
  }
  auto node = make_node({r, ca + cb}, std::move(out));
  if (track({&a, &b}))
    attach(node, {a, b}, [r, ca, cb](Node& n) {
      auto& pa = *n.parents[0];
      auto& pb = *n.parents[1];
      for (std::size_t i = 0; i < r; ++i) {
        if (pa.requires_grad) {
          pa.ensure_grad();
          for (std::size_t j = 0; j < ca; ++j) pa.grad[i * ca + j] += n.grad[i * (ca + cb) + j];
        }
        if (pb.requires_grad) {
          pb.ensure_grad();
          for (std::size_t j = 0; j < cb; ++j)
            pb.grad[i * cb + j] += n.grad[i * (ca + cb) + ca + j];
        }
      }
    });
  return Tensor(node);
}

// ---------------------------------------------------------------------------
// backward

void backward(const Tensor& loss) {
  if (loss.size() != 1)
    throw std::invalid_argument("backward(): loss must be scalar, got shape " +
                                shape_str(loss.shape()));
  // iterative post-order DFS; reversed = topological order from the loss
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  struct Frame {
    Node* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  Node* root = loss.node().get();
  if (!root->requires_grad) return;  // nothing reachable requires gradients
  stack.push_back({root, 0});
  visited.insert(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      Node* p = f.node->parents[f.next_parent++].get();
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }
  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backprop) {
      n->ensure_grad();
      n->backprop(*n);
    }
  }
}

}  // namespace laac
