#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "koa/errors.hpp"

namespace koa::nd {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {

template <class T>
struct TensorImpl {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until materialized during backward
  bool requires_grad = false;
  int64_t producer = -1;  // tape node that wrote this tensor, -1 for leaves
};

}  // namespace detail

/// Dense n-dimensional array with shared-storage handle semantics: copying a
/// TensorT aliases the same buffer. Gradients accumulate into `grad` during
/// Tape::backward.
template <class T>
class TensorT {
 public:
  using Impl = detail::TensorImpl<T>;

  TensorT() = default;

  static TensorT zeros(Shape shape, bool requires_grad = false);
  static TensorT full(Shape shape, T value, bool requires_grad = false);
  /// Validates size and rejects non-finite values.
  static TensorT from_vector(Shape shape, std::vector<T> values,
                             bool requires_grad = false);
  static TensorT scalar_of(T value);

  bool defined() const { return static_cast<bool>(impl_); }
  const Shape& shape() const { return impl_->shape; }
  int64_t ndim() const { return static_cast<int64_t>(impl_->shape.size()); }
  int64_t dim(int64_t i) const;
  int64_t numel() const { return static_cast<int64_t>(impl_->data.size()); }

  std::span<const T> values() const { return impl_->data; }
  std::span<T> values_mut() { return impl_->data; }
  T scalar_value() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool rg) { impl_->requires_grad = rg; }

  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const T> grad() const { return impl_->grad; }
  /// Materializes a zero gradient buffer on first use.
  std::span<T> grad_mut();
  void zero_grad() { impl_->grad.clear(); }

  /// Deep copy of the values (fresh storage, no grad, same requires_grad).
  TensorT clone() const;

  /// True if both handles alias the same storage.
  bool same_storage(const TensorT& other) const { return impl_ == other.impl_; }

  const std::shared_ptr<Impl>& impl() const { return impl_; }

 private:
  explicit TensorT(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

/// Ordered record of executed primitives. Backward replays it once, in
/// reverse; each node's closure pulls the output gradient and accumulates
/// into the inputs. A consumed tape must be reset before reuse.
template <class T>
class TapeT {
 public:
  /// Records one executed op. Inputs must already exist (their producing
  /// nodes precede this one); enforced to keep the record topological.
  void record(const char* op, std::initializer_list<TensorT<T>> inputs,
              const TensorT<T>& output, std::function<void()> backward);

  /// Seeds d(output)/d(output)=1 and propagates through the record in
  /// reverse. Throws UsageError for non-scalar outputs or a consumed tape.
  void backward(const TensorT<T>& scalar_output);

  void reset();
  size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

 private:
  struct Node {
    const char* op;
    std::function<void()> backward;
  };
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

using Tensor = TensorT<double>;
using Tape = TapeT<double>;

extern template class TensorT<double>;
extern template class TensorT<float>;
extern template class TapeT<double>;
extern template class TapeT<float>;

}  // namespace koa::nd
