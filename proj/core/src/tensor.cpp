#include "koa/tensor.hpp"

#include <cmath>
#include <sstream>

namespace koa::nd {

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t e : s) {
    if (e <= 0) throw DimensionError("shape extents must be positive, got " + shape_str(s));
    n *= e;
  }
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

template <class T>
TensorT<T> TensorT<T>::zeros(Shape shape, bool requires_grad) {
  auto impl = std::make_shared<Impl>();
  int64_t n = shape_numel(shape);
  impl->shape = std::move(shape);
  impl->data.assign(static_cast<size_t>(n), T(0));
  impl->requires_grad = requires_grad;
  return TensorT(std::move(impl));
}

template <class T>
TensorT<T> TensorT<T>::full(Shape shape, T value, bool requires_grad) {
  auto t = zeros(std::move(shape), requires_grad);
  for (T& v : t.impl_->data) v = value;
  return t;
}

template <class T>
TensorT<T> TensorT<T>::from_vector(Shape shape, std::vector<T> values,
                                   bool requires_grad) {
  int64_t n = shape_numel(shape);
  if (n != static_cast<int64_t>(values.size())) {
    throw DimensionError("value count " + std::to_string(values.size()) +
                         " does not match shape " + shape_str(shape));
  }
  for (T v : values) {
    if (!std::isfinite(static_cast<double>(v))) {
      throw NumericError("non-finite value rejected at tensor ingestion");
    }
  }
  auto impl = std::make_shared<Impl>();
  impl->shape = std::move(shape);
  impl->data = std::move(values);
  impl->requires_grad = requires_grad;
  return TensorT(std::move(impl));
}

template <class T>
TensorT<T> TensorT<T>::scalar_of(T value) {
  return from_vector({1}, {value});
}

template <class T>
int64_t TensorT<T>::dim(int64_t i) const {
  if (i < 0 || i >= ndim()) {
    throw DimensionError("axis " + std::to_string(i) + " out of range for " +
                         shape_str(impl_->shape));
  }
  return impl_->shape[static_cast<size_t>(i)];
}

template <class T>
T TensorT<T>::scalar_value() const {
  if (numel() != 1) {
    throw UsageError("scalar_value() on tensor of shape " + shape_str(impl_->shape));
  }
  return impl_->data[0];
}

template <class T>
std::span<T> TensorT<T>::grad_mut() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), T(0));
  return impl_->grad;
}

template <class T>
TensorT<T> TensorT<T>::clone() const {
  auto impl = std::make_shared<Impl>();
  impl->shape = impl_->shape;
  impl->data = impl_->data;
  impl->requires_grad = impl_->requires_grad;
  return TensorT(std::move(impl));
}

template <class T>
void TapeT<T>::record(const char* op, std::initializer_list<TensorT<T>> inputs,
                      const TensorT<T>& output, std::function<void()> backward) {
  int64_t id = static_cast<int64_t>(nodes_.size());
  for (const auto& in : inputs) {
    if (in.impl()->producer >= id) {
      throw UsageError(std::string("tape order violated: input of '") + op +
                       "' produced by a later node");
    }
  }
  output.impl()->producer = id;
  nodes_.push_back(Node{op, std::move(backward)});
}

template <class T>
void TapeT<T>::backward(const TensorT<T>& scalar_output) {
  if (consumed_) {
    throw UsageError("backward called twice on the same tape; reset() first");
  }
  if (scalar_output.numel() != 1) {
    throw UsageError("backward requires a scalar output, got shape " +
                     shape_str(scalar_output.shape()));
  }
  consumed_ = true;
  scalar_output.impl()->grad.assign(1, T(1));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    it->backward();
  }
}

template <class T>
void TapeT<T>::reset() {
  nodes_.clear();
  consumed_ = false;
}

template class TensorT<double>;
template class TensorT<float>;
template class TapeT<double>;
template class TapeT<float>;

}  // namespace koa::nd
