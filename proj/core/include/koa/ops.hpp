#pragma once

#include <functional>
#include <span>
#include <vector>

#include "koa/rng.hpp"
#include "koa/tensor.hpp"

namespace koa::nd {

// All primitives are pure with respect to their inputs (batch_norm's running
// stats and dropout's rng stream are explicit in/out parameters). Passing a
// null tape runs the op without recording; gradients are recorded only when
// the tape is non-null and some input requires grad.

enum class BnMode { Train, Eval };

/// Per-channel running statistics, updated in train mode.
template <class T>
struct BatchNormStateT {
  std::vector<T> running_mean;
  std::vector<T> running_var;

  static BatchNormStateT init(int64_t channels) {
    BatchNormStateT s;
    s.running_mean.assign(static_cast<size_t>(channels), T(0));
    s.running_var.assign(static_cast<size_t>(channels), T(1));
    return s;
  }
};

using BatchNormState = BatchNormStateT<double>;

/// Cross-correlation of [N,Cin,H,W] with [Cout,Cin,kH,kW] plus bias[Cout].
/// Output spatial size: floor((H + 2*padding - kH)/stride) + 1.
template <class T>
TensorT<T> conv2d(TapeT<T>* tape, const TensorT<T>& input,
                  const TensorT<T>& weight, const TensorT<T>& bias, int stride,
                  int padding);

/// Train mode normalizes by batch statistics and updates `state`; eval mode
/// normalizes by `state`. Output: gamma * normalized + beta.
template <class T>
TensorT<T> batch_norm(TapeT<T>* tape, const TensorT<T>& input,
                      const TensorT<T>& gamma, const TensorT<T>& beta,
                      BatchNormStateT<T>& state, BnMode mode, T momentum,
                      T eps);

/// Elementwise max(x, 0); subgradient at 0 is 0.
template <class T>
TensorT<T> relu(TapeT<T>* tape, const TensorT<T>& input);

/// [N,C,H,W] -> [N,C] per-channel spatial mean.
template <class T>
TensorT<T> global_average_pool(TapeT<T>* tape, const TensorT<T>& input);

/// [N,C,H,W] -> [N,C] per-channel spatial max; gradient flows to the first
/// argmax in row-major order.
template <class T>
TensorT<T> global_max_pool(TapeT<T>* tape, const TensorT<T>& input);

/// [N,Din] x [Dout,Din]^T + bias -> [N,Dout].
template <class T>
TensorT<T> affine(TapeT<T>* tape, const TensorT<T>& input,
                  const TensorT<T>& weight, const TensorT<T>& bias);

/// Row-wise softmax with max subtraction, [N,K] -> [N,K].
template <class T>
TensorT<T> softmax(TapeT<T>* tape, const TensorT<T>& logits);

/// Elementwise sum of two same-shape tensors.
template <class T>
TensorT<T> add(TapeT<T>* tape, const TensorT<T>& a, const TensorT<T>& b);

/// Multiplication by a compile-time-constant scalar.
template <class T>
TensorT<T> scale(TapeT<T>* tape, const TensorT<T>& a, T factor);

/// Concatenates [N,Ci] parts along the feature axis, in the given order.
template <class T>
TensorT<T> concat_features(TapeT<T>* tape, std::span<const TensorT<T>> parts);

/// Inverted dropout: keeps with probability 1-rate and rescales by
/// 1/(1-rate). The mask comes from `rng`, one draw per element.
template <class T>
TensorT<T> dropout(TapeT<T>* tape, const TensorT<T>& input, double rate,
                   RngStream& rng);

struct FdCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  int64_t checked = 0;
  bool pass = false;
};

/// Scalar function under audit: evaluates at `x`, recording on `tape` when
/// non-null. Must be deterministic.
using FdScalarFn = std::function<Tensor(Tape*, const Tensor&)>;

/// Central-difference audit of the tape gradient of `f` at `point`.
/// `coords` selects which coordinates to probe (empty = all). Relative error
/// is scaled by max(|analytic|, |numeric|, 1e-8).
FdCheckReport finite_difference_check(const FdScalarFn& f, const Tensor& point,
                                      double step, double tolerance,
                                      std::span<const int64_t> coords = {});

#define KOA_ND_EXTERN_OPS(T)                                                   \
  extern template TensorT<T> conv2d<T>(TapeT<T>*, const TensorT<T>&,           \
                                       const TensorT<T>&, const TensorT<T>&,   \
                                       int, int);                              \
  extern template TensorT<T> batch_norm<T>(TapeT<T>*, const TensorT<T>&,       \
                                           const TensorT<T>&,                  \
                                           const TensorT<T>&,                  \
                                           BatchNormStateT<T>&, BnMode, T, T); \
  extern template TensorT<T> relu<T>(TapeT<T>*, const TensorT<T>&);            \
  extern template TensorT<T> global_average_pool<T>(TapeT<T>*,                 \
                                                    const TensorT<T>&);        \
  extern template TensorT<T> global_max_pool<T>(TapeT<T>*, const TensorT<T>&); \
  extern template TensorT<T> affine<T>(TapeT<T>*, const TensorT<T>&,           \
                                       const TensorT<T>&, const TensorT<T>&);  \
  extern template TensorT<T> softmax<T>(TapeT<T>*, const TensorT<T>&);         \
  extern template TensorT<T> add<T>(TapeT<T>*, const TensorT<T>&,              \
                                    const TensorT<T>&);                        \
  extern template TensorT<T> scale<T>(TapeT<T>*, const TensorT<T>&, T);        \
  extern template TensorT<T> concat_features<T>(TapeT<T>*,                     \
                                                std::span<const TensorT<T>>);  \
  extern template TensorT<T> dropout<T>(TapeT<T>*, const TensorT<T>&, double,  \
                                        RngStream&);

KOA_ND_EXTERN_OPS(double)
KOA_ND_EXTERN_OPS(float)
#undef KOA_ND_EXTERN_OPS

}  // namespace koa::nd
