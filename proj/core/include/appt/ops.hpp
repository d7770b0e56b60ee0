#pragma once

#include "appt/tensor.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace appt {

/// The single seeded generator threaded through initialisation, dropout and
/// shuffling.
using Rng = std::mt19937_64;

enum class Mode { train, eval };

// Linear algebra. All matrix operations take rank-2 tensors.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Element-wise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, real factor);
Tensor add_scalar(const Tensor& a, real value);

/// x [m×n] plus a length-n vector broadcast over rows.
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor relu(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor log(const Tensor& x);

/// Clamp into [lo, hi]; the gradient is zero where the clamp is active.
Tensor clamp(const Tensor& x, real lo, real hi);

/// Numerically stable softmax along `axis` (max-subtracted).
Tensor softmax(const Tensor& x, std::size_t axis);

/// Normalise each row of the last axis to zero mean and unit variance,
/// then apply `scale` and `shift` (both of length equal to the last extent).
Tensor layer_norm(const Tensor& x, const Tensor& scale, const Tensor& shift, real eps = real(1e-5));

/// Inverted dropout: zero each element with probability `rate` and scale
/// survivors by 1/(1-rate). Identity in eval mode.
Tensor dropout(const Tensor& x, real rate, Mode mode, Rng& rng);

Tensor sum(const Tensor& x);

// Structural operations on rank-2 tensors.
Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count);
Tensor row(const Tensor& x, std::size_t r);

/// Rows of `table` selected by `ids`; the gradient scatters back.
Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids);

}  // namespace appt
