#pragma once

#include "appt/tensor.hpp"

#include <string_view>

namespace appt {

/// How buggy and patched hidden states are merged, position by position.
///   con: [Hb, Hp]            (2n)
///   add: Hb + Hp             (n)
///   sub: Hb - Hp             (n)
///   pro: Hb ⊙ Hp             (n)
///   mix: [con, add, sub, pro] (5n)
enum class FusionMode { con, add, sub, pro, mix };

inline constexpr FusionMode kAllFusionModes[] = {FusionMode::con, FusionMode::add, FusionMode::sub,
                                                 FusionMode::pro, FusionMode::mix};

FusionMode parse_fusion(std::string_view name);  // throws ConfigError
std::string_view to_string(FusionMode mode);

std::size_t fused_width(std::size_t n, FusionMode mode);

/// Hb and Hp must share a [T×n] shape.
Tensor fuse(const Tensor& hb, const Tensor& hp, FusionMode mode);

}  // namespace appt
