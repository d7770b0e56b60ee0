#pragma once

#include "appt/patch.hpp"

#include <cstdint>
#include <vector>

namespace appt {

/// Desk-scale labelled corpus of 2·per_class Java-like patches in two
/// separable families:
///   overfitting: a hunk that only deletes one or two statements;
///   correct:     a hunk that rewrites one literal or operator in place.
/// Output is a deterministic function of (per_class, seed).
std::vector<RawPatch> synthesize_dataset(std::size_t per_class, std::uint64_t seed);

}  // namespace appt
