#include "appt/fusion.hpp"

#include "appt/errors.hpp"
#include "appt/ops.hpp"

#include <array>

namespace appt {

FusionMode parse_fusion(std::string_view name) {
    for (auto m : kAllFusionModes) {
        if (to_string(m) == name) return m;
    }
    throw ConfigError("unknown fusion mode '" + std::string(name) + "' (con|add|sub|pro|mix)");
}

std::string_view to_string(FusionMode mode) {
    switch (mode) {
        case FusionMode::con: return "con";
        case FusionMode::add: return "add";
        case FusionMode::sub: return "sub";
        case FusionMode::pro: return "pro";
        case FusionMode::mix: return "mix";
    }
    return "?";
}

std::size_t fused_width(std::size_t n, FusionMode mode) {
    switch (mode) {
        case FusionMode::con: return 2 * n;
        case FusionMode::mix: return 5 * n;
        default: return n;
    }
}

Tensor fuse(const Tensor& hb, const Tensor& hp, FusionMode mode) {
    if (hb.rank() != 2 || hb.shape() != hp.shape()) {
        throw DimensionError("fuse: buggy " + to_string(hb.shape()) + " and patched " + to_string(hp.shape()) +
                             " must be equal-shape matrices");
    }
    switch (mode) {
        case FusionMode::con: {
            const std::array parts{hb, hp};
            return concat_cols(parts);
        }
        case FusionMode::add: return add(hb, hp);
        case FusionMode::sub: return sub(hb, hp);
        case FusionMode::pro: return hadamard(hb, hp);
        case FusionMode::mix: {
            const std::array parts{hb, hp, add(hb, hp), sub(hb, hp), hadamard(hb, hp)};
            return concat_cols(parts);
        }
    }
    throw ConfigError("unknown fusion mode");
}

}  // namespace appt
