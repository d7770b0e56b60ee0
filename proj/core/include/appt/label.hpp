#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace appt {

/// Class index convention used everywhere: 0 = correct, 1 = overfitting.
/// Overfitting is the positive class for metrics.
enum class Label : int { correct = 0, overfitting = 1 };

inline constexpr std::string_view to_string(Label label) {
    return label == Label::correct ? "correct" : "overfitting";
}

std::optional<Label> parse_label(std::string_view text);

}  // namespace appt
