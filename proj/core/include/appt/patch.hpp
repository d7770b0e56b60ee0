#pragma once

#include "appt/label.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace appt {

struct RawPatch {
    std::string id;
    std::string diff_text;
    std::optional<Label> label;
};

/// Buggy and patched code snippets recovered from a diff.
struct SnippetPair {
    std::string buggy_text;
    std::string patched_text;

    bool operator==(const SnippetPair&) const = default;
};

/// Split a unified diff into its buggy side (context and removed lines) and
/// patched side (context and added lines). Lines from all hunks are joined
/// in file order with '\n'. File headers and "\ No newline" markers are
/// skipped; hunk extents come from the "@@ -a,b +c,d @@" counts.
///
/// Throws MalformedDiff when no hunk header exists, a hunk body disagrees
/// with its header counts, or a marked line appears outside any hunk.
SnippetPair parse_unified_diff(std::string_view diff_text);

/// Keep the first patch of each group whose diff texts are identical once
/// every whitespace character is removed. Input order is preserved.
std::vector<RawPatch> deduplicate(const std::vector<RawPatch>& patches);

/// Build a single-hunk diff with full context that parse_unified_diff maps
/// back onto exactly (buggy, patched). Lines are aligned by their longest
/// common subsequence.
std::string make_unified_diff(std::string_view buggy, std::string_view patched,
                              std::string_view file_name = "Snippet.java");

}  // namespace appt
