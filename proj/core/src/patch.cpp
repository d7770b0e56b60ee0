#include "appt/patch.hpp"

#include "appt/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_set>

namespace appt {

std::optional<Label> parse_label(std::string_view text) {
    if (text == "correct") return Label::correct;
    if (text == "overfitting") return Label::overfitting;
    return std::nullopt;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    if (text.empty()) return lines;
    std::size_t start = 0;
    while (true) {
        const auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool is_file_header(std::string_view line) {
    static constexpr std::string_view kHeaders[] = {
        "diff ",        "index ",       "--- ",         "+++ ",      "new file mode", "deleted file mode",
        "old mode",     "new mode",     "similarity ",  "rename ",   "copy ",         "Binary files",
        "dissimilarity"};
    if (line == "---" || line == "+++") return true;
    return std::any_of(std::begin(kHeaders), std::end(kHeaders),
                       [&](std::string_view h) { return starts_with(line, h); });
}

bool parse_count(std::string_view& s, std::size_t& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr == first) return false;
    s.remove_prefix(static_cast<std::size_t>(ptr - first));
    return true;
}

// "@@ -a[,b] +c[,d] @@[ section]" -> (b, d); omitted counts default to 1.
std::pair<std::size_t, std::size_t> parse_hunk_header(std::string_view line, std::size_t line_no) {
    auto fail = [&] {
        return MalformedDiff("line " + std::to_string(line_no) + ": malformed hunk header '" +
                             std::string(line) + "'");
    };
    std::string_view s = line;
    if (!starts_with(s, "@@ -")) throw fail();
    s.remove_prefix(4);
    std::size_t start = 0, old_count = 1, new_count = 1;
    if (!parse_count(s, start)) throw fail();
    if (starts_with(s, ",")) {
        s.remove_prefix(1);
        if (!parse_count(s, old_count)) throw fail();
    }
    if (!starts_with(s, " +")) throw fail();
    s.remove_prefix(2);
    if (!parse_count(s, start)) throw fail();
    if (starts_with(s, ",")) {
        s.remove_prefix(1);
        if (!parse_count(s, new_count)) throw fail();
    }
    if (!starts_with(s, " @@")) throw fail();
    return {old_count, new_count};
}

std::string_view strip_marker(std::string_view line) {
    if (line.empty()) return line;
    line.remove_prefix(1);
    if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    return line;
}

std::string join(const std::vector<std::string_view>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

}  // namespace

SnippetPair parse_unified_diff(std::string_view diff_text) {
    std::vector<std::string_view> buggy, patched;
    std::size_t old_left = 0, new_left = 0;
    bool saw_hunk = false;
    std::size_t line_no = 0;

    for (std::string_view line : split_lines(diff_text)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const bool in_hunk = old_left > 0 || new_left > 0;

        if (starts_with(line, "@@")) {
            if (in_hunk) {
                throw MalformedDiff("line " + std::to_string(line_no) +
                                    ": hunk header before the previous hunk body ended");
            }
            std::tie(old_left, new_left) = parse_hunk_header(line, line_no);
            saw_hunk = true;
            continue;
        }
        if (starts_with(line, "\\")) continue;  // "\ No newline at end of file"

        if (in_hunk) {
            const char marker = line.empty() ? ' ' : line.front();
            if (marker == ' ') {
                if (old_left == 0 || new_left == 0) {
                    throw MalformedDiff("line " + std::to_string(line_no) + ": context line exceeds hunk counts");
                }
                const auto text = strip_marker(line);
                buggy.push_back(text);
                patched.push_back(text);
                --old_left;
                --new_left;
            } else if (marker == '-') {
                if (old_left == 0) {
                    throw MalformedDiff("line " + std::to_string(line_no) + ": removed line exceeds hunk counts");
                }
                buggy.push_back(strip_marker(line));
                --old_left;
            } else if (marker == '+') {
                if (new_left == 0) {
                    throw MalformedDiff("line " + std::to_string(line_no) + ": added line exceeds hunk counts");
                }
                patched.push_back(strip_marker(line));
                --new_left;
            } else {
                throw MalformedDiff("line " + std::to_string(line_no) + ": unexpected line inside hunk body");
            }
            continue;
        }

        if (line.empty() || is_file_header(line)) continue;
        if (line.front() == ' ' || line.front() == '+' || line.front() == '-') {
            throw MalformedDiff("line " + std::to_string(line_no) + ": diff line outside any hunk");
        }
        // Anything else (commit message, tool banner) is preamble.
    }

    if (!saw_hunk) throw MalformedDiff("no hunk header found");
    if (old_left > 0 || new_left > 0) throw MalformedDiff("diff ends inside a hunk body");
    return {join(buggy), join(patched)};
}

std::vector<RawPatch> deduplicate(const std::vector<RawPatch>& patches) {
    std::unordered_set<std::string> seen;
    std::vector<RawPatch> kept;
    for (const auto& p : patches) {
        std::string key;
        key.reserve(p.diff_text.size());
        for (char c : p.diff_text) {
            if (!std::isspace(static_cast<unsigned char>(c))) key += c;
        }
        if (seen.insert(std::move(key)).second) kept.push_back(p);
    }
    return kept;
}

std::string make_unified_diff(std::string_view buggy, std::string_view patched, std::string_view file_name) {
    const auto a = split_lines(buggy);
    const auto b = split_lines(patched);
    const std::size_t n = a.size(), m = b.size();

    // lcs[i][j] = LCS length of a[i..] and b[j..]
    std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

    std::string body;
    auto emit = [&](char marker, std::string_view text) {
        body += marker;
        body += ' ';
        body += text;
        body += '\n';
    };
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[i] == b[j]) {
            emit(' ', a[i]);
            ++i;
            ++j;
        } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
            emit('-', a[i++]);
        } else {
            emit('+', b[j++]);
        }
    }

    std::string out;
    out += "--- a/";
    out += file_name;
    out += "\n+++ b/";
    out += file_name;
    out += "\n@@ -" + std::to_string(n ? 1 : 0) + "," + std::to_string(n) + " +" + std::to_string(m ? 1 : 0) +
           "," + std::to_string(m) + " @@\n";
    return out + body;
}

}  // namespace appt
