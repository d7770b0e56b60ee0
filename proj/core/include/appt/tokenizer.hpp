#pragma once

#include "appt/errors.hpp"
#include "appt/patch.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace appt {

enum class Truncation { head, tail, mid, hybrid };

Truncation parse_truncation(std::string_view name);  // throws ConfigError
std::string_view to_string(Truncation strategy);
inline constexpr Truncation kAllTruncations[] = {Truncation::head, Truncation::tail, Truncation::mid,
                                                 Truncation::hybrid};

/// Subword vocabulary; the line index of an entry is its id.
class Vocabulary {
public:
    static constexpr std::int32_t kPad = 0;
    static constexpr std::int32_t kUnk = 1;
    static constexpr std::int32_t kCls = 2;
    static constexpr std::int32_t kSep = 3;
    static constexpr std::string_view kSpecials[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};

    Vocabulary() = default;
    /// Entries must be unique and start with the four special tokens.
    explicit Vocabulary(std::vector<std::string> entries);

    static Vocabulary load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::optional<std::int32_t> find(std::string_view token) const;
    const std::string& token(std::int32_t id) const { return entries_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::string>& entries() const { return entries_; }

private:
    std::vector<std::string> entries_;
    std::unordered_map<std::string, std::int32_t> index_;
};

/// Lower-case, split on whitespace, and isolate every ASCII punctuation
/// character as its own word.
std::vector<std::string> split_words(std::string_view text);

/// Greedy longest-prefix subword segmentation; continuation pieces carry a
/// "##" prefix and a word that cannot be segmented becomes one [UNK].
std::vector<std::string> tokenize(const Vocabulary& vocab, std::string_view text);

/// Deterministic frequency vocabulary: specials, every corpus character and
/// its "##" form, then whole words by descending frequency (ties broken
/// lexicographically) until `target_size` entries.
Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t target_size);

/// Select at most `max_len` tokens. head keeps the first max_len, tail the
/// last max_len, mid a window starting at floor((L - max_len) / 2), hybrid
/// the first and last max_len / 2.
template <typename T>
std::vector<T> truncate(std::span<const T> tokens, Truncation strategy, std::size_t max_len) {
    if (max_len < 2) throw ConfigError("truncation length must be at least 2");
    const std::size_t len = tokens.size();
    if (len <= max_len) return {tokens.begin(), tokens.end()};
    switch (strategy) {
        case Truncation::head:
            return {tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(max_len)};
        case Truncation::tail:
            return {tokens.end() - static_cast<std::ptrdiff_t>(max_len), tokens.end()};
        case Truncation::mid: {
            const auto offset = static_cast<std::ptrdiff_t>((len - max_len) / 2);
            return {tokens.begin() + offset, tokens.begin() + offset + static_cast<std::ptrdiff_t>(max_len)};
        }
        case Truncation::hybrid: {
            const auto half = static_cast<std::ptrdiff_t>(max_len / 2);
            std::vector<T> out(tokens.begin(), tokens.begin() + half);
            out.insert(out.end(), tokens.end() - half, tokens.end());
            return out;
        }
    }
    throw ConfigError("unknown truncation strategy");
}

/// Fixed-length id sequence. mask[i] == 1 exactly for i < real_len.
struct TokenSequence {
    std::vector<std::int32_t> ids;
    std::vector<std::uint8_t> mask;
    std::size_t real_len = 0;

    std::size_t max_len() const { return ids.size(); }
    bool operator==(const TokenSequence&) const = default;
};

/// Tokenise one snippet, truncate its content to max_len - 2, wrap it in
/// [CLS] ... [SEP] and pad to max_len.
TokenSequence encode_text(const Vocabulary& vocab, std::string_view text, Truncation strategy,
                          std::size_t max_len);

/// Each side of the pair is encoded independently.
std::pair<TokenSequence, TokenSequence> encode(const Vocabulary& vocab, const SnippetPair& pair,
                                               Truncation strategy, std::size_t max_len);

}  // namespace appt
