#include "appt/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>

namespace appt {

Truncation parse_truncation(std::string_view name) {
    for (auto t : kAllTruncations) {
        if (to_string(t) == name) return t;
    }
    throw ConfigError("unknown truncation strategy '" + std::string(name) + "' (head|tail|mid|hybrid)");
}

std::string_view to_string(Truncation strategy) {
    switch (strategy) {
        case Truncation::head: return "head";
        case Truncation::tail: return "tail";
        case Truncation::mid: return "mid";
        case Truncation::hybrid: return "hybrid";
    }
    return "?";
}

Vocabulary::Vocabulary(std::vector<std::string> entries) : entries_(std::move(entries)) {
    if (entries_.size() < std::size(kSpecials)) {
        throw ConfigError("vocabulary must start with [PAD], [UNK], [CLS], [SEP]");
    }
    for (std::size_t i = 0; i < std::size(kSpecials); ++i) {
        if (entries_[i] != kSpecials[i]) {
            throw ConfigError("vocabulary entry " + std::to_string(i) + " must be " + std::string(kSpecials[i]) +
                              ", found '" + entries_[i] + "'");
        }
    }
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].empty()) throw ConfigError("empty vocabulary entry at id " + std::to_string(i));
        if (!index_.emplace(entries_[i], static_cast<std::int32_t>(i)).second) {
            throw ConfigError("duplicate vocabulary entry '" + entries_[i] + "'");
        }
    }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot read vocabulary " + path.string());
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        entries.push_back(line);
    }
    try {
        return Vocabulary(std::move(entries));
    } catch (const ConfigError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write vocabulary " + path.string());
    for (const auto& e : entries_) out << e << '\n';
}

std::optional<std::int32_t> Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

// Byte offsets at which UTF-8 code points start, plus the end offset.
std::vector<std::size_t> codepoint_bounds(std::string_view word) {
    std::vector<std::size_t> bounds;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if ((static_cast<unsigned char>(word[i]) & 0xC0u) != 0x80u) bounds.push_back(i);
    }
    bounds.push_back(word.size());
    return bounds;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) words.push_back(std::move(current));
        current.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_space(c)) {
            flush();
        } else if (is_punct(c)) {
            flush();
            words.emplace_back(1, ch);
        } else {
            current += c < 0x80 ? static_cast<char>(std::tolower(c)) : ch;
        }
    }
    flush();
    return words;
}

std::vector<std::string> tokenize(const Vocabulary& vocab, std::string_view text) {
    if (vocab.empty()) throw ConfigError("tokenize called with an empty vocabulary");
    std::vector<std::string> out;
    for (const auto& word : split_words(text)) {
        const auto bounds = codepoint_bounds(word);
        std::vector<std::string> pieces;
        std::size_t start = 0;  // index into bounds
        bool failed = false;
        while (start + 1 < bounds.size()) {
            std::size_t end = bounds.size() - 1;
            std::string match;
            for (; end > start; --end) {
                std::string piece = word.substr(bounds[start], bounds[end] - bounds[start]);
                if (start > 0) piece = "##" + piece;
                if (vocab.find(piece)) {
                    match = std::move(piece);
                    break;
                }
            }
            if (match.empty()) {
                failed = true;
                break;
            }
            pieces.push_back(std::move(match));
            start = end;
        }
        if (failed) {
            out.emplace_back(Vocabulary::kSpecials[Vocabulary::kUnk]);
        } else {
            std::move(pieces.begin(), pieces.end(), std::back_inserter(out));
        }
    }
    return out;
}

Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t target_size) {
    std::set<std::string> chars;
    std::map<std::string, std::size_t> word_freq;
    for (const auto& text : corpus) {
        for (auto& word : split_words(text)) {
            const auto bounds = codepoint_bounds(word);
            for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
                chars.insert(word.substr(bounds[i], bounds[i + 1] - bounds[i]));
            }
            if (bounds.size() > 2) ++word_freq[word];
        }
    }
    const std::size_t required = std::size(Vocabulary::kSpecials) + 2 * chars.size();
    if (target_size < required) {
        throw ConfigError("vocabulary size " + std::to_string(target_size) + " cannot hold the specials and " +
                          std::to_string(chars.size()) + " corpus characters (need at least " +
                          std::to_string(required) + ")");
    }

    std::vector<std::string> entries(std::begin(Vocabulary::kSpecials), std::end(Vocabulary::kSpecials));
    entries.insert(entries.end(), chars.begin(), chars.end());
    for (const auto& c : chars) entries.push_back("##" + c);

    std::vector<std::pair<std::string, std::size_t>> words(word_freq.begin(), word_freq.end());
    std::stable_sort(words.begin(), words.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [word, freq] : words) {
        if (entries.size() >= target_size) break;
        entries.push_back(word);
    }
    return Vocabulary(std::move(entries));
}

TokenSequence encode_text(const Vocabulary& vocab, std::string_view text, Truncation strategy,
                          std::size_t max_len) {
    if (max_len < 2) throw ConfigError("max_len must leave room for [CLS] and [SEP]");
    const auto pieces = tokenize(vocab, text);
    std::vector<std::int32_t> content;
    content.reserve(pieces.size());
    for (const auto& p : pieces) content.push_back(vocab.find(p).value_or(Vocabulary::kUnk));
    content = truncate<std::int32_t>(content, strategy, max_len - 2);

    TokenSequence seq;
    seq.ids.reserve(max_len);
    seq.ids.push_back(Vocabulary::kCls);
    seq.ids.insert(seq.ids.end(), content.begin(), content.end());
    seq.ids.push_back(Vocabulary::kSep);
    seq.real_len = seq.ids.size();
    seq.ids.resize(max_len, Vocabulary::kPad);
    seq.mask.assign(max_len, 0);
    std::fill_n(seq.mask.begin(), seq.real_len, std::uint8_t{1});
    return seq;
}

std::pair<TokenSequence, TokenSequence> encode(const Vocabulary& vocab, const SnippetPair& pair,
                                               Truncation strategy, std::size_t max_len) {
    return {encode_text(vocab, pair.buggy_text, strategy, max_len),
            encode_text(vocab, pair.patched_text, strategy, max_len)};
}

}  // namespace appt
