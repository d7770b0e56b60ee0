#pragma once

#include "appt/model.hpp"
#include "appt/tokenizer.hpp"
#include "appt/training.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace appt {

/// How per-fold predictions become one cross-validation report.
enum class Reducer { pooled, averaged };

Reducer parse_reducer(std::string_view name);
std::string_view to_string(Reducer reducer);

/// Everything a run needs. Stored as INI-style text:
///
///   [model]  model_dim layers heads ffn_dim max_positions attn_dropout
///            hidden_dropout fusion lstm_layers lstm_hidden lstm_output
///            head_hidden vocab_entries
///   [data]   dataset vocab vocab_size max_len truncation
///   [train]  learning_rate batch_size dropout max_epochs seed folds
///            beta1 beta2 eps reducer
///   [output] dir
///
/// A zero for max_positions, lstm_hidden, lstm_output or head_hidden means
/// "derive from the other dimensions".
struct RunConfig {
    ModelConfig model;
    std::size_t vocab_entries = 0;  // filled once a vocabulary is known
    std::string dataset;
    std::string vocab;
    std::size_t vocab_size = 2000;
    std::size_t max_len = 512;
    Truncation truncation = Truncation::head;
    TrainConfig train;
    Reducer reducer = Reducer::pooled;
    std::string output_dir;

    RunConfig();

    /// Assign one "section.key" from text; throws ConfigError on unknown
    /// keys or unparsable values.
    void set(std::string_view dotted_key, std::string_view value);

    static RunConfig parse(std::istream& in);
    static RunConfig load(const std::filesystem::path& path);
    std::string to_ini() const;
    void save(const std::filesystem::path& path) const;

    void validate() const;

    /// Model configuration for a vocabulary of `vocab_entries` tokens.
    ModelConfig model_config(std::size_t vocab_entries) const;

    static const std::vector<std::string>& keys();
};

}  // namespace appt
