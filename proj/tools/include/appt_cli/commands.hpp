#pragma once

#include <appt/config.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace appt::cli {

namespace fs = std::filesystem;

/// Config file plus "section.key=value" overrides, applied in that order.
struct RunOptions {
    std::optional<fs::path> config_file;
    std::vector<std::string> overrides;
};

RunConfig resolve_config(const RunOptions& options);

struct IngestOptions {
    std::vector<fs::path> inputs;  // diff files, .jsonl datasets, or directories of either
    fs::path out;
    std::optional<fs::path> rejects;  // default: <out>.rejects.jsonl
    std::optional<std::string> label;
};

struct DedupOptions {
    fs::path dataset;
    fs::path out;
};

struct SynthOptions {
    std::size_t per_class = 50;
    std::uint64_t seed = 7;
    fs::path out;
};

struct VocabOptions {
    fs::path dataset;
    std::size_t size = 2000;
    fs::path out;
};

struct TrainOptions {
    RunOptions run;
    fs::path dataset;
    fs::path out;
};

struct EvaluateOptions {
    RunOptions run;
    fs::path dataset;
    fs::path out;
};

struct AblateOptions {
    RunOptions run;
    fs::path dataset;
    std::string axis;  // truncation | fusion
    fs::path out;      // grid CSV
};

struct PredictOptions {
    fs::path model;
    fs::path diff;
};

// Each command writes progress to `log` and returns the process exit code:
// 0 on success, non-zero only for operational failure.
int cmd_ingest(const IngestOptions& opt, std::ostream& log);
int cmd_dedup(const DedupOptions& opt, std::ostream& log);
int cmd_synth(const SynthOptions& opt, std::ostream& log);
int cmd_vocab(const VocabOptions& opt, std::ostream& log);
int cmd_train(const TrainOptions& opt, std::ostream& log);
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& log);
int cmd_ablate(const AblateOptions& opt, std::ostream& log);
int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& log);

}  // namespace appt::cli
