#pragma once

#include "appt/config.hpp"
#include "appt/metrics.hpp"
#include "appt/model.hpp"
#include "appt/patch.hpp"
#include "appt/tokenizer.hpp"
#include "appt/training.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace appt {

/// Buggy and patched texts of the selected patches, for vocabulary building.
std::vector<std::string> corpus_texts(std::span<const RawPatch> patches);

/// Parse and encode every patch. MalformedDiff messages carry the patch id.
std::vector<TrainingSample> encode_patches(std::span<const RawPatch> patches, const Vocabulary& vocab,
                                           Truncation strategy, std::size_t max_len);

struct TrainedModel {
    RunConfig config;
    Vocabulary vocab;
    PatchModel model;
    std::vector<LossRecord> loss_log;
};

/// Train on every patch of `data`. Uses `vocab` when given, else the
/// config's vocabulary file, else builds one from the training texts.
TrainedModel train_model(std::span<const RawPatch> data, const RunConfig& config, std::uint64_t seed,
                         const Vocabulary* vocab = nullptr);

/// Directory layout: model.pjt (tensors), model.cfg (sidecar config with
/// every dimension), vocab.txt.
void save_model(const std::filesystem::path& dir, const TrainedModel& trained);
TrainedModel load_model(const std::filesystem::path& dir);

Prediction predict_patch(const TrainedModel& trained, const RawPatch& patch);

struct FoldOutcome {
    std::size_t fold = 0;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<Prediction> predictions;  // aligned with `test`
    MetricsReport report;
    std::vector<LossRecord> loss_log;
};

struct CrossValidation {
    std::vector<FoldOutcome> folds;
    MetricsReport pooled;
    MetricsReport averaged;

    const MetricsReport& reduced(Reducer reducer) const { return reducer == Reducer::pooled ? pooled : averaged; }
};

using FoldProgress = std::function<void(const FoldOutcome&)>;

/// Stratified k-fold train/test rounds. Each round trains a fresh model
/// (and, without a configured vocabulary, a fresh vocabulary) on the
/// training folds only and predicts the held-out fold.
CrossValidation cross_validate(std::span<const RawPatch> data, const RunConfig& config,
                               const FoldProgress& progress = {});

}  // namespace appt
