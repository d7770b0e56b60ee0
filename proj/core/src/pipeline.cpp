#include "appt/pipeline.hpp"

#include "appt/errors.hpp"
#include "appt/tensor_io.hpp"

#include <fstream>
#include <random>

namespace appt {
namespace {

constexpr const char* kTensorFile = "model.pjt";
constexpr const char* kSidecarFile = "model.cfg";
constexpr const char* kVocabFile = "vocab.txt";

SnippetPair parse_patch(const RawPatch& p) {
    try {
        return parse_unified_diff(p.diff_text);
    } catch (const MalformedDiff& e) {
        throw MalformedDiff("patch " + p.id + ": " + e.what());
    }
}

Rng fold_rng(std::uint64_t seed, std::size_t fold) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(fold)};
    return Rng(seq);
}

Vocabulary resolve_vocab(std::span<const RawPatch> training, const RunConfig& config) {
    if (!config.vocab.empty()) return Vocabulary::load(config.vocab);
    const auto texts = corpus_texts(training);
    return build_vocab(texts, config.vocab_size);
}

}  // namespace

std::vector<std::string> corpus_texts(std::span<const RawPatch> patches) {
    std::vector<std::string> texts;
    texts.reserve(2 * patches.size());
    for (const auto& p : patches) {
        auto pair = parse_patch(p);
        texts.push_back(std::move(pair.buggy_text));
        texts.push_back(std::move(pair.patched_text));
    }
    return texts;
}

std::vector<TrainingSample> encode_patches(std::span<const RawPatch> patches, const Vocabulary& vocab,
                                           Truncation strategy, std::size_t max_len) {
    std::vector<TrainingSample> out;
    out.reserve(patches.size());
    for (const auto& p : patches) {
        auto [b, q] = encode(vocab, parse_patch(p), strategy, max_len);
        out.push_back({std::move(b), std::move(q), p.label});
    }
    return out;
}

TrainedModel train_model(std::span<const RawPatch> data, const RunConfig& config, std::uint64_t seed,
                         const Vocabulary* vocab) {
    for (const auto& p : data) {
        if (!p.label) throw DataError("patch " + p.id + " has no label; training needs labelled data");
    }
    Vocabulary v = vocab ? *vocab : resolve_vocab(data, config);
    RunConfig cfg = config;
    cfg.vocab_entries = v.size();
    cfg.validate();

    Rng rng(seed);
    PatchModel model(cfg.model_config(v.size()));
    model.init(rng);
    const auto samples = encode_patches(data, v, cfg.truncation, cfg.max_len);
    auto log = train(model, samples, cfg.train, rng);
    return {std::move(cfg), std::move(v), std::move(model), std::move(log)};
}

void save_model(const std::filesystem::path& dir, const TrainedModel& trained) {
    std::filesystem::create_directories(dir);
    RunConfig sidecar = trained.config;
    sidecar.vocab = kVocabFile;
    sidecar.vocab_entries = trained.vocab.size();
    sidecar.save(dir / kSidecarFile);
    trained.vocab.save(dir / kVocabFile);
    save_parameters(dir / kTensorFile, trained.model.parameters());
}

TrainedModel load_model(const std::filesystem::path& dir) {
    RunConfig cfg;
    try {
        cfg = RunConfig::load(dir / kSidecarFile);
    } catch (const ConfigError& e) {
        throw LoadError(std::string("model sidecar: ") + e.what());
    }
    std::filesystem::path vocab_path = cfg.vocab.empty() ? std::filesystem::path(kVocabFile) : std::filesystem::path(cfg.vocab);
    if (vocab_path.is_relative()) vocab_path = dir / vocab_path;
    Vocabulary vocab = Vocabulary::load(vocab_path);
    if (vocab.size() != cfg.vocab_entries) {
        throw LoadError("vocabulary has " + std::to_string(vocab.size()) + " entries, sidecar declares " +
                        std::to_string(cfg.vocab_entries));
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw LoadError(std::string("model sidecar: ") + e.what());
    }
    PatchModel model(cfg.model_config(vocab.size()));
    auto params = model.parameters();
    load_parameters(dir / kTensorFile, params);
    return {std::move(cfg), std::move(vocab), std::move(model), {}};
}

Prediction predict_patch(const TrainedModel& trained, const RawPatch& patch) {
    auto [b, p] = encode(trained.vocab, parse_patch(patch), trained.config.truncation, trained.config.max_len);
    return trained.model.predict(b, p);
}

CrossValidation cross_validate(std::span<const RawPatch> data, const RunConfig& config, const FoldProgress& progress) {
    config.validate();
    std::vector<Label> labels;
    labels.reserve(data.size());
    for (const auto& p : data) {
        if (!p.label) throw DataError("patch " + p.id + " has no label; evaluation needs labelled data");
        labels.push_back(*p.label);
    }
    const FoldSplit split = kfold_split(data.size(), labels, config.train.folds, config.train.seed);

    CrossValidation cv;
    std::vector<Label> pooled_pred, pooled_truth;
    std::vector<double> pooled_scores;
    for (std::size_t f = 0; f < split.k(); ++f) {
        FoldOutcome out;
        out.fold = f;
        out.train = split.train_indices(f);
        out.test = split.test_indices(f);

        std::vector<RawPatch> train_set, test_set;
        for (auto i : out.train) train_set.push_back(data[i]);
        for (auto i : out.test) test_set.push_back(data[i]);

        const Vocabulary vocab = resolve_vocab(train_set, config);
        Rng rng = fold_rng(config.train.seed, f);
        RunConfig cfg = config;
        cfg.vocab_entries = vocab.size();
        PatchModel model(cfg.model_config(vocab.size()));
        model.init(rng);
        const auto train_samples = encode_patches(train_set, vocab, cfg.truncation, cfg.max_len);
        out.loss_log = train(model, train_samples, cfg.train, rng);

        const auto test_samples = encode_patches(test_set, vocab, cfg.truncation, cfg.max_len);
        std::vector<Label> pred, truth;
        std::vector<double> scores;
        for (const auto& s : test_samples) {
            const auto p = model.predict(s.buggy, s.patched);
            out.predictions.push_back(p);
            pred.push_back(p.label);
            scores.push_back(p.p_overfitting);
            truth.push_back(*s.label);
        }
        out.report = evaluate(pred, scores, truth);
        pooled_pred.insert(pooled_pred.end(), pred.begin(), pred.end());
        pooled_scores.insert(pooled_scores.end(), scores.begin(), scores.end());
        pooled_truth.insert(pooled_truth.end(), truth.begin(), truth.end());
        if (progress) progress(out);
        cv.folds.push_back(std::move(out));
    }
    cv.pooled = evaluate(pooled_pred, pooled_scores, pooled_truth);
    std::vector<MetricsReport> per_fold;
    for (const auto& f : cv.folds) per_fold.push_back(f.report);
    cv.averaged = average(per_fold);
    return cv;
}

}  // namespace appt
