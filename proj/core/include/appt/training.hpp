#pragma once

#include "appt/label.hpp"
#include "appt/model.hpp"
#include "appt/tokenizer.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace appt {

struct TrainConfig {
    double learning_rate = 5e-5;
    std::size_t batch_size = 16;
    double dropout = 0.5;
    std::size_t max_epochs = 50;
    std::uint64_t seed = 42;
    std::size_t folds = 5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;  // throws ConfigError
};

inline constexpr double kProbabilityClamp = 1e-7;

/// -[g·log(s) + (1-g)·log(1-s)] with s clamped to [1e-7, 1-1e-7].
double cross_entropy(int g, double s);

/// Differentiable form on class logits [1×2]; g = 1 for an overfitting
/// label and s is the softmax probability of the overfitting class.
Tensor cross_entropy(const Tensor& logits, Label label);

/// Adaptive-moment optimiser with bias correction. Moments are kept per
/// parameter in the order of the span passed to step().
class Adam {
public:
    Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    explicit Adam(const TrainConfig& config);

    /// Apply one update using each parameter's accumulated gradient.
    void step(std::span<Parameter> params);
    std::size_t steps() const { return steps_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::size_t steps_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

/// k disjoint folds over [0, n), stratified by label: each class is shuffled
/// with the seed and dealt round-robin, continuing the fold counter across
/// classes, so fold sizes and per-fold class counts differ by at most one.
struct FoldSplit {
    std::vector<std::vector<std::size_t>> folds;

    std::size_t k() const { return folds.size(); }
    const std::vector<std::size_t>& test_indices(std::size_t round) const { return folds.at(round); }
    std::vector<std::size_t> train_indices(std::size_t round) const;
};

FoldSplit kfold_split(std::size_t n, std::span<const Label> labels, std::size_t k, std::uint64_t seed);

struct TrainingSample {
    TokenSequence buggy;
    TokenSequence patched;
    std::optional<Label> label;
};

struct LossRecord {
    std::size_t epoch;
    std::size_t step;
    double loss;
};

/// Summed cross-entropy loss of a batch, with gradients recorded.
Tensor batch_loss(const PatchModel& model, std::span<const TrainingSample> batch, Mode mode, Rng& rng);

/// Seeded mini-batch training: per epoch the sample order is shuffled, and
/// each batch runs forward, backward on the summed loss, then one Adam
/// step. Returns one loss record per optimiser step.
std::vector<LossRecord> train(PatchModel& model, std::span<const TrainingSample> samples, const TrainConfig& config,
                              Rng& rng);

}  // namespace appt
