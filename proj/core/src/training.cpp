#include "appt/training.hpp"

#include "appt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace appt {

void TrainConfig::validate() const {
    if (!(learning_rate >= 0)) throw ConfigError("learning_rate must be non-negative");
    if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
    if (!(dropout >= 0) || dropout >= 1) throw ConfigError("dropout must lie in [0, 1)");
    if (folds < 2) throw ConfigError("folds must be at least 2");
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw ConfigError("Adam betas must lie in [0, 1)");
    if (!(eps > 0)) throw ConfigError("Adam eps must be positive");
}

double cross_entropy(int g, double s) {
    s = std::clamp(s, kProbabilityClamp, 1.0 - kProbabilityClamp);
    return -(g * std::log(s) + (1 - g) * std::log(1.0 - s));
}

Tensor cross_entropy(const Tensor& logits, Label label) {
    const Tensor probs = softmax(logits, 1);
    const Tensor s = clamp(slice_cols(probs, static_cast<std::size_t>(Label::overfitting), 1),
                           static_cast<real>(kProbabilityClamp), static_cast<real>(1.0 - kProbabilityClamp));
    const Tensor picked = label == Label::overfitting ? s : add_scalar(scale(s, real{-1}), real{1});
    return scale(sum(log(picked)), real{-1});
}

Adam::Adam(double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

Adam::Adam(const TrainConfig& config) : Adam(config.learning_rate, config.beta1, config.beta2, config.eps) {}

void Adam::step(std::span<Parameter> params) {
    if (m_.empty()) {
        for (const auto& p : params) {
            m_.emplace_back(p.value().size(), 0.0);
            v_.emplace_back(p.value().size(), 0.0);
        }
    }
    if (m_.size() != params.size()) throw DimensionError("Adam state was built for a different parameter list");
    ++steps_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto value = params[k].value();
        const auto grad = params[k].gradient();
        auto& m = m_[k];
        auto& v = v_[k];
        if (m.size() != value.size()) throw DimensionError("Adam state size mismatch for " + params[k].name());
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grad[i];
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
            const double update = lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
            value[i] = static_cast<real>(value[i] - update);
        }
    }
}

std::vector<std::size_t> FoldSplit::train_indices(std::size_t round) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f != round) out.insert(out.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

FoldSplit kfold_split(std::size_t n, std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
    if (labels.size() != n) throw DimensionError("kfold_split: label count differs from n");
    if (k < 2) throw ConfigError("kfold_split needs at least 2 folds");
    if (k > n) {
        throw ConfigError("cannot split " + std::to_string(n) + " items into " + std::to_string(k) + " folds");
    }
    Rng rng(seed);
    FoldSplit split;
    split.folds.resize(k);
    std::size_t next = 0;
    for (Label cls : {Label::correct, Label::overfitting}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        std::shuffle(members.begin(), members.end(), rng);
        for (auto idx : members) {
            split.folds[next].push_back(idx);
            next = (next + 1) % k;
        }
    }
    for (auto& f : split.folds) std::sort(f.begin(), f.end());
    return split;
}

Tensor batch_loss(const PatchModel& model, std::span<const TrainingSample> batch, Mode mode, Rng& rng) {
    Tensor total = Tensor::scalar(0);
    for (const auto& s : batch) {
        if (!s.label) throw DataError("training sample without a label");
        total = add(total, cross_entropy(model.logits(s.buggy, s.patched, mode, rng), *s.label));
    }
    return total;
}

std::vector<LossRecord> train(PatchModel& model, std::span<const TrainingSample> samples, const TrainConfig& config,
                              Rng& rng) {
    config.validate();
    for (const auto& s : samples) {
        if (!s.label) throw DataError("training set contains an unlabeled sample");
    }
    std::vector<LossRecord> log;
    if (samples.empty()) return log;

    auto params = model.parameters();
    Adam adam(config);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t step = 0;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            for (auto& p : params) p.zero_grad();
            // Per-sample backward keeps the graph small; gradients of a sum
            // accumulate to the same result as one backward on the total.
            double total = 0;
            for (std::size_t i = start; i < end; ++i) {
                const auto& s = samples[order[i]];
                const Tensor loss = cross_entropy(model.logits(s.buggy, s.patched, Mode::train, rng), *s.label);
                backward(loss);
                total += static_cast<double>(loss.item());
            }
            adam.step(params);
            log.push_back({epoch, ++step, total});
        }
    }
    return log;
}

}  // namespace appt
