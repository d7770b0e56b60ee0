#include "appt/model.hpp"

#include <algorithm>
#include <array>

namespace appt {

std::size_t ModelConfig::resolved_lstm_hidden() const {
    return lstm_hidden ? lstm_hidden : std::max<std::size_t>(1, encoder.model_dim / 2);
}

std::size_t ModelConfig::resolved_lstm_output() const { return lstm_output ? lstm_output : resolved_lstm_hidden(); }

std::size_t ModelConfig::resolved_head_hidden() const {
    return head_hidden ? head_hidden : std::max<std::size_t>(1, encoder.model_dim / 2);
}

PatchModel::PatchModel(ModelConfig config)
    : config_(config),
      encoder_(config.encoder),
      lstm_(fused_width(config.encoder.model_dim, config.fusion), config.lstm_layers, config.resolved_lstm_hidden(),
            config.resolved_lstm_output()),
      head_(2 * config.resolved_lstm_output(), config.resolved_head_hidden(), config.classifier_dropout) {}

void PatchModel::init(Rng& rng) {
    encoder_.init(rng);
    lstm_.init(rng);
    head_.init(rng);
}

std::vector<Parameter> PatchModel::parameters() const {
    auto out = encoder_.parameters();
    for (auto&& group : {lstm_.parameters(), head_.parameters()}) out.insert(out.end(), group.begin(), group.end());
    return out;
}

namespace {

Tensor pad_rows(const Tensor& x, std::size_t rows) {
    if (x.rows() == rows) return x;
    const std::array parts{x, Tensor::zeros({rows - x.rows(), x.cols()})};
    return concat_rows(parts);
}

}  // namespace

Tensor PatchModel::fused_sequence(const TokenSequence& buggy, const TokenSequence& patched, Mode mode,
                                  Rng& rng) const {
    const Tensor hb = encoder_.encode_prefix(buggy, mode, rng);
    const Tensor hp = encoder_.encode_prefix(patched, mode, rng);
    const std::size_t t = std::max(hb.rows(), hp.rows());
    return fuse(pad_rows(hb, t), pad_rows(hp, t), config_.fusion);
}

Tensor PatchModel::logits(const TokenSequence& buggy, const TokenSequence& patched, Mode mode, Rng& rng) const {
    const Tensor fused = fused_sequence(buggy, patched, mode, rng);
    const std::vector<std::uint8_t> mask(fused.rows(), 1);
    return head_.logits(lstm_.forward(fused, mask), mode, rng);
}

Prediction PatchModel::predict(const TokenSequence& buggy, const TokenSequence& patched) const {
    Rng unused(0);
    return prediction_from_logits(logits(buggy, patched, Mode::eval, unused));
}

}  // namespace appt
