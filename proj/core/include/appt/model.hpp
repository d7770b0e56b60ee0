#pragma once

#include "appt/classifier.hpp"
#include "appt/encoder.hpp"
#include "appt/fusion.hpp"
#include "appt/tokenizer.hpp"

#include <vector>

namespace appt {

struct ModelConfig {
    EncoderConfig encoder;
    FusionMode fusion = FusionMode::con;
    std::size_t lstm_layers = 2;
    std::size_t lstm_hidden = 0;  // 0: model_dim / 2
    std::size_t lstm_output = 0;  // 0: lstm_hidden
    std::size_t head_hidden = 0;  // 0: model_dim / 2
    real classifier_dropout = real(0.5);

    std::size_t resolved_lstm_hidden() const;
    std::size_t resolved_lstm_output() const;
    std::size_t resolved_head_hidden() const;
};

/// Shared encoder over both snippets, position-wise fusion, BiLSTM stack
/// and the two-layer softmax head.
class PatchModel {
public:
    explicit PatchModel(ModelConfig config);

    void init(Rng& rng);
    const ModelConfig& config() const { return config_; }
    std::vector<Parameter> parameters() const;

    Encoder& encoder() { return encoder_; }
    const Encoder& encoder() const { return encoder_; }
    BiLstmStack& lstm() { return lstm_; }
    ClassifierHead& head() { return head_; }

    /// Encodes both sides over their real positions, zero-fills the shorter
    /// one up to T = max(real_len_b, real_len_p) and fuses: [T×n'].
    Tensor fused_sequence(const TokenSequence& buggy, const TokenSequence& patched, Mode mode, Rng& rng) const;

    /// Class logits [1×2], index 0 correct and 1 overfitting.
    Tensor logits(const TokenSequence& buggy, const TokenSequence& patched, Mode mode, Rng& rng) const;

    /// Eval-mode prediction.
    Prediction predict(const TokenSequence& buggy, const TokenSequence& patched) const;

private:
    ModelConfig config_;
    Encoder encoder_;
    BiLstmStack lstm_;
    ClassifierHead head_;
};

}  // namespace appt
