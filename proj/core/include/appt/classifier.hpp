#pragma once

#include "appt/label.hpp"
#include "appt/ops.hpp"
#include "appt/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace appt {

/// Weights of one LSTM direction in one layer. Inputs are row vectors, so
/// gate pre-activations are x·W_*x + h·W_*h + b_*.
struct LstmDirectionParams {
    Parameter wix, wih, bi;  // input gate
    Parameter wfx, wfh, bf;  // forget gate
    Parameter wgx, wgh, bg;  // cell candidate
    Parameter wox, woh, bo;  // output gate
    Parameter wzh, bz;       // per-step output projection

    std::vector<Parameter> all() const;
};

struct LstmState {
    Tensor h;
    Tensor c;
};

/// One recurrence step on x_t [1×in] with previous state [1×H]:
///   i, f, o = sigmoid(...); c = f⊙c_prev + i⊙tanh(g); h = o⊙tanh(c).
LstmState lstm_cell(const LstmDirectionParams& p, const Tensor& x_t, const Tensor& h_prev, const Tensor& c_prev);

class BiLstmStack {
public:
    BiLstmStack(std::size_t input_width, std::size_t layers, std::size_t hidden, std::size_t output);

    void init(Rng& rng);
    std::vector<Parameter> parameters() const;

    LstmDirectionParams& direction(std::size_t layer, bool backward) { return (backward ? bwd_ : fwd_).at(layer); }
    std::size_t output_width() const { return 2 * output_; }

    /// Per-step z_t of one direction over seq rows [0, len), in position order.
    Tensor run_direction(const LstmDirectionParams& p, const Tensor& seq, std::size_t len, bool backward) const;

    /// Runs every layer over the unmasked prefix and returns [1×2·output]:
    /// the forward direction's z at the last real step followed by the
    /// backward direction's z at step 0, both from the top layer.
    Tensor forward(const Tensor& seq, std::span<const std::uint8_t> mask) const;

private:
    std::size_t input_;
    std::size_t hidden_;
    std::size_t output_;
    std::vector<LstmDirectionParams> fwd_;
    std::vector<LstmDirectionParams> bwd_;
};

struct Prediction {
    double p_correct = 0.5;
    double p_overfitting = 0.5;
    Label label = Label::overfitting;
};

/// Softmax over two logits (index 0 correct, 1 overfitting). The patch is
/// labelled correct only when p_correct is strictly larger.
Prediction prediction_from_logits(const Tensor& logits);

class ClassifierHead {
public:
    ClassifierHead(std::size_t input_width, std::size_t hidden_width, real dropout);

    void init(Rng& rng);
    std::vector<Parameter> parameters() const;
    Parameter& fc1_weight() { return fc1_w_; }
    Parameter& fc1_bias() { return fc1_b_; }
    Parameter& fc2_weight() { return fc2_w_; }
    Parameter& fc2_bias() { return fc2_b_; }

    /// fc2(dropout(ReLU(fc1(dropout(z))))) -> [1×2]
    Tensor logits(const Tensor& z_last, Mode mode, Rng& rng) const;
    Prediction classify(const Tensor& z_last, Mode mode, Rng& rng) const;

private:
    real dropout_;
    Parameter fc1_w_, fc1_b_, fc2_w_, fc2_b_;
};

}  // namespace appt
