#include "appt/classifier.hpp"

#include "appt/errors.hpp"

#include <array>
#include <cmath>

namespace appt {
namespace {

void fill_uniform(Parameter& p, Rng& rng, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : p.value()) v = static_cast<real>(dist(rng));
}

void fill_zero(Parameter& p) {
    for (auto& v : p.value()) v = 0;
}

LstmDirectionParams make_direction(const std::string& prefix, std::size_t in, std::size_t hidden,
                                   std::size_t out) {
    auto w = [&](const char* name, std::size_t rows, std::size_t cols) {
        return Parameter(prefix + name, {rows, cols});
    };
    auto b = [&](const char* name, std::size_t n) { return Parameter(prefix + name, {n}); };
    return {w("wix", in, hidden), w("wih", hidden, hidden), b("bi", hidden),
            w("wfx", in, hidden), w("wfh", hidden, hidden), b("bf", hidden),
            w("wgx", in, hidden), w("wgh", hidden, hidden), b("bg", hidden),
            w("wox", in, hidden), w("woh", hidden, hidden), b("bo", hidden),
            w("wzh", hidden, out), b("bz", out)};
}

// Gate pre-activations with the input part already projected.
LstmState step(const LstmDirectionParams& p, const Tensor& xi, const Tensor& xf, const Tensor& xg,
               const Tensor& xo, const Tensor& h_prev, const Tensor& c_prev) {
    const Tensor i = sigmoid(add(xi, matmul(h_prev, p.wih.tensor())));
    const Tensor f = sigmoid(add(xf, matmul(h_prev, p.wfh.tensor())));
    const Tensor g = tanh(add(xg, matmul(h_prev, p.wgh.tensor())));
    const Tensor o = sigmoid(add(xo, matmul(h_prev, p.woh.tensor())));
    const Tensor c = add(hadamard(f, c_prev), hadamard(i, g));
    return {hadamard(o, tanh(c)), c};
}

Tensor project(const Tensor& x, const Parameter& w, const Parameter& b) {
    return add_bias(matmul(x, w.tensor()), b.tensor());
}

}  // namespace

std::vector<Parameter> LstmDirectionParams::all() const {
    return {wix, wih, bi, wfx, wfh, bf, wgx, wgh, bg, wox, woh, bo, wzh, bz};
}

LstmState lstm_cell(const LstmDirectionParams& p, const Tensor& x_t, const Tensor& h_prev, const Tensor& c_prev) {
    const std::size_t hidden = p.wih.shape()[0];
    if (x_t.rank() != 2 || x_t.rows() != 1 || x_t.cols() != p.wix.shape()[0]) {
        throw DimensionError("lstm_cell: input " + to_string(x_t.shape()) + " does not match weights " +
                             to_string(p.wix.shape()));
    }
    const Shape state_shape{1, hidden};
    if (h_prev.shape() != state_shape || c_prev.shape() != state_shape) {
        throw DimensionError("lstm_cell: state shapes must be " + to_string(state_shape));
    }
    return step(p, project(x_t, p.wix, p.bi), project(x_t, p.wfx, p.bf), project(x_t, p.wgx, p.bg),
                project(x_t, p.wox, p.bo), h_prev, c_prev);
}

BiLstmStack::BiLstmStack(std::size_t input_width, std::size_t layers, std::size_t hidden, std::size_t output)
    : input_(input_width), hidden_(hidden), output_(output) {
    if (layers == 0 || hidden == 0 || output == 0 || input_width == 0) {
        throw ConfigError("BiLSTM widths and layer count must be positive");
    }
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? input_width : 2 * output;
        const std::string base = "lstm.layer" + std::to_string(l) + ".";
        fwd_.push_back(make_direction(base + "fwd.", in, hidden, output));
        bwd_.push_back(make_direction(base + "bwd.", in, hidden, output));
    }
}

void BiLstmStack::init(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (std::size_t l = 0; l < fwd_.size(); ++l) {
        for (auto* dir : {&fwd_[l], &bwd_[l]}) {
            for (Parameter* w : {&dir->wix, &dir->wih, &dir->wfx, &dir->wfh, &dir->wgx, &dir->wgh, &dir->wox,
                                 &dir->woh, &dir->wzh}) {
                fill_uniform(*w, rng, bound);
            }
            for (Parameter* b : {&dir->bi, &dir->bf, &dir->bg, &dir->bo, &dir->bz}) fill_zero(*b);
        }
    }
}

std::vector<Parameter> BiLstmStack::parameters() const {
    std::vector<Parameter> out;
    for (std::size_t l = 0; l < fwd_.size(); ++l) {
        for (const auto* dir : {&fwd_[l], &bwd_[l]}) {
            auto ps = dir->all();
            out.insert(out.end(), ps.begin(), ps.end());
        }
    }
    return out;
}

Tensor BiLstmStack::run_direction(const LstmDirectionParams& p, const Tensor& seq, std::size_t len,
                                  bool backward) const {
    const Tensor x = slice_rows(seq, 0, len);
    const Tensor xi = project(x, p.wix, p.bi);
    const Tensor xf = project(x, p.wfx, p.bf);
    const Tensor xg = project(x, p.wgx, p.bg);
    const Tensor xo = project(x, p.wox, p.bo);

    LstmState state{Tensor::zeros({1, hidden_}), Tensor::zeros({1, hidden_})};
    std::vector<Tensor> hs(len);
    for (std::size_t k = 0; k < len; ++k) {
        const std::size_t t = backward ? len - 1 - k : k;
        state = step(p, row(xi, t), row(xf, t), row(xg, t), row(xo, t), state.h, state.c);
        hs[t] = state.h;
    }
    return project(concat_rows(hs), p.wzh, p.bz);
}

Tensor BiLstmStack::forward(const Tensor& seq, std::span<const std::uint8_t> mask) const {
    if (seq.rank() != 2 || seq.cols() != input_) {
        throw DimensionError("BiLSTM input " + to_string(seq.shape()) + " does not have " + std::to_string(input_) +
                             " columns");
    }
    if (mask.size() != seq.rows()) throw DimensionError("BiLSTM mask length differs from sequence length");
    std::size_t len = 0;
    while (len < mask.size() && mask[len]) ++len;
    for (std::size_t t = len; t < mask.size(); ++t) {
        if (mask[t]) throw DataError("BiLSTM mask must be a prefix of ones");
    }
    if (len == 0) throw DataError("BiLSTM over a sequence with no unmasked positions");

    Tensor layer_in = seq;
    Tensor fwd_out, bwd_out;
    for (std::size_t l = 0; l < fwd_.size(); ++l) {
        fwd_out = run_direction(fwd_[l], layer_in, len, false);
        bwd_out = run_direction(bwd_[l], layer_in, len, true);
        const std::array both{fwd_out, bwd_out};
        layer_in = concat_cols(both);
    }
    const std::array last{row(fwd_out, len - 1), row(bwd_out, 0)};
    return concat_cols(last);
}

Prediction prediction_from_logits(const Tensor& logits) {
    if (logits.numel() != 2) throw DimensionError("expected two logits, got " + to_string(logits.shape()));
    const Tensor probs = softmax(Tensor(Shape{2}, {logits[0], logits[1]}), 0);
    Prediction p;
    p.p_correct = static_cast<double>(probs[0]);
    p.p_overfitting = static_cast<double>(probs[1]);
    p.label = probs[0] > probs[1] ? Label::correct : Label::overfitting;
    return p;
}

ClassifierHead::ClassifierHead(std::size_t input_width, std::size_t hidden_width, real dropout)
    : dropout_(dropout),
      fc1_w_("head.fc1.weight", {input_width, hidden_width}),
      fc1_b_("head.fc1.bias", {hidden_width}),
      fc2_w_("head.fc2.weight", {hidden_width, 2}),
      fc2_b_("head.fc2.bias", {2}) {
    if (input_width == 0 || hidden_width == 0) throw ConfigError("classifier head widths must be positive");
    if (!(dropout >= 0) || dropout >= 1) throw ConfigError("classifier dropout must lie in [0, 1)");
}

void ClassifierHead::init(Rng& rng) {
    fill_uniform(fc1_w_, rng, 1.0 / std::sqrt(static_cast<double>(fc1_w_.shape()[0])));
    fill_uniform(fc2_w_, rng, 1.0 / std::sqrt(static_cast<double>(fc2_w_.shape()[0])));
    fill_zero(fc1_b_);
    fill_zero(fc2_b_);
}

std::vector<Parameter> ClassifierHead::parameters() const { return {fc1_w_, fc1_b_, fc2_w_, fc2_b_}; }

Tensor ClassifierHead::logits(const Tensor& z_last, Mode mode, Rng& rng) const {
    if (z_last.rank() != 2 || z_last.rows() != 1 || z_last.cols() != fc1_w_.shape()[0]) {
        throw DimensionError("classifier input " + to_string(z_last.shape()) + " does not match fc1 " +
                             to_string(fc1_w_.shape()));
    }
    const Tensor hidden = relu(project(dropout(z_last, dropout_, mode, rng), fc1_w_, fc1_b_));
    return project(dropout(hidden, dropout_, mode, rng), fc2_w_, fc2_b_);
}

Prediction ClassifierHead::classify(const Tensor& z_last, Mode mode, Rng& rng) const {
    return prediction_from_logits(logits(z_last, mode, rng));
}

}  // namespace appt
