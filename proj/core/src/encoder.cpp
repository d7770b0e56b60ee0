#include "appt/encoder.hpp"

#include "appt/errors.hpp"

#include <algorithm>
#include <cmath>

namespace appt {
namespace {

constexpr real kMaskLogit = real(-1e9);

void fill_normal(Parameter& p, Rng& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (auto& v : p.value()) v = static_cast<real>(dist(rng));
}

void fill_constant(Parameter& p, real value) {
    for (auto& v : p.value()) v = value;
}

Tensor affine(const Tensor& x, const Parameter& w, const Parameter& b) {
    return add_bias(matmul(x, w.tensor()), b.tensor());
}

}  // namespace

void EncoderConfig::validate() const {
    if (vocab_size == 0) throw ConfigError("encoder vocab_size must be positive");
    if (heads == 0 || model_dim == 0 || ffn_dim == 0) throw ConfigError("encoder dimensions must be positive");
    if (model_dim % heads != 0) {
        throw ConfigError("model_dim " + std::to_string(model_dim) + " is not divisible by heads " +
                          std::to_string(heads));
    }
    if (max_positions == 0) throw ConfigError("max_positions must be positive");
    for (real r : {attn_dropout, hidden_dropout}) {
        if (!(r >= 0) || r >= 1) throw ConfigError("encoder dropout rates must lie in [0, 1)");
    }
}

Encoder::Encoder(EncoderConfig config) : config_(config) {
    config_.validate();
    const std::size_t d = config_.model_dim, f = config_.ffn_dim;
    tok_emb_ = Parameter("enc.tok_emb", {config_.vocab_size, d});
    pos_emb_ = Parameter("enc.pos_emb", {config_.max_positions, d});
    for (std::size_t i = 0; i < config_.layers; ++i) {
        const std::string p = "enc.layer" + std::to_string(i) + ".";
        EncoderLayer l{
            Parameter(p + "wq.weight", {d, d}),   Parameter(p + "wq.bias", {d}),
            Parameter(p + "wk.weight", {d, d}),   Parameter(p + "wk.bias", {d}),
            Parameter(p + "wv.weight", {d, d}),   Parameter(p + "wv.bias", {d}),
            Parameter(p + "wo.weight", {d, d}),   Parameter(p + "wo.bias", {d}),
            Parameter(p + "ff1.weight", {d, f}),  Parameter(p + "ff1.bias", {f}),
            Parameter(p + "ff2.weight", {f, d}),  Parameter(p + "ff2.bias", {d}),
            Parameter(p + "ln1.scale", {d}),      Parameter(p + "ln1.shift", {d}),
            Parameter(p + "ln2.scale", {d}),      Parameter(p + "ln2.shift", {d}),
        };
        fill_constant(l.ln1_scale, 1);
        fill_constant(l.ln2_scale, 1);
        layers_.push_back(std::move(l));
    }
}

void Encoder::init(Rng& rng) {
    constexpr double kStd = 0.02;
    fill_normal(tok_emb_, rng, kStd);
    fill_normal(pos_emb_, rng, kStd);
    for (auto& l : layers_) {
        for (Parameter* w : {&l.wq, &l.wk, &l.wv, &l.wo, &l.ff1_w, &l.ff2_w}) fill_normal(*w, rng, kStd);
        for (Parameter* b : {&l.bq, &l.bk, &l.bv, &l.bo, &l.ff1_b, &l.ff2_b, &l.ln1_shift, &l.ln2_shift}) {
            fill_constant(*b, 0);
        }
        fill_constant(l.ln1_scale, 1);
        fill_constant(l.ln2_scale, 1);
    }
}

std::vector<Parameter> Encoder::parameters() const {
    std::vector<Parameter> out{tok_emb_, pos_emb_};
    for (const auto& l : layers_) {
        out.insert(out.end(), {l.wq, l.bq, l.wk, l.bk, l.wv, l.bv, l.wo, l.bo, l.ff1_w, l.ff1_b, l.ff2_w, l.ff2_b,
                               l.ln1_scale, l.ln1_shift, l.ln2_scale, l.ln2_shift});
    }
    return out;
}

Tensor Encoder::embed(std::span<const std::int32_t> ids, Mode mode, Rng& rng) const {
    if (ids.size() > config_.max_positions) {
        throw DataError("sequence of " + std::to_string(ids.size()) + " tokens exceeds max_positions " +
                        std::to_string(config_.max_positions));
    }
    std::vector<std::int32_t> positions(ids.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<std::int32_t>(i);
    Tensor x = add(gather_rows(tok_emb_.tensor(), ids), gather_rows(pos_emb_.tensor(), positions));
    return dropout(x, config_.hidden_dropout, mode, rng);
}

Tensor Encoder::attention(std::size_t layer_index, const Tensor& x, std::span<const std::uint8_t> mask, Mode mode,
                          Rng& rng, std::vector<Tensor>* weights) const {
    const EncoderLayer& l = layers_.at(layer_index);
    const std::size_t t = x.rows();
    if (x.cols() != config_.model_dim) {
        throw DimensionError("attention input " + to_string(x.shape()) + " does not have model_dim " +
                             std::to_string(config_.model_dim) + " columns");
    }
    if (mask.size() != t) throw DimensionError("attention mask length differs from sequence length");
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
        throw DataError("attention over a fully masked sequence");
    }

    std::vector<real> bias(t);
    for (std::size_t j = 0; j < t; ++j) bias[j] = mask[j] ? real{0} : kMaskLogit;
    const Tensor key_bias = Tensor::vector(std::move(bias));

    const Tensor q = affine(x, l.wq, l.bq);
    const Tensor k = affine(x, l.wk, l.bk);
    const Tensor v = affine(x, l.wv, l.bv);
    const std::size_t dk = config_.head_dim();
    const real inv_sqrt_dk = real{1} / std::sqrt(static_cast<real>(dk));

    std::vector<Tensor> heads;
    heads.reserve(config_.heads);
    if (weights) weights->clear();
    for (std::size_t h = 0; h < config_.heads; ++h) {
        const Tensor qh = slice_cols(q, h * dk, dk);
        const Tensor kh = slice_cols(k, h * dk, dk);
        const Tensor vh = slice_cols(v, h * dk, dk);
        const Tensor scores = add_bias(scale(matmul(qh, transpose(kh)), inv_sqrt_dk), key_bias);
        const Tensor probs = softmax(scores, 1);
        if (weights) weights->push_back(probs);
        heads.push_back(matmul(dropout(probs, config_.attn_dropout, mode, rng), vh));
    }
    return affine(concat_cols(heads), l.wo, l.bo);
}

Tensor Encoder::block(std::size_t layer_index, const Tensor& x, std::span<const std::uint8_t> mask, Mode mode,
                      Rng& rng) const {
    const EncoderLayer& l = layers_.at(layer_index);
    const Tensor y = layer_norm(add(x, attention(layer_index, x, mask, mode, rng)), l.ln1_scale.tensor(),
                                l.ln1_shift.tensor());
    const Tensor hidden = relu(affine(y, l.ff1_w, l.ff1_b));
    const Tensor ffn = dropout(affine(hidden, l.ff2_w, l.ff2_b), config_.hidden_dropout, mode, rng);
    return layer_norm(add(y, ffn), l.ln2_scale.tensor(), l.ln2_shift.tensor());
}

Tensor Encoder::run(std::span<const std::int32_t> ids, std::span<const std::uint8_t> mask, Mode mode,
                    Rng& rng) const {
    Tensor x = embed(ids, mode, rng);
    for (std::size_t i = 0; i < layers_.size(); ++i) x = block(i, x, mask, mode, rng);
    return x;
}

Tensor Encoder::encode(const TokenSequence& seq, Mode mode, Rng& rng) const {
    if (seq.mask.size() != seq.ids.size()) throw DimensionError("token sequence mask length differs from ids");
    return run(seq.ids, seq.mask, mode, rng);
}

Tensor Encoder::encode_prefix(const TokenSequence& seq, Mode mode, Rng& rng) const {
    if (seq.real_len == 0 || seq.real_len > seq.ids.size()) {
        throw DataError("token sequence has no real positions to encode");
    }
    const std::span<const std::int32_t> ids(seq.ids.data(), seq.real_len);
    const std::vector<std::uint8_t> mask(seq.real_len, 1);
    return run(ids, mask, mode, rng);
}

}  // namespace appt
