#pragma once

#include "appt/ops.hpp"
#include "appt/tensor.hpp"
#include "appt/tokenizer.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace appt {

struct EncoderConfig {
    std::size_t vocab_size = 0;
    std::size_t layers = 2;
    std::size_t heads = 4;
    std::size_t model_dim = 32;
    std::size_t ffn_dim = 64;
    std::size_t max_positions = 512;
    real attn_dropout = real(0.1);
    real hidden_dropout = real(0.1);

    std::size_t head_dim() const { return model_dim / heads; }
    void validate() const;  // throws ConfigError
};

struct EncoderLayer {
    Parameter wq, bq, wk, bk, wv, bv, wo, bo;
    Parameter ff1_w, ff1_b, ff2_w, ff2_b;
    Parameter ln1_scale, ln1_shift, ln2_scale, ln2_shift;
};

/// Post-norm transformer encoder with learned absolute positions.
class Encoder {
public:
    explicit Encoder(EncoderConfig config);

    /// Weights ~ N(0, 0.02), biases 0, layer-norm scale 1 / shift 0.
    void init(Rng& rng);

    const EncoderConfig& config() const { return config_; }
    std::vector<Parameter> parameters() const;

    Parameter& token_embedding() { return tok_emb_; }
    Parameter& positional_embedding() { return pos_emb_; }
    EncoderLayer& layer(std::size_t i) { return layers_.at(i); }

    /// Token row + position row for every id, then hidden dropout.
    Tensor embed(std::span<const std::int32_t> ids, Mode mode, Rng& rng) const;

    /// Multi-head scaled dot-product self-attention of layer `layer`.
    /// Keys with mask 0 get a -1e9 logit. When `weights` is given it
    /// receives the per-head [T×T] attention probabilities.
    Tensor attention(std::size_t layer, const Tensor& x, std::span<const std::uint8_t> mask, Mode mode, Rng& rng,
                     std::vector<Tensor>* weights = nullptr) const;

    /// Y = LN(X + attention(X)); Z = LN(Y + FFN(Y)), FFN = affine, ReLU, affine.
    Tensor block(std::size_t layer, const Tensor& x, std::span<const std::uint8_t> mask, Mode mode,
                 Rng& rng) const;

    /// Hidden state for every position of the sequence: [max_len×d].
    Tensor encode(const TokenSequence& seq, Mode mode, Rng& rng) const;

    /// Hidden states of the first real_len positions only. Padding keys
    /// receive zero attention weight, so these rows equal the leading rows
    /// of encode() while skipping the padded work.
    Tensor encode_prefix(const TokenSequence& seq, Mode mode, Rng& rng) const;

private:
    Tensor run(std::span<const std::int32_t> ids, std::span<const std::uint8_t> mask, Mode mode, Rng& rng) const;

    EncoderConfig config_;
    Parameter tok_emb_;
    Parameter pos_emb_;
    std::vector<EncoderLayer> layers_;
};

}  // namespace appt
