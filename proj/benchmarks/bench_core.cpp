#include <appt/classifier.hpp>
#include <appt/encoder.hpp>
#include <appt/metrics.hpp>
#include <appt/model.hpp>
#include <appt/ops.hpp>
#include <appt/pipeline.hpp>
#include <appt/synth.hpp>
#include <appt/training.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace appt;

namespace {

Tensor random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<real> dist(0, 1);
    std::vector<real> v(rows * cols);
    for (auto& x : v) x = dist(rng);
    return Tensor({rows, cols}, std::move(v));
}

ModelConfig toy_model(std::size_t vocab, std::size_t max_len) {
    ModelConfig cfg;
    cfg.encoder.vocab_size = vocab;
    cfg.encoder.max_positions = max_len;
    return cfg;
}

}  // namespace

static void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    auto a = random_matrix(n, n, rng), b = random_matrix(n, n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128);

static void BM_MatmulBackward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    Parameter a("a", {n, n}), b("b", {n, n});
    auto ra = random_matrix(n, n, rng), rb = random_matrix(n, n, rng);
    std::copy(ra.data().begin(), ra.data().end(), a.value().begin());
    std::copy(rb.data().begin(), rb.data().end(), b.value().begin());
    for (auto _ : state) backward(sum(matmul(a.tensor(), b.tensor())));
}
BENCHMARK(BM_MatmulBackward)->Arg(32)->Arg(64)->Arg(128);

static void BM_EncoderPrefix(benchmark::State& state) {
    const auto len = static_cast<std::size_t>(state.range(0));
    EncoderConfig cfg;
    cfg.vocab_size = 500;
    cfg.max_positions = 512;
    Encoder enc(cfg);
    Rng rng(3);
    enc.init(rng);
    TokenSequence seq;
    seq.ids.assign(512, Vocabulary::kPad);
    seq.mask.assign(512, 0);
    for (std::size_t i = 0; i < len; ++i) {
        seq.ids[i] = static_cast<std::int32_t>(4 + i % 400);
        seq.mask[i] = 1;
    }
    seq.real_len = len;
    for (auto _ : state) benchmark::DoNotOptimize(enc.encode_prefix(seq, Mode::eval, rng));
}
BENCHMARK(BM_EncoderPrefix)->Arg(32)->Arg(128)->Arg(512);

static void BM_BiLstm(benchmark::State& state) {
    const auto len = static_cast<std::size_t>(state.range(0));
    BiLstmStack stack(64, 2, 16, 16);
    Rng rng(4);
    stack.init(rng);
    auto seq = random_matrix(len, 64, rng);
    std::vector<std::uint8_t> mask(len, 1);
    for (auto _ : state) benchmark::DoNotOptimize(stack.forward(seq, mask));
}
BENCHMARK(BM_BiLstm)->Arg(32)->Arg(128);

static void BM_TrainStep(benchmark::State& state) {
    const auto data = synthesize_dataset(8, 7);
    const auto vocab = build_vocab(corpus_texts(data), 400);
    const auto batch = encode_patches(data, vocab, Truncation::head, 128);
    PatchModel model(toy_model(vocab.size(), 128));
    Rng rng(5);
    model.init(rng);
    auto params = model.parameters();
    Adam adam(1e-3);
    for (auto _ : state) {
        for (auto& p : params) p.zero_grad();
        backward(batch_loss(model, batch, Mode::train, rng));
        adam.step(params);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

static void BM_Auc(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> pos(n), neg(n);
    for (auto& s : pos) s = u(rng);
    for (auto& s : neg) s = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(auc(pos, neg));
}
BENCHMARK(BM_Auc)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
