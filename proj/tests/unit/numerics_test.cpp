#include <appt/errors.hpp>
#include <appt/ops.hpp>
#include <appt/tensor.hpp>
#include <appt/tensor_io.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

using namespace appt;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, real lo = -2, real hi = 2) {
    std::uniform_real_distribution<real> dist(lo, hi);
    std::vector<real> v(numel(shape));
    for (auto& x : v) x = dist(rng);
    return Tensor(std::move(shape), std::move(v));
}

void expect_values(const Tensor& t, std::vector<real> expected, real tol = 1e-6f) {
    ASSERT_EQ(t.numel(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(t[i], expected[i], tol) << "index " << i;
}

}  // namespace

TEST(Matmul, IdentityLeavesMatrix) {
    auto c = matmul(Tensor::matrix({{1, 0}, {0, 1}}), Tensor::matrix({{5, 6}, {7, 8}}));
    EXPECT_EQ(c.shape(), (Shape{2, 2}));
    expect_values(c, {5, 6, 7, 8}, 0);
}

TEST(Matmul, RowTimesColumn) {
    auto c = matmul(Tensor::matrix({{1, 2}}), Tensor::matrix({{3}, {4}}));
    EXPECT_EQ(c.shape(), (Shape{1, 1}));
    EXPECT_EQ(c[0], 11);
}

TEST(Matmul, MismatchNamesBothShapes) {
    try {
        matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
    }
}

TEST(Softmax, SymmetricPair) { expect_values(softmax(Tensor::vector({0, 0}), 0), {0.5f, 0.5f}); }

TEST(Softmax, LargeLogitDoesNotOverflow) {
    auto s = softmax(Tensor::vector({1000, 0}), 0);
    EXPECT_TRUE(std::isfinite(s[0]) && std::isfinite(s[1]));
    EXPECT_NEAR(s[0], 1, 1e-6);
    EXPECT_NEAR(s[1], 0, 1e-6);
}

TEST(Softmax, EmptyAxisIsDomainError) { EXPECT_THROW(softmax(Tensor::zeros({3, 0}), 1), DomainError); }

TEST(Softmax, SlicesSumToOneAlongEitherAxis) {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto x = random_tensor({4, 7}, rng, -30, 30);
        for (std::size_t axis : {0u, 1u}) {
            auto s = softmax(x, axis);
            const std::size_t outer = axis == 0 ? 7 : 4, inner = axis == 0 ? 4 : 7;
            for (std::size_t o = 0; o < outer; ++o) {
                double total = 0;
                for (std::size_t i = 0; i < inner; ++i) {
                    const real v = axis == 0 ? s.at(i, o) : s.at(o, i);
                    EXPECT_GE(v, 0);
                    EXPECT_LE(v, 1);
                    total += v;
                }
                EXPECT_NEAR(total, 1.0, 1e-6);
            }
        }
    }
}

TEST(LayerNorm, ConstantRowNormalisesToZero) {
    auto y = layer_norm(Tensor::matrix({{3, 3, 3}}), Tensor::vector({1, 1, 1}), Tensor::vector({0, 0, 0}));
    expect_values(y, {0, 0, 0}, 0);
}

TEST(LayerNorm, ZeroScaleGivesShift) {
    Rng rng(1);
    auto y = layer_norm(random_tensor({2, 4}, rng), Tensor::zeros({4}), Tensor::vector({1, -2, 3, 0.5f}));
    expect_values(y, {1, -2, 3, 0.5f, 1, -2, 3, 0.5f}, 0);
}

TEST(LayerNorm, RowsHaveZeroMeanUnitVariance) {
    Rng rng(2);
    auto y = layer_norm(random_tensor({3, 16}, rng), Tensor::full({16}, 1), Tensor::zeros({16}));
    for (std::size_t r = 0; r < 3; ++r) {
        double mean = 0, var = 0;
        for (std::size_t c = 0; c < 16; ++c) mean += y.at(r, c);
        mean /= 16;
        for (std::size_t c = 0; c < 16; ++c) var += (y.at(r, c) - mean) * (y.at(r, c) - mean);
        EXPECT_NEAR(mean, 0, 1e-5);
        EXPECT_NEAR(var / 16, 1, 1e-3);
    }
}

TEST(LayerNorm, ScaleLengthMismatch) {
    EXPECT_THROW(layer_norm(Tensor::zeros({2, 4}), Tensor::zeros({3}), Tensor::zeros({4})), DimensionError);
}

TEST(Pointwise, SigmoidOfZero) { EXPECT_EQ(sigmoid(Tensor::scalar(0)).item(), 0.5f); }

TEST(Pointwise, SigmoidExtremesStayFinite) {
    auto s = sigmoid(Tensor::vector({-500, 500}));
    EXPECT_EQ(s[0], 0);
    EXPECT_EQ(s[1], 1);
}

TEST(Pointwise, ReluTanhHadamardAddScale) {
    auto x = Tensor::vector({-1, 0, 2});
    expect_values(relu(x), {0, 0, 2}, 0);
    expect_values(tanh(x), {std::tanh(-1.0f), 0, std::tanh(2.0f)});
    expect_values(hadamard(x, x), {1, 0, 4}, 0);
    expect_values(add(x, x), {-2, 0, 4}, 0);
    expect_values(scale(x, 3), {-3, 0, 6}, 0);
    EXPECT_THROW(add(x, Tensor::zeros({2})), DimensionError);
}

TEST(Dropout, EvalModeIsExactIdentity) {
    Rng rng(5);
    auto x = random_tensor({8, 8}, rng);
    auto y = dropout(x, 0.5f, Mode::eval, rng);
    ASSERT_EQ(y.numel(), x.numel());
    for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y[i], x[i]);
}

TEST(Dropout, TrainModeKeepsMeanNearOne) {
    Rng rng(11);
    auto y = dropout(Tensor::full({10000}, 1), 0.5f, Mode::train, rng);
    double total = 0;
    for (real v : y.data()) {
        EXPECT_TRUE(v == 0 || v == 2) << v;
        total += v;
    }
    EXPECT_NEAR(total / 10000, 1.0, 0.05);
}

TEST(Dropout, RateOfOneRejected) {
    Rng rng(1);
    EXPECT_THROW(dropout(Tensor::zeros({3}), 1, Mode::train, rng), ConfigError);
    EXPECT_THROW(dropout(Tensor::zeros({3}), -0.1f, Mode::train, rng), ConfigError);
}

TEST(Backward, SumGivesOnes) {
    Parameter p("p", {2, 3});
    std::iota(p.value().begin(), p.value().end(), real(1));
    backward(sum(p.tensor()));
    for (real g : p.gradient()) EXPECT_EQ(g, 1);
}

TEST(Backward, SquareGivesTwiceValue) {
    Parameter p("p", {2});
    p.value()[0] = 1;
    p.value()[1] = 2;
    backward(sum(hadamard(p.tensor(), p.tensor())));
    EXPECT_EQ(p.gradient()[0], 2);
    EXPECT_EQ(p.gradient()[1], 4);
}

TEST(Backward, RepeatedCallsAccumulateUntilZeroed) {
    Parameter p("p", {3});
    backward(sum(p.tensor()));
    backward(sum(p.tensor()));
    for (real g : p.gradient()) EXPECT_EQ(g, 2);
    p.zero_grad();
    EXPECT_EQ(p.gradient().size(), p.value().size());
    for (real g : p.gradient()) EXPECT_EQ(g, 0);
}

TEST(Backward, ConstantGraphLeavesNoGradient) {
    auto a = Tensor::matrix({{1, 2}, {3, 4}});
    auto b = Tensor::matrix({{0.5f, 0}, {1, 1}});
    auto loss = sum(tanh(matmul(a, b)));
    EXPECT_FALSE(loss.requires_grad());
    backward(loss);
    EXPECT_FALSE(a.has_grad());
    EXPECT_FALSE(b.has_grad());
    EXPECT_FALSE(loss.has_grad());
}

TEST(Backward, NonScalarLossRejected) {
    Parameter p("p", {2});
    EXPECT_THROW(backward(scale(p.tensor(), 2)), DimensionError);
}

TEST(Backward, GatherScattersIntoTableRows) {
    Parameter table("t", {4, 2});
    std::vector<std::int32_t> ids{1, 3, 1};
    backward(sum(gather_rows(table.tensor(), ids)));
    std::vector<real> expected{0, 0, 2, 2, 0, 0, 1, 1};
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(table.gradient()[i], expected[i]);
    std::vector<std::int32_t> bad{4};
    EXPECT_THROW(gather_rows(table.tensor(), bad), DataError);
}

TEST(Structural, ConcatAndSlice) {
    auto a = Tensor::matrix({{1, 2}, {3, 4}});
    auto b = Tensor::matrix({{5}, {6}});
    std::vector<Tensor> parts{a, b};
    auto c = concat_cols(parts);
    expect_values(c, {1, 2, 5, 3, 4, 6}, 0);
    expect_values(slice_cols(c, 1, 2), {2, 5, 4, 6}, 0);
    std::vector<Tensor> rows{a, a};
    auto r = concat_rows(rows);
    EXPECT_EQ(r.shape(), (Shape{4, 2}));
    expect_values(slice_rows(r, 1, 2), {3, 4, 1, 2}, 0);
    expect_values(row(a, 1), {3, 4}, 0);
}

TEST(Container, RoundTripPreservesNamesShapesValues) {
    std::vector<NamedTensor> in{{"alpha", {2, 3}, {1, 2, 3, 4, 5, -6.5f}},
                                {"b", {}, {42}},
                                {"enc.layer0.wq.weight", {1, 1, 2}, {0.25f, -0.125f}}};
    std::stringstream buf;
    write_container(buf, in);
    auto bytes = buf.str();
    ASSERT_EQ(bytes.substr(0, 4), "PJT1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3);
    auto out = read_container(buf);
    ASSERT_EQ(out.size(), in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        EXPECT_EQ(out[i].name, in[i].name);
        EXPECT_EQ(out[i].shape, in[i].shape);
        EXPECT_EQ(out[i].data, in[i].data);
    }
}

TEST(Container, BadMagicIsLoadError) {
    std::stringstream buf;
    buf << "PJT2" << std::string(8, '\0');
    EXPECT_THROW(read_container(buf), LoadError);
}

TEST(Container, ParameterFileMustMatchExactly) {
    auto dir = std::filesystem::temp_directory_path() / "appt_numerics_container";
    std::filesystem::create_directories(dir);
    Parameter a("a", {2, 2}), b("b", {3});
    a.value()[3] = 7;
    b.value()[0] = -1;
    std::vector<Parameter> saved{a, b};
    save_parameters(dir / "m.pjt", saved);

    Parameter a2("a", {2, 2}), b2("b", {3});
    std::vector<Parameter> target{a2, b2};
    load_parameters(dir / "m.pjt", target);
    EXPECT_EQ(a2.value()[3], 7);
    EXPECT_EQ(b2.value()[0], -1);

    std::vector<Parameter> wrong_shape{Parameter("a", {4}), Parameter("b", {3})};
    EXPECT_THROW(load_parameters(dir / "m.pjt", wrong_shape), LoadError);
    std::vector<Parameter> missing{Parameter("a", {2, 2})};
    EXPECT_THROW(load_parameters(dir / "m.pjt", missing), LoadError);
    EXPECT_THROW(load_parameters(dir / "absent.pjt", target), LoadError);
    std::filesystem::remove_all(dir);
}
