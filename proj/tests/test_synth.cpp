#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmd/synth.hpp"
#include "test_support.hpp"

using namespace mmd;
using testing_support::expect_code;
using testing_support::naive_interp;
using testing_support::rel_l2;
using testing_support::uniform_grid;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ShapeTable cos_table(int bins) {
    std::vector<double> v(static_cast<std::size_t>(bins));
    for (int j = 0; j < bins; ++j) v[static_cast<std::size_t>(j)] = std::cos(kTwoPi * (j + 0.5) / bins);
    return ShapeTable(v);
}

}  // namespace

TEST(GenGimf, CosineShapeLinearPhase) {
    ComponentSpec spec;
    spec.amplitude = [](double) { return 1.0; };
    spec.phase = [](double t) { return t; };
    spec.fundamental = 10;
    spec.shape = cos_table(4096);
    const auto t = uniform_grid(2000);
    const auto f = gen_gimf(spec, t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(f.values()[i], std::cos(20.0 * std::numbers::pi * t[i]), 1e-6);
}

TEST(GenGimf, ZeroAmplitudeGivesZero) {
    ComponentSpec spec;
    spec.amplitude = [](double) { return 0.0; };
    spec.phase = [](double t) { return t; };
    spec.fundamental = 3;
    spec.shape = cos_table(64);
    const auto f = gen_gimf(spec, uniform_grid(100));
    for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(GenGimf, BenchmarkComponentMatchesDirectFormula) {
    const auto ex = gen_example_4_1(1 << 15, 0.0, 0);
    const auto t = ex.signal.times();
    const auto s1 = ex.shapes[0].bins();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double phi = t[i] + 0.006 * std::sin(kTwoPi * t[i]);
        const double alpha = 1.0 + 0.2 * std::cos(kTwoPi * phi) + 0.1 * std::sin(kTwoPi * phi);
        ASSERT_NEAR(ex.components[0].values()[i], alpha * naive_interp(s1, 150.0 * phi), 1e-12);
    }
}

TEST(GenExample, PublishedAmplitudeAndPhaseValues) {
    const auto ex = gen_example_4_1(1024, 0.0, 0);
    EXPECT_DOUBLE_EQ(ex.specs[0].amplitude(0.0), 1.2);
    EXPECT_DOUBLE_EQ(ex.specs[1].phase(0.0), 0.006);
    EXPECT_EQ(ex.priors[0].fundamental(), 150);
    EXPECT_EQ(ex.priors[1].fundamental(), 220);
    EXPECT_DOUBLE_EQ(ex.priors[0].amplitude()[0], 1.2);
}

TEST(GenExample, CleanSignalIsSumOfComponents) {
    const auto ex = gen_example_4_1(4096, 0.0, 3);
    for (std::size_t i = 0; i < ex.signal.size(); ++i)
        EXPECT_EQ(ex.signal.values()[i], ex.components[0].values()[i] + ex.components[1].values()[i]);
}

TEST(GenExample, NoisySignalIsSeeded) {
    const auto a = gen_example_4_1(4096, 2.25, 9);
    const auto b = gen_example_4_1(4096, 2.25, 9);
    const auto c = gen_example_4_1(4096, 2.25, 10);
    EXPECT_TRUE(std::equal(a.signal.values().begin(), a.signal.values().end(), b.signal.values().begin()));
    EXPECT_FALSE(std::equal(a.signal.values().begin(), a.signal.values().end(), c.signal.values().begin()));
}

TEST(EcgShape, UnitNormMeanZero) {
    for (int variant : {1, 2})
        for (int bins : {64, 200, 4096}) {
            const auto s = ecg_like_shape(bins, variant);
            EXPECT_LE(std::abs(s.mean()), 1e-12);
            EXPECT_NEAR(s.l2norm(), 1.0, 1e-12);
        }
}

TEST(EcgShape, VariantsDifferAndArePeriodic) {
    const auto a = ecg_like_shape(1024, 1);
    const auto b = ecg_like_shape(1024, 2);
    std::vector<double> d(1024);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = a.bins()[j] - b.bins()[j];
    EXPECT_GT(testing_support::naive_rms(d), 0.1);
    for (const auto* s : {&a, &b}) EXPECT_LE(std::abs(eval_shape(*s, 0.0) - eval_shape(*s, 1.0 - 1e-9)), 0.05);
}

TEST(EcgShape, RejectsBadArguments) {
    expect_code(ErrorCode::InvalidArgument, [] { (void)ecg_like_shape(32, 1); });
    expect_code(ErrorCode::InvalidArgument, [] { (void)ecg_like_shape(128, 3); });
}

TEST(Snr, FormulaValues) {
    const auto t = uniform_grid(4);
    const auto f = make_signal(t, {2.0, -2.0, 2.0, -2.0});
    EXPECT_NEAR(snr(f, 2.0), 0.0, 1e-12);
    EXPECT_NEAR(snr(f, 0.2), 10.0, 1e-12);
    expect_code(ErrorCode::NonPositiveVariance, [&] { (void)snr(f, 0.0); });
}

TEST(Snr, DecreasesWithVariance) {
    const auto ex = gen_example_4_1(2048, 0.0, 0);
    double prev = snr(ex.signal, 0.01);
    for (double v : {0.1, 1.0, 2.25, 10.0}) {
        const double cur = snr(ex.signal, v);
        EXPECT_LT(cur, prev);
        prev = cur;
    }
}

TEST(AddNoise, ZeroVarianceIsIdentity) {
    const auto ex = gen_example_4_1(512, 0.0, 0);
    const auto same = add_noise(ex.signal, 0.0, 4);
    for (std::size_t i = 0; i < same.size(); ++i) EXPECT_EQ(same.values()[i], ex.signal.values()[i]);
}

TEST(AddNoise, HasRequestedVariance) {
    const auto t = uniform_grid(1 << 16);
    const auto noise = add_noise(make_signal(t, std::vector<double>(t.size(), 0.0)), 2.25, 11);
    double mean = 0.0, var = 0.0;
    for (double v : noise.values()) mean += v;
    mean /= static_cast<double>(t.size());
    for (double v : noise.values()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t.size());
    EXPECT_NEAR(mean, 0.0, 0.03);
    EXPECT_NEAR(var, 2.25, 0.05);
}

TEST(SampleGrid, UniformGrid) {
    EXPECT_EQ(sample_grid(4, GridMode::Uniform, 0), (std::vector<double>{0.0, 0.25, 0.5, 0.75}));
}

TEST(SampleGrid, IidIsDeterministicSortedAndUniform) {
    const auto a = sample_grid(10'000, GridMode::Iid, 21);
    const auto b = sample_grid(10'000, GridMode::Iid, 21);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(std::adjacent_find(a.begin(), a.end(), std::greater_equal<>()) == a.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double n = static_cast<double>(a.size());
        ks = std::max({ks, std::abs(static_cast<double>(i + 1) / n - a[i]), std::abs(a[i] - static_cast<double>(i) / n)});
    }
    EXPECT_LE(ks, 0.02);
    EXPECT_GE(a.front(), 0.0);
    EXPECT_LT(a.back(), 1.0);
}

TEST(SampleGrid, ModeNames) {
    EXPECT_EQ(parse_grid_mode("iid"), GridMode::Iid);
    EXPECT_EQ(to_string(GridMode::Uniform), "uniform");
    expect_code(ErrorCode::InvalidArgument, [] { (void)parse_grid_mode("poisson"); });
}

TEST(GenMimf, BandTableMatchesReconstruction) {
    ComponentSpec spec;
    spec.amplitude = [](double) { return 1.0; };
    spec.phase = [](double t) { return t + 0.01 * std::sin(kTwoPi * t); };
    spec.fundamental = 30;
    spec.shape = ecg_like_shape(256, 1);
    auto bands = MimfEstimate::zeros(2, 256);
    bands.cos_products[bands.slot(0)] = ecg_like_shape(256, 1);
    bands.cos_products[bands.slot(1)] = ecg_like_shape(256, 2).scaled(0.3);
    bands.sin_products[bands.slot(-2)] = ecg_like_shape(256, 1).scaled(0.1);
    normalize(bands);
    spec.bands = bands;
    const auto t = uniform_grid(8192);
    const auto f = gen_mimf(spec, t);
    const auto rec = reconstruct_mimf(bands, prior_from_spec(spec, t), t);
    EXPECT_LE(rel_l2(rec.values(), f.values()), 1e-12);
}
