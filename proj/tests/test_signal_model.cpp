#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mmd/error.hpp"
#include "mmd/signal_model.hpp"
#include "mmd/synth.hpp"
#include "test_support.hpp"

using namespace mmd;
using testing_support::expect_code;
using testing_support::rel_l2;
using testing_support::uniform_grid;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PhasePrior linear_prior(const std::vector<double>& t, double rate) {
    std::vector<double> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = rate * t[i];
    return make_prior(p, std::nullopt, t);
}

ShapeTable cos_table(int bins) {
    std::vector<double> v(static_cast<std::size_t>(bins));
    for (int j = 0; j < bins; ++j) v[static_cast<std::size_t>(j)] = std::cos(kTwoPi * (j + 0.5) / bins);
    return ShapeTable(v);
}

}  // namespace

TEST(MakeSignal, AcceptsValidInput) {
    const auto s = make_signal({0.0, 0.5, 1.0}, {1.0, 2.0, 3.0});
    EXPECT_EQ(s.size(), 3u);
}

TEST(MakeSignal, SortsByTime) {
    const auto s = make_signal({0.5, 0.0}, {1.0, 2.0});
    EXPECT_EQ(s.times()[0], 0.0);
    EXPECT_EQ(s.times()[1], 0.5);
    EXPECT_EQ(s.values()[0], 2.0);
    EXPECT_EQ(s.values()[1], 1.0);
}

TEST(MakeSignal, RejectsInvalidInput) {
    expect_code(ErrorCode::DuplicateTime, [] { (void)make_signal({0.0, 0.0}, {1.0, 2.0}); });
    expect_code(ErrorCode::LengthMismatch, [] { (void)make_signal({0.0, 0.5}, {1.0}); });
    expect_code(ErrorCode::LengthMismatch, [] { (void)make_signal({0.0}, {1.0}); });
    expect_code(ErrorCode::NonFinite, [] { (void)make_signal({0.0, 0.5}, {1.0, std::nan("")}); });
    expect_code(ErrorCode::OutOfDomain, [] { (void)make_signal({0.0, 1.5}, {1.0, 2.0}); });
}

TEST(RoundFundamental, RecoversBenchmarkFundamentals) {
    const auto t = uniform_grid(1 << 14);
    std::vector<double> p1(t.size()), p2(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        p1[i] = 150.0 * (t[i] + 0.006 * std::sin(kTwoPi * t[i]));
        p2[i] = 220.0 * (t[i] + 0.006 * std::cos(kTwoPi * t[i]));
    }
    EXPECT_EQ(round_fundamental(p1, t), 150);
    EXPECT_EQ(round_fundamental(p2, t), 220);
    EXPECT_EQ(round_fundamental(t, t), 1);
}

TEST(RoundFundamental, RejectsNonMonotonePhase) {
    const std::vector<double> t{0.0, 0.25, 0.5, 0.75};
    const std::vector<double> p{0.0, 1.0, 0.5, 0.2};
    expect_code(ErrorCode::NonMonotonePhase, [&] { (void)round_fundamental(p, t); });
    expect_code(ErrorCode::NonMonotonePhase, [&] { (void)make_prior(p, std::nullopt, t); });
}

TEST(MakePrior, ValidatesAmplitude) {
    const auto t = uniform_grid(8);
    std::vector<double> q(8, 1.0);
    q[3] = 0.0;
    expect_code(ErrorCode::AmplitudeTooSmall, [&] { (void)make_prior(t, q, t); });
    const auto p = make_prior(t, std::nullopt, t);
    for (double a : p.amplitude()) EXPECT_EQ(a, 1.0);
}

TEST(SortComponents, OrdersByFundamentalStably) {
    const auto t = uniform_grid(64);
    std::vector<PhasePrior> priors{linear_prior(t, 220), linear_prior(t, 150)};
    auto sorted = sort_components(priors);
    EXPECT_EQ(sorted.priors[0].fundamental(), 150);
    EXPECT_EQ(sorted.priors[1].fundamental(), 220);
    EXPECT_EQ(sorted.permutation, (std::vector<std::size_t>{1, 0}));

    std::vector<PhasePrior> single{linear_prior(t, 5)};
    EXPECT_EQ(sort_components(single).permutation, (std::vector<std::size_t>{0}));

    std::vector<PhasePrior> ties{linear_prior(t, 7), linear_prior(t, 7.2)};
    EXPECT_EQ(sort_components(ties).permutation, (std::vector<std::size_t>{0, 1}));
}

TEST(SortComponents, InversePermutationRestoresOrder) {
    const auto t = uniform_grid(64);
    std::vector<PhasePrior> priors{linear_prior(t, 9), linear_prior(t, 3), linear_prior(t, 6), linear_prior(t, 3)};
    auto sorted = sort_components(priors);
    std::vector<int> fundamentals;
    for (const auto& p : sorted.priors) fundamentals.push_back(p.fundamental());
    const auto restored = restore_order(fundamentals, sorted.permutation);
    EXPECT_EQ(restored, (std::vector<int>{9, 3, 6, 3}));
}

TEST(EvalShape, ZeroTableIsZero) {
    const auto z = ShapeTable::zeros(16);
    for (double v : {-3.2, 0.0, 0.4, 17.9}) EXPECT_EQ(eval_shape(z, v), 0.0);
}

TEST(EvalShape, IsPeriodic) {
    const ShapeTable s(testing_support::random_values(33, 9));
    for (double v : {0.0, 0.013, 0.37, 0.99}) {
        EXPECT_NEAR(eval_shape(s, v), eval_shape(s, v + 1.0), 1e-12);
        EXPECT_NEAR(eval_shape(s, v), eval_shape(s, v - 3.0), 1e-12);
    }
}

TEST(EvalShape, InterpolatesCosineTable) {
    EXPECT_NEAR(eval_shape(cos_table(256), 0.25), 0.0, 1e-3);
    EXPECT_NEAR(eval_shape(cos_table(256), 0.0), 1.0, 1e-3);
}

TEST(ShapeTable, NormAndCentering) {
    const ShapeTable s({3.0, -1.0, 1.0, 1.0});
    EXPECT_NEAR(s.l2norm(), std::sqrt(3.0), 1e-15);
    EXPECT_DOUBLE_EQ(s.mean(), 1.0);
    EXPECT_FALSE(s.is_zero());
    EXPECT_TRUE(ShapeTable::zeros(4).is_zero());
    expect_code(ErrorCode::InvalidArgument, [] { (void)ShapeTable({1.0}); });
}

TEST(MimfEstimate, SlotsCoverBandRange) {
    const auto est = MimfEstimate::zeros(2, 16);
    EXPECT_EQ(est.slot(-2), 0u);
    EXPECT_EQ(est.slot(2), 4u);
    expect_code(ErrorCode::BandOutOfRange, [&] { (void)est.slot(3); });
}

TEST(Normalize, UnitShapesAndNonnegativeCoefficients) {
    auto est = MimfEstimate::zeros(1, 8);
    est.cos_products[est.slot(0)] = ShapeTable({2.0, -2.0, 2.0, -2.0, 2.0, -2.0, 2.0, -2.0});
    est.sin_products[est.slot(1)] = ShapeTable({-1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    normalize(est);
    EXPECT_DOUBLE_EQ(est.cos_coeffs[est.slot(0)], 2.0);
    EXPECT_NEAR(est.cos_shapes[est.slot(0)].l2norm(), 1.0, 1e-12);
    EXPECT_NEAR(est.sin_coeffs[est.slot(1)], 0.5, 1e-15);
    EXPECT_EQ(est.cos_coeffs[est.slot(-1)], 0.0);
    EXPECT_TRUE(est.cos_shapes[est.slot(-1)].is_zero());
}

TEST(ReconstructMimf, ZeroEstimateGivesZeroSignal) {
    const auto t = uniform_grid(128);
    const auto est = MimfEstimate::zeros(2, 32);
    const auto r = reconstruct_mimf(est, linear_prior(t, 4), t);
    for (double v : r.values()) EXPECT_EQ(v, 0.0);
}

TEST(ReconstructMimf, LeadingBandOnlyIsWarpedShape) {
    const auto t = uniform_grid(256);
    const auto prior = linear_prior(t, 6);
    auto est = MimfEstimate::zeros(1, 64);
    est.cos_products[est.slot(0)] = cos_table(64).scaled(1.7);
    const auto r = reconstruct_mimf(est, prior, t);
    for (std::size_t i = 0; i < t.size(); ++i)
        EXPECT_NEAR(r.values()[i], 1.7 * eval_shape(cos_table(64), prior.phase()[i]), 1e-14);
}

TEST(ReconstructMimf, GroundTruthReproducesGenerator) {
    const auto ex = gen_example_4_1(1 << 12, 0.0, 1);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto r = reconstruct_mimf(ex.truth[k], ex.priors[k], ex.signal.times());
        EXPECT_LE(rel_l2(r.values(), ex.components[k].values()), 1e-10);
    }
}

TEST(ReconstructMimf, IsLinearInShapes) {
    const auto t = uniform_grid(512);
    const auto prior = linear_prior(t, 10);
    auto a = MimfEstimate::zeros(1, 32);
    auto b = MimfEstimate::zeros(1, 32);
    auto ab = MimfEstimate::zeros(1, 32);
    std::uint64_t seed = 100;
    for (int n = -1; n <= 1; ++n) {
        const ShapeTable ca(testing_support::random_values(32, seed++)), cb(testing_support::random_values(32, seed++));
        const ShapeTable sa(testing_support::random_values(32, seed++)), sb(testing_support::random_values(32, seed++));
        a.cos_products[a.slot(n)] = ca;
        b.cos_products[b.slot(n)] = cb;
        ab.cos_products[ab.slot(n)] = ca.scaled(2.0) + cb.scaled(-0.5);
        if (n != 0) {
            a.sin_products[a.slot(n)] = sa;
            b.sin_products[b.slot(n)] = sb;
            ab.sin_products[ab.slot(n)] = sa.scaled(2.0) + sb.scaled(-0.5);
        }
    }
    const auto ra = reconstruct_mimf(a, prior, t), rb = reconstruct_mimf(b, prior, t), rab = reconstruct_mimf(ab, prior, t);
    std::vector<double> combo(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) combo[i] = 2.0 * ra.values()[i] - 0.5 * rb.values()[i];
    EXPECT_LE(rel_l2(rab.values(), combo), 1e-12);
}

TEST(ReconstructMimf, RejectsGridMismatch) {
    const auto t = uniform_grid(64);
    const auto est = MimfEstimate::zeros(0, 8);
    expect_code(ErrorCode::GridMismatch, [&] { (void)reconstruct_mimf(est, linear_prior(t, 2), uniform_grid(32)); });
}
