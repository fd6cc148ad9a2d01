#include "mmd/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mmd/error.hpp"
#include "mmd/fold_regress.hpp"

namespace mmd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Bump {
    double center, width, height;
};

// (center, width, height) per bump, positions in cycles
constexpr std::array<Bump, 3> kVariant1{{{0.20, 0.035, 0.15}, {0.40, 0.020, 1.00}, {0.65, 0.050, 0.30}}};
constexpr std::array<Bump, 3> kVariant2{{{0.15, 0.040, 0.25}, {0.45, 0.025, 1.00}, {0.70, 0.060, 0.35}}};

// 53-bit uniform in [0,1); avoids implementation-defined distribution code
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - unit_draw(rng_);  // (0,1]
        const double u2 = unit_draw(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return radius * std::cos(kTwoPi * u2);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace

SampledSignal gen_gimf(const ComponentSpec& spec, std::span<const double> grid) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        values[i] = spec.amplitude(grid[i]) * eval_shape(spec.shape, spec.fundamental * spec.phase(grid[i]));
    return make_signal({grid.begin(), grid.end()}, std::move(values));
}

SampledSignal gen_mimf(const ComponentSpec& spec, std::span<const double> grid) {
    if (!spec.bands) return gen_gimf(spec, grid);
    const auto& b = *spec.bands;
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double phi = spec.phase(grid[i]);
        const double p = spec.fundamental * phi;
        double acc = 0.0;
        for (int n = -b.bandwidth; n <= b.bandwidth; ++n) {
            acc += std::cos(kTwoPi * n * phi) * eval_shape(b.cos_product(n), p);
            if (n != 0) acc += std::sin(kTwoPi * n * phi) * eval_shape(b.sin_product(n), p);
        }
        values[i] = acc;
    }
    return make_signal({grid.begin(), grid.end()}, std::move(values));
}

PhasePrior prior_from_spec(const ComponentSpec& spec, std::span<const double> grid) {
    std::vector<double> p(grid.size()), q(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p[i] = spec.fundamental * spec.phase(grid[i]);
        q[i] = spec.amplitude(grid[i]);
    }
    return make_prior(std::move(p), std::move(q), grid);
}

ShapeTable ecg_like_shape(int bins, int variant) {
    if (bins < 64) throw Error(ErrorCode::InvalidArgument, "ecg_like_shape needs at least 64 bins");
    if (variant != 1 && variant != 2) throw Error(ErrorCode::InvalidArgument, "variant must be 1 or 2");
    const auto& bumps = variant == 1 ? kVariant1 : kVariant2;
    std::vector<double> s(static_cast<std::size_t>(bins), 0.0);
    for (int j = 0; j < bins; ++j) {
        const double x = (j + 0.5) / bins;
        for (const auto& b : bumps)
            for (int m = -1; m <= 1; ++m) {
                const double z = (x - b.center - m) / b.width;
                s[static_cast<std::size_t>(j)] += b.height * std::exp(-0.5 * z * z);
            }
    }
    auto centered = center_shape(ShapeTable(std::move(s)));
    return centered.scaled(1.0 / centered.l2norm());
}

std::string_view to_string(GridMode m) noexcept {
    return m == GridMode::Uniform ? "uniform" : "iid";
}

GridMode parse_grid_mode(std::string_view name) {
    if (name == "uniform") return GridMode::Uniform;
    if (name == "iid") return GridMode::Iid;
    throw Error(ErrorCode::InvalidArgument, "unknown grid mode '" + std::string(name) + "'");
}

std::vector<double> sample_grid(std::size_t length, GridMode mode, std::uint64_t seed) {
    if (length < 2) throw Error(ErrorCode::InvalidArgument, "a grid needs at least 2 samples");
    std::vector<double> t(length);
    if (mode == GridMode::Uniform) {
        for (std::size_t i = 0; i < length; ++i) t[i] = static_cast<double>(i) / static_cast<double>(length);
        return t;
    }
    std::mt19937_64 rng(seed);
    for (auto& x : t) x = unit_draw(rng);
    std::sort(t.begin(), t.end());
    // redraw duplicates until the grid is strictly increasing
    for (;;) {
        auto dup = std::adjacent_find(t.begin(), t.end());
        if (dup == t.end()) break;
        *dup = unit_draw(rng);
        std::sort(t.begin(), t.end());
    }
    return t;
}

SampledSignal add_noise(const SampledSignal& signal, double variance, std::uint64_t seed) {
    if (!(variance >= 0.0) || !std::isfinite(variance))
        throw Error(ErrorCode::NonPositiveVariance, "noise variance must be finite and nonnegative");
    if (variance == 0.0) return signal;
    Gaussian draw(seed);
    const double sd = std::sqrt(variance);
    std::vector<double> v(signal.values().begin(), signal.values().end());
    for (auto& x : v) x += sd * draw();
    return signal.with_values(std::move(v));
}

double snr(std::span<const double> values, double variance) {
    if (!(variance > 0.0)) throw Error(ErrorCode::NonPositiveVariance, "snr needs a positive variance");
    return 10.0 * std::log10(rms(values) / variance);
}

double snr(const SampledSignal& signal, double variance) {
    return snr(signal.values(), variance);
}

BenchmarkExample gen_example_4_1(std::size_t length, double noise_variance, std::uint64_t seed, GridMode grid) {
    if (length < 2) throw Error(ErrorCode::InvalidArgument, "the benchmark needs at least 2 samples");
    if (!(noise_variance >= 0.0)) throw Error(ErrorCode::NonPositiveVariance, "noise variance must be nonnegative");

    BenchmarkExample ex;
    ex.noise_variance = noise_variance;
    ex.seed = seed;
    const auto t = sample_grid(length, grid, seed);

    struct Params {
        int n;
        double ca, sa;  // alpha = 1 + ca cos + sa sin
        bool sin_phase;
    };
    const std::array<Params, 2> params{{{150, 0.2, 0.1, true}, {220, 0.1, 0.2, false}}};

    std::vector<double> total(length, 0.0);
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto prm = params[k];
        ComponentSpec spec;
        spec.fundamental = prm.n;
        if (prm.sin_phase)
            spec.phase = [](double x) { return x + 0.006 * std::sin(kTwoPi * x); };
        else
            spec.phase = [](double x) { return x + 0.006 * std::cos(kTwoPi * x); };
        spec.amplitude = [prm, phase = spec.phase](double x) {
            const double phi = phase(x);
            return 1.0 + prm.ca * std::cos(kTwoPi * phi) + prm.sa * std::sin(kTwoPi * phi);
        };
        spec.shape = ecg_like_shape(kTruthBins, static_cast<int>(k) + 1);

        auto truth = MimfEstimate::zeros(1, kTruthBins);
        truth.cos_products[truth.slot(0)] = spec.shape;
        truth.cos_products[truth.slot(1)] = spec.shape.scaled(prm.ca);
        truth.sin_products[truth.slot(1)] = spec.shape.scaled(prm.sa);
        normalize(truth);

        auto f = gen_gimf(spec, t);
        for (std::size_t i = 0; i < length; ++i) total[i] += f.values()[i];
        truth.mode = f;

        ex.priors.push_back(prior_from_spec(spec, t));
        ex.components.push_back(std::move(f));
        ex.shapes.push_back(spec.shape);
        ex.truth.push_back(std::move(truth));
        ex.specs.push_back(std::move(spec));
    }
    // noise stream is offset from the grid stream so iid grids and noise stay independent
    ex.signal = add_noise(make_signal(t, std::move(total)), noise_variance, seed ^ 0x9e3779b97f4a7c15ULL);
    return ex;
}

}  // namespace mmd
