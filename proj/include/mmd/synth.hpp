#pragma once

// Ground-truth generators: GIMFs, MIMFs, the two-component ECG-like benchmark, Gaussian noise,
// SNR and sampling grids. Everything is deterministic given a seed.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mmd/signal_model.hpp"

namespace mmd {

struct ComponentSpec {
    std::function<double(double)> amplitude;  // alpha(t) > 0
    std::function<double(double)> phase;      // phi(t), strictly increasing
    int fundamental = 1;                      // N
    ShapeTable shape;
    /// Full MIMF band products; when set, `amplitude` and `shape` only feed the prior.
    std::optional<MimfEstimate> bands;
};

/// alpha(t) * s(N phi(t)) on the grid.
[[nodiscard]] SampledSignal gen_gimf(const ComponentSpec& spec, std::span<const double> grid);

/// Sum over bands of cos(2 pi n phi) P_cn(N phi) + sin(2 pi n phi) P_sn(N phi); falls back to
/// gen_gimf when the spec carries no band table.
[[nodiscard]] SampledSignal gen_mimf(const ComponentSpec& spec, std::span<const double> grid);

/// Prior with p = N phi(t) and q = alpha(t).
[[nodiscard]] PhasePrior prior_from_spec(const ComponentSpec& spec, std::span<const double> grid);

/// Three periodic Gaussian bumps (P, QRS and T analogs) sampled at bin centers, centered and
/// scaled to unit L2. Variants 1 and 2. Requires bins >= 64.
[[nodiscard]] ShapeTable ecg_like_shape(int bins, int variant);

enum class GridMode { Uniform, Iid };

[[nodiscard]] std::string_view to_string(GridMode m) noexcept;
[[nodiscard]] GridMode parse_grid_mode(std::string_view name);

/// Uniform: l/L. Iid: L sorted uniform draws, duplicates redrawn.
[[nodiscard]] std::vector<double> sample_grid(std::size_t length, GridMode mode, std::uint64_t seed);

/// Adds i.i.d. N(0, variance) samples (mt19937_64 + Box-Muller). variance = 0 is the identity.
[[nodiscard]] SampledSignal add_noise(const SampledSignal& signal, double variance, std::uint64_t seed);

/// 10 log10(||f|| / variance) with the RMS norm. Throws NonPositiveVariance.
[[nodiscard]] double snr(const SampledSignal& signal, double variance);
[[nodiscard]] double snr(std::span<const double> values, double variance);

/// Resolution of the ground-truth shape tables used by the benchmark generator.
inline constexpr int kTruthBins = 4096;

/// Two-component benchmark: f_k = alpha_k(phi_k) s_k(2 pi N_k phi_k), N = 150 and 220, with
/// alpha_1 = 1 + 0.2 cos + 0.1 sin, alpha_2 = 1 + 0.1 cos + 0.2 sin (of 2 pi phi), phi_1 = t +
/// 0.006 sin(2 pi t), phi_2 = t + 0.006 cos(2 pi t).
struct BenchmarkExample {
    SampledSignal signal;                   // f_1 + f_2 + noise
    std::vector<SampledSignal> components;  // clean f_k
    std::vector<PhasePrior> priors;         // p_k = N_k phi_k, q_k = alpha_k(phi_k)
    std::vector<ComponentSpec> specs;
    std::vector<ShapeTable> shapes;         // s_k at kTruthBins
    std::vector<MimfEstimate> truth;        // band products for n in {-1, 0, 1}
    double noise_variance = 0.0;
    std::uint64_t seed = 0;
};

[[nodiscard]] BenchmarkExample gen_example_4_1(std::size_t length, double noise_variance, std::uint64_t seed,
                                               GridMode grid = GridMode::Uniform);

}  // namespace mmd
