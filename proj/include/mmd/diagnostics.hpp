#pragma once

// Phase well-differentiation counts, residual whiteness and empirical convergence rates.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmd/signal_model.hpp"

namespace mmd {

struct PairCounts {
    std::size_t i = 0;
    std::size_t j = 0;
    std::vector<std::int64_t> cells;  // row-major nh x nh, row = bin of p_i, column = bin of p_j
};

struct PartitionCounts {
    double h = 0.0;
    int nh = 0;
    std::size_t samples = 0;
    std::vector<std::vector<std::int64_t>> single;  // [k][m]
    std::vector<PairCounts> pairs;                  // every ordered pair i != j
};

/// Occupancy of folded phases on a 1/h grid. Throws InvalidStep unless 1/h is an integer >= 2,
/// GridMismatch if a prior does not match the grid length.
[[nodiscard]] PartitionCounts partition_counts(std::span<const PhasePrior> priors, std::span<const double> grid,
                                               double h);

struct WellDiffStats {
    double h = 0.0;
    double gamma = 0.0;
    std::vector<double> beta_per_pair;  // aligned with PartitionCounts::pairs
    double beta = 0.0;
    double contraction_bound = 0.0;     // M^2 (K-1) beta
    bool well_differentiated = false;
};

/// Smallest M with 1/M <= phi_k' <= M for every component, phi_k = p_k / N_k, from central
/// differences on the grid.
[[nodiscard]] double phase_bound(std::span<const PhasePrior> priors, std::span<const double> grid);

/// For K = 1, beta is 0 and gamma is the smallest marginal count. Rows with an empty marginal
/// contribute nothing to beta.
[[nodiscard]] WellDiffStats well_diff_stats(const PartitionCounts& counts, double m);

/// Biased autocorrelation of the mean-removed values, rho(0) = 1. A constant input yields
/// [1, 0, ...]. Throws LagTooLarge unless max_lag < size.
[[nodiscard]] std::vector<double> autocorrelation(std::span<const double> values, std::size_t max_lag);

struct DecayFit {
    double ratio = 1.0;     // per-iteration contraction factor
    double goodness = 1.0;  // R^2 of the log-linear fit
};

/// Least-squares fit of log(norm) against iteration over the points before the plateau (points
/// within 2x of the final norm). Falls back to the whole trace when fewer than 3 points precede
/// the plateau. Throws TraceTooShort for fewer than 3 points.
[[nodiscard]] DecayFit fit_decay_rate(std::span<const double> residual_norms);

}  // namespace mmd
