#pragma once

// Multiresolution mode decomposition: band-by-band demodulated regression (inner loop) wrapped
// in an outer refinement loop, plus the l-banded approximation and residual operators.

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mmd/fold_regress.hpp"
#include "mmd/gmd.hpp"
#include "mmd/signal_model.hpp"

namespace mmd {

struct MmdConfig {
    int m0 = 2;
    double eps1 = 1e-6;
    double eps2 = 1e-6;
    int j1 = 200;
    int j2 = 10;
    int bins = 200;
    Scheme scheme = Scheme::GaussSeidel;
    std::shared_ptr<const ShapeRegressor> regressor;

    /// Throws InvalidArgument.
    void validate() const;
};

/// 0, +1, -1, +2, -2, ..., +m0, -m0.
[[nodiscard]] std::vector<int> band_order(int m0);

struct BandFit {
    std::vector<ShapeTable> shape_increments;        // sorted order; already doubled for n != 0
    std::vector<std::vector<double>> mode_increments;
    SampledSignal residual;
    int sweeps = 0;
};

/// Inner loop for one band and branch over the sorted priors. Stops after j2 sweeps, or when the
/// residual or the largest increment (relative to the entering residual) drops to eps2, or stalls.
[[nodiscard]] BandFit modified_rdbr(const SampledSignal& residual, std::span<const PhasePrior> sorted_priors,
                                    int n, Demod kind, double eps2, int j2, const ShapeRegressor& regressor,
                                    Scheme scheme);

struct MmdResult {
    std::vector<MimfEstimate> estimates;  // caller order, normalized
    SampledSignal residual;
    DecompositionReport trace;
};

[[nodiscard]] MmdResult mmd_decompose(const SampledSignal& signal, std::span<const PhasePrior> priors,
                                      const MmdConfig& cfg);

/// Reconstruction from bands |n| <= ell only. Throws BandOutOfRange.
[[nodiscard]] SampledSignal ell_band_approx(const MimfEstimate& est, const PhasePrior& prior, int ell,
                                            std::span<const double> grid);

/// signal - ell_band_approx. Throws GridMismatch.
[[nodiscard]] SampledSignal band_residual(const SampledSignal& signal, const MimfEstimate& est,
                                          const PhasePrior& prior, int ell);

}  // namespace mmd
