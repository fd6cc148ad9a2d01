#pragma once

// Recursive diffeomorphism-based regression for superpositions of generalized intrinsic mode
// functions alpha_k(t) s_k(2 pi p_k(t)), with Gauss-Seidel or Jacobi update order.

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mmd/fold_regress.hpp"
#include "mmd/signal_model.hpp"

namespace mmd {

enum class Scheme { GaussSeidel, Jacobi };
enum class StopReason { MaxIter, ResidualSmall, IncrementSmall, Stalled };

[[nodiscard]] std::string_view to_string(Scheme s) noexcept;
[[nodiscard]] std::string_view to_string(StopReason r) noexcept;
/// Throws InvalidArgument for unknown names.
[[nodiscard]] Scheme parse_scheme(std::string_view name);
[[nodiscard]] StopReason parse_stop_reason(std::string_view name);

/// Per-iteration trace. Norms are relative to the input signal's RMS.
struct DecompositionReport {
    std::vector<double> residual_norms;
    std::vector<double> shape_increment_norms;
    StopReason stop_reason = StopReason::MaxIter;
    int iterations = 0;
};

struct GmdConfig {
    double eps = 1e-6;
    int max_iter = 200;
    int bins = 200;
    Scheme scheme = Scheme::GaussSeidel;
    /// Optional backend; the partitioning estimate with `bins` bins when null.
    std::shared_ptr<const ShapeRegressor> regressor;
};

struct GmdResult {
    std::vector<ShapeTable> shapes;     // caller order
    std::vector<SampledSignal> modes;   // q_k(t) s_k(2 pi p_k(t)), caller order
    SampledSignal residual;
    DecompositionReport trace;
};

struct SweepResult {
    std::vector<ShapeTable> increments;  // sorted order, centered
    SampledSignal residual;
};

/// One pass over the (already sorted) components.
[[nodiscard]] SweepResult rdbr_sweep(const SampledSignal& residual, std::span<const PhasePrior> sorted_priors,
                                     const ShapeRegressor& regressor, Scheme scheme);

[[nodiscard]] GmdResult gmd_decompose(const SampledSignal& signal, std::span<const PhasePrior> priors,
                                      const GmdConfig& cfg);

/// Bin-wise sums of accumulated shapes per group. Groups must partition the component indices
/// (0-based); an empty group yields a zero table. Throws InvalidPartition.
[[nodiscard]] std::vector<ShapeTable> group_sum_shapes(const GmdResult& result,
                                                       std::span<const std::vector<std::size_t>> groups);

}  // namespace mmd
