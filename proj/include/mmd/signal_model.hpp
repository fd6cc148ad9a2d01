#pragma once

// Core value types: sampled series on [0,1], phase priors (in cycles), one-period shape tables
// and multiresolution estimates. All types are immutable once built.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mmd {

class SampledSignal {
public:
    SampledSignal() = default;

    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    /// Same grid, new values. Values must be finite and match the grid length.
    [[nodiscard]] SampledSignal with_values(std::vector<double> values) const;

private:
    friend SampledSignal make_signal(std::vector<double> times, std::vector<double> values);
    SampledSignal(std::vector<double> times, std::vector<double> values)
        : times_(std::move(times)), values_(std::move(values)) {}

    std::vector<double> times_;
    std::vector<double> values_;
};

/// Validates and canonically sorts by time. Throws LengthMismatch, NonFinite, DuplicateTime
/// or OutOfDomain.
[[nodiscard]] SampledSignal make_signal(std::vector<double> times, std::vector<double> values);

/// Root-mean-square of the values (the discrete L2 norm on [0,1]).
[[nodiscard]] double rms(std::span<const double> values);
[[nodiscard]] double rms(const SampledSignal& s);

/// Nearest integer to the grid average of the central-difference derivative of `phase`.
/// Throws NonMonotonePhase if any discrete derivative is not positive.
[[nodiscard]] int round_fundamental(std::span<const double> phase, std::span<const double> times);

/// One component's instantaneous phase p_k(t) in cycles, amplitude q_k(t) and fundamental N_k.
class PhasePrior {
public:
    PhasePrior() = default;

    [[nodiscard]] std::span<const double> phase() const noexcept { return phase_; }
    [[nodiscard]] std::span<const double> amplitude() const noexcept { return amplitude_; }
    [[nodiscard]] int fundamental() const noexcept { return fundamental_; }
    [[nodiscard]] std::size_t size() const noexcept { return phase_.size(); }

private:
    friend PhasePrior make_prior(std::vector<double> phase, std::optional<std::vector<double>> amplitude,
                                 std::span<const double> times);
    std::vector<double> phase_;
    std::vector<double> amplitude_;
    int fundamental_ = 1;
};

/// Builds a prior aligned with `times`; the amplitude defaults to all ones. Derives the
/// fundamental via round_fundamental.
[[nodiscard]] PhasePrior make_prior(std::vector<double> phase,
                                    std::optional<std::vector<double>> amplitude,
                                    std::span<const double> times);

struct SortedPriors {
    std::vector<PhasePrior> priors;
    /// permutation[i] is the caller index of sorted entry i.
    std::vector<std::size_t> permutation;
};

/// Stable ascending sort by fundamental.
[[nodiscard]] SortedPriors sort_components(std::span<const PhasePrior> priors);

/// Puts per-sorted-component results back into caller order.
template <class T>
[[nodiscard]] std::vector<T> restore_order(std::vector<T> sorted, std::span<const std::size_t> permutation) {
    std::vector<T> out(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) out[permutation[i]] = std::move(sorted[i]);
    return out;
}

/// One period of a periodic function on B uniform bins; bin j covers [j/B, (j+1)/B).
class ShapeTable {
public:
    ShapeTable() = default;
    explicit ShapeTable(std::vector<double> bins);

    [[nodiscard]] static ShapeTable zeros(int bins);

    [[nodiscard]] std::span<const double> bins() const noexcept { return bins_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(bins_.size()); }
    /// sqrt of the mean of squared bin values.
    [[nodiscard]] double l2norm() const noexcept { return l2norm_; }
    [[nodiscard]] double mean() const;
    [[nodiscard]] bool is_zero() const noexcept;

    [[nodiscard]] ShapeTable scaled(double factor) const;

    ShapeTable& operator+=(const ShapeTable& other);
    friend ShapeTable operator+(ShapeTable a, const ShapeTable& b) { return a += b; }

private:
    std::vector<double> bins_;
    double l2norm_ = 0.0;
};

/// Value at mod(v,1) by linear interpolation between bin centers with periodic wrap.
[[nodiscard]] double eval_shape(const ShapeTable& shape, double v);

/// Bin centers (j + 1/2)/B.
[[nodiscard]] std::vector<double> bin_centers(int bins);

/// Per-component multiresolution estimate for bands n in [-M0, M0].
///
/// `cos_products` / `sin_products` hold the accumulated products a_n s_cn and b_n s_sn; the
/// normalized coefficients and unit shapes are filled by `normalize`. Index with `slot(n)`.
struct MimfEstimate {
    int bandwidth = 0;
    std::vector<ShapeTable> cos_products;
    std::vector<ShapeTable> sin_products;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    std::vector<ShapeTable> cos_shapes;
    std::vector<ShapeTable> sin_shapes;
    SampledSignal mode;

    [[nodiscard]] static MimfEstimate zeros(int bandwidth, int bins);
    [[nodiscard]] std::size_t slot(int n) const;
    [[nodiscard]] const ShapeTable& cos_product(int n) const { return cos_products[slot(n)]; }
    [[nodiscard]] const ShapeTable& sin_product(int n) const { return sin_products[slot(n)]; }
};

/// a_n = ||accumulated cos product||, shape = product / a_n (zero stays zero with a_n = 0);
/// likewise for the sine side.
void normalize(MimfEstimate& est);

/// Contribution of a single band n: cos(2 pi n p/N) P_cn(p) + sin(2 pi n p/N) P_sn(p).
[[nodiscard]] std::vector<double> band_contribution(const MimfEstimate& est, const PhasePrior& prior, int n);

/// Sum over all bands of the estimate evaluated along the prior's phase. Throws GridMismatch.
[[nodiscard]] SampledSignal reconstruct_mimf(const MimfEstimate& est, const PhasePrior& prior,
                                             std::span<const double> grid);

}  // namespace mmd
