#pragma once

// Warp, fold and regress: turns a residual into one-period shape estimates.

#include <memory>
#include <span>
#include <vector>

#include "mmd/signal_model.hpp"

namespace mmd {

/// Samples re-indexed by warped phase v = p(t).
struct WarpedSamples {
    std::vector<double> vs;
    std::vector<double> ys;
};

/// Folded samples: xs in [0,1), ys unchanged.
struct FoldedSamples {
    std::vector<double> xs;
    std::vector<double> ys;
};

enum class Demod { Cos, Sin };

inline constexpr double kMinAmplitude = 1e-8;

/// vs = p(t), ys = r(t) / q(t). Throws GridMismatch or AmplitudeTooSmall.
[[nodiscard]] WarpedSamples unwarp_samples(const SampledSignal& residual, const PhasePrior& prior);

/// vs = p(t), ys = g(t) r(t) with g = cos or sin of 2 pi n p(t) / N. No amplitude division.
/// Throws SinZeroBand for (n = 0, Sin).
[[nodiscard]] WarpedSamples demodulate(const SampledSignal& residual, const PhasePrior& prior, int n, Demod kind);

/// The demodulating factor g(t) used by `demodulate`.
[[nodiscard]] std::vector<double> demodulator(const PhasePrior& prior, int n, Demod kind);

[[nodiscard]] FoldedSamples fold(std::span<const double> vs, std::span<const double> ys);

/// Partitioning estimate: bin j is the mean of ys whose xs fall in [j/B, (j+1)/B). Empty bins
/// are filled by periodic linear interpolation between the nearest occupied bins.
/// Throws EmptyInput when there are no samples.
[[nodiscard]] ShapeTable partition_regress(const FoldedSamples& samples, int bins);

/// Subtracts the bin mean.
[[nodiscard]] ShapeTable center_shape(const ShapeTable& shape);

/// Regression backend behind the decomposition loops. The partitioning estimate is the default.
class ShapeRegressor {
public:
    virtual ~ShapeRegressor() = default;
    [[nodiscard]] virtual ShapeTable fit(const FoldedSamples& samples) const = 0;
    [[nodiscard]] virtual int bins() const = 0;
};

class PartitionRegressor final : public ShapeRegressor {
public:
    explicit PartitionRegressor(int bins);
    [[nodiscard]] ShapeTable fit(const FoldedSamples& samples) const override;
    [[nodiscard]] int bins() const override { return bins_; }

private:
    int bins_;
};

[[nodiscard]] std::shared_ptr<const ShapeRegressor> make_partition_regressor(int bins);

}  // namespace mmd
