#include "mmd/fold_regress.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mmd/error.hpp"
#include "mmd/kernels.hpp"

namespace mmd {

namespace {

void check_grid(const SampledSignal& residual, const PhasePrior& prior) {
    if (residual.size() != prior.size())
        throw Error(ErrorCode::GridMismatch, "residual has " + std::to_string(residual.size()) +
                                                 " samples, prior has " + std::to_string(prior.size()));
}

}  // namespace

WarpedSamples unwarp_samples(const SampledSignal& residual, const PhasePrior& prior) {
    check_grid(residual, prior);
    const auto r = residual.values();
    const auto q = prior.amplitude();
    WarpedSamples out;
    out.vs.assign(prior.phase().begin(), prior.phase().end());
    out.ys.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::abs(q[i]) < kMinAmplitude)
            throw Error(ErrorCode::AmplitudeTooSmall, "amplitude below 1e-8 at sample " + std::to_string(i));
        out.ys[i] = r[i] / q[i];
    }
    return out;
}

std::vector<double> demodulator(const PhasePrior& prior, int n, Demod kind) {
    if (kind == Demod::Sin && n == 0) throw Error(ErrorCode::SinZeroBand, "the sine branch is undefined for n = 0");
    const auto p = prior.phase();
    std::vector<double> g(p.size(), 1.0);
    if (n == 0) return g;
    const double rate = 2.0 * std::numbers::pi * n / prior.fundamental();
    for (std::size_t i = 0; i < p.size(); ++i) g[i] = kind == Demod::Cos ? std::cos(rate * p[i]) : std::sin(rate * p[i]);
    return g;
}

WarpedSamples demodulate(const SampledSignal& residual, const PhasePrior& prior, int n, Demod kind) {
    check_grid(residual, prior);
    const auto g = demodulator(prior, n, kind);
    const auto r = residual.values();
    WarpedSamples out;
    out.vs.assign(prior.phase().begin(), prior.phase().end());
    out.ys.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out.ys[i] = g[i] * r[i];
    return out;
}

FoldedSamples fold(std::span<const double> vs, std::span<const double> ys) {
    if (vs.size() != ys.size()) throw Error(ErrorCode::LengthMismatch, "positions and responses differ in length");
    FoldedSamples out;
    out.xs.resize(vs.size());
    kernels::omp::fold(vs, out.xs);
    out.ys.assign(ys.begin(), ys.end());
    return out;
}

ShapeTable partition_regress(const FoldedSamples& samples, int bins) {
    if (bins < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 bins are required");
    if (samples.xs.empty()) throw Error(ErrorCode::EmptyInput, "no samples to regress");
    if (samples.xs.size() != samples.ys.size())
        throw Error(ErrorCode::LengthMismatch, "positions and responses differ in length");

    auto binned = kernels::omp::bin_means(samples.xs, samples.ys, bins);
    auto& v = binned.means;
    const auto& c = binned.counts;
    const auto nb = static_cast<std::ptrdiff_t>(bins);

    std::vector<std::ptrdiff_t> occupied;
    for (std::ptrdiff_t j = 0; j < nb; ++j)
        if (c[static_cast<std::size_t>(j)] > 0) occupied.push_back(j);

    if (occupied.size() < static_cast<std::size_t>(nb)) {
        if (occupied.size() == 1) {
            const double only = v[static_cast<std::size_t>(occupied.front())];
            for (auto& x : v) x = only;
        } else {
            // Walk each gap between consecutive occupied bins (cyclically) and interpolate.
            const std::size_t m = occupied.size();
            for (std::size_t a = 0; a < m; ++a) {
                const std::ptrdiff_t lo = occupied[a];
                const std::ptrdiff_t hi = occupied[(a + 1) % m];
                const std::ptrdiff_t gap = (hi - lo + nb) % nb;
                const double vlo = v[static_cast<std::size_t>(lo)];
                const double vhi = v[static_cast<std::size_t>(hi)];
                for (std::ptrdiff_t d = 1; d < gap; ++d) {
                    const double w = static_cast<double>(d) / static_cast<double>(gap);
                    v[static_cast<std::size_t>((lo + d) % nb)] = (1.0 - w) * vlo + w * vhi;
                }
            }
        }
    }
    return ShapeTable(std::move(v));
}

ShapeTable center_shape(const ShapeTable& shape) {
    const double mu = shape.mean();
    std::vector<double> b(shape.bins().begin(), shape.bins().end());
    for (double& x : b) x -= mu;
    return ShapeTable(std::move(b));
}

PartitionRegressor::PartitionRegressor(int bins) : bins_(bins) {
    if (bins < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 bins are required");
}

ShapeTable PartitionRegressor::fit(const FoldedSamples& samples) const { return partition_regress(samples, bins_); }

std::shared_ptr<const ShapeRegressor> make_partition_regressor(int bins) {
    return std::make_shared<const PartitionRegressor>(bins);
}

}  // namespace mmd
