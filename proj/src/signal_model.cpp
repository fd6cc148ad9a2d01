#include "mmd/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mmd/error.hpp"
#include "mmd/kernels.hpp"

namespace mmd {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!std::isfinite(xs[i]))
            throw Error(ErrorCode::NonFinite, std::string(what) + " has a non-finite entry at index " + std::to_string(i));
}

}  // namespace

SampledSignal make_signal(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size())
        throw Error(ErrorCode::LengthMismatch, "times has " + std::to_string(times.size()) + " entries, values has " +
                                                   std::to_string(values.size()));
    if (times.size() < 2) throw Error(ErrorCode::LengthMismatch, "a signal needs at least 2 samples");
    require_finite(times, "times");
    require_finite(values, "values");
    for (double t : times)
        if (t < 0.0 || t > 1.0) throw Error(ErrorCode::OutOfDomain, "time " + std::to_string(t) + " outside [0,1]");

    if (!std::is_sorted(times.begin(), times.end())) {
        std::vector<std::size_t> order(times.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
        std::vector<double> t2(times.size()), v2(values.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            t2[i] = times[order[i]];
            v2[i] = values[order[i]];
        }
        times = std::move(t2);
        values = std::move(v2);
    }
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] == times[i - 1])
            throw Error(ErrorCode::DuplicateTime, "duplicate sample time " + std::to_string(times[i]));
    return SampledSignal(std::move(times), std::move(values));
}

SampledSignal SampledSignal::with_values(std::vector<double> values) const {
    if (values.size() != times_.size())
        throw Error(ErrorCode::LengthMismatch, "values do not match the grid length");
    require_finite(values, "values");
    return SampledSignal(times_, std::move(values));
}

double rms(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::sqrt(kernels::omp::sum_squares(values) / static_cast<double>(values.size()));
}

double rms(const SampledSignal& s) { return rms(s.values()); }

int round_fundamental(std::span<const double> phase, std::span<const double> times) {
    if (phase.size() != times.size()) throw Error(ErrorCode::GridMismatch, "phase and grid lengths differ");
    const std::size_t n = phase.size();
    if (n < 2) throw Error(ErrorCode::LengthMismatch, "a phase needs at least 2 samples");
    std::vector<double> deriv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        deriv[i] = (phase[hi] - phase[lo]) / (times[hi] - times[lo]);
        if (!(deriv[i] > 0.0) || !(phase[hi] > phase[lo]))
            throw Error(ErrorCode::NonMonotonePhase, "phase derivative not positive near sample " + std::to_string(i));
    }
    const double avg = kernels::pairwise_sum(deriv) / static_cast<double>(n);
    return std::max(1, static_cast<int>(std::lround(avg)));
}

PhasePrior make_prior(std::vector<double> phase, std::optional<std::vector<double>> amplitude,
                      std::span<const double> times) {
    if (phase.size() != times.size()) throw Error(ErrorCode::GridMismatch, "phase length does not match the grid");
    require_finite(phase, "phase");
    for (std::size_t i = 1; i < phase.size(); ++i)
        if (!(phase[i] > phase[i - 1]))
            throw Error(ErrorCode::NonMonotonePhase, "phase is not strictly increasing at sample " + std::to_string(i));

    PhasePrior p;
    if (amplitude) {
        if (amplitude->size() != phase.size())
            throw Error(ErrorCode::GridMismatch, "amplitude length does not match the grid");
        require_finite(*amplitude, "amplitude");
        for (double q : *amplitude)
            if (!(q > 0.0)) throw Error(ErrorCode::AmplitudeTooSmall, "amplitude must be strictly positive");
        p.amplitude_ = std::move(*amplitude);
    } else {
        p.amplitude_.assign(phase.size(), 1.0);
    }
    p.fundamental_ = round_fundamental(phase, times);
    p.phase_ = std::move(phase);
    return p;
}

SortedPriors sort_components(std::span<const PhasePrior> priors) {
    SortedPriors out;
    out.permutation.resize(priors.size());
    std::iota(out.permutation.begin(), out.permutation.end(), 0);
    std::stable_sort(out.permutation.begin(), out.permutation.end(), [&](std::size_t a, std::size_t b) {
        return priors[a].fundamental() < priors[b].fundamental();
    });
    out.priors.reserve(priors.size());
    for (std::size_t i : out.permutation) out.priors.push_back(priors[i]);
    return out;
}

ShapeTable::ShapeTable(std::vector<double> bins) : bins_(std::move(bins)) {
    if (bins_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a shape table needs at least 2 bins");
    require_finite(bins_, "shape table");
    l2norm_ = std::sqrt(kernels::serial::sum_squares(bins_) / static_cast<double>(bins_.size()));
}

ShapeTable ShapeTable::zeros(int bins) {
    if (bins < 2) throw Error(ErrorCode::InvalidArgument, "a shape table needs at least 2 bins");
    return ShapeTable(std::vector<double>(static_cast<std::size_t>(bins), 0.0));
}

double ShapeTable::mean() const { return kernels::pairwise_sum(bins_) / static_cast<double>(bins_.size()); }

bool ShapeTable::is_zero() const noexcept {
    return std::all_of(bins_.begin(), bins_.end(), [](double b) { return b == 0.0; });
}

ShapeTable ShapeTable::scaled(double factor) const {
    std::vector<double> b(bins_);
    for (double& x : b) x *= factor;
    return ShapeTable(std::move(b));
}

ShapeTable& ShapeTable::operator+=(const ShapeTable& other) {
    if (other.bins_.size() != bins_.size())
        throw Error(ErrorCode::InvalidArgument, "cannot add shape tables with different bin counts");
    for (std::size_t j = 0; j < bins_.size(); ++j) bins_[j] += other.bins_[j];
    l2norm_ = std::sqrt(kernels::serial::sum_squares(bins_) / static_cast<double>(bins_.size()));
    return *this;
}

double eval_shape(const ShapeTable& shape, double v) { return kernels::interp_periodic(shape.bins(), v); }

std::vector<double> bin_centers(int bins) {
    std::vector<double> x(static_cast<std::size_t>(bins));
    for (int j = 0; j < bins; ++j) x[static_cast<std::size_t>(j)] = (j + 0.5) / bins;
    return x;
}

MimfEstimate MimfEstimate::zeros(int bandwidth, int bins) {
    if (bandwidth < 0) throw Error(ErrorCode::InvalidArgument, "bandwidth must be nonnegative");
    const auto n = static_cast<std::size_t>(2 * bandwidth + 1);
    MimfEstimate e;
    e.bandwidth = bandwidth;
    e.cos_products.assign(n, ShapeTable::zeros(bins));
    e.sin_products.assign(n, ShapeTable::zeros(bins));
    e.cos_shapes = e.cos_products;
    e.sin_shapes = e.sin_products;
    e.cos_coeffs.assign(n, 0.0);
    e.sin_coeffs.assign(n, 0.0);
    return e;
}

std::size_t MimfEstimate::slot(int n) const {
    if (n < -bandwidth || n > bandwidth)
        throw Error(ErrorCode::BandOutOfRange, "band " + std::to_string(n) + " outside [-M0, M0]");
    return static_cast<std::size_t>(n + bandwidth);
}

void normalize(MimfEstimate& est) {
    auto split = [](const std::vector<ShapeTable>& products, std::vector<double>& coeffs,
                    std::vector<ShapeTable>& shapes) {
        coeffs.assign(products.size(), 0.0);
        shapes.clear();
        for (std::size_t i = 0; i < products.size(); ++i) {
            const double a = products[i].l2norm();
            if (a > 0.0) {
                coeffs[i] = a;
                shapes.push_back(products[i].scaled(1.0 / a));
            } else {
                shapes.push_back(ShapeTable::zeros(products[i].size()));
            }
        }
    };
    split(est.cos_products, est.cos_coeffs, est.cos_shapes);
    split(est.sin_products, est.sin_coeffs, est.sin_shapes);
}

std::vector<double> band_contribution(const MimfEstimate& est, const PhasePrior& prior, int n) {
    const auto& pc = est.cos_product(n);
    const auto& ps = est.sin_product(n);
    const auto phase = prior.phase();
    const double rate = 2.0 * std::numbers::pi * n / prior.fundamental();
    std::vector<double> out(phase.size());
    std::vector<double> weight(phase.size());
    std::vector<double> tmp(phase.size());
    if (!pc.is_zero()) {
        for (std::size_t i = 0; i < phase.size(); ++i) weight[i] = std::cos(rate * phase[i]);
        kernels::omp::modulated_eval(pc.bins(), phase, weight, out);
    }
    if (n != 0 && !ps.is_zero()) {
        for (std::size_t i = 0; i < phase.size(); ++i) weight[i] = std::sin(rate * phase[i]);
        kernels::omp::modulated_eval(ps.bins(), phase, weight, tmp);
        for (std::size_t i = 0; i < phase.size(); ++i) out[i] += tmp[i];
    }
    return out;
}

SampledSignal reconstruct_mimf(const MimfEstimate& est, const PhasePrior& prior, std::span<const double> grid) {
    if (prior.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "prior and grid lengths differ");
    std::vector<double> total(grid.size(), 0.0);
    for (int n = -est.bandwidth; n <= est.bandwidth; ++n) {
        const auto c = band_contribution(est, prior, n);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += c[i];
    }
    return make_signal(std::vector<double>(grid.begin(), grid.end()), std::move(total));
}

}  // namespace mmd
