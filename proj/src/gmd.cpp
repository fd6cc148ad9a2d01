#include "mmd/gmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmd/error.hpp"
#include "mmd/kernels.hpp"

namespace mmd {

std::string_view to_string(Scheme s) noexcept {
    return s == Scheme::GaussSeidel ? "gauss_seidel" : "jacobi";
}

std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::MaxIter: return "MaxIter";
        case StopReason::ResidualSmall: return "ResidualSmall";
        case StopReason::IncrementSmall: return "IncrementSmall";
        case StopReason::Stalled: return "Stalled";
    }
    return "MaxIter";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "gauss_seidel") return Scheme::GaussSeidel;
    if (name == "jacobi") return Scheme::Jacobi;
    throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

StopReason parse_stop_reason(std::string_view name) {
    for (auto r : {StopReason::MaxIter, StopReason::ResidualSmall, StopReason::IncrementSmall, StopReason::Stalled})
        if (to_string(r) == name) return r;
    throw Error(ErrorCode::InvalidArgument, "unknown stop reason '" + std::string(name) + "'");
}

namespace {

// mode increment q(t) * s(2 pi p(t)) on the prior's grid
std::vector<double> warp_shape(const ShapeTable& shape, const PhasePrior& prior) {
    std::vector<double> out(prior.size());
    kernels::omp::modulated_eval(shape.bins(), prior.phase(), prior.amplitude(), out);
    return out;
}

void subtract(std::vector<double>& r, const std::vector<double>& m) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= m[i];
}

ShapeTable regress_component(std::span<const double> residual_values, const SampledSignal& grid_signal,
                             const PhasePrior& prior, const ShapeRegressor& regressor) {
    auto warped = unwarp_samples(grid_signal.with_values({residual_values.begin(), residual_values.end()}), prior);
    return center_shape(regressor.fit(fold(warped.vs, warped.ys)));
}

}  // namespace

SweepResult rdbr_sweep(const SampledSignal& residual, std::span<const PhasePrior> sorted_priors,
                       const ShapeRegressor& regressor, Scheme scheme) {
    for (const auto& p : sorted_priors)
        if (p.size() != residual.size()) throw Error(ErrorCode::GridMismatch, "prior and residual lengths differ");

    std::vector<double> r(residual.values().begin(), residual.values().end());
    const std::vector<double> entering = r;
    SweepResult out;
    std::vector<std::vector<double>> pending;
    for (const auto& prior : sorted_priors) {
        const auto& source = scheme == Scheme::GaussSeidel ? r : entering;
        auto inc = regress_component(source, residual, prior, regressor);
        auto m = warp_shape(inc, prior);
        if (scheme == Scheme::GaussSeidel)
            subtract(r, m);
        else
            pending.push_back(std::move(m));
        out.increments.push_back(std::move(inc));
    }
    for (const auto& m : pending) subtract(r, m);
    out.residual = residual.with_values(std::move(r));
    return out;
}

GmdResult gmd_decompose(const SampledSignal& signal, std::span<const PhasePrior> priors, const GmdConfig& cfg) {
    if (priors.empty()) throw Error(ErrorCode::InvalidArgument, "at least one phase prior is required");
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0,1)");
    if (cfg.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
    for (const auto& p : priors)
        if (p.size() != signal.size()) throw Error(ErrorCode::GridMismatch, "prior and signal lengths differ");

    const auto regressor = cfg.regressor ? cfg.regressor : make_partition_regressor(cfg.bins);
    const int bins = regressor->bins();
    const auto sorted = sort_components(priors);
    const std::size_t K = sorted.priors.size();

    std::vector<ShapeTable> shapes(K, ShapeTable::zeros(bins));
    SampledSignal r = signal;
    DecompositionReport trace;
    const double c = rms(signal);

    if (c == 0.0) {
        trace.stop_reason = StopReason::ResidualSmall;
    } else {
        double e0 = 2.0, e1 = 1.0, e2 = 1.0;
        for (;;) {
            if (e1 <= cfg.eps) { trace.stop_reason = StopReason::ResidualSmall; break; }
            if (e2 <= cfg.eps) { trace.stop_reason = StopReason::IncrementSmall; break; }
            if (std::abs(e1 - e0) <= cfg.eps) { trace.stop_reason = StopReason::Stalled; break; }
            if (trace.iterations >= cfg.max_iter) { trace.stop_reason = StopReason::MaxIter; break; }

            auto sweep = rdbr_sweep(r, sorted.priors, *regressor, cfg.scheme);
            double inc_norm = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                shapes[k] += sweep.increments[k];
                inc_norm = std::max(inc_norm, sweep.increments[k].l2norm());
            }
            r = std::move(sweep.residual);
            e0 = e1;
            e1 = rms(r) / c;
            e2 = inc_norm / c;
            trace.residual_norms.push_back(e1);
            trace.shape_increment_norms.push_back(e2);
            ++trace.iterations;
        }
    }

    std::vector<SampledSignal> modes;
    modes.reserve(K);
    for (std::size_t k = 0; k < K; ++k) modes.push_back(signal.with_values(warp_shape(shapes[k], sorted.priors[k])));

    GmdResult out;
    out.shapes = restore_order(std::move(shapes), sorted.permutation);
    out.modes = restore_order(std::move(modes), sorted.permutation);
    out.residual = std::move(r);
    out.trace = std::move(trace);
    return out;
}

std::vector<ShapeTable> group_sum_shapes(const GmdResult& result, std::span<const std::vector<std::size_t>> groups) {
    const std::size_t K = result.shapes.size();
    if (K == 0) throw Error(ErrorCode::InvalidPartition, "result has no components");
    std::vector<int> seen(K, 0);
    for (const auto& g : groups)
        for (std::size_t k : g) {
            if (k >= K) throw Error(ErrorCode::InvalidPartition, "component index " + std::to_string(k) + " out of range");
            ++seen[k];
        }
    for (std::size_t k = 0; k < K; ++k)
        if (seen[k] != 1)
            throw Error(ErrorCode::InvalidPartition, "component " + std::to_string(k) + " must appear in exactly one group");

    const int bins = result.shapes.front().size();
    std::vector<ShapeTable> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        ShapeTable sum = ShapeTable::zeros(bins);
        for (std::size_t k : g) sum += result.shapes[k];
        out.push_back(std::move(sum));
    }
    return out;
}

}  // namespace mmd
