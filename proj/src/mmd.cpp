#include "mmd/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmd/error.hpp"
#include "mmd/kernels.hpp"

namespace mmd {

void MmdConfig::validate() const {
    if (m0 < 0) throw Error(ErrorCode::InvalidArgument, "m0 must be nonnegative");
    if (!(eps1 > 0.0 && eps1 < 1.0) || !(eps2 > 0.0 && eps2 < 1.0))
        throw Error(ErrorCode::InvalidArgument, "eps1 and eps2 must lie in (0,1)");
    if (j1 < 1 || j2 < 1) throw Error(ErrorCode::InvalidArgument, "j1 and j2 must be at least 1");
    if (!regressor && bins < 2) throw Error(ErrorCode::InvalidArgument, "bins must be at least 2");
}

std::vector<int> band_order(int m0) {
    if (m0 < 0) throw Error(ErrorCode::InvalidArgument, "m0 must be nonnegative");
    std::vector<int> order{0};
    for (int n = 1; n <= m0; ++n) {
        order.push_back(n);
        order.push_back(-n);
    }
    return order;
}

namespace {

struct Increment {
    ShapeTable shape;
    std::vector<double> mode;
};

Increment fit_band(std::span<const double> r, const PhasePrior& prior, int n, Demod kind,
                   const ShapeRegressor& regressor) {
    const auto g = demodulator(prior, n, kind);
    std::vector<double> ys(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) ys[i] = g[i] * r[i];
    auto shape = center_shape(regressor.fit(fold(prior.phase(), ys)));
    if (n != 0) shape = shape.scaled(2.0);
    std::vector<double> mode(r.size());
    kernels::omp::modulated_eval(shape.bins(), prior.phase(), g, mode);
    return {std::move(shape), std::move(mode)};
}

void subtract(std::vector<double>& r, const std::vector<double>& m) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= m[i];
}

void add(std::vector<double>& acc, const std::vector<double>& m) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += m[i];
}

}  // namespace

BandFit modified_rdbr(const SampledSignal& residual, std::span<const PhasePrior> sorted_priors, int n, Demod kind,
                      double eps2, int j2, const ShapeRegressor& regressor, Scheme scheme) {
    if (kind == Demod::Sin && n == 0) throw Error(ErrorCode::SinZeroBand, "the sine branch is undefined for n = 0");
    for (const auto& p : sorted_priors)
        if (p.size() != residual.size()) throw Error(ErrorCode::GridMismatch, "prior and residual lengths differ");

    const std::size_t K = sorted_priors.size();
    const std::size_t L = residual.size();
    BandFit out;
    out.shape_increments.assign(K, ShapeTable::zeros(regressor.bins()));
    out.mode_increments.assign(K, std::vector<double>(L, 0.0));

    std::vector<double> r(residual.values().begin(), residual.values().end());
    const double c = rms(r);
    if (c == 0.0) {
        out.residual = residual;
        return out;
    }

    double e0 = 2.0, e1 = 1.0, e2 = 1.0;
    while (out.sweeps < j2 && e1 > eps2 && e2 > eps2 && std::abs(e1 - e0) > eps2) {
        const std::vector<double> entering = r;
        std::vector<std::vector<double>> pending;
        double inc_norm = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            auto inc = fit_band(scheme == Scheme::GaussSeidel ? r : entering, sorted_priors[k], n, kind, regressor);
            inc_norm = std::max(inc_norm, inc.shape.l2norm());
            out.shape_increments[k] += inc.shape;
            add(out.mode_increments[k], inc.mode);
            if (scheme == Scheme::GaussSeidel)
                subtract(r, inc.mode);
            else
                pending.push_back(std::move(inc.mode));
        }
        for (const auto& m : pending) subtract(r, m);
        e0 = e1;
        e1 = rms(r) / c;
        e2 = inc_norm / c;
        ++out.sweeps;
    }
    out.residual = residual.with_values(std::move(r));
    return out;
}

MmdResult mmd_decompose(const SampledSignal& signal, std::span<const PhasePrior> priors, const MmdConfig& cfg) {
    if (priors.empty()) throw Error(ErrorCode::InvalidArgument, "at least one phase prior is required");
    cfg.validate();
    for (const auto& p : priors)
        if (p.size() != signal.size()) throw Error(ErrorCode::GridMismatch, "prior and signal lengths differ");

    const auto regressor = cfg.regressor ? cfg.regressor : make_partition_regressor(cfg.bins);
    const auto sorted = sort_components(priors);
    const std::size_t K = sorted.priors.size();
    const std::size_t L = signal.size();
    const auto bands = band_order(cfg.m0);

    std::vector<MimfEstimate> est(K, MimfEstimate::zeros(cfg.m0, regressor->bins()));
    std::vector<std::vector<double>> modes(K, std::vector<double>(L, 0.0));
    SampledSignal r = signal;
    DecompositionReport trace;
    const double c = rms(signal);

    if (c == 0.0) {
        trace.stop_reason = StopReason::ResidualSmall;
    } else {
        double e = 1.0;
        trace.stop_reason = StopReason::MaxIter;
        while (trace.iterations < cfg.j1) {
            double inc_norm = 0.0;
            for (int n : bands) {
                for (Demod kind : {Demod::Cos, Demod::Sin}) {
                    if (kind == Demod::Sin && n == 0) continue;
                    auto fit = modified_rdbr(r, sorted.priors, n, kind, cfg.eps2, cfg.j2, *regressor, cfg.scheme);
                    for (std::size_t k = 0; k < K; ++k) {
                        auto& acc = kind == Demod::Cos ? est[k].cos_products : est[k].sin_products;
                        acc[est[k].slot(n)] += fit.shape_increments[k];
                        inc_norm = std::max(inc_norm, fit.shape_increments[k].l2norm());
                        add(modes[k], fit.mode_increments[k]);
                    }
                    r = std::move(fit.residual);
                }
            }
            ++trace.iterations;
            const double rel = rms(r) / c;
            trace.residual_norms.push_back(rel);
            trace.shape_increment_norms.push_back(inc_norm / c);
            if (rel <= cfg.eps1) { trace.stop_reason = StopReason::ResidualSmall; break; }
            if (rel >= e - cfg.eps1) { trace.stop_reason = StopReason::Stalled; break; }
            e = rel;
        }
    }

    for (std::size_t k = 0; k < K; ++k) {
        normalize(est[k]);
        est[k].mode = signal.with_values(std::move(modes[k]));
    }

    MmdResult out;
    out.estimates = restore_order(std::move(est), sorted.permutation);
    out.residual = std::move(r);
    out.trace = std::move(trace);
    return out;
}

SampledSignal ell_band_approx(const MimfEstimate& est, const PhasePrior& prior, int ell, std::span<const double> grid) {
    if (ell < 0 || ell > est.bandwidth)
        throw Error(ErrorCode::BandOutOfRange, "ell must lie in [0, " + std::to_string(est.bandwidth) + "]");
    if (prior.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "prior and grid lengths differ");
    std::vector<double> total(grid.size(), 0.0);
    for (int n = -ell; n <= ell; ++n) add(total, band_contribution(est, prior, n));
    return make_signal(std::vector<double>(grid.begin(), grid.end()), std::move(total));
}

SampledSignal band_residual(const SampledSignal& signal, const MimfEstimate& est, const PhasePrior& prior, int ell) {
    if (signal.size() != prior.size()) throw Error(ErrorCode::GridMismatch, "signal and prior lengths differ");
    const auto approx = ell_band_approx(est, prior, ell, signal.times());
    std::vector<double> out(signal.values().begin(), signal.values().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= approx.values()[i];
    return signal.with_values(std::move(out));
}

}  // namespace mmd
