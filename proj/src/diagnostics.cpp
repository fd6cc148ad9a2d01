#include "mmd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmd/error.hpp"
#include "mmd/kernels.hpp"

namespace mmd {

namespace {

int steps_for(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidStep, "step must be positive");
    const double inv = 1.0 / h;
    const double nh = std::round(inv);
    if (std::abs(inv - nh) > 1e-9 * nh || nh < 2.0 || nh > 1e6)
        throw Error(ErrorCode::InvalidStep, "1/h must be an integer of at least 2");
    return static_cast<int>(nh);
}

}  // namespace

PartitionCounts partition_counts(std::span<const PhasePrior> priors, std::span<const double> grid, double h) {
    const int nh = steps_for(h);
    if (priors.empty()) throw Error(ErrorCode::InvalidArgument, "at least one phase prior is required");
    for (const auto& p : priors)
        if (p.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "prior and grid lengths differ");

    const std::size_t K = priors.size();
    const std::size_t L = grid.size();
    PartitionCounts out;
    out.h = h;
    out.nh = nh;
    out.samples = L;

    std::vector<std::vector<int>> bins(K, std::vector<int>(L));
    for (std::size_t k = 0; k < K; ++k) {
        const auto p = priors[k].phase();
        std::vector<double> xs(L);
        kernels::omp::fold(p, xs);
        for (std::size_t i = 0; i < L; ++i) bins[k][i] = kernels::bin_of(xs[i], nh);
        std::vector<std::int64_t> marg(static_cast<std::size_t>(nh), 0);
        for (int b : bins[k]) ++marg[static_cast<std::size_t>(b)];
        out.single.push_back(std::move(marg));
    }
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j)
            if (i != j) out.pairs.push_back({i, j, kernels::omp::joint_counts(bins[i], bins[j], nh)});
    return out;
}

double phase_bound(std::span<const PhasePrior> priors, std::span<const double> grid) {
    if (grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 grid points");
    double bound = 1.0;
    const std::size_t L = grid.size();
    for (const auto& prior : priors) {
        if (prior.size() != L) throw Error(ErrorCode::GridMismatch, "prior and grid lengths differ");
        const auto p = prior.phase();
        const double n = prior.fundamental();
        for (std::size_t i = 0; i < L; ++i) {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == L ? L - 1 : i + 1;
            const double d = (p[hi] - p[lo]) / (grid[hi] - grid[lo]) / n;
            bound = std::max({bound, d, 1.0 / d});
        }
    }
    return bound;
}

WellDiffStats well_diff_stats(const PartitionCounts& counts, double m) {
    if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "M must be positive");
    const std::size_t K = counts.single.size();
    WellDiffStats s;
    s.h = counts.h;
    if (K == 0) throw Error(ErrorCode::InvalidArgument, "counts hold no components");

    if (K == 1) {
        const auto& marg = counts.single.front();
        s.gamma = static_cast<double>(*std::min_element(marg.begin(), marg.end()));
        s.well_differentiated = s.gamma > 0.0;
        return s;
    }

    std::int64_t gamma = std::numeric_limits<std::int64_t>::max();
    for (const auto& pc : counts.pairs) gamma = std::min(gamma, *std::min_element(pc.cells.begin(), pc.cells.end()));
    s.gamma = static_cast<double>(gamma);

    const auto nh = static_cast<std::size_t>(counts.nh);
    for (const auto& pc : counts.pairs) {
        double total = 0.0;
        for (std::size_t row = 0; row < nh; ++row) {
            const auto marg = counts.single[pc.i][row];
            if (marg == 0) continue;
            double inner = 0.0;
            for (std::size_t col = 0; col < nh; ++col) {
                const double d = static_cast<double>(pc.cells[row * nh + col]) - s.gamma;
                inner += d * d;
            }
            total += inner / static_cast<double>(marg);
        }
        s.beta_per_pair.push_back(std::sqrt(total));
    }
    s.beta = *std::max_element(s.beta_per_pair.begin(), s.beta_per_pair.end());
    s.contraction_bound = m * m * static_cast<double>(K - 1) * s.beta;
    s.well_differentiated = s.gamma > 0.0 && s.contraction_bound < 1.0;
    return s;
}

std::vector<double> autocorrelation(std::span<const double> values, std::size_t max_lag) {
    if (max_lag >= values.size()) throw Error(ErrorCode::LagTooLarge, "max lag must be smaller than the length");
    const double mean = kernels::pairwise_sum(values) / static_cast<double>(values.size());
    std::vector<double> centered(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) centered[i] = values[i] - mean;
    auto acf = kernels::omp::lagged_products(centered, max_lag);
    const double c0 = acf[0];
    if (c0 == 0.0) {
        std::fill(acf.begin(), acf.end(), 0.0);
        acf[0] = 1.0;
        return acf;
    }
    for (auto& v : acf) v /= c0;
    return acf;
}

DecayFit fit_decay_rate(std::span<const double> residual_norms) {
    if (residual_norms.size() < 3) throw Error(ErrorCode::TraceTooShort, "need at least 3 trace points");
    for (double v : residual_norms)
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::NonFinite, "trace norms must be finite and nonnegative");

    const double floor = 2.0 * residual_norms.back();
    std::size_t n = 0;
    while (n < residual_norms.size() && residual_norms[n] > floor) ++n;
    if (n < 3) n = residual_norms.size();

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::log(std::max(residual_norms[i], std::numeric_limits<double>::min()));
    const double xm = (static_cast<double>(n) - 1.0) / 2.0;
    double ym = 0.0;
    for (double v : y) ym += v;
    ym /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - xm;
        sxy += dx * (y[i] - ym);
        sxx += dx * dx;
        syy += (y[i] - ym) * (y[i] - ym);
    }
    const double slope = sxy / sxx;
    DecayFit fit;
    fit.ratio = std::exp(slope);
    fit.goodness = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace mmd
