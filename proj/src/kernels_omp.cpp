#include "mmd/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace mmd::kernels {

namespace {
int g_thread_limit = 0;

int team_size() { return g_thread_limit > 0 ? g_thread_limit : omp_get_max_threads(); }

// Below this many elements the team startup costs more than the loop.
constexpr std::ptrdiff_t kParallelMin = 2048;
}  // namespace

void set_thread_limit(int threads) { g_thread_limit = threads > 0 ? threads : 0; }
int thread_limit() { return team_size(); }

namespace omp {

void fold(std::span<const double> vs, std::span<double> xs) {
    const auto n = static_cast<std::ptrdiff_t>(vs.size());
#pragma omp parallel for num_threads(team_size()) if (n >= kParallelMin)
    for (std::ptrdiff_t i = 0; i < n; ++i) xs[i] = wrap_unit(vs[i]);
}

BinnedMeans bin_means(std::span<const double> xs, std::span<const double> ys, int bins) {
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
    const auto nb = static_cast<std::size_t>(bins);

    std::vector<int> index(xs.size());
#pragma omp parallel for num_threads(team_size()) if (n >= kParallelMin)
    for (std::ptrdiff_t i = 0; i < n; ++i) index[i] = bin_of(xs[i], bins);

    // Counting sort keeps samples of a bin in index order, which fixes the summation tree.
    BinnedMeans out;
    out.counts.assign(nb, 0);
    for (int j : index) ++out.counts[static_cast<std::size_t>(j)];
    std::vector<std::size_t> offset(nb + 1, 0);
    for (std::size_t j = 0; j < nb; ++j) offset[j + 1] = offset[j] + static_cast<std::size_t>(out.counts[j]);
    std::vector<double> sorted(xs.size());
    {
        std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
        for (std::size_t i = 0; i < xs.size(); ++i) sorted[cursor[static_cast<std::size_t>(index[i])]++] = ys[i];
    }

    out.means.assign(nb, 0.0);
    const auto nbs = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for num_threads(team_size()) schedule(static) if (n >= kParallelMin)
    for (std::ptrdiff_t j = 0; j < nbs; ++j) {
        const std::size_t b = offset[j];
        const std::size_t e = offset[j + 1];
        if (e > b)
            out.means[j] = bin_mean(std::span<const double>(sorted).subspan(b, e - b));
    }
    return out;
}

void eval_table(std::span<const double> table, std::span<const double> vs, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(vs.size());
#pragma omp parallel for num_threads(team_size()) if (n >= kParallelMin)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = interp_periodic(table, vs[i]);
}

void modulated_eval(std::span<const double> table, std::span<const double> vs,
                    std::span<const double> weights, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(vs.size());
#pragma omp parallel for num_threads(team_size()) if (n >= kParallelMin)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = weights[i] * interp_periodic(table, vs[i]);
}

double sum_squares(std::span<const double> xs) {
    const std::size_t blocks = (xs.size() + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(blocks, 0.0);
    const auto nblk = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for num_threads(team_size()) if (nblk > 1)
    for (std::ptrdiff_t b = 0; b < nblk; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = std::min(xs.size(), lo + kReduceBlock);
        partial[b] = pairwise_reduce(lo, hi, [&](std::size_t i) { return xs[i] * xs[i]; });
    }
    return pairwise_sum(partial);
}

std::vector<std::int64_t> joint_counts(std::span<const int> a, std::span<const int> b, int nh) {
    const std::size_t cells = static_cast<std::size_t>(nh) * static_cast<std::size_t>(nh);
    std::vector<std::int64_t> counts(cells, 0);
    const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel num_threads(team_size()) if (n >= kParallelMin)
    {
        std::vector<std::int64_t> local(cells, 0);
#pragma omp for nowait
        for (std::ptrdiff_t i = 0; i < n; ++i)
            ++local[static_cast<std::size_t>(a[i]) * static_cast<std::size_t>(nh) + static_cast<std::size_t>(b[i])];
#pragma omp critical
        for (std::size_t c = 0; c < cells; ++c) counts[c] += local[c];
    }
    return counts;
}

std::vector<double> lagged_products(std::span<const double> xs, std::size_t max_lag) {
    std::vector<double> out(max_lag + 1, 0.0);
    const auto lags = static_cast<std::ptrdiff_t>(max_lag + 1);
#pragma omp parallel for num_threads(team_size()) schedule(dynamic) if (lags > 1)
    for (std::ptrdiff_t lag = 0; lag < lags; ++lag) {
        const auto l = static_cast<std::size_t>(lag);
        out[l] = pairwise_reduce(0, xs.size() - l, [&](std::size_t i) { return xs[i] * xs[i + l]; });
    }
    return out;
}

}  // namespace omp
}  // namespace mmd::kernels
