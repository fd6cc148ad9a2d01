#pragma once

// Data-parallel inner loops shared by regression, reconstruction and diagnostics.
//
// Every kernel exists twice: `serial::` is the plain reference used by tests, `omp::` is the
// OpenMP version the library calls. Both use the same summation order (pairwise over samples
// in index order within a bin or block), so their outputs are bit-identical for any thread count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mmd::kernels {

/// Block length of the fixed reduction tree used by `sum_squares`.
inline constexpr std::size_t kReduceBlock = 4096;

struct BinnedMeans {
    std::vector<double> means;         // 0 for empty bins
    std::vector<std::int64_t> counts;
};

/// Pairwise (tree) sum of f(0..n-1). Leaves hold at most 8 terms.
template <class F>
double pairwise_reduce(std::size_t begin, std::size_t end, const F& f) {
    const std::size_t n = end - begin;
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) acc += f(i);
        return acc;
    }
    const std::size_t mid = begin + n / 2;
    return pairwise_reduce(begin, mid, f) + pairwise_reduce(mid, end, f);
}

inline double pairwise_sum(std::span<const double> xs) {
    return pairwise_reduce(0, xs.size(), [&](std::size_t i) { return xs[i]; });
}

/// Mean of a non-empty bin as first + pairwise_sum(y - first) / n. Shifting by the first member
/// keeps the sum small and makes a bin of identical values return that value exactly.
inline double bin_mean(std::span<const double> ys) {
    const double y0 = ys[0];
    const double dev = pairwise_reduce(0, ys.size(), [&](std::size_t i) { return ys[i] - y0; });
    return y0 + dev / static_cast<double>(ys.size());
}

/// Fractional part in [0,1), also for negative input.
inline double wrap_unit(double v) {
    double x = v - std::floor(v);
    return x >= 1.0 ? 0.0 : x;
}

/// Bin of a folded position x in [0,1) on a uniform partition of `bins` cells.
inline int bin_of(double x, int bins) {
    auto j = static_cast<int>(x * bins);
    if (j >= bins) j = bins - 1;
    if (j < 0) j = 0;
    return j;
}

/// Periodic linear interpolation between bin centers (j + 1/2)/B of a one-period table.
inline double interp_periodic(std::span<const double> table, double v) {
    const auto bins = static_cast<std::ptrdiff_t>(table.size());
    const double pos = wrap_unit(v) * static_cast<double>(bins) - 0.5;
    const double lo = std::floor(pos);
    const double w = pos - lo;
    auto j0 = static_cast<std::ptrdiff_t>(lo);
    if (j0 < 0) j0 += bins;
    std::ptrdiff_t j1 = j0 + 1;
    if (j1 >= bins) j1 -= bins;
    if (w == 0.0) return table[static_cast<std::size_t>(j0)];
    return (1.0 - w) * table[static_cast<std::size_t>(j0)] + w * table[static_cast<std::size_t>(j1)];
}

namespace serial {

void fold(std::span<const double> vs, std::span<double> xs);
BinnedMeans bin_means(std::span<const double> xs, std::span<const double> ys, int bins);
void eval_table(std::span<const double> table, std::span<const double> vs, std::span<double> out);
/// out[i] = weights[i] * table(vs[i])
void modulated_eval(std::span<const double> table, std::span<const double> vs,
                    std::span<const double> weights, std::span<double> out);
double sum_squares(std::span<const double> xs);
/// Row-major nh x nh occupancy of (a[i], b[i]).
std::vector<std::int64_t> joint_counts(std::span<const int> a, std::span<const int> b, int nh);
/// Sum over i of x[i] * x[i + lag] for lag = 0..max_lag.
std::vector<double> lagged_products(std::span<const double> xs, std::size_t max_lag);

}  // namespace serial

namespace omp {

void fold(std::span<const double> vs, std::span<double> xs);
BinnedMeans bin_means(std::span<const double> xs, std::span<const double> ys, int bins);
void eval_table(std::span<const double> table, std::span<const double> vs, std::span<double> out);
void modulated_eval(std::span<const double> table, std::span<const double> vs,
                    std::span<const double> weights, std::span<double> out);
double sum_squares(std::span<const double> xs);
std::vector<std::int64_t> joint_counts(std::span<const int> a, std::span<const int> b, int nh);
std::vector<double> lagged_products(std::span<const double> xs, std::size_t max_lag);

}  // namespace omp

/// Caps the OpenMP team size; non-positive values leave the runtime default.
void set_thread_limit(int threads);
[[nodiscard]] int thread_limit();

}  // namespace mmd::kernels
