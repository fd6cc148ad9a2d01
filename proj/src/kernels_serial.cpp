#include "mmd/kernels.hpp"

#include <algorithm>

namespace mmd::kernels::serial {

void fold(std::span<const double> vs, std::span<double> xs) {
    for (std::size_t i = 0; i < vs.size(); ++i) xs[i] = wrap_unit(vs[i]);
}

BinnedMeans bin_means(std::span<const double> xs, std::span<const double> ys, int bins) {
    std::vector<std::vector<double>> members(static_cast<std::size_t>(bins));
    for (std::size_t i = 0; i < xs.size(); ++i)
        members[static_cast<std::size_t>(bin_of(xs[i], bins))].push_back(ys[i]);

    BinnedMeans out;
    out.means.assign(members.size(), 0.0);
    out.counts.assign(members.size(), 0);
    for (std::size_t j = 0; j < members.size(); ++j) {
        const auto& m = members[j];
        out.counts[j] = static_cast<std::int64_t>(m.size());
        if (!m.empty()) out.means[j] = bin_mean(m);
    }
    return out;
}

void eval_table(std::span<const double> table, std::span<const double> vs, std::span<double> out) {
    for (std::size_t i = 0; i < vs.size(); ++i) out[i] = interp_periodic(table, vs[i]);
}

void modulated_eval(std::span<const double> table, std::span<const double> vs,
                    std::span<const double> weights, std::span<double> out) {
    for (std::size_t i = 0; i < vs.size(); ++i) out[i] = weights[i] * interp_periodic(table, vs[i]);
}

double sum_squares(std::span<const double> xs) {
    std::vector<double> partial;
    for (std::size_t b = 0; b < xs.size(); b += kReduceBlock) {
        const std::size_t e = std::min(xs.size(), b + kReduceBlock);
        partial.push_back(pairwise_reduce(b, e, [&](std::size_t i) { return xs[i] * xs[i]; }));
    }
    return pairwise_sum(partial);
}

std::vector<std::int64_t> joint_counts(std::span<const int> a, std::span<const int> b, int nh) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(nh) * static_cast<std::size_t>(nh), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        ++counts[static_cast<std::size_t>(a[i]) * static_cast<std::size_t>(nh) + static_cast<std::size_t>(b[i])];
    return counts;
}

std::vector<double> lagged_products(std::span<const double> xs, std::size_t max_lag) {
    std::vector<double> out(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag; ++lag)
        out[lag] = pairwise_reduce(0, xs.size() - lag, [&](std::size_t i) { return xs[i] * xs[i + lag]; });
    return out;
}

}  // namespace mmd::kernels::serial
