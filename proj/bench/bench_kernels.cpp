// Serial reference kernels against their OpenMP counterparts on inputs the size of a 2^15-sample
// decomposition. Run with MMD_THREADS unset to use the runtime default team.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mmd/kernels.hpp"

namespace k = mmd::kernels;

namespace {

constexpr int kBins = 200;

struct Inputs {
    std::vector<double> phase, xs, ys, table, weights;
    std::vector<int> a, b;
};

const Inputs& inputs(std::size_t n) {
    static std::vector<std::pair<std::size_t, Inputs>> cache;
    for (const auto& [size, in] : cache)
        if (size == n) return in;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Inputs in;
    for (std::size_t i = 0; i < n; ++i) {
        in.phase.push_back(150.0 * static_cast<double>(i) / static_cast<double>(n) + 0.01 * u(rng));
        in.xs.push_back(u(rng));
        in.ys.push_back(u(rng) - 0.5);
        in.weights.push_back(u(rng));
        in.a.push_back(static_cast<int>(u(rng) * 20));
        in.b.push_back(static_cast<int>(u(rng) * 20));
    }
    for (int j = 0; j < kBins; ++j) in.table.push_back(u(rng) - 0.5);
    cache.emplace_back(n, std::move(in));
    return cache.back().second;
}

template <auto Fn>
void bm_bin_means(benchmark::State& st) {
    const auto& in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(Fn(in.xs, in.ys, kBins));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void bm_eval_table(benchmark::State& st) {
    const auto& in = inputs(static_cast<std::size_t>(st.range(0)));
    std::vector<double> out(in.phase.size());
    for (auto _ : st) {
        Fn(in.table, in.phase, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void bm_modulated_eval(benchmark::State& st) {
    const auto& in = inputs(static_cast<std::size_t>(st.range(0)));
    std::vector<double> out(in.phase.size());
    for (auto _ : st) {
        Fn(in.table, in.phase, in.weights, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void bm_sum_squares(benchmark::State& st) {
    const auto& in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(Fn(in.ys));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void bm_joint_counts(benchmark::State& st) {
    const auto& in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(Fn(in.a, in.b, 20));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void bm_lagged_products(benchmark::State& st) {
    const auto& in = inputs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(Fn(in.ys, 100));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

#define MMD_PAIR(name)                                                                        \
    BENCHMARK(bm_##name<k::serial::name>)->Name("serial/" #name)->RangeMultiplier(4)->Range(1 << 12, 1 << 18); \
    BENCHMARK(bm_##name<k::omp::name>)->Name("omp/" #name)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)

MMD_PAIR(bin_means);
MMD_PAIR(eval_table);
MMD_PAIR(modulated_eval);
MMD_PAIR(sum_squares);
MMD_PAIR(joint_counts);
MMD_PAIR(lagged_products);

BENCHMARK_MAIN();
