// Serial reference kernels against their OpenMP versions on PDE-sized grids.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rdfront/kernels.hpp"

using namespace rdfront::kernels;

namespace {

struct Field {
    Grid1D g;
    std::vector<double> v, R, r;

    explicit Field(std::size_t half) {
        g.dx = 0.3;
        g.size = 2 * half + 1;
        g.center = half;
        v.resize(g.size);
        R.resize(g.size);
        r.resize(g.size);
        for (std::size_t j = 0; j < g.size; ++j) v[j] = std::erf(std::abs(g.x(j)) / 20) + 0.01;
    }
};

template <bool Par>
void BM_reaction(benchmark::State& st) {
    Field f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Par)
            parallel::reaction(f.g, f.v.data(), 1e3, 4, f.R.data());
        else
            serial::reaction(f.g, f.v.data(), 1e3, 4, f.R.data());
        benchmark::DoNotOptimize(f.R.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.size));
}

template <bool Par>
void BM_cn_rhs(benchmark::State& st) {
    Field f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        if constexpr (Par)
            parallel::cn_rhs(f.g, f.v.data(), f.R.data(), 0.01, f.r.data());
        else
            serial::cn_rhs(f.g, f.v.data(), f.R.data(), 0.01, f.r.data());
        benchmark::DoNotOptimize(f.r.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.size));
}

template <bool Par>
void BM_tree_sum(benchmark::State& st) {
    Field f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        double s = Par ? parallel::tree_sum(f.v.data(), f.g.size) : serial::tree_sum(f.v.data(), f.g.size);
        benchmark::DoNotOptimize(s);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.size));
}

template <bool Par>
void BM_l1_diff(benchmark::State& st) {
    Field f(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        double s = Par ? parallel::l1_diff(f.g, f.v.data(), f.R.data()) : serial::l1_diff(f.g, f.v.data(), f.R.data());
        benchmark::DoNotOptimize(s);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.size));
}

void BM_thomas(benchmark::State& st) {
    Field f(static_cast<std::size_t>(st.range(0)));
    const ConstantTridiagonal lhs(f.g.size - 2, 1.1, 0.05);
    for (auto _ : st) {
        lhs.solve(f.r.data() + 1);
        benchmark::DoNotOptimize(f.r.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(f.g.size));
}

}  // namespace

BENCHMARK(BM_reaction<false>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_reaction<true>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_cn_rhs<false>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_cn_rhs<true>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_tree_sum<false>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_tree_sum<true>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_l1_diff<false>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_l1_diff<true>)->Arg(3500)->Arg(35000);
BENCHMARK(BM_thomas)->Arg(3500)->Arg(35000);

BENCHMARK_MAIN();
