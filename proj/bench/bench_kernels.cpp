// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include "aperiodiq/catalog.hpp"
#include "aperiodiq/convergence.hpp"
#include "aperiodiq/spectral.hpp"

using namespace aperiodiq;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_CoverCheck(benchmark::State& st) {
    auto m = LatticeModel::heisenberg(4);
    auto t0 = m.seed_cells();
    auto tp = base_shape(m);
    for (auto _ : st) benchmark::DoNotOptimize(cover_check(m, t0, tp, 1, mode(st)).ok);
}

void BM_VerifyDomain(benchmark::State& st) {
    auto m = LatticeModel::heisenberg(4);
    auto t1 = box_shape(m, {{-2, 0}, {-2, 0}, {-12, 12}});
    auto tp = base_shape(m);
    for (auto _ : st) benchmark::DoNotOptimize(verify_domain(m, t1, tp, 1, mode(st)).ok);
}

void BM_Dictionary(benchmark::State& st) {
    auto f = table_tiling();
    auto shape = box_shape(f.sub.model(), {{0, 3}, {0, 3}});
    for (auto _ : st) {
        Dictionary d(f.sub, mode(st));
        benchmark::DoNotOptimize(d.legal(shape).size());
    }
}

void BM_Spectrum(benchmark::State& st) {
    auto f = table_tiling();
    auto spec = nearest_neighbour(2, {0, 1, 2, 3});
    auto w = substitute_periodic(f.sub, f.seed("rb"), 2);
    for (auto _ : st) benchmark::DoNotOptimize(spectrum(spec, f.sub.model(), w, 8, mode(st)).samples.size());
}

void BM_Eigensolvers(benchmark::State& st) {
    auto f = table_tiling();
    auto spec = nearest_neighbour(2, {0, 1, 2, 3});
    auto w = substitute_periodic(f.sub, f.seed("rb"), 3);
    auto h = floquet_matrix(spec, f.sub.model(), w, {0.3, 0.7});
    for (auto _ : st) {
        if (st.range(0)) benchmark::DoNotOptimize(eigenvalues(h).front());
        else benchmark::DoNotOptimize(eigenvalues_reference(h).front());
    }
}

}  // namespace

BENCHMARK(BM_CoverCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyDomain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dictionary)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Spectrum)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
// 0 = Eigen, 1 = LAPACKE zheevd
BENCHMARK(BM_Eigensolvers)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
