// Serial vs OpenMP assembly and Cholesky on the star fixture.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "fixtures.hpp"
#include "treedamp/basis.hpp"
#include "treedamp/damping.hpp"
#include "treedamp/dense.hpp"

using namespace treedamp;

namespace {

struct Setup {
    std::shared_ptr<const Basis> basis;
    QuadratureRows rows;
    GramSystem system;
};

const Setup& setup(int q) {
    static std::map<int, Setup> cache;
    auto it = cache.find(q);
    if (it != cache.end()) return it->second;
    const auto cfg = fixture("star");
    auto mesh = std::make_shared<const DelayMesh>(DelayMesh::build(cfg.tree, cfg.tau, q));
    auto basis = std::make_shared<const Basis>(Basis::build(mesh, cfg.order, cfg.solver.degree));
    const auto lift = lift_history(*mesh, cfg.order, cfg.history);
    auto rows = build_rows(*basis, lift, cfg.coeffs);
    auto system = assemble_serial(rows);
    return cache.emplace(q, Setup{basis, std::move(rows), std::move(system)}).first->second;
}

void BM_AssembleSerial(benchmark::State& state) {
    const auto& s = setup(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_serial(s.rows));
    state.counters["dim"] = static_cast<double>(s.rows.dim);
}

void BM_AssembleParallel(benchmark::State& state) {
    const auto& s = setup(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_parallel(s.rows));
    state.counters["dim"] = static_cast<double>(s.rows.dim);
}

void BM_CholeskySerial(benchmark::State& state) {
    const auto& s = setup(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cholesky_serial(s.system.G));
    state.counters["dim"] = static_cast<double>(s.system.dim());
}

void BM_CholeskyParallel(benchmark::State& state) {
    const auto& s = setup(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cholesky_parallel(s.system.G));
    state.counters["dim"] = static_cast<double>(s.system.dim());
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CholeskySerial)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CholeskyParallel)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
