#include <edgegap/bsham.hpp>
#include <edgegap/counting.hpp>
#include <edgegap/fiber.hpp>
#include <edgegap/modelops.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace edgegap;

namespace {

void BM_FiberSolve(benchmark::State& state)
{
    const auto d = FiberDiscretization::standard(1.0, EdgePotential::step(0.0, 1.0, 0.0),
                                                 static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fiber_energies(d, 1.5, 3));
}
BENCHMARK(BM_FiberSolve)->Arg(1001)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_CountAbove(benchmark::State& state)
{
    const auto n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) a(i, k) = {N(rng), N(rng)};
    const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    for (auto _ : state) benchmark::DoNotOptimize(count_above(h, 0.5).count);
}
BENCHMARK(BM_CountAbove)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SjstarAssembly(benchmark::State& state)
{
    Problem p;
    p.fiber = FiberDiscretization::standard(1.0, EdgePotential::step(0.0, 1.0, 0.0));
    p.V = Perturbation::indicator(rectangle(-1.0, 1.0, -2.0, 2.0));
    sjstar_sj(1, 1e-3, 0.0, p);   // warm the band cache
    for (auto _ : state) benchmark::DoNotOptimize(sjstar_sj(1, 1e-3, 0.0, p).size());
}
BENCHMARK(BM_SjstarAssembly)->Unit(benchmark::kMillisecond);

void BM_GammaGramCount(benchmark::State& state)
{
    const Polygon omega = rectangle(0.1, 0.5, -0.3, 0.3);
    const double m = static_cast<double>(state.range(0));
    for (auto _ : state) {
        const DiscretizedOperator op = gamma_gram(Side::minus, m, 0.05, omega, 1.0);
        benchmark::DoNotOptimize(count_above(op, 1.0).count);
    }
}
BENCHMARK(BM_GammaGramCount)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
