#include <random>

#include <benchmark/benchmark.h>

#include "firm/nufft.hpp"
#include "firm/projector.hpp"
#include "firm/sim.hpp"
#include "firm/slices.hpp"
#include "firm/solver.hpp"
#include "firm/toeplitz.hpp"

using namespace firm;

namespace {

ProjectionOperator conical(int n, int m) {
    return ProjectionOperator(n, sim::conical_tilt_rotations(m, 60.0, 1),
                              CtfAssignment{reference_ctf_groups(3), sim::assign_defocus_groups(m, 3, 1)});
}

RealGrid random_volume(int n) {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> normal(0.0, 1.0);
    RealGrid v(n);
    for (auto& x : v.data()) {
        x = normal(gen);
    }
    return v;
}

void BM_Forward(benchmark::State& state) {
    const auto op = conical(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const auto v = to_complex(random_volume(op.n()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(op.forward(v));
    }
}

void BM_Backprojection(benchmark::State& state) {
    const auto op = conical(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const auto g = op.forward(to_complex(random_volume(op.n())));
    for (auto _ : state) {
        benchmark::DoNotOptimize(op.adjoint(g));
    }
}

void BM_KernelBuild(benchmark::State& state) {
    const auto op = conical(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_toeplitz_kernel(op));
    }
}

void BM_ApplyNormal(benchmark::State& state) {
    const auto op = conical(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const auto kernel = build_toeplitz_kernel(op);
    const auto v = random_volume(op.n());
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel.apply(v));
    }
}

void BM_CgIteration(benchmark::State& state) {
    const auto op = conical(static_cast<int>(state.range(0)), 100);
    const auto kernel = build_toeplitz_kernel(op);
    const auto rhs = to_complex(random_volume(op.n()));
    CgOptions opts;
    opts.max_iters = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cg_solve(kernel, rhs, opts));
    }
    state.SetItemsProcessed(state.iterations() * opts.max_iters);
}

void BM_SlicesFromImages(benchmark::State& state) {
    const auto op = conical(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const auto images = images_from_slices(op.forward(to_complex(random_volume(op.n()))), op.grid(), op.m());
    for (auto _ : state) {
        benchmark::DoNotOptimize(slices_from_images(images, op.grid()));
    }
}

}  // namespace

BENCHMARK(BM_Forward)->Args({32, 100})->Args({32, 500})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Backprojection)->Args({32, 100})->Args({32, 500})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelBuild)->Args({16, 100})->Args({32, 100})->Args({32, 500})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyNormal)->Args({32, 100})->Args({32, 1000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CgIteration)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SlicesFromImages)->Args({32, 500})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
