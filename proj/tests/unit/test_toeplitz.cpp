#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "firm/sim.hpp"
#include "firm/toeplitz.hpp"
#include "oracles.hpp"

using namespace firm;

namespace {

// Ker(n) summed point by point on the side-(2N-1) grid.
ComplexGrid direct_kernel(const ProjectionOperator& op) {
    const auto points = op.plan().points();
    const auto h = op.ctf_weights();
    ComplexGrid k(2 * op.n() - 1);
    for (int z = k.lo(); z <= k.hi(); ++z) {
        for (int y = k.lo(); y <= k.hi(); ++y) {
            for (int x = k.lo(); x <= k.hi(); ++x) {
                cplx s{};
                for (std::size_t j = 0; j < points.size(); ++j) {
                    const double ph = x * points[j][0] + y * points[j][1] + z * points[j][2];
                    s += h[j] * h[j] * cplx(std::cos(ph), std::sin(ph));
                }
                k(x, y, z) = s;
            }
        }
    }
    return k;
}

CtfAssignment reference_ctfs(int m, std::uint64_t seed) {
    return {reference_ctf_groups(3), sim::assign_defocus_groups(m, 3, seed)};
}

double max_abs(const ComplexGrid& g) {
    double m = 0.0;
    for (const auto& v : g.data()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace

TEST(Kernel, OriginCountsSamples) {
    const ProjectionOperator op(8, sim::random_rotations(3, 31));
    const auto k = compute_kernel(op);
    const double mp = 3.0 * static_cast<double>(op.grid().size());
    EXPECT_NEAR(k(0, 0, 0).real(), mp, 1e-6 * mp);
    EXPECT_EQ(k(0, 0, 0).imag(), 0.0);
}

TEST(Kernel, SingleFlatViewIsConstantAlongZ) {
    const ProjectionOperator op(8, {Rotation{}});
    const auto k = compute_kernel(op);
    const double scale = max_abs(k);
    for (int z = k.lo(); z <= k.hi(); ++z) {
        for (int y = k.lo(); y <= k.hi(); ++y) {
            for (int x = k.lo(); x <= k.hi(); ++x) {
                EXPECT_NEAR(std::abs(k(x, y, z) - k(x, y, 0)), 0.0, 1e-6 * scale);
            }
        }
    }
}

TEST(Kernel, MatchesDirectSumWithCtf) {
    const ProjectionOperator op(8, sim::random_rotations(4, 32), reference_ctfs(4, 32));
    const auto direct = direct_kernel(op);
    EXPECT_LE(oracle::relative_l2(compute_kernel(op, KernelMethod::octant_blocks), direct), 1e-5);
    EXPECT_LE(oracle::relative_l2(compute_kernel(op, KernelMethod::doubled_grid), direct), 1e-5);
}

TEST(Kernel, DirectSumIsHermitian) {
    const ProjectionOperator op(8, sim::random_rotations(4, 33), reference_ctfs(4, 33));
    const auto direct = direct_kernel(op);
    const double scale = max_abs(direct);
    double worst = 0.0;
    for (int z = direct.lo(); z <= direct.hi(); ++z) {
        for (int y = direct.lo(); y <= direct.hi(); ++y) {
            for (int x = direct.lo(); x <= direct.hi(); ++x) {
                worst = std::max(worst, std::abs(direct(-x, -y, -z) - std::conj(direct(x, y, z))));
            }
        }
    }
    EXPECT_LE(worst, 1e-10 * scale);
}

TEST(Kernel, ProductionKernelIsExactlyHermitian) {
    const ProjectionOperator op(8, sim::random_rotations(5, 34), reference_ctfs(5, 34));
    for (auto method : {KernelMethod::octant_blocks, KernelMethod::doubled_grid}) {
        const auto k = compute_kernel(op, method);
        for (int z = k.lo(); z <= k.hi(); ++z) {
            for (int y = k.lo(); y <= k.hi(); ++y) {
                for (int x = k.lo(); x <= k.hi(); ++x) {
                    EXPECT_EQ(k(-x, -y, -z), std::conj(k(x, y, z)));
                }
            }
        }
    }
}

TEST(Embedding, IndexMapForFour) {
    EXPECT_EQ(embedding_index(4), (std::vector<int>{1, 2, 3, 4, 1, -2, -1, 0}));
}

TEST(Embedding, PaddingSlotDoesNotAffectOutput) {
    std::mt19937_64 gen(35);
    const ProjectionOperator op(8, sim::random_rotations(4, 35), reference_ctfs(4, 35));
    const auto k = compute_kernel(op);
    const auto v = oracle::random_complex_grid(8, gen);
    const auto base = ToeplitzKernel::embed(k).apply(v);
    for (double pad : {0.0, -17.5, 250.0}) {
        const auto other = ToeplitzKernel::embed(k, {}, pad).apply(v);
        EXPECT_LE(oracle::relative_l2(other, base), 1e-11) << "pad=" << pad;
    }
}

TEST(Embedding, FlatViewSpectrumMatchesDirectDftAndIsNonnegative) {
    const int n = 4;
    const ProjectionOperator op(n, {Rotation{}});
    const auto k = direct_kernel(op);
    const auto kernel = ToeplitzKernel::embed(k);
    const auto c = embedding_index(n);
    const int s = 2 * n;
    const auto spec = kernel.spectrum();
    double max_spec = 0.0;
    for (double v : spec) {
        max_spec = std::max(max_spec, std::abs(v));
    }
    for (int fz = 0; fz < s; ++fz) {
        for (int fy = 0; fy < s; ++fy) {
            for (int fx = 0; fx < s; ++fx) {
                cplx sum{};
                for (int iz = 0; iz < s; ++iz) {
                    for (int iy = 0; iy < s; ++iy) {
                        for (int ix = 0; ix < s; ++ix) {
                            const double ph = -2.0 * std::numbers::pi * (fx * ix + fy * iy + fz * iz) / s;
                            sum += k(c[ix] - 1, c[iy] - 1, c[iz] - 1) * cplx(std::cos(ph), std::sin(ph));
                        }
                    }
                }
                const double got = spec[(static_cast<std::size_t>(fz) * s + fy) * s + fx];
                EXPECT_NEAR(got, sum.real(), 1e-9 * max_spec);
                EXPECT_GE(got, -1e-8 * max_spec);
            }
        }
    }
}

TEST(Embedding, RejectsNonHermitianKernel) {
    ComplexGrid k(7);
    k(0, 0, 0) = 1.0;
    k(1, 0, 0) = cplx(0.5, 0.5);
    k(-1, 0, 0) = cplx(0.5, 0.5);
    EXPECT_THROW((void)ToeplitzKernel::embed(k), InconsistentKernel);
    EXPECT_THROW((void)ToeplitzKernel::embed(ComplexGrid(8)), std::invalid_argument);
}

TEST(ApplyNormal, ZeroInZeroOut) {
    const ProjectionOperator op(8, sim::random_rotations(2, 36));
    const auto kernel = build_toeplitz_kernel(op);
    for (const auto& v : kernel.apply(ComplexGrid(8)).data()) {
        EXPECT_EQ(v, cplx{});
    }
    EXPECT_THROW((void)kernel.apply(ComplexGrid(16)), std::invalid_argument);
}

TEST(ApplyNormal, QuadraticFormIsNonnegative) {
    std::mt19937_64 gen(37);
    const ProjectionOperator op(8, sim::random_rotations(4, 37), reference_ctfs(4, 37));
    const auto kernel = build_toeplitz_kernel(op);
    for (int probe = 0; probe < 10; ++probe) {
        const auto v = oracle::random_real_grid(8, gen);
        const auto kv = kernel.apply(v);
        double q = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            q += v.data()[i] * kv.data()[i];
        }
        EXPECT_GE(q, -1e-6 * norm(v) * norm(v));
    }
}

class ToeplitzEquivalence : public ::testing::TestWithParam<std::tuple<int, int, bool>> {};

TEST_P(ToeplitzEquivalence, MatchesAdjointOfForward) {
    const auto [n, m, with_ctf] = GetParam();
    std::mt19937_64 gen(static_cast<std::uint64_t>(n * 1000 + m * 10 + with_ctf));
    std::optional<CtfAssignment> ctf;
    if (with_ctf) {
        ctf = reference_ctfs(m, 38);
    }
    const ProjectionOperator op(n, sim::random_rotations(m, 38), ctf);
    const auto kernel = build_toeplitz_kernel(op);
    const auto v = to_complex(oracle::random_real_grid(n, gen));
    const auto direct = op.adjoint(op.forward(v));
    const auto fast = kernel.apply(v);
    EXPECT_LE(oracle::relative_l2(fast, direct), 1e-5);
    EXPECT_LE(max_abs_imag(fast), 1e-6 * norm(fast));
}

INSTANTIATE_TEST_SUITE_P(Sweep, ToeplitzEquivalence,
                         ::testing::Combine(::testing::Values(8, 16), ::testing::Values(4, 16), ::testing::Bool()));

TEST(ApplyNormal, ComplexInputAlsoMatches) {
    std::mt19937_64 gen(39);
    const ProjectionOperator op(8, sim::random_rotations(4, 39), reference_ctfs(4, 39));
    const auto kernel = build_toeplitz_kernel(op);
    const auto v = oracle::random_complex_grid(8, gen);
    EXPECT_LE(oracle::relative_l2(kernel.apply(v), op.adjoint(op.forward(v))), 1e-5);
}

TEST(ApplyNormal, ScaledKernelScalesOutput) {
    std::mt19937_64 gen(40);
    const ProjectionOperator op(8, sim::random_rotations(3, 40));
    const auto kernel = build_toeplitz_kernel(op);
    const auto v = oracle::random_real_grid(8, gen);
    const auto a = kernel.apply(v);
    const auto b = kernel.scaled(3.0).apply(v);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(b.data()[i], 3.0 * a.data()[i], 1e-12 * norm(a));
    }
}

TEST(KernelCache, RoundTripAndMismatch) {
    const auto dir = std::filesystem::temp_directory_path() / "firm_kernel_cache_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "kernel.bin";

    const ProjectionOperator op(8, sim::random_rotations(3, 41), reference_ctfs(3, 41));
    const auto meta = describe(op);
    EXPECT_FALSE(load_kernel(path, meta).has_value());

    const auto kernel = build_toeplitz_kernel(op);
    save_kernel(path, kernel);
    EXPECT_EQ(std::filesystem::file_size(path), 8u * 16 * 16 * 16);
    const auto loaded = load_kernel(path, meta);
    ASSERT_TRUE(loaded.has_value());
    EXPECT_TRUE(std::equal(loaded->spectrum().begin(), loaded->spectrum().end(), kernel.spectrum().begin()));
    EXPECT_EQ(loaded->metadata(), meta);

    const ProjectionOperator other(8, sim::random_rotations(3, 42), reference_ctfs(3, 41));
    EXPECT_NE(describe(other).geometry_hash, meta.geometry_hash);
    EXPECT_THROW((void)load_kernel(path, describe(other)), KernelCacheMismatch);
    const ProjectionOperator no_ctf(8, sim::random_rotations(3, 41));
    EXPECT_THROW((void)load_kernel(path, describe(no_ctf)), KernelCacheMismatch);
    std::filesystem::remove_all(dir);
}
