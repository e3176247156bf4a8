#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "firm/sim.hpp"
#include "oracles.hpp"

using namespace firm;
using namespace firm::sim;

namespace {

constexpr double kPi = std::numbers::pi;

BlobPhantom compact_phantom() {
    BlobPhantom p;
    p.blobs = {{{2.0, -1.0, 1.5}, 2.0, 1.0}, {{-3.0, 2.0, -1.0}, 1.8, 0.7}, {{0.5, 3.0, -2.5}, 2.2, 1.3}};
    return p;
}

DatasetSpec small_spec() {
    DatasetSpec s;
    s.n = 16;
    s.m = 20;
    s.snr = 2.0;
    s.defocus_groups = reference_ctf_groups(3);
    s.seed = 42;
    return s;
}

}  // namespace

TEST(Phantom, BlobPeakAndSymmetry) {
    BlobPhantom p;
    p.blobs = {{{0.0, 0.0, 0.0}, 2.0, 1.5}};
    const auto v = rasterize_phantom(p, 16, 1.0);
    EXPECT_DOUBLE_EQ(v(0, 0, 0), 1.5);
    for (int z = -7; z <= 7; ++z) {
        for (int y = -7; y <= 7; ++y) {
            for (int x = -7; x <= 7; ++x) {
                EXPECT_DOUBLE_EQ(v(x, y, z), v(-x, -y, -z));
            }
        }
    }
}

TEST(Phantom, MassMatchesGaussianIntegral) {
    BlobPhantom p;
    p.blobs = {{{1.0, -2.0, 0.5}, 2.0, 0.8}};
    const auto v = rasterize_phantom(p, 32, 1.0);
    double mass = 0.0;
    for (double x : v.grid().data()) {
        mass += x;
    }
    const double expected = 0.8 * std::pow(2.0 * kPi * 4.0, 1.5);
    EXPECT_NEAR(mass, expected, 0.02 * expected);
}

TEST(Phantom, DefaultHasSixBlobsInsideTheVolume) {
    for (int n : {16, 32, 64}) {
        const auto p = default_phantom(n);
        EXPECT_EQ(p.blobs.size(), 6u);
        EXPECT_NO_THROW(p.validate(n));
    }
}

TEST(Phantom, ValidationRejectsBadBlobs) {
    BlobPhantom p;
    EXPECT_THROW(p.validate(16), std::invalid_argument);
    p.blobs = {{{0.0, 0.0, 0.0}, -1.0, 1.0}};
    EXPECT_THROW(p.validate(16), std::invalid_argument);
    p.blobs = {{{8.0, 0.0, 0.0}, 1.0, 1.0}};
    EXPECT_THROW(p.validate(16), std::invalid_argument);
}

TEST(AnalyticSlice, OriginIsTotalMass) {
    const auto p = compact_phantom();
    const DiskGrid grid(16);
    const auto s = analytic_slice(p, Rotation::from_euler({20.0, 50.0, 0.0}), grid);
    double expected = 0.0;
    for (const auto& b : p.blobs) {
        expected += b.weight * std::pow(2.0 * kPi * b.sigma * b.sigma, 1.5);
    }
    const auto o = s[static_cast<std::size_t>(grid.index_of(0, 0))];
    EXPECT_NEAR(o.real(), expected, 1e-12 * expected);
    EXPECT_NEAR(o.imag(), 0.0, 1e-12 * expected);
}

TEST(AnalyticSlice, AgreesWithForwardProjectionOfRaster) {
    const int n = 32;
    const auto p = compact_phantom();
    const auto rotations = random_rotations(5, 3);
    const auto ctf = reference_ctf_groups(1)[0];
    const ProjectionOperator op(n, rotations, CtfAssignment{{ctf}, std::vector<int>(5, 0)});
    const auto forward = op.forward(rasterize_phantom(p, n, 3.36));
    std::vector<cplx> analytic;
    for (const auto& r : rotations) {
        const auto s = analytic_slice(p, r, op.grid(), ctf);
        analytic.insert(analytic.end(), s.begin(), s.end());
    }
    EXPECT_LE(oracle::relative_l2(forward, analytic), 1e-3);
}

TEST(ConicalTilt, NormalsMakeTheTiltAngleWithZ) {
    for (const auto& r : conical_tilt_rotations(50, 60.0, 7)) {
        EXPECT_NEAR(std::abs(r.apply_transpose({0.0, 0.0, 1.0})[2]), 0.5, 1e-12);
    }
    const auto flat = conical_tilt_angles(10, 60.0, 7);
    for (const auto& a : flat) {
        EXPECT_EQ(a.tilt, 60.0);
        EXPECT_EQ(a.psi, 0.0);
        EXPECT_GE(a.rot, 0.0);
        EXPECT_LT(a.rot, 360.0);
    }
}

TEST(ConicalTilt, AzimuthsAreUniform) {
    const auto angles = conical_tilt_angles(10000, 45.0, 8);
    std::vector<int> bins(10, 0);
    for (const auto& a : angles) {
        ++bins[static_cast<std::size_t>(a.rot / 36.0)];
    }
    for (int b : bins) {
        EXPECT_NEAR(b, 1000, 150);
    }
}

TEST(ConicalTilt, SlicesAvoidTheMissingCone) {
    const DiskGrid grid(32);
    const double c = std::cos(30.0 * kPi / 180.0);
    for (const auto& r : conical_tilt_rotations(40, 60.0, 9)) {
        for (const auto& q : slice_points(r, grid)) {
            const double len = norm(q);
            if (len > 0.0) {
                EXPECT_LE(std::abs(q[2]), c * len + 1e-12);
            }
        }
    }
}

TEST(RandomRotations, AreProperAndSeeded) {
    const auto a = random_rotations(20, 1);
    const auto b = random_rotations(20, 1);
    const auto c = random_rotations(20, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].matrix(), b[i].matrix());
    }
    EXPECT_NE(a[0].matrix(), c[0].matrix());
}

TEST(DefocusGroups, BalancedPartition) {
    const auto g = assign_defocus_groups(101, 3, 5);
    std::vector<int> counts(3, 0);
    for (int v : g) {
        ASSERT_GE(v, 0);
        ASSERT_LT(v, 3);
        ++counts[static_cast<std::size_t>(v)];
    }
    EXPECT_EQ(counts, (std::vector<int>{34, 34, 33}));
    EXPECT_EQ(g, assign_defocus_groups(101, 3, 5));
    EXPECT_NE(g, assign_defocus_groups(101, 3, 6));
}

TEST(Noise, VarianceFollowsSnr) {
    std::mt19937_64 gen(10);
    std::normal_distribution<double> normal(3.0, 2.0);
    ImageStack clean(16, 200);
    for (auto& p : clean.pixels()) {
        p = normal(gen);
    }
    double mean = 0.0, var = 0.0;
    for (double p : clean.pixels()) {
        mean += p;
    }
    mean /= static_cast<double>(clean.pixels().size());
    for (double p : clean.pixels()) {
        var += (p - mean) * (p - mean);
    }
    var /= static_cast<double>(clean.pixels().size());

    const auto noisy = add_noise(clean, 2.0, 11);
    double nvar = 0.0;
    for (std::size_t i = 0; i < clean.pixels().size(); ++i) {
        nvar += std::pow(noisy.pixels()[i] - clean.pixels()[i], 2);
    }
    nvar /= static_cast<double>(clean.pixels().size());
    EXPECT_NEAR(nvar, var / 2.0, 0.02 * var / 2.0);

    EXPECT_EQ(add_noise(clean, kInfiniteSnr, 11).pixels(), clean.pixels());
    EXPECT_THROW((void)add_noise(clean, 0.0, 11), std::invalid_argument);
}

TEST(Dataset, DeterministicPerSeed) {
    const auto p = default_phantom(16);
    const auto a = make_dataset(small_spec(), p);
    const auto b = make_dataset(small_spec(), p);
    EXPECT_EQ(a.images.pixels(), b.images.pixels());
    EXPECT_EQ(a.defocus_group, b.defocus_group);
    auto spec = small_spec();
    spec.seed = 43;
    EXPECT_NE(make_dataset(spec, p).images.pixels(), a.images.pixels());
}

TEST(Dataset, CleanImagesCarryTheForwardSlices) {
    const auto spec = small_spec();
    const auto d = make_dataset(spec, default_phantom(spec.n));
    const ProjectionOperator op(spec.n, d.rotations, CtfAssignment{spec.defocus_groups, d.defocus_group});
    EXPECT_LE(oracle::relative_l2(slices_from_images(d.clean, op.grid()), op.forward(d.truth)), 1e-5);
}

TEST(Dataset, InfiniteSnrKeepsCleanImages) {
    auto spec = small_spec();
    spec.snr = kInfiniteSnr;
    const auto d = make_dataset(spec, default_phantom(spec.n));
    EXPECT_EQ(d.images.pixels(), d.clean.pixels());
}

TEST(Dataset, ValidationRejectsBadSpecs) {
    auto spec = small_spec();
    spec.tilt_deg = 90.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.n = 15;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.snr = -1.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Substreams, DistinctPerStreamAndIndex) {
    EXPECT_NE(substream_seed(0, Stream::rotations), substream_seed(0, Stream::groups));
    EXPECT_NE(substream_seed(0, Stream::noise, 0), substream_seed(0, Stream::noise, 1));
    EXPECT_NE(substream_seed(0, Stream::noise), substream_seed(1, Stream::noise));
    EXPECT_EQ(substream_seed(5, Stream::noise, 3), substream_seed(5, Stream::noise, 3));
}
