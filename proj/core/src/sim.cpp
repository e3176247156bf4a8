#include "firm/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace firm::sim {

namespace {

std::mt19937_64 engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    return std::mt19937_64(substream_seed(seed, stream, index));
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void BlobPhantom::validate(int n) const {
    if (blobs.empty()) {
        throw std::invalid_argument("phantom needs at least one blob");
    }
    const double lo = -(n / 2), hi = n - 1 - n / 2;
    for (const auto& b : blobs) {
        if (!(b.sigma > 0.0) || !std::isfinite(b.sigma) || !std::isfinite(b.weight)) {
            throw std::invalid_argument("blob sigma must be positive and finite");
        }
        for (double c : b.center) {
            if (!(c >= lo && c <= hi)) {
                throw std::invalid_argument("blob center outside the volume index range");
            }
        }
    }
}

BlobPhantom default_phantom(int n) {
    require_volume_side(n);
    const double s = n / 32.0;
    BlobPhantom p;
    p.blobs = {
        {{5.0 * s, -3.0 * s, 2.0 * s}, 3.0, 1.0},   {{-6.0 * s, 4.0 * s, -3.0 * s}, 2.5, 0.8},
        {{2.0 * s, 7.0 * s, -6.0 * s}, 1.5, 1.2},   {{-3.0 * s, -7.0 * s, 5.0 * s}, 4.0, 0.5},
        {{8.0 * s, 2.0 * s, 7.0 * s}, 2.0, 0.9},    {{-1.0 * s, 0.5 * s, -1.5 * s}, 3.5, 0.6},
    };
    return p;
}

Volume rasterize_phantom(const BlobPhantom& phantom, int n, double pixel_size) {
    phantom.validate(n);
    Volume v(n, pixel_size);
    RealGrid& g = v.grid();
    const int lo = g.lo(), hi = g.hi();
#pragma omp parallel for schedule(static)
    for (int z = lo; z <= hi; ++z) {
        for (int y = lo; y <= hi; ++y) {
            for (int x = lo; x <= hi; ++x) {
                double s = 0.0;
                for (const auto& b : phantom.blobs) {
                    const double dx = x - b.center[0], dy = y - b.center[1], dz = z - b.center[2];
                    s += b.weight * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * b.sigma * b.sigma));
                }
                g(x, y, z) = s;
            }
        }
    }
    return v;
}

std::vector<cplx> analytic_slice(const BlobPhantom& phantom, const Rotation& rot, const DiskGrid& grid,
                                 const std::optional<CtfParams>& ctf) {
    phantom.validate(grid.n());
    const auto points = slice_points(rot, grid);
    std::vector<double> h(points.size(), 1.0);
    if (ctf) {
        h = ctf_on_disk(*ctf, grid);
    }
    std::vector<cplx> out(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
        const double p2 = dot(points[j], points[j]);
        cplx s{};
        for (const auto& b : phantom.blobs) {
            const double s2 = b.sigma * b.sigma;
            const double amp = b.weight * std::pow(2.0 * std::numbers::pi * s2, 1.5) * std::exp(-0.5 * s2 * p2);
            s += std::polar(amp, -dot(b.center, points[j]));
        }
        out[j] = s * h[j];
    }
    return out;
}

std::vector<EulerZyz> conical_tilt_angles(int m, double tilt_deg, std::uint64_t seed) {
    if (m < 1) {
        throw std::invalid_argument("image count must be positive");
    }
    auto gen = engine(seed, Stream::rotations);
    std::uniform_real_distribution<double> azimuth(0.0, 360.0);
    std::vector<EulerZyz> out(static_cast<std::size_t>(m));
    for (auto& a : out) {
        a = EulerZyz{azimuth(gen), tilt_deg, 0.0};
    }
    return out;
}

std::vector<Rotation> conical_tilt_rotations(int m, double tilt_deg, std::uint64_t seed) {
    const auto angles = conical_tilt_angles(m, tilt_deg, seed);
    std::vector<Rotation> out;
    out.reserve(angles.size());
    for (const auto& a : angles) {
        out.push_back(Rotation::from_euler(a));
    }
    return out;
}

std::vector<Rotation> random_rotations(int m, std::uint64_t seed) {
    if (m < 1) {
        throw std::invalid_argument("image count must be positive");
    }
    auto gen = engine(seed, Stream::rotations);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Rotation> out;
    out.reserve(static_cast<std::size_t>(m));
    while (out.size() < static_cast<std::size_t>(m)) {
        double w = normal(gen), x = normal(gen), y = normal(gen), z = normal(gen);
        const double len = std::sqrt(w * w + x * x + y * y + z * z);
        if (len < 1e-8) {
            continue;
        }
        w /= len;
        x /= len;
        y /= len;
        z /= len;
        out.push_back(Rotation::from_matrix({1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                                             2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                                             2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}));
    }
    return out;
}

std::vector<int> assign_defocus_groups(int m, int groups, std::uint64_t seed) {
    if (m < 1 || groups < 1) {
        throw std::invalid_argument("image and group counts must be positive");
    }
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    auto gen = engine(seed, Stream::groups);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<int> out(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % static_cast<std::size_t>(groups));
    }
    return out;
}

ImageStack add_noise(const ImageStack& clean, double snr, std::uint64_t seed) {
    if (!(snr > 0.0)) {
        throw std::invalid_argument("snr must be positive or infinite");
    }
    if (std::isinf(snr)) {
        return clean;
    }
    const auto& px = clean.pixels();
    double mean = 0.0;
    for (double v : px) {
        mean += v;
    }
    mean /= static_cast<double>(px.size());
    double var = 0.0;
    for (double v : px) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(px.size());
    const double sd = std::sqrt(var / snr);

    ImageStack noisy = clean;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < clean.m(); ++i) {
        auto gen = engine(seed, Stream::noise, static_cast<std::uint64_t>(i));
        std::normal_distribution<double> noise(0.0, 1.0);
        for (double& v : noisy.image(i)) {
            v += sd * noise(gen);
        }
    }
    return noisy;
}

void DatasetSpec::validate() const {
    require_volume_side(n);
    if (m < 1) {
        throw std::invalid_argument("m must be at least 1");
    }
    if (!(tilt_deg > 0.0 && tilt_deg < 90.0)) {
        throw std::invalid_argument("tilt must lie strictly between 0 and 90 degrees");
    }
    if (!(snr > 0.0)) {
        throw std::invalid_argument("snr must be positive or infinite");
    }
    if (!(pixel_size > 0.0) || !std::isfinite(pixel_size)) {
        throw std::invalid_argument("pixel size must be positive");
    }
    for (const auto& g : defocus_groups) {
        g.validate();
    }
}

Dataset make_dataset(const DatasetSpec& spec, const BlobPhantom& phantom) {
    spec.validate();
    Dataset d;
    d.spec = spec;
    d.angles = conical_tilt_angles(spec.m, spec.tilt_deg, spec.seed);
    d.rotations.reserve(d.angles.size());
    for (const auto& a : d.angles) {
        d.rotations.push_back(Rotation::from_euler(a));
    }
    std::optional<CtfAssignment> ctf;
    if (spec.defocus_groups.empty()) {
        d.defocus_group.assign(static_cast<std::size_t>(spec.m), 0);
    } else {
        d.defocus_group =
            assign_defocus_groups(spec.m, static_cast<int>(spec.defocus_groups.size()), spec.seed);
        ctf = CtfAssignment{spec.defocus_groups, d.defocus_group};
    }
    d.truth = rasterize_phantom(phantom, spec.n, spec.pixel_size);
    const ProjectionOperator op(spec.n, d.rotations, ctf, spec.nufft_accuracy);
    const auto slices = op.forward(d.truth);
    d.clean = images_from_slices(slices, op.grid(), spec.m);
    d.images = add_noise(d.clean, spec.snr, spec.seed);
    return d;
}

}  // namespace firm::sim
