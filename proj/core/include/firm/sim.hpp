#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "firm/ctf.hpp"
#include "firm/geometry.hpp"
#include "firm/grid.hpp"
#include "firm/projector.hpp"
#include "firm/slices.hpp"

namespace firm::sim {

struct Blob {
    Vec3 center{};  // grid units, centered indexing
    double sigma = 1.0;
    double weight = 1.0;
};

struct BlobPhantom {
    std::vector<Blob> blobs;

    /// Checks σ > 0, a non-empty list and centers inside the n-grid.
    void validate(int n) const;
};

/// Six Gaussians with σ between 1.5 and 4 placed without symmetry; centers scale with n.
BlobPhantom default_phantom(int n);

/// Σ_j w_j exp(-‖x - c_j‖² / 2σ_j²) sampled on the centered grid.
Volume rasterize_phantom(const BlobPhantom& phantom, int n, double pixel_size);

/// Closed-form slice values Σ_j w_j (2πσ_j²)^{3/2} exp(-σ_j²‖p‖²/2) exp(-i⟨c_j, p⟩) · h.
std::vector<cplx> analytic_slice(const BlobPhantom& phantom, const Rotation& rot, const DiskGrid& grid,
                                 const std::optional<CtfParams>& ctf = std::nullopt);

/// Azimuths drawn uniformly from [0°, 360°) with the fixed tilt and psi = 0.
std::vector<EulerZyz> conical_tilt_angles(int m, double tilt_deg, std::uint64_t seed);
std::vector<Rotation> conical_tilt_rotations(int m, double tilt_deg, std::uint64_t seed);

/// Rotations distributed uniformly on SO(3) (normalized Gaussian quaternions).
std::vector<Rotation> random_rotations(int m, std::uint64_t seed);

/// Balanced random partition: image perm[i] goes to group i mod groups.
std::vector<int> assign_defocus_groups(int m, int groups, std::uint64_t seed);

/// Adds white Gaussian noise of variance var(clean stack) / snr. snr = ∞ is a no-op.
ImageStack add_noise(const ImageStack& clean, double snr, std::uint64_t seed);

struct DatasetSpec {
    int n = 32;
    int m = 500;
    double tilt_deg = 60.0;
    double snr = 1.0;  // may be +∞
    double pixel_size = 3.36;
    /// Empty means no CTF (h ≡ 1).
    std::vector<CtfParams> defocus_groups;
    std::uint64_t seed = 0;
    double nufft_accuracy = 1e-6;

    void validate() const;
};

struct Dataset {
    DatasetSpec spec;
    std::vector<EulerZyz> angles;
    std::vector<Rotation> rotations;
    std::vector<int> defocus_group;
    ImageStack clean;
    ImageStack images;
    Volume truth;
};

Dataset make_dataset(const DatasetSpec& spec, const BlobPhantom& phantom);

/// Named sub-stream seeds derived from one dataset seed.
enum class Stream : std::uint64_t { rotations = 1, groups = 2, noise = 3 };
std::uint64_t substream_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

}  // namespace firm::sim
