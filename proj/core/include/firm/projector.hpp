#pragma once

#include <optional>
#include <span>
#include <vector>

#include "firm/ctf.hpp"
#include "firm/geometry.hpp"
#include "firm/grid.hpp"
#include "firm/nufft.hpp"
#include "firm/slices.hpp"

namespace firm {

/// Per-image CTFs, by defocus group.
struct CtfAssignment {
    std::vector<CtfParams> groups;
    std::vector<int> image_group;
};

/// The forward projector A (volume → CTF-weighted truncated Fourier slices)
/// and its adjoint A*, sharing one NUFFT plan over all M·P slice points.
class ProjectionOperator {
public:
    /// Without a CTF assignment every h_m is 1.
    ProjectionOperator(int n, std::vector<Rotation> rotations, std::optional<CtfAssignment> ctf = std::nullopt,
                       double nufft_accuracy = nufft::kDefaultAccuracy);

    [[nodiscard]] int n() const noexcept { return grid_.n(); }
    [[nodiscard]] int m() const noexcept { return static_cast<int>(rotations_.size()); }
    [[nodiscard]] const DiskGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const Rotation> rotations() const noexcept { return rotations_; }
    [[nodiscard]] const nufft::Plan& plan() const noexcept { return plan_; }
    [[nodiscard]] bool has_ctf() const noexcept { return ctf_.has_value(); }
    [[nodiscard]] const std::optional<CtfAssignment>& ctf() const noexcept { return ctf_; }

    /// h_m(‖ω_k‖) for every slice point, image-major (all ones without CTF).
    [[nodiscard]] std::span<const double> ctf_weights() const noexcept { return weights_; }

    [[nodiscard]] std::vector<cplx> forward(const ComplexGrid& v) const;
    [[nodiscard]] std::vector<cplx> forward(const Volume& v) const;
    [[nodiscard]] ComplexGrid adjoint(std::span<const cplx> g) const;

private:
    DiskGrid grid_;
    std::vector<Rotation> rotations_;
    std::optional<CtfAssignment> ctf_;
    std::vector<double> weights_;
    nufft::Plan plan_;
};

/// 2D DFT of each image on the disk grid, centered convention, Hermitian by construction.
std::vector<cplx> slices_from_images(const ImageStack& images, const DiskGrid& grid);

/// Inverse of slices_from_images: zero outside the disk, real part of the inverse 2D DFT.
ImageStack images_from_slices(std::span<const cplx> values, const DiskGrid& grid, int m);

/// Complex inner product Σ a·conj(b).
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> a);

}  // namespace firm
