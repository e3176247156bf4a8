#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "firm/ctf.hpp"
#include "firm/geometry.hpp"
#include "firm/grid.hpp"

namespace firm {

/// M real N×N images, image-major, x fastest within an image.
/// Pixel (x, y) uses centered indices in [-N/2, N/2 - 1].
class ImageStack {
public:
    ImageStack() = default;
    ImageStack(int n, int m);
    ImageStack(int n, int m, std::vector<double> pixels);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int m() const noexcept { return m_; }

    [[nodiscard]] std::span<double> image(int i) noexcept;
    [[nodiscard]] std::span<const double> image(int i) const noexcept;

    double& at(int i, int x, int y) noexcept { return pixels_[offset(i, x, y)]; }
    [[nodiscard]] double at(int i, int x, int y) const noexcept { return pixels_[offset(i, x, y)]; }

    [[nodiscard]] std::vector<double>& pixels() noexcept { return pixels_; }
    [[nodiscard]] const std::vector<double>& pixels() const noexcept { return pixels_; }

private:
    [[nodiscard]] std::size_t offset(int i, int x, int y) const noexcept {
        const auto n = static_cast<std::size_t>(n_);
        return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(y + n_ / 2)) * n +
               static_cast<std::size_t>(x + n_ / 2);
    }

    int n_ = 0;
    int m_ = 0;
    std::vector<double> pixels_;
};

/// Truncated Fourier slices with their acquisition geometry.
///
/// values holds P entries per image, image-major, in DiskGrid order.
struct SliceStack {
    DiskGrid grid{4};
    int m = 0;
    std::vector<cplx> values;
    std::vector<Rotation> rotations;
    std::vector<int> defocus_group;
    std::vector<CtfParams> ctfs;

    [[nodiscard]] int n() const noexcept { return grid.n(); }
    [[nodiscard]] std::span<const cplx> slice(int i) const noexcept {
        return std::span<const cplx>(values).subspan(static_cast<std::size_t>(i) * grid.size(), grid.size());
    }

    /// Checks array lengths and group ids.
    void validate() const;
};

}  // namespace firm
