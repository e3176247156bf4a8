#pragma once

#include <span>
#include <vector>

#include "firm/geometry.hpp"
#include "firm/grid.hpp"

namespace firm::nufft {

inline constexpr double kDefaultAccuracy = 1e-6;

/// 3D non-uniform FFT between a centered Cartesian grid and frequencies in [-π, π]³.
///
/// type2 evaluates  f(p_j) = Σ_n V(n) exp(-i⟨n, p_j⟩)
/// type1 evaluates  V(n)   = Σ_j c_j exp(+i⟨n, p_j⟩)
///
/// Gridding uses a Kaiser-Bessel kernel on a 2× oversampled grid with
/// width ⌈log₁₀(1/ε)⌉ + 2 cells and β = π·w·(1 - 1/(2σ)), followed by
/// deconvolution on the Cartesian side.
class Plan {
public:
    Plan(int grid_side, std::vector<Vec3> points, double accuracy = kDefaultAccuracy);

    [[nodiscard]] int grid_side() const noexcept { return grid_side_; }
    [[nodiscard]] std::span<const Vec3> points() const noexcept { return points_; }
    [[nodiscard]] std::size_t point_count() const noexcept { return points_.size(); }
    [[nodiscard]] double accuracy() const noexcept { return accuracy_; }
    [[nodiscard]] double oversampling() const noexcept { return oversampling_; }
    [[nodiscard]] int kernel_width() const noexcept { return width_; }
    [[nodiscard]] double kernel_beta() const noexcept { return beta_; }

    /// Grid of side grid_side() to values at the points.
    [[nodiscard]] std::vector<cplx> type2(const ComplexGrid& grid) const;

    /// Values at the points to a grid. out_side is grid_side() or 2·grid_side().
    [[nodiscard]] ComplexGrid type1(std::span<const cplx> values, int out_side) const;
    [[nodiscard]] ComplexGrid type1(std::span<const cplx> values) const { return type1(values, grid_side_); }

    /// Spreading kernel φ(t), t in fine-grid cells, zero for |t| ≥ w/2.
    [[nodiscard]] double kernel(double t) const noexcept;
    /// Continuous Fourier transform of φ at u cycles per fine cell.
    [[nodiscard]] double kernel_transform(double u) const noexcept;

private:
    [[nodiscard]] ComplexGrid type1_impl(std::span<const cplx> values, int out_side) const;

    int grid_side_;
    std::vector<Vec3> points_;
    double accuracy_;
    double oversampling_ = 2.0;
    int width_;
    double beta_;
};

/// Kernel width used for a requested accuracy.
int kernel_width_for(double accuracy);

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x) noexcept;

// Direct O(points · side³) sums; reference implementations for small problems.
// Both reject sides above 32 or more than 10⁴ points.

[[nodiscard]] std::vector<cplx> dft_direct_type2(std::span<const Vec3> points, const ComplexGrid& grid);
[[nodiscard]] ComplexGrid dft_direct_type1(std::span<const Vec3> points, std::span<const cplx> values,
                                           int out_side);

}  // namespace firm::nufft
