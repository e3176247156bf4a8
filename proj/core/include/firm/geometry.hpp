#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace firm {

using Vec3 = std::array<double, 3>;

/// Euler angles in degrees, cryo-EM (rot, tilt, psi) order.
struct EulerZyz {
    double rot = 0.0;
    double tilt = 0.0;
    double psi = 0.0;
};

/// Proper rotation matrix. Slice points for an image with rotation R are
/// Rᵀ(ω₁, ω₂, 0), so the image's viewing direction is Rᵀ e_z.
class Rotation {
public:
    Rotation() = default;

    /// Validates orthogonality and det = +1 to 1e-12.
    static Rotation from_matrix(const std::array<double, 9>& row_major);
    static Rotation about_x(double radians);
    static Rotation about_y(double radians);
    static Rotation about_z(double radians);

    /// R = Rz(psi) · Ry(tilt) · Rz(rot).
    static Rotation from_euler(const EulerZyz& angles);
    [[nodiscard]] EulerZyz to_euler() const;

    [[nodiscard]] double operator()(int row, int col) const noexcept { return m_[row * 3 + col]; }
    [[nodiscard]] const std::array<double, 9>& matrix() const noexcept { return m_; }

    [[nodiscard]] Vec3 apply(const Vec3& v) const noexcept;
    [[nodiscard]] Vec3 apply_transpose(const Vec3& v) const noexcept;
    [[nodiscard]] Rotation transpose() const noexcept;

    /// Rᵀ e_z.
    [[nodiscard]] Vec3 viewing_direction() const noexcept { return apply_transpose({0.0, 0.0, 1.0}); }

    friend Rotation operator*(const Rotation& a, const Rotation& b) noexcept;

private:
    explicit Rotation(const std::array<double, 9>& m) noexcept : m_(m) {}

    std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

/// Integer frequencies (k₁, k₂) of one truncated central slice.
///
/// Holds every pair with |kᵢ| ≤ N/2 - 1 and k₁² + k₂² ≤ (N/2)², ordered with
/// k₁ outer and k₂ inner. The set is closed under negation.
class DiskGrid {
public:
    using Point = std::array<int, 2>;

    explicit DiskGrid(int n);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] std::span<const Point> points() const noexcept { return points_; }
    [[nodiscard]] const Point& operator[](std::size_t i) const noexcept { return points_[i]; }

    /// Position of -k for the point at position i.
    [[nodiscard]] std::size_t mirror(std::size_t i) const noexcept { return mirror_[i]; }

    /// Position of (k₁, k₂), or -1 when it is not on the disk.
    [[nodiscard]] long index_of(int k1, int k2) const noexcept;

    [[nodiscard]] int radius_bound() const noexcept { return n_ / 2 - 1; }

private:
    int n_;
    std::vector<Point> points_;
    std::vector<std::size_t> mirror_;
    std::vector<long> lookup_;
};

DiskGrid build_disk_grid(int n);

/// Points Rᵀ(2πk₁/N, 2πk₂/N, 0) for every disk point, in grid order.
std::vector<Vec3> slice_points(const Rotation& rot, const DiskGrid& grid);

/// Slice points of every rotation, concatenated image-major.
std::vector<Vec3> slice_points(std::span<const Rotation> rotations, const DiskGrid& grid);

double norm(const Vec3& v) noexcept;
double dot(const Vec3& a, const Vec3& b) noexcept;

}  // namespace firm
