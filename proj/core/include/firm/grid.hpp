#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace firm {

using cplx = std::complex<double>;

/// Cubic array with centered integer indexing.
///
/// A side of S covers indices [-(S/2), S - 1 - S/2] along each axis, so an even
/// side runs from -S/2 to S/2 - 1 and an odd side 2K+1 runs from -K to K.
/// Storage is x fastest, then y, then z, starting at the lowest index.
template <typename T>
class Grid3 {
public:
    Grid3() = default;

    explicit Grid3(int side, T fill = T{})
        : side_(side), data_(checked_size(side), fill) {}

    Grid3(int side, std::vector<T> data) : side_(side), data_(std::move(data)) {
        if (data_.size() != checked_size(side)) {
            throw std::invalid_argument("Grid3: data size does not match side " + std::to_string(side));
        }
    }

    [[nodiscard]] int side() const noexcept { return side_; }
    [[nodiscard]] int lo() const noexcept { return -(side_ / 2); }
    [[nodiscard]] int hi() const noexcept { return side_ - 1 - side_ / 2; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] bool contains(int x, int y, int z) const noexcept {
        return x >= lo() && x <= hi() && y >= lo() && y <= hi() && z >= lo() && z <= hi();
    }

    [[nodiscard]] std::size_t offset(int x, int y, int z) const noexcept {
        const auto s = static_cast<std::size_t>(side_);
        const int o = side_ / 2;
        return (static_cast<std::size_t>(z + o) * s + static_cast<std::size_t>(y + o)) * s +
               static_cast<std::size_t>(x + o);
    }

    T& operator()(int x, int y, int z) noexcept { return data_[offset(x, y, z)]; }
    const T& operator()(int x, int y, int z) const noexcept { return data_[offset(x, y, z)]; }

    [[nodiscard]] std::vector<T>& data() noexcept { return data_; }
    [[nodiscard]] const std::vector<T>& data() const noexcept { return data_; }

private:
    static std::size_t checked_size(int side) {
        if (side < 1) {
            throw std::invalid_argument("Grid3: side must be positive, got " + std::to_string(side));
        }
        const auto s = static_cast<std::size_t>(side);
        return s * s * s;
    }

    int side_ = 0;
    std::vector<T> data_;
};

using RealGrid = Grid3<double>;
using ComplexGrid = Grid3<cplx>;

ComplexGrid to_complex(const RealGrid& g);
RealGrid real_part(const ComplexGrid& g);

double norm(const RealGrid& g);
double norm(const ComplexGrid& g);
double max_abs_imag(const ComplexGrid& g);

/// Real density on an even-sided grid with a physical sampling step.
class Volume {
public:
    Volume() = default;
    Volume(int n, double pixel_size);
    Volume(RealGrid grid, double pixel_size);

    [[nodiscard]] int n() const noexcept { return grid_.side(); }
    [[nodiscard]] double pixel_size() const noexcept { return pixel_size_; }
    [[nodiscard]] const RealGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] RealGrid& grid() noexcept { return grid_; }

    double& operator()(int x, int y, int z) noexcept { return grid_(x, y, z); }
    double operator()(int x, int y, int z) const noexcept { return grid_(x, y, z); }

private:
    RealGrid grid_;
    double pixel_size_ = 1.0;
};

void require_volume_side(int n);

}  // namespace firm
