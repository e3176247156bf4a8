#include "firm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace firm {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

Rotation Rotation::from_matrix(const std::array<double, 9>& m) {
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                s += m[k * 3 + i] * m[k * 3 + j];
            }
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-12) {
                throw std::invalid_argument("rotation matrix is not orthogonal");
            }
        }
    }
    const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                       m[2] * (m[3] * m[7] - m[4] * m[6]);
    if (std::abs(det - 1.0) > 1e-12) {
        throw std::invalid_argument("rotation matrix must have determinant +1");
    }
    return Rotation(m);
}

Rotation Rotation::about_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Rotation({1, 0, 0, 0, c, -s, 0, s, c});
}

Rotation Rotation::about_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Rotation({c, 0, s, 0, 1, 0, -s, 0, c});
}

Rotation Rotation::about_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return Rotation({c, -s, 0, s, c, 0, 0, 0, 1});
}

Rotation Rotation::from_euler(const EulerZyz& e) {
    return about_z(e.psi * kDeg) * about_y(e.tilt * kDeg) * about_z(e.rot * kDeg);
}

EulerZyz Rotation::to_euler() const {
    // R = Rz(psi) Ry(tilt) Rz(rot): R(2,2) = cos tilt, R(2,0) = -sin tilt cos rot,
    // R(2,1) = sin tilt sin rot, R(0,2) = cos psi sin tilt, R(1,2) = sin psi sin tilt.
    const double ct = std::clamp((*this)(2, 2), -1.0, 1.0);
    EulerZyz e;
    e.tilt = std::acos(ct) / kDeg;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    if (st > 1e-12) {
        e.rot = std::atan2((*this)(2, 1), -(*this)(2, 0)) / kDeg;
        e.psi = std::atan2((*this)(1, 2), (*this)(0, 2)) / kDeg;
    } else {
        // Gimbal lock: only rot + psi (or rot - psi) is defined; put it all in rot.
        e.psi = 0.0;
        e.rot = std::atan2((*this)(1, 0), (*this)(0, 0)) / kDeg;
        if (ct < 0) {
            e.rot = std::atan2((*this)(1, 0), -(*this)(0, 0)) / kDeg;
        }
    }
    return e;
}

Vec3 Rotation::apply(const Vec3& v) const noexcept {
    return {m_[0] * v[0] + m_[1] * v[1] + m_[2] * v[2], m_[3] * v[0] + m_[4] * v[1] + m_[5] * v[2],
            m_[6] * v[0] + m_[7] * v[1] + m_[8] * v[2]};
}

Vec3 Rotation::apply_transpose(const Vec3& v) const noexcept {
    return {m_[0] * v[0] + m_[3] * v[1] + m_[6] * v[2], m_[1] * v[0] + m_[4] * v[1] + m_[7] * v[2],
            m_[2] * v[0] + m_[5] * v[1] + m_[8] * v[2]};
}

Rotation Rotation::transpose() const noexcept {
    return Rotation({m_[0], m_[3], m_[6], m_[1], m_[4], m_[7], m_[2], m_[5], m_[8]});
}

Rotation operator*(const Rotation& a, const Rotation& b) noexcept {
    std::array<double, 9> m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                s += a.m_[i * 3 + k] * b.m_[k * 3 + j];
            }
            m[i * 3 + j] = s;
        }
    }
    return Rotation(m);
}

DiskGrid::DiskGrid(int n) : n_(n) {
    if (n < 4 || n % 2 != 0) {
        throw std::invalid_argument("disk grid side must be even and at least 4, got " + std::to_string(n));
    }
    const int b = n / 2 - 1;
    const long r2 = static_cast<long>(n / 2) * (n / 2);
    const int width = 2 * b + 1;
    lookup_.assign(static_cast<std::size_t>(width) * width, -1);
    for (int k1 = -b; k1 <= b; ++k1) {
        for (int k2 = -b; k2 <= b; ++k2) {
            if (static_cast<long>(k1) * k1 + static_cast<long>(k2) * k2 <= r2) {
                lookup_[static_cast<std::size_t>(k1 + b) * width + (k2 + b)] = static_cast<long>(points_.size());
                points_.push_back({k1, k2});
            }
        }
    }
    mirror_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        mirror_[i] = static_cast<std::size_t>(index_of(-points_[i][0], -points_[i][1]));
    }
}

long DiskGrid::index_of(int k1, int k2) const noexcept {
    const int b = radius_bound();
    if (k1 < -b || k1 > b || k2 < -b || k2 > b) {
        return -1;
    }
    return lookup_[static_cast<std::size_t>(k1 + b) * (2 * b + 1) + (k2 + b)];
}

DiskGrid build_disk_grid(int n) { return DiskGrid(n); }

std::vector<Vec3> slice_points(const Rotation& rot, const DiskGrid& grid) {
    const double scale = 2.0 * std::numbers::pi / grid.n();
    std::vector<Vec3> out;
    out.reserve(grid.size());
    for (const auto& k : grid.points()) {
        out.push_back(rot.apply_transpose({scale * k[0], scale * k[1], 0.0}));
    }
    return out;
}

std::vector<Vec3> slice_points(std::span<const Rotation> rotations, const DiskGrid& grid) {
    std::vector<Vec3> out;
    out.reserve(rotations.size() * grid.size());
    for (const auto& r : rotations) {
        const auto pts = slice_points(r, grid);
        out.insert(out.end(), pts.begin(), pts.end());
    }
    return out;
}

double norm(const Vec3& v) noexcept { return std::sqrt(dot(v, v)); }
double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace firm
