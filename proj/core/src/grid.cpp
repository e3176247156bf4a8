#include "firm/grid.hpp"

#include <algorithm>
#include <cmath>

namespace firm {

ComplexGrid to_complex(const RealGrid& g) {
    ComplexGrid out(g.side());
    std::transform(g.data().begin(), g.data().end(), out.data().begin(), [](double v) { return cplx(v, 0.0); });
    return out;
}

RealGrid real_part(const ComplexGrid& g) {
    RealGrid out(g.side());
    std::transform(g.data().begin(), g.data().end(), out.data().begin(), [](const cplx& v) { return v.real(); });
    return out;
}

double norm(const RealGrid& g) {
    double s = 0.0;
    for (double v : g.data()) {
        s += v * v;
    }
    return std::sqrt(s);
}

double norm(const ComplexGrid& g) {
    double s = 0.0;
    for (const cplx& v : g.data()) {
        s += std::norm(v);
    }
    return std::sqrt(s);
}

double max_abs_imag(const ComplexGrid& g) {
    double m = 0.0;
    for (const cplx& v : g.data()) {
        m = std::max(m, std::abs(v.imag()));
    }
    return m;
}

void require_volume_side(int n) {
    if (n < 4 || n % 2 != 0) {
        throw std::invalid_argument("volume side must be even and at least 4, got " + std::to_string(n));
    }
}

Volume::Volume(int n, double pixel_size) : Volume(RealGrid(std::max(n, 1)), pixel_size) {}

Volume::Volume(RealGrid grid, double pixel_size) : grid_(std::move(grid)), pixel_size_(pixel_size) {
    require_volume_side(grid_.side());
    if (!(pixel_size > 0.0) || !std::isfinite(pixel_size)) {
        throw std::invalid_argument("pixel size must be positive");
    }
    for (double v : grid_.data()) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("volume contains non-finite values");
        }
    }
}

}  // namespace firm
