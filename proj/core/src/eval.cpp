#include "firm/eval.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace firm::eval {

namespace {

struct Sums {
    double num = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    long voxels = 0;

    Sums& operator+=(const Sums& o) noexcept {
        num += o.num;
        p1 += o.p1;
        p2 += o.p2;
        voxels += o.voxels;
        return *this;
    }
};

FscCurve to_curve(const std::vector<Sums>& sums, int n, double pixel_size) {
    FscCurve curve;
    for (int i = 1; i < n / 2; ++i) {
        const Sums& s = sums[static_cast<std::size_t>(i)];
        FscShell shell;
        shell.index = i;
        shell.frequency = i / (n * pixel_size);
        shell.voxels = s.voxels;
        shell.numerator = s.num;
        shell.power1 = s.p1;
        shell.power2 = s.p2;
        const double denom = std::sqrt(s.p1 * s.p2);
        if (s.voxels > 0 && denom > 0.0) {
            shell.fsc = s.num / denom;
        }
        curve.shells.push_back(shell);
    }
    return curve;
}

void require_compatible(const Volume& v1, const Volume& v2) {
    if (v1.n() != v2.n()) {
        throw std::invalid_argument("FSC of volumes with sides " + std::to_string(v1.n()) + " and " +
                                    std::to_string(v2.n()));
    }
    if (std::abs(v1.pixel_size() - v2.pixel_size()) > 1e-9 * v1.pixel_size()) {
        throw std::invalid_argument("FSC of volumes with different pixel sizes");
    }
}

// Centered DFT F(j) = Σ_n V(n) exp(-2πi⟨j, n⟩/N), stored at wrapped j.
std::vector<cplx> volume_dft(const Volume& v) {
    const int n = v.n();
    detail::Fft3 fft(n);
    cplx* buf = fft.data();
    const RealGrid& g = v.grid();
    for (int z = g.lo(); z <= g.hi(); ++z) {
        for (int y = g.lo(); y <= g.hi(); ++y) {
            for (int x = g.lo(); x <= g.hi(); ++x) {
                buf[fft.at(x, y, z)] = g(x, y, z);
            }
        }
    }
    fft.forward();
    return {buf, buf + fft.size()};
}

// Accumulates per-shell sums, split by mask membership when a mask is given.
void accumulate(const Volume& v1, const Volume& v2, const ConeMask* mask, std::vector<Sums>& inside,
                std::vector<Sums>& outside) {
    const int n = v1.n();
    const auto f1 = volume_dft(v1);
    const auto f2 = volume_dft(v2);
    inside.assign(static_cast<std::size_t>(n / 2), Sums{});
    outside.assign(static_cast<std::size_t>(n / 2), Sums{});
    const auto wrap = [n](int i) { return static_cast<std::size_t>(i < 0 ? i + n : i); };
    const auto un = static_cast<std::size_t>(n);
    for (int z = -n / 2; z < n / 2; ++z) {
        for (int y = -n / 2; y < n / 2; ++y) {
            for (int x = -n / 2; x < n / 2; ++x) {
                const int shell = shell_of(std::sqrt(static_cast<double>(x * x + y * y + z * z)), n);
                if (shell == 0) {
                    continue;
                }
                const std::size_t at = (wrap(z) * un + wrap(y)) * un + wrap(x);
                const cplx a = f1[at], b = f2[at];
                Sums& s = (mask != nullptr && mask->inside(x, y, z)) ? inside[static_cast<std::size_t>(shell)]
                                                                      : outside[static_cast<std::size_t>(shell)];
                s.num += (a * std::conj(b)).real();
                s.p1 += std::norm(a);
                s.p2 += std::norm(b);
                s.voxels += 1;
            }
        }
    }
}

}  // namespace

ConeMask::ConeMask(int n, double half_angle_deg) : n_(n), half_angle_deg_(half_angle_deg), inside_(n, 0) {
    require_volume_side(n);
    if (!(half_angle_deg >= 0.0 && half_angle_deg <= 90.0)) {
        throw std::invalid_argument("cone half angle must lie in [0, 90] degrees");
    }
    const double c = std::cos(half_angle_deg * std::numbers::pi / 180.0);
    for (int z = inside_.lo(); z <= inside_.hi(); ++z) {
        for (int y = inside_.lo(); y <= inside_.hi(); ++y) {
            for (int x = inside_.lo(); x <= inside_.hi(); ++x) {
                const double r = std::sqrt(static_cast<double>(x * x + y * y + z * z));
                inside_(x, y, z) = (r > 0.0 && std::abs(z) > c * r) ? 1 : 0;
            }
        }
    }
}

long ConeMask::count() const noexcept {
    long c = 0;
    for (unsigned char v : inside_.data()) {
        c += v;
    }
    return c;
}

ConeMask missing_cone_mask(int n, double tilt_deg) {
    if (!(tilt_deg > 0.0 && tilt_deg < 90.0)) {
        throw std::invalid_argument("tilt must lie strictly between 0 and 90 degrees");
    }
    return ConeMask(n, 90.0 - tilt_deg);
}

int shell_of(double radius, int n) noexcept {
    if (!(radius >= 0.5 + kShellEpsilon)) {
        return 0;
    }
    int i = static_cast<int>(std::floor(radius - 0.5 - kShellEpsilon)) + 1;
    // Guard the floor against rounding at the boundaries.
    while (i > 1 && radius < 0.5 + (i - 1) + kShellEpsilon) {
        --i;
    }
    while (radius >= 0.5 + i + kShellEpsilon) {
        ++i;
    }
    return i < n / 2 ? i : 0;
}

FscCurve fsc(const Volume& v1, const Volume& v2) {
    require_compatible(v1, v2);
    std::vector<Sums> inside, outside;
    accumulate(v1, v2, nullptr, inside, outside);
    return to_curve(outside, v1.n(), v1.pixel_size());
}

FscCurve fsc(const Volume& v1, const Volume& v2, const ConeMask& mask, MaskMode mode) {
    const auto parts = fsc_partitioned(v1, v2, mask);
    return mode == MaskMode::exclude ? parts.exclude : parts.within;
}

PartitionedFsc fsc_partitioned(const Volume& v1, const Volume& v2, const ConeMask& mask) {
    require_compatible(v1, v2);
    if (mask.n() != v1.n()) {
        throw std::invalid_argument("cone mask side does not match the volumes");
    }
    std::vector<Sums> inside, outside;
    accumulate(v1, v2, &mask, inside, outside);
    std::vector<Sums> all = outside;
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] += inside[i];
    }
    const double px = v1.pixel_size();
    return {to_curve(all, v1.n(), px), to_curve(outside, v1.n(), px), to_curve(inside, v1.n(), px)};
}

}  // namespace firm::eval
