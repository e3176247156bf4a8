#include "firm/nufft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fft.hpp"

namespace firm::nufft {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxDirectSide = 32;
constexpr std::size_t kMaxDirectPoints = 10000;

int wrap(long i, int n) noexcept {
    const long r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

int max_threads() noexcept {
#ifdef _OPENMP
    return std::max(1, omp_get_max_threads());
#else
    return 1;
#endif
}

// Per-point gridding footprint along one axis.
struct Footprint {
    long start;     // first fine-grid cell, unwrapped
    double offset;  // start - position, in (-w/2, -w/2 + 1]
};

Footprint footprint(double p, int fine, int width) noexcept {
    const double pos = p * fine / kTwoPi;
    const long start = static_cast<long>(std::ceil(pos - 0.5 * width));
    return {start, static_cast<double>(start) - pos};
}

// 1/φ̂(n / fine) for n over the centered range of an output side.
std::vector<double> deconvolution(const Plan& plan, int side, int fine) {
    std::vector<double> d(static_cast<std::size_t>(side));
    const int lo = -(side / 2);
    for (int i = 0; i < side; ++i) {
        d[i] = 1.0 / plan.kernel_transform(static_cast<double>(lo + i) / fine);
    }
    return d;
}

}  // namespace

double bessel_i0(double x) noexcept {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

int kernel_width_for(double accuracy) {
    return static_cast<int>(std::ceil(-std::log10(accuracy) - 1e-9)) + 2;
}

Plan::Plan(int grid_side, std::vector<Vec3> points, double accuracy)
    : grid_side_(grid_side), points_(std::move(points)), accuracy_(accuracy) {
    if (grid_side < 2) {
        throw std::invalid_argument("NUFFT grid side must be at least 2, got " + std::to_string(grid_side));
    }
    if (!(accuracy >= 1e-12 && accuracy <= 1e-2)) {
        throw std::invalid_argument("NUFFT accuracy must lie in [1e-12, 1e-2]");
    }
    constexpr double kLimit = std::numbers::pi * (1.0 + 1e-12);
    for (const auto& p : points_) {
        for (double c : p) {
            if (!(std::abs(c) <= kLimit)) {
                throw std::invalid_argument("NUFFT point coordinate outside [-pi, pi]");
            }
        }
    }
    width_ = kernel_width_for(accuracy);
    beta_ = std::numbers::pi * width_ * (1.0 - 1.0 / (2.0 * oversampling_));
}

double Plan::kernel(double t) const noexcept {
    const double s = 2.0 * t / width_;
    if (std::abs(s) >= 1.0) {
        return 0.0;
    }
    return bessel_i0(beta_ * std::sqrt(1.0 - s * s));
}

double Plan::kernel_transform(double u) const noexcept {
    const double a = std::numbers::pi * width_ * u;
    const double d = beta_ * beta_ - a * a;
    if (d > 0.0) {
        const double s = std::sqrt(d);
        return width_ * std::sinh(s) / s;
    }
    if (d < 0.0) {
        const double s = std::sqrt(-d);
        return width_ * std::sin(s) / s;
    }
    return static_cast<double>(width_);
}

std::vector<cplx> Plan::type2(const ComplexGrid& grid) const {
    if (grid.side() != grid_side_) {
        throw std::invalid_argument("type-2 NUFFT grid side " + std::to_string(grid.side()) + " does not match plan side " +
                                    std::to_string(grid_side_));
    }
    const int side = grid_side_;
    const int fine = static_cast<int>(oversampling_ * side);
    const int w = width_;
    const auto d = deconvolution(*this, side, fine);

    detail::Fft3 fft(fine);
    fft.zero();
    cplx* buf = fft.data();
    const int lo = grid.lo();
    for (int z = 0; z < side; ++z) {
        for (int y = 0; y < side; ++y) {
            const double dyz = d[y] * d[z];
            for (int x = 0; x < side; ++x) {
                buf[fft.at(lo + x, lo + y, lo + z)] = grid(lo + x, lo + y, lo + z) * (d[x] * dyz);
            }
        }
    }
    fft.forward();

    std::vector<cplx> out(points_.size());
    const auto count = static_cast<long>(points_.size());
#pragma omp parallel
    {
        std::vector<double> wx(w), wy(w), wz(w);
        std::vector<int> ix(w), iy(w), iz(w);
#pragma omp for schedule(static)
        for (long j = 0; j < count; ++j) {
            const auto& p = points_[j];
            const Footprint fx = footprint(p[0], fine, w);
            const Footprint fy = footprint(p[1], fine, w);
            const Footprint fz = footprint(p[2], fine, w);
            for (int t = 0; t < w; ++t) {
                wx[t] = kernel(fx.offset + t);
                wy[t] = kernel(fy.offset + t);
                wz[t] = kernel(fz.offset + t);
                ix[t] = wrap(fx.start + t, fine);
                iy[t] = wrap(fy.start + t, fine);
                iz[t] = wrap(fz.start + t, fine);
            }
            cplx acc{};
            for (int tz = 0; tz < w; ++tz) {
                cplx plane{};
                for (int ty = 0; ty < w; ++ty) {
                    const cplx* row = buf + (static_cast<std::size_t>(iz[tz]) * fine + iy[ty]) * fine;
                    cplx line{};
                    for (int tx = 0; tx < w; ++tx) {
                        line += row[ix[tx]] * wx[tx];
                    }
                    plane += line * wy[ty];
                }
                acc += plane * wz[tz];
            }
            out[j] = acc;
        }
    }
    return out;
}

ComplexGrid Plan::type1(std::span<const cplx> values, int out_side) const {
    if (values.size() != points_.size()) {
        throw std::invalid_argument("type-1 NUFFT expects one value per point");
    }
    if (out_side != grid_side_ && out_side != 2 * grid_side_) {
        throw std::invalid_argument("type-1 NUFFT output side must be N or 2N");
    }
    return type1_impl(values, out_side);
}

ComplexGrid Plan::type1_impl(std::span<const cplx> values, int out_side) const {
    const int side = out_side;
    const int fine = static_cast<int>(oversampling_ * side);
    const int w = width_;
    const std::size_t count = points_.size();

    // Bucket points by the first fine z plane they touch; stable, so every
    // fine cell receives its contributions in (plane, point index) order no
    // matter how planes are split between threads.
    std::vector<std::size_t> bucket_start(static_cast<std::size_t>(fine) + 1, 0);
    std::vector<int> bucket_of(count);
    for (std::size_t j = 0; j < count; ++j) {
        bucket_of[j] = wrap(footprint(points_[j][2], fine, w).start, fine);
        ++bucket_start[bucket_of[j] + 1];
    }
    for (int b = 0; b < fine; ++b) {
        bucket_start[b + 1] += bucket_start[b];
    }
    std::vector<std::size_t> order(count);
    {
        std::vector<std::size_t> fill(bucket_start.begin(), bucket_start.end() - 1);
        for (std::size_t j = 0; j < count; ++j) {
            order[fill[bucket_of[j]]++] = j;
        }
    }

    detail::Fft3 fft(fine);
    fft.zero();
    cplx* buf = fft.data();

    const int slabs = std::min(fine, max_threads());
#pragma omp parallel
    {
        std::vector<double> wx(w), wy(w);
        std::vector<int> ix(w), iy(w);
#pragma omp for schedule(static, 1)
        for (int slab = 0; slab < slabs; ++slab) {
            const int z0 = static_cast<int>(static_cast<long>(fine) * slab / slabs);
            const int z1 = static_cast<int>(static_cast<long>(fine) * (slab + 1) / slabs);
            for (long s = static_cast<long>(z0) - w + 1; s < z1; ++s) {
                const int b = wrap(s, fine);
                for (std::size_t q = bucket_start[b]; q < bucket_start[b + 1]; ++q) {
                    const std::size_t j = order[q];
                    const auto& p = points_[j];
                    const Footprint fx = footprint(p[0], fine, w);
                    const Footprint fy = footprint(p[1], fine, w);
                    const Footprint fz = footprint(p[2], fine, w);
                    for (int t = 0; t < w; ++t) {
                        wx[t] = kernel(fx.offset + t);
                        wy[t] = kernel(fy.offset + t);
                        ix[t] = wrap(fx.start + t, fine);
                        iy[t] = wrap(fy.start + t, fine);
                    }
                    const int t_lo = static_cast<int>(std::max<long>(0, z0 - s));
                    const int t_hi = static_cast<int>(std::min<long>(w - 1, z1 - 1 - s));
                    for (int tz = t_lo; tz <= t_hi; ++tz) {
                        const int z = static_cast<int>(s + tz);
                        const cplx vz = values[j] * kernel(fz.offset + tz);
                        for (int ty = 0; ty < w; ++ty) {
                            cplx* row = buf + (static_cast<std::size_t>(z) * fine + iy[ty]) * fine;
                            const cplx vyz = vz * wy[ty];
                            for (int tx = 0; tx < w; ++tx) {
                                row[ix[tx]] += vyz * wx[tx];
                            }
                        }
                    }
                }
            }
        }
    }
    fft.backward();

    const auto d = deconvolution(*this, side, fine);
    ComplexGrid out(side);
    const int lo = out.lo();
    for (int z = 0; z < side; ++z) {
        for (int y = 0; y < side; ++y) {
            const double dyz = d[y] * d[z];
            for (int x = 0; x < side; ++x) {
                out(lo + x, lo + y, lo + z) = buf[fft.at(lo + x, lo + y, lo + z)] * (d[x] * dyz);
            }
        }
    }
    return out;
}

std::vector<cplx> dft_direct_type2(std::span<const Vec3> points, const ComplexGrid& grid) {
    if (grid.side() > kMaxDirectSide || points.size() > kMaxDirectPoints) {
        throw std::invalid_argument("direct DFT limited to side <= 32 and <= 10000 points");
    }
    const int side = grid.side();
    const int lo = grid.lo();
    std::vector<cplx> out(points.size());
    std::vector<cplx> ex(side), ey(side), ez(side);
    for (std::size_t j = 0; j < points.size(); ++j) {
        const auto& p = points[j];
        for (int i = 0; i < side; ++i) {
            ex[i] = std::polar(1.0, -(lo + i) * p[0]);
            ey[i] = std::polar(1.0, -(lo + i) * p[1]);
            ez[i] = std::polar(1.0, -(lo + i) * p[2]);
        }
        cplx acc{};
        for (int z = 0; z < side; ++z) {
            for (int y = 0; y < side; ++y) {
                const cplx eyz = ey[y] * ez[z];
                for (int x = 0; x < side; ++x) {
                    acc += grid(lo + x, lo + y, lo + z) * (ex[x] * eyz);
                }
            }
        }
        out[j] = acc;
    }
    return out;
}

ComplexGrid dft_direct_type1(std::span<const Vec3> points, std::span<const cplx> values, int out_side) {
    if (out_side > kMaxDirectSide || points.size() > kMaxDirectPoints) {
        throw std::invalid_argument("direct DFT limited to side <= 32 and <= 10000 points");
    }
    if (values.size() != points.size()) {
        throw std::invalid_argument("direct type-1 DFT expects one value per point");
    }
    ComplexGrid out(out_side);
    const int lo = out.lo();
    std::vector<cplx> ex(out_side), ey(out_side), ez(out_side);
    for (std::size_t j = 0; j < points.size(); ++j) {
        const auto& p = points[j];
        for (int i = 0; i < out_side; ++i) {
            ex[i] = std::polar(1.0, (lo + i) * p[0]);
            ey[i] = std::polar(1.0, (lo + i) * p[1]);
            ez[i] = std::polar(1.0, (lo + i) * p[2]);
        }
        for (int z = 0; z < out_side; ++z) {
            for (int y = 0; y < out_side; ++y) {
                const cplx vyz = values[j] * ey[y] * ez[z];
                for (int x = 0; x < out_side; ++x) {
                    out(lo + x, lo + y, lo + z) += vyz * ex[x];
                }
            }
        }
    }
    return out;
}

}  // namespace firm::nufft
