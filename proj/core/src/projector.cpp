#include "firm/projector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace firm {

namespace {

std::vector<double> build_weights(const DiskGrid& grid, std::size_t m, const std::optional<CtfAssignment>& ctf) {
    std::vector<double> w(grid.size() * m, 1.0);
    if (!ctf) {
        return w;
    }
    if (ctf->image_group.size() != m) {
        throw std::invalid_argument("CTF assignment needs one group id per image");
    }
    std::vector<std::vector<double>> per_group;
    per_group.reserve(ctf->groups.size());
    for (const auto& params : ctf->groups) {
        params.validate();
        per_group.push_back(ctf_on_disk(params, grid));
    }
    for (std::size_t i = 0; i < m; ++i) {
        const int g = ctf->image_group[i];
        if (g < 0 || static_cast<std::size_t>(g) >= per_group.size()) {
            throw std::invalid_argument("image " + std::to_string(i) + " refers to missing defocus group " +
                                        std::to_string(g));
        }
        std::copy(per_group[g].begin(), per_group[g].end(), w.begin() + static_cast<long>(i * grid.size()));
    }
    return w;
}

}  // namespace

ProjectionOperator::ProjectionOperator(int n, std::vector<Rotation> rotations, std::optional<CtfAssignment> ctf,
                                       double nufft_accuracy)
    : grid_(n),
      rotations_(std::move(rotations)),
      ctf_(std::move(ctf)),
      weights_(build_weights(grid_, rotations_.size(), ctf_)),
      plan_(n, slice_points(rotations_, grid_), nufft_accuracy) {
    if (rotations_.empty()) {
        throw std::invalid_argument("projection operator needs at least one rotation");
    }
}

std::vector<cplx> ProjectionOperator::forward(const ComplexGrid& v) const {
    if (v.side() != n()) {
        throw std::invalid_argument("forward projection: volume side " + std::to_string(v.side()) +
                                    " does not match operator side " + std::to_string(n()));
    }
    auto out = plan_.type2(v);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] *= weights_[i];
    }
    return out;
}

std::vector<cplx> ProjectionOperator::forward(const Volume& v) const { return forward(to_complex(v.grid())); }

ComplexGrid ProjectionOperator::adjoint(std::span<const cplx> g) const {
    if (g.size() != weights_.size()) {
        throw std::invalid_argument("back-projection expects P x M slice values");
    }
    std::vector<cplx> weighted(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        weighted[i] = g[i] * weights_[i];
    }
    return plan_.type1(weighted, n());
}

std::vector<cplx> slices_from_images(const ImageStack& images, const DiskGrid& grid) {
    const int n = images.n();
    if (n != grid.n()) {
        throw std::invalid_argument("image side " + std::to_string(n) + " does not match disk grid side " +
                                    std::to_string(grid.n()));
    }
    const int m = images.m();
    const std::size_t p = grid.size();
    const int half = n / 2 + 1;
    std::vector<cplx> out(p * static_cast<std::size_t>(m));
    const auto wrap = [n](int i) { return i < 0 ? i + n : i; };

#pragma omp parallel
    {
        detail::Fft2Real fft(n);
#pragma omp for schedule(static)
        for (int i = 0; i < m; ++i) {
            // Centered pixel x lands at x mod N so the FFT yields the centered DFT.
            double* in = fft.input();
            for (int y = -n / 2; y < n / 2; ++y) {
                for (int x = -n / 2; x < n / 2; ++x) {
                    in[static_cast<std::size_t>(wrap(y)) * n + wrap(x)] = images.at(i, x, y);
                }
            }
            fft.execute();
            const cplx* f = fft.output();
            cplx* dst = out.data() + static_cast<std::size_t>(i) * p;
            // Read the half with k1 > 0 (or k1 = 0, k2 ≥ 0); mirror the rest.
            for (std::size_t j = 0; j < p; ++j) {
                const auto [k1, k2] = grid[j];
                if (k1 > 0 || (k1 == 0 && k2 >= 0)) {
                    dst[j] = f[static_cast<std::size_t>(wrap(k2)) * half + k1];
                }
            }
            for (std::size_t j = 0; j < p; ++j) {
                const auto [k1, k2] = grid[j];
                if (k1 == 0 && k2 == 0) {
                    dst[j] = cplx(dst[j].real(), 0.0);
                } else if (!(k1 > 0 || (k1 == 0 && k2 >= 0))) {
                    dst[j] = std::conj(dst[grid.mirror(j)]);
                }
            }
        }
    }
    return out;
}

ImageStack images_from_slices(std::span<const cplx> values, const DiskGrid& grid, int m) {
    const int n = grid.n();
    const std::size_t p = grid.size();
    if (values.size() != p * static_cast<std::size_t>(m)) {
        throw std::invalid_argument("slice values do not match P x M");
    }
    const int half = n / 2 + 1;
    const double scale = 1.0 / (static_cast<double>(n) * n);
    ImageStack images(n, m);
    const auto wrap = [n](int i) { return i < 0 ? i + n : i; };

#pragma omp parallel
    {
        detail::Fft2RealInverse fft(n);
#pragma omp for schedule(static)
        for (int i = 0; i < m; ++i) {
            cplx* in = fft.input();
            std::fill_n(in, static_cast<std::size_t>(n) * half, cplx{});
            const cplx* src = values.data() + static_cast<std::size_t>(i) * p;
            // Hermitian part of the slice: the real part of the full inverse DFT.
            for (std::size_t j = 0; j < p; ++j) {
                const auto [k1, k2] = grid[j];
                if (k1 < 0) {
                    continue;
                }
                const cplx sym = 0.5 * (src[j] + std::conj(src[grid.mirror(j)]));
                in[static_cast<std::size_t>(wrap(k2)) * half + k1] = sym;
            }
            fft.execute();
            const double* f = fft.output();
            for (int y = -n / 2; y < n / 2; ++y) {
                for (int x = -n / 2; x < n / 2; ++x) {
                    images.at(i, x, y) = f[static_cast<std::size_t>(wrap(y)) * n + wrap(x)] * scale;
                }
            }
        }
    }
    return images;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("inner product of arrays with different lengths");
    }
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * std::conj(b[i]);
    }
    return s;
}

double norm(std::span<const cplx> a) {
    double s = 0.0;
    for (const auto& v : a) {
        s += std::norm(v);
    }
    return std::sqrt(s);
}

}  // namespace firm
