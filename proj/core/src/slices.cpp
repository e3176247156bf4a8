#include "firm/slices.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace firm {

ImageStack::ImageStack(int n, int m) : ImageStack(n, m, std::vector<double>(static_cast<std::size_t>(n) * n * m)) {}

ImageStack::ImageStack(int n, int m, std::vector<double> pixels) : n_(n), m_(m), pixels_(std::move(pixels)) {
    if (n < 1 || m < 0) {
        throw std::invalid_argument("image stack dimensions must be positive");
    }
    if (pixels_.size() != static_cast<std::size_t>(n) * n * m) {
        throw std::invalid_argument("image stack holds " + std::to_string(pixels_.size()) + " pixels, expected " +
                                    std::to_string(static_cast<std::size_t>(n) * n * m));
    }
}

std::span<double> ImageStack::image(int i) noexcept {
    const auto len = static_cast<std::size_t>(n_) * n_;
    return std::span<double>(pixels_).subspan(static_cast<std::size_t>(i) * len, len);
}

std::span<const double> ImageStack::image(int i) const noexcept {
    const auto len = static_cast<std::size_t>(n_) * n_;
    return std::span<const double>(pixels_).subspan(static_cast<std::size_t>(i) * len, len);
}

void SliceStack::validate() const {
    if (m < 1) throw std::invalid_argument("slice stack needs at least one image");
    if (values.size() != grid.size() * static_cast<std::size_t>(m)) {
        throw std::invalid_argument("slice stack values do not match P x M");
    }
    if (rotations.size() != static_cast<std::size_t>(m) || defocus_group.size() != static_cast<std::size_t>(m)) {
        throw std::invalid_argument("slice stack geometry arrays must have M entries");
    }
    for (int g : defocus_group) {
        if (g < 0 || static_cast<std::size_t>(g) >= ctfs.size()) {
            throw std::invalid_argument("defocus group id " + std::to_string(g) + " has no CTF");
        }
    }
    for (const auto& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::invalid_argument("slice stack contains non-finite values");
        }
    }
}

}  // namespace firm
