#include "firm/ctf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace firm {

void CtfParams::validate() const {
    if (!(defocus_um > 0.0)) throw std::invalid_argument("CTF defocus must be positive");
    if (!(cs_mm >= 0.0)) throw std::invalid_argument("CTF Cs must be non-negative");
    if (!(lambda_pm > 0.0)) throw std::invalid_argument("CTF wavelength must be positive");
    if (!(amplitude_contrast >= 0.0 && amplitude_contrast < 1.0)) {
        throw std::invalid_argument("CTF amplitude contrast must lie in [0, 1)");
    }
    if (!(b_factor > 0.0)) throw std::invalid_argument("CTF B-factor must be positive");
    if (!(pixel_size > 0.0)) throw std::invalid_argument("CTF pixel size must be positive");
}

std::vector<CtfParams> reference_ctf_groups(int groups, double pixel_size) {
    if (groups < 1) {
        throw std::invalid_argument("need at least one defocus group, got " + std::to_string(groups));
    }
    static constexpr double kDefocus[] = {1.4, 1.75, 2.0};
    std::vector<CtfParams> out(static_cast<std::size_t>(groups));
    for (int g = 0; g < groups; ++g) {
        out[g].pixel_size = pixel_size;
        if (groups <= 3) {
            out[g].defocus_um = kDefocus[g];
        } else {
            out[g].defocus_um = 1.4 + 0.6 * g / (groups - 1);
        }
    }
    return out;
}

double ctf_eval(const CtfParams& p, double r) {
    if (!(r >= 0.0)) {
        throw std::invalid_argument("CTF frequency must be non-negative");
    }
    const double defocus = p.defocus_um * 1e4;  // Å
    const double lambda = p.lambda_pm * 1e-2;   // Å
    const double cs = p.cs_mm * 1e7;            // Å
    const double r2 = r * r;
    const double phase = -std::numbers::pi * (defocus * r2 - cs * lambda * lambda * lambda * r2 * r2 / 2.0) -
                         p.amplitude_contrast;
    const double e = r / (2.0 * p.b_factor);
    return std::sin(phase) * std::exp(-e * e);
}

std::vector<double> ctf_on_disk(const CtfParams& params, const DiskGrid& grid) {
    const double unit = 1.0 / (grid.n() * params.pixel_size);
    std::vector<double> out;
    out.reserve(grid.size());
    for (const auto& k : grid.points()) {
        const double radius = std::sqrt(static_cast<double>(k[0] * k[0] + k[1] * k[1]));
        out.push_back(ctf_eval(params, radius * unit));
    }
    return out;
}

}  // namespace firm
