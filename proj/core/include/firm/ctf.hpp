#pragma once

#include <vector>

#include "firm/geometry.hpp"

namespace firm {

/// Isotropic contrast transfer function parameters.
///
/// Units follow the microscope conventions: defocus in μm, Cs in mm, λ in pm,
/// pixel size in Å. The B-factor enters the envelope exp(-(r / 2B)²) with r in
/// 1/Å, exactly as written, so very large B means no decay.
struct CtfParams {
    double defocus_um = 1.4;
    double cs_mm = 2.0;
    double lambda_pm = 2.51;
    double amplitude_contrast = 0.07;
    double b_factor = 100.0;
    double pixel_size = 3.36;

    void validate() const;
};

/// The three defocus groups used for the simulated experiments (1.4, 1.75, 2 μm).
std::vector<CtfParams> reference_ctf_groups(int groups, double pixel_size = 3.36);

/// sin(-π(Δf·r² - Cs·λ³·r⁴/2) - A) · exp(-(r / 2B)²), r in 1/Å.
double ctf_eval(const CtfParams& params, double r);

/// CTF at ‖k‖ / (N · pixel_size) for each disk point.
std::vector<double> ctf_on_disk(const CtfParams& params, const DiskGrid& grid);

}  // namespace firm
