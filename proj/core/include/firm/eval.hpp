#pragma once

#include <optional>
#include <vector>

#include "firm/grid.hpp"

namespace firm::eval {

/// Offset in the shell predicate 0.5 + (i-1) + ε ≤ ‖j‖ < 0.5 + i + ε.
inline constexpr double kShellEpsilon = 1e-4;

struct FscShell {
    int index = 0;
    double frequency = 0.0;  // i / (N · pixel size), 1/Å
    std::optional<double> fsc;
    long voxels = 0;
    double numerator = 0.0;
    double power1 = 0.0;
    double power2 = 0.0;
};

struct FscCurve {
    std::vector<FscShell> shells;  // indices 1 … N/2 - 1
};

/// Frequencies whose angle to the z axis is below the half angle (or above
/// 180° minus it). j = 0 is never inside.
class ConeMask {
public:
    ConeMask(int n, double half_angle_deg);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double half_angle_deg() const noexcept { return half_angle_deg_; }
    [[nodiscard]] bool inside(int x, int y, int z) const noexcept { return inside_(x, y, z) != 0; }
    [[nodiscard]] long count() const noexcept;

private:
    int n_;
    double half_angle_deg_;
    Grid3<unsigned char> inside_;
};

/// Cone left empty by a conical tilt series: half angle 90° - tilt.
ConeMask missing_cone_mask(int n, double tilt_deg);

enum class MaskMode { exclude, within };

/// Shell index of ‖j‖ under the exact predicate, 0 when outside 1 … N/2 - 1.
int shell_of(double radius, int n) noexcept;

FscCurve fsc(const Volume& v1, const Volume& v2);
FscCurve fsc(const Volume& v1, const Volume& v2, const ConeMask& mask, MaskMode mode);

struct PartitionedFsc {
    FscCurve all;
    FscCurve exclude;
    FscCurve within;
};

/// One pass producing the unmasked curve and both masked curves; the unmasked
/// sums are the sums of the two masked ones.
PartitionedFsc fsc_partitioned(const Volume& v1, const Volume& v2, const ConeMask& mask);

}  // namespace firm::eval
