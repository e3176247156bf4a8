#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firm/grid.hpp"
#include "firm/projector.hpp"

namespace firm {

/// Raised when kernel values are not Hermitian enough to give a real spectrum.
class InconsistentKernel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a cached kernel was built for a different geometry.
class KernelCacheMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// How Ker(n), -N < n < N, is evaluated by NUFFT.
enum class KernelMethod {
    /// Four type-1 transforms onto N-sized blocks with modulated weights; the
    /// other four blocks follow from Ker(-n) = conj(Ker(n)). Memory stays at
    /// back-projection size.
    octant_blocks,
    /// One type-1 transform onto the 2N grid.
    doubled_grid,
};

/// Identifies the geometry a kernel was built for.
struct KernelMetadata {
    int n = 0;
    int m = 0;
    double nufft_accuracy = 0.0;
    std::uint64_t geometry_hash = 0;
    bool with_ctf = false;

    friend bool operator==(const KernelMetadata&, const KernelMetadata&) = default;
};

KernelMetadata describe(const ProjectionOperator& op);

/// Ker(n) = Σ_m Σ_k exp(i⟨n, R_mᵀω_k⟩) h_m(‖ω_k‖)² on the side-(2N-1) grid.
ComplexGrid compute_kernel(const ProjectionOperator& op, KernelMethod method = KernelMethod::octant_blocks);

/// Embedding index c(i) for i = 1 … 2N, 1-based kernel slots
/// (slot c holds Ker(c - 1)).
std::vector<int> embedding_index(int n);

struct KernelDiagnostics {
    double max_hermitian_error = 0.0;  // relative to max|Ker|
    double max_spectrum_imag = 0.0;    // relative to max|spectrum|
    double min_spectrum = 0.0;         // relative to max spectrum
    [[nodiscard]] bool semidefinite_warning() const noexcept { return min_spectrum < -1e-6; }
};

/// Circulant embedding of the Toeplitz operator A*A with its real spectrum.
class ToeplitzKernel {
public:
    /// Embeds kernel values (side 2N-1). padding_value, when given, replaces
    /// the value Ker(0) placed in the unused i = N+1 slot.
    static ToeplitzKernel embed(const ComplexGrid& kernel, KernelMetadata metadata = {},
                                std::optional<double> padding_value = std::nullopt);

    static ToeplitzKernel from_spectrum(int n, std::vector<double> spectrum, KernelMetadata metadata);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] std::span<const double> spectrum() const noexcept { return spectrum_; }
    [[nodiscard]] const KernelMetadata& metadata() const noexcept { return metadata_; }
    [[nodiscard]] const KernelDiagnostics& diagnostics() const noexcept { return diagnostics_; }

    /// A*A v through zero padding to (2N)³ and two FFTs.
    [[nodiscard]] ComplexGrid apply(const ComplexGrid& v) const;
    /// Real part of apply() for real input.
    [[nodiscard]] RealGrid apply(const RealGrid& v) const;

    /// Returns a copy with every spectrum entry multiplied by factor.
    [[nodiscard]] ToeplitzKernel scaled(double factor) const;

private:
    int n_ = 0;
    std::vector<double> spectrum_;
    KernelMetadata metadata_;
    KernelDiagnostics diagnostics_;
};

/// Builds and embeds in one step.
ToeplitzKernel build_toeplitz_kernel(const ProjectionOperator& op, KernelMethod method = KernelMethod::octant_blocks);

/// Writes <path> (spectrum, float64 little endian) and <path>.json (metadata).
void save_kernel(const std::filesystem::path& path, const ToeplitzKernel& kernel);

/// Loads a cached kernel; nullopt when the files are missing, KernelCacheMismatch
/// when the stored metadata differs from expected.
std::optional<ToeplitzKernel> load_kernel(const std::filesystem::path& path, const KernelMetadata& expected);

}  // namespace firm
