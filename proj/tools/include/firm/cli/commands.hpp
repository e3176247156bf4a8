#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "firm/ctf.hpp"
#include "firm/geometry.hpp"

namespace firm::cli {

/// Bad input: flags, manifests, shapes, failed checks. Exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct Manifest {
    int n = 0;
    int m = 0;
    double pixel_size = 0.0;
    double tilt_deg = 0.0;
    double snr = 0.0;
    std::uint64_t seed = 0;
    double nufft_eps = 1e-6;
    std::vector<EulerZyz> euler;
    std::vector<int> defocus_group;
    std::vector<CtfParams> ctf;
    std::string images_file = "images.f32";
    std::string truth_file = "truth.f32";

    [[nodiscard]] nlohmann::json to_json() const;
    static Manifest from_json(const nlohmann::json& j);
    /// Array lengths, group ids and parameter ranges.
    void validate() const;
};

Manifest load_manifest(const std::filesystem::path& dataset_dir);

struct SimulateOptions {
    int n = 32;
    int m = 500;
    double tilt_deg = 60.0;
    double snr = 1.0;
    int groups = 3;
    std::uint64_t seed = 0;
    double pixel_size = 3.36;
    double nufft_eps = 1e-6;
    std::filesystem::path out;
};

void cmd_simulate(const SimulateOptions& opts);

struct ReconstructOptions {
    std::filesystem::path dataset;
    int iters = 30;
    double nufft_eps = 1e-6;
    std::optional<std::filesystem::path> kernel_cache;
    int residual_every = 0;
    std::filesystem::path out;
};

struct ReconstructTiming {
    double setup = 0.0;
    double fft_images = 0.0;
    double backprojection = 0.0;
    double kernel = 0.0;
    bool kernel_cache_hit = false;
    double min_spectrum = 0.0;
    int cg_iterations = 0;
    double cg_total = 0.0;
    double total = 0.0;
};

ReconstructTiming cmd_reconstruct(const ReconstructOptions& opts);

struct EvaluateOptions {
    std::filesystem::path recon;
    std::filesystem::path truth;
    std::optional<double> tilt_deg;
    double pixel_size = 3.36;
    std::string out_prefix;
};

void cmd_evaluate(const EvaluateOptions& opts);

struct CheckOptions {
    int n = 16;
    int m = 8;
    std::uint64_t seed = 0;
    double nufft_eps = 1e-6;
};

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    /// Informational entries are reported but do not affect the exit code.
    bool gated = true;
};

std::vector<CheckResult> run_checks(const CheckOptions& opts);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace firm::cli
