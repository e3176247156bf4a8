#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include <CLI11/CLI11.hpp>
#include <omp.h>

#include "firm/cli/commands.hpp"
#include "firm/solver.hpp"
#include "firm/toeplitz.hpp"

namespace firm::cli {

namespace {

double parse_snr(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf") {
        return std::numeric_limits<double>::infinity();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !(v > 0.0)) {
        throw ValidationError("--snr must be a positive number or inf, got '" + text + "'");
    }
    return v;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Fourier-based iterative reconstruction from projection images"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: all cores)")
        ->check(CLI::NonNegativeNumber)
        ->configurable(false);
    app.fallthrough();

    SimulateOptions sim;
    std::string snr_text = "1";
    auto* simulate = app.add_subcommand("simulate", "Write a synthetic conical-tilt dataset");
    simulate->add_option("--n", sim.n, "Volume and image side")->capture_default_str();
    simulate->add_option("--m", sim.m, "Number of images")->capture_default_str();
    simulate->add_option("--tilt", sim.tilt_deg, "Conical tilt angle in degrees")->capture_default_str();
    simulate->add_option("--snr", snr_text, "Signal-to-noise ratio, or inf")->capture_default_str();
    simulate->add_option("--groups", sim.groups, "Defocus groups (0 disables the CTF)")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    simulate->add_option("--pixel-size", sim.pixel_size, "Pixel size in Angstrom")->capture_default_str();
    simulate->add_option("--nufft-eps", sim.nufft_eps, "NUFFT accuracy")->capture_default_str();
    simulate->add_option("--out", sim.out, "Output dataset directory")->required();

    ReconstructOptions rec;
    std::string cache;
    auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct a volume from a dataset");
    reconstruct->add_option("--dataset", rec.dataset, "Dataset directory")->required();
    reconstruct->add_option("--iters", rec.iters, "CG iterations")->capture_default_str();
    reconstruct->add_option("--nufft-eps", rec.nufft_eps, "NUFFT accuracy")->capture_default_str();
    reconstruct->add_option("--kernel-cache", cache, "Kernel cache file");
    reconstruct->add_option("--residual-every", rec.residual_every, "Record the data residual every k iterations")
        ->capture_default_str();
    reconstruct->add_option("--out", rec.out, "Output directory")->required();

    EvaluateOptions ev;
    double tilt = 0.0;
    auto* evaluate = app.add_subcommand("evaluate", "Fourier shell correlation against a reference");
    evaluate->add_option("--recon", ev.recon, "Reconstructed volume (float32)")->required();
    evaluate->add_option("--truth", ev.truth, "Reference volume (float32)")->required();
    auto* tilt_opt = evaluate->add_option("--tilt", tilt, "Tilt angle; enables the missing-cone curves");
    evaluate->add_option("--pixel-size", ev.pixel_size, "Pixel size in Angstrom")->capture_default_str();
    evaluate->add_option("--out-prefix", ev.out_prefix, "Prefix for the CSV files")->required();

    CheckOptions chk;
    auto* check = app.add_subcommand("check", "Run operator self-checks");
    check->add_option("--n", chk.n, "Volume side")->capture_default_str();
    check->add_option("--m", chk.m, "Number of views")->capture_default_str();
    check->add_option("--seed", chk.seed, "Random seed")->capture_default_str();
    check->add_option("--nufft-eps", chk.nufft_eps, "NUFFT accuracy")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }
    if (threads > 0) {
        omp_set_num_threads(threads);
    }

    try {
        if (simulate->parsed()) {
            sim.snr = parse_snr(snr_text);
            cmd_simulate(sim);
        } else if (reconstruct->parsed()) {
            if (!cache.empty()) {
                rec.kernel_cache = cache;
            }
            const auto t = cmd_reconstruct(rec);
            if (t.min_spectrum < -1e-6) {
                std::fprintf(stderr, "warning: circulant spectrum minimum is %.3e of its maximum\n", t.min_spectrum);
            }
            std::printf("kernel %.3fs%s, %d CG iterations in %.3fs\n", t.kernel,
                        t.kernel_cache_hit ? " (cache hit)" : "", t.cg_iterations, t.cg_total);
        } else if (evaluate->parsed()) {
            if (*tilt_opt) {
                ev.tilt_deg = tilt;
            }
            cmd_evaluate(ev);
        } else if (check->parsed()) {
            bool ok = true;
            for (const auto& r : run_checks(chk)) {
                const char* tag = r.gated ? (r.passed ? "PASS" : "FAIL") : "INFO";
                std::printf("%s %-28s measured %.3e  tolerance %.1e\n", tag, r.name.c_str(), r.measured, r.tolerance);
                ok = ok && (r.passed || !r.gated);
            }
            return ok ? kExitOk : kExitValidation;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const KernelCacheMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure at iteration " << e.iteration() << ": " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace firm::cli
