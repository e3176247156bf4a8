// Runs the ten end-to-end acceptance criteria and prints one PASS/FAIL line each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <omp.h>

#include "../unit/oracles.hpp"
#include "firm/cli/commands.hpp"
#include "firm/eval.hpp"
#include "firm/io.hpp"
#include "firm/nufft.hpp"
#include "firm/projector.hpp"
#include "firm/sim.hpp"
#include "firm/solver.hpp"
#include "firm/toeplitz.hpp"

namespace fs = std::filesystem;
using namespace firm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const char* fmt, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += buf;
        if (!ok) {
            detail += " [x]";
            passed = false;
        }
    }
};

CtfAssignment reference_ctfs(int m, std::uint64_t seed) {
    return {reference_ctf_groups(3), sim::assign_defocus_groups(m, 3, seed)};
}

double dot(const RealGrid& a, const RealGrid& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a.data()[i] * b.data()[i];
    }
    return s;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "firm_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Volume read_volume(const fs::path& path, int n, double pixel_size) {
    return Volume(RealGrid(n, io::read_f32(path)), pixel_size);
}

Outcome c1_nufft() {
    Outcome o;
    std::mt19937_64 gen(101);
    const auto points = oracle::random_points(2000, gen);
    const auto grid = oracle::random_complex_grid(16, gen);
    const auto c = oracle::random_values(points.size(), gen);
    const nufft::Plan plan(16, points, 1e-6);
    const double e2 = oracle::relative_l2(plan.type2(grid), oracle::type2(points, grid));
    const double e1 = oracle::relative_l2(plan.type1(c), oracle::type1(points, c, 16));
    o.require(e2 <= 1e-6, "type2 rel err %.3g <= 1e-6", e2);
    o.require(e1 <= 1e-6, "type1 rel err %.3g <= 1e-6", e1);
    return o;
}

Outcome c2_adjoint() {
    Outcome o;
    std::mt19937_64 gen(102);
    const ProjectionOperator op(16, sim::random_rotations(8, 102), reference_ctfs(8, 102));
    double worst = 0.0;
    for (int probe = 0; probe < 20; ++probe) {
        const auto v = oracle::random_complex_grid(16, gen);
        const auto g = oracle::random_values(op.plan().point_count(), gen);
        const auto av = op.forward(v);
        const auto atg = op.adjoint(g);
        worst = std::max(worst, std::abs(inner(av, g) - inner(v.data(), atg.data())) / (norm(av) * norm(g)));
    }
    o.require(worst <= 1e-5, "max |<Av,g>-<v,A*g>|/(|Av||g|) %.3g <= 1e-5 over 20 probes", worst);
    return o;
}

Outcome c3_toeplitz() {
    Outcome o;
    std::mt19937_64 gen(103);
    double worst = 0.0;
    for (int n : {8, 16}) {
        for (int m : {4, 16}) {
            for (bool with_ctf : {false, true}) {
                std::optional<CtfAssignment> ctf;
                if (with_ctf) {
                    ctf = reference_ctfs(m, 103);
                }
                const ProjectionOperator op(n, sim::random_rotations(m, 103 + n + m), ctf);
                const auto kernel = build_toeplitz_kernel(op);
                const auto v = to_complex(oracle::random_real_grid(n, gen));
                worst = std::max(worst, oracle::relative_l2(kernel.apply(v), op.adjoint(op.forward(v))));
            }
        }
    }
    o.require(worst <= 1e-5, "max |Ker*V - A*AV|/|A*AV| %.3g <= 1e-5 over 8 configs", worst);
    return o;
}

Outcome c4_kernel() {
    Outcome o;
    const ProjectionOperator op(8, sim::random_rotations(4, 104), reference_ctfs(4, 104));
    const auto points = op.plan().points();
    const auto h = op.ctf_weights();
    ComplexGrid direct(15);
    double max_direct = 0.0;
    for (int z = -7; z <= 7; ++z) {
        for (int y = -7; y <= 7; ++y) {
            for (int x = -7; x <= 7; ++x) {
                cplx s{};
                for (std::size_t j = 0; j < points.size(); ++j) {
                    const double ph = x * points[j][0] + y * points[j][1] + z * points[j][2];
                    s += h[j] * h[j] * cplx(std::cos(ph), std::sin(ph));
                }
                direct(x, y, z) = s;
                max_direct = std::max(max_direct, std::abs(s));
            }
        }
    }
    const auto k = compute_kernel(op);
    const double err = oracle::relative_l2(k, direct);
    double herm = 0.0, max_k = 0.0;
    for (int z = -7; z <= 7; ++z) {
        for (int y = -7; y <= 7; ++y) {
            for (int x = -7; x <= 7; ++x) {
                herm = std::max(herm, std::abs(k(-x, -y, -z) - std::conj(k(x, y, z))));
                max_k = std::max(max_k, std::abs(k(x, y, z)));
            }
        }
    }
    const auto embedded = ToeplitzKernel::embed(k);
    const auto spec = embedded.spectrum();
    const double smax = *std::max_element(spec.begin(), spec.end());
    const double smin = *std::min_element(spec.begin(), spec.end());
    o.require(err <= 1e-5, "kernel vs direct sum rel err %.3g <= 1e-5", err);
    o.require(herm <= 1e-10 * max_k, "hermitian err %.3g <= 1e-10*max|Ker|", herm / max_k);
    o.require(smin >= -1e-6 * smax, "circulant spectrum min/max %.3g >= -1e-6", smin / smax);
    return o;
}

Outcome c5_cg() {
    Outcome o;
    std::mt19937_64 gen(105);

    {
        const ProjectionOperator op(16, sim::conical_tilt_rotations(60, 60.0, 105), reference_ctfs(60, 105));
        const auto kernel = build_toeplitz_kernel(op);
        const auto rhs = op.adjoint(op.forward(to_complex(oracle::random_real_grid(16, gen))));
        CgOptions opts;
        opts.max_iters = 100;
        const auto r = cg_solve(kernel, rhs, opts);
        double worst = -std::numeric_limits<double>::infinity();
        double previous = 0.0;
        for (const auto& it : r.trace.iterations) {
            worst = std::max(worst, (it.objective - previous) / std::max(std::abs(previous), 1e-300));
            previous = it.objective;
        }
        o.require(worst <= 1e-12, "max relative objective increase %.3g <= 1e-12 over %zu iters", worst,
                  r.trace.iterations.size());

        opts.max_iters = 1;
        const auto first = cg_solve(kernel, rhs, opts);
        const auto b = real_part(rhs);
        const double alpha = dot(b, b) / dot(b, kernel.apply(b));
        double err = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            err += std::pow(first.x.data()[i] - alpha * b.data()[i], 2);
        }
        err = std::sqrt(err) / (std::abs(alpha) * norm(b));
        o.require(err <= 1e-12, "first step vs closed form rel err %.3g <= 1e-12", err);
    }
    {
        const int n = 8;
        const ProjectionOperator op(n, sim::random_rotations(1000, 106));
        const auto kernel = build_toeplitz_kernel(op);
        const auto rhs = op.adjoint(op.forward(to_complex(oracle::random_real_grid(n, gen))));
        CgOptions opts;
        opts.max_iters = 200;
        const auto r = cg_solve(kernel, rhs, opts);
        const auto kx = kernel.apply(r.x);
        const auto b = real_part(rhs);
        double res = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            res += std::pow(b.data()[i] - kx.data()[i], 2);
        }
        res = std::sqrt(res) / norm(b);
        o.require(res <= 1e-8, "dense-view n=8 M=1000 normal residual %.3g <= 1e-8 after %zu iters", res,
                  r.trace.iterations.size());
    }
    return o;
}

struct Pipeline {
    fs::path data;
    fs::path recon;
    cli::ReconstructTiming timing;
};

Pipeline run_pipeline(const std::string& name, double snr) {
    Pipeline p;
    p.data = work_dir() / (name + "_data");
    p.recon = work_dir() / (name + "_recon");
    cli::SimulateOptions sim;
    sim.n = 32;
    sim.m = 500;
    sim.tilt_deg = 60.0;
    sim.snr = snr;
    sim.groups = 3;
    sim.seed = 0;
    sim.out = p.data;
    cli::cmd_simulate(sim);
    cli::ReconstructOptions rec;
    rec.dataset = p.data;
    rec.iters = 30;
    rec.out = p.recon;
    p.timing = cli::cmd_reconstruct(rec);
    return p;
}

eval::PartitionedFsc pipeline_fsc(const Pipeline& p) {
    const auto truth = read_volume(p.data / "truth.f32", 32, 3.36);
    const auto recon = read_volume(p.recon / "recon.f32", 32, 3.36);
    return eval::fsc_partitioned(recon, truth, eval::missing_cone_mask(32, 60.0));
}

// Smallest FCR over shells 1 … last, with the first shell that misses the threshold.
void require_fcr(Outcome& o, const eval::FscCurve& curve, int last, double threshold) {
    double worst = 1.0;
    int worst_shell = 0;
    std::string profile;
    for (const auto& s : curve.shells) {
        if (s.index > last) {
            break;
        }
        const double v = s.fsc.value_or(-1.0);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.3f", profile.empty() ? "" : " ", v);
        profile += buf;
        if (v < worst) {
            worst = v;
            worst_shell = s.index;
        }
    }
    o.require(worst >= threshold, "FCR excl. cone shells 1-%d min %.4f (shell %d) >= %.2f [%s]", last, worst,
              worst_shell, threshold, profile.c_str());
}

Pipeline clean_pipeline;

Outcome c6_clean() {
    Outcome o;
    clean_pipeline = run_pipeline("clean", sim::kInfiniteSnr);
    require_fcr(o, pipeline_fsc(clean_pipeline).exclude, static_cast<int>(0.8 * 16), 0.95);
    const auto truth = read_volume(clean_pipeline.data / "truth.f32", 32, 3.36);
    bool exact = true;
    for (const auto& s : eval::fsc(truth, truth).shells) {
        exact = exact && s.fsc.has_value() && *s.fsc == 1.0;
    }
    o.require(exact, "fsc(truth, truth) == 1 on every shell: %s", exact ? "yes" : "no");
    return o;
}

Outcome c7_noisy() {
    Outcome o;
    const auto p = run_pipeline("noisy", 1.0);
    require_fcr(o, pipeline_fsc(p).exclude, static_cast<int>(0.5 * 16), 0.8);
    return o;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

Outcome c8_cost() {
    Outcome o;
    const int n = 32;
    std::mt19937_64 gen(108);
    const auto rhs = to_complex(oracle::random_real_grid(n, gen));
    std::vector<double> per_iter;
    for (int m : {100, 1000}) {
        const ProjectionOperator op(n, sim::conical_tilt_rotations(m, 60.0, 108), reference_ctfs(m, 108));
        const auto kernel = build_toeplitz_kernel(op);
        std::vector<double> samples;
        for (int rep = 0; rep < 5; ++rep) {
            CgOptions opts;
            opts.max_iters = 10;
            const auto t0 = Clock::now();
            const auto r = cg_solve(kernel, rhs, opts);
            samples.push_back(seconds_since(t0) / static_cast<double>(r.trace.iterations.size()));
        }
        per_iter.push_back(median(samples));
    }
    const double ratio = per_iter[1] / per_iter[0];
    o.require(ratio <= 1.2, "CG iteration time M=1000/M=100 = %.3f/%.3f ms = %.3f <= 1.2", per_iter[1] * 1e3,
              per_iter[0] * 1e3, ratio);

    const int m = 1000;
    const ProjectionOperator op(n, sim::conical_tilt_rotations(m, 60.0, 109), reference_ctfs(m, 109));
    const auto values = oracle::random_values(op.plan().point_count(), gen);
    std::vector<double> back, kern;
    for (int rep = 0; rep < 3; ++rep) {
        auto t0 = Clock::now();
        const auto bp = op.adjoint(values);
        back.push_back(seconds_since(t0));
        t0 = Clock::now();
        const auto k = build_toeplitz_kernel(op);
        kern.push_back(seconds_since(t0));
    }
    const double cost = median(kern) / median(back);
    o.require(cost >= 2.0 && cost <= 8.0, "kernel/back-projection time at M=1000 = %.2f/%.2f s = %.2f in [2, 8]",
              median(kern), median(back), cost);
    return o;
}

Outcome c9_cone() {
    Outcome o;
    const auto manifest = cli::load_manifest(clean_pipeline.data);
    const DiskGrid grid(manifest.n);
    const double c = std::cos((90.0 - manifest.tilt_deg) * std::numbers::pi / 180.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& e : manifest.euler) {
        for (const auto& q : slice_points(Rotation::from_euler(e), grid)) {
            const double len = norm(q);
            if (len > 0.0) {
                worst = std::max(worst, std::abs(q[2]) - c * len);
            }
        }
    }
    o.require(worst <= 1e-9, "max slice-point intrusion into 30 deg cone %.3g <= 1e-9", worst);

    const auto parts = pipeline_fsc(clean_pipeline);
    bool identity = true;
    for (std::size_t i = 0; i < parts.all.shells.size(); ++i) {
        identity = identity && parts.all.shells[i].numerator ==
                                   parts.exclude.shells[i].numerator + parts.within.shells[i].numerator;
    }
    o.require(identity, "numerator(exclude)+numerator(within)==numerator(all) on every shell: %s",
              identity ? "yes" : "no");
    return o;
}

Outcome c10_determinism() {
    Outcome o;
    std::vector<fs::path> runs;
    for (int threads : {1, 4}) {
        omp_set_num_threads(threads);
        const auto base = work_dir() / ("det_" + std::to_string(threads));
        cli::SimulateOptions sim;
        sim.n = 32;
        sim.m = 200;
        sim.seed = 7;
        sim.out = base / "data";
        cli::cmd_simulate(sim);
        cli::ReconstructOptions rec;
        rec.dataset = sim.out;
        rec.iters = 10;
        rec.residual_every = 5;
        rec.out = base / "recon";
        (void)cli::cmd_reconstruct(rec);
        runs.push_back(base);
    }
    omp_set_num_threads(omp_get_num_procs());
    int differing = 0;
    for (const char* f : {"data/images.f32", "data/truth.f32", "data/manifest.json", "recon/recon.f32",
                          "recon/residuals.csv"}) {
        if (io::read_file(runs[0] / f) != io::read_file(runs[1] / f)) {
            ++differing;
            std::fprintf(stderr, "  differs: %s\n", f);
        }
    }
    o.require(differing == 0, "%d of 5 output files differ between --threads 1 and 4", differing);
    return o;
}

struct Criterion {
    const char* name;
    double limit_s;  // 0 means no runtime limit
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 nufft_oracle", 10.0, c1_nufft},
        {"2 adjointness", 10.0, c2_adjoint},
        {"3 toeplitz_equivalence", 60.0, c3_toeplitz},
        {"4 kernel_correctness", 30.0, c4_kernel},
        {"5 cg_properties", 0.0, c5_cg},
        {"6 clean_reconstruction", 300.0, c6_clean},
        {"7 noisy_reconstruction", 300.0, c7_noisy},
        {"8 cost_structure", 0.0, c8_cost},
        {"9 missing_cone", 0.0, c9_cone},
        {"10 determinism", 0.0, c10_determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double elapsed = seconds_since(t0);
        if (c.limit_s > 0.0) {
            o.require(elapsed < c.limit_s, "runtime %.1f s < %.0f s", elapsed, c.limit_s);
        } else {
            o.require(true, "runtime %.1f s", elapsed);
        }
        failed += o.passed ? 0 : 1;
        std::printf("%s criterion %-24s %s\n", o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    fs::remove_all(work_dir());
    return failed == 0 ? 0 : 1;
}
