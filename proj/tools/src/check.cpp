#include <algorithm>
#include <cmath>
#include <random>

#include "firm/cli/commands.hpp"
#include "firm/nufft.hpp"
#include "firm/projector.hpp"
#include "firm/sim.hpp"
#include "firm/solver.hpp"
#include "firm/toeplitz.hpp"

namespace firm::cli {

namespace {

ComplexGrid random_grid(int side, std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexGrid g(side);
    for (auto& v : g.data()) {
        v = cplx(normal(gen), normal(gen));
    }
    return g;
}

RealGrid random_real_grid(int side, std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    RealGrid g(side);
    for (auto& v : g.data()) {
        v = normal(gen);
    }
    return g;
}

std::vector<cplx> random_values(std::size_t count, std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> v(count);
    for (auto& x : v) {
        x = cplx(normal(gen), normal(gen));
    }
    return v;
}

double relative_l2(const ComplexGrid& a, const ComplexGrid& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a.data()[i] - b.data()[i]);
        den += std::norm(b.data()[i]);
    }
    return std::sqrt(num / den);
}

CheckResult result(std::string name, double measured, double tolerance) {
    return {std::move(name), measured, tolerance, measured <= tolerance};
}

}  // namespace

std::vector<CheckResult> run_checks(const CheckOptions& opts) {
    if (opts.n < 4 || opts.n % 2 != 0 || opts.n > 64) {
        throw ValidationError("--n must be even and between 4 and 64");
    }
    if (opts.m < 1) {
        throw ValidationError("--m must be positive");
    }
    std::mt19937_64 gen(opts.seed);
    const auto rotations = sim::random_rotations(opts.m, opts.seed);
    const CtfAssignment ctf{reference_ctf_groups(3), sim::assign_defocus_groups(opts.m, 3, opts.seed)};
    const ProjectionOperator op(opts.n, rotations, ctf, opts.nufft_eps);
    std::vector<CheckResult> out;

    double adjoint_error = 0.0;
    for (int probe = 0; probe < 5; ++probe) {
        const auto v = random_grid(opts.n, gen);
        const auto g = random_values(op.plan().point_count(), gen);
        const auto av = op.forward(v);
        const auto atg = op.adjoint(g);
        const cplx lhs = inner(av, g);
        const cplx rhs = inner(v.data(), atg.data());
        adjoint_error = std::max(adjoint_error, std::abs(lhs - rhs) / (norm(av) * norm(g)));
    }
    out.push_back(result("adjointness", adjoint_error, 1e-5));

    const auto kernel = build_toeplitz_kernel(op);
    {
        const auto v = to_complex(random_real_grid(opts.n, gen));
        const auto direct = op.adjoint(op.forward(v));
        out.push_back(result("toeplitz_equivalence", relative_l2(kernel.apply(v), direct), 1e-5));
    }

    out.push_back(result("kernel_hermitian_symmetry", kernel.diagnostics().max_hermitian_error, 1e-10));
    {
        auto info = result("circulant_spectrum_min", std::max(0.0, -kernel.diagnostics().min_spectrum), 1e-6);
        info.gated = false;
        out.push_back(info);
        double worst = 0.0;
        for (int probe = 0; probe < 5; ++probe) {
            const auto v = random_real_grid(opts.n, gen);
            const auto kv = kernel.apply(v);
            double q = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                q += v.data()[i] * kv.data()[i];
            }
            worst = std::max(worst, -q / (norm(v) * norm(v)));
        }
        out.push_back(result("normal_operator_psd", std::max(0.0, worst), 1e-6));
    }

    if (opts.n <= 16 && op.plan().point_count() <= 10000) {
        std::vector<cplx> w(op.ctf_weights().size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = op.ctf_weights()[i] * op.ctf_weights()[i];
        }
        const auto full = nufft::dft_direct_type1(op.plan().points(), w, 2 * opts.n);
        const auto built = compute_kernel(op);
        ComplexGrid direct(2 * opts.n - 1);
        for (int z = direct.lo(); z <= direct.hi(); ++z) {
            for (int y = direct.lo(); y <= direct.hi(); ++y) {
                for (int x = direct.lo(); x <= direct.hi(); ++x) {
                    direct(x, y, z) = full(x, y, z);
                }
            }
        }
        out.push_back(result("kernel_vs_direct_sum", relative_l2(built, direct), 1e-5));
    }

    {
        const auto truth = random_real_grid(opts.n, gen);
        const auto rhs = op.adjoint(op.forward(to_complex(truth)));
        CgOptions cg;
        cg.max_iters = 20;
        const auto solved = cg_solve(kernel, rhs, cg);
        double worst = 0.0;
        double previous = 0.0;
        for (const auto& it : solved.trace.iterations) {
            const double slack = 1e-12 * std::max(std::abs(previous), std::abs(it.objective));
            worst = std::max(worst, (it.objective - previous - slack) / std::max(std::abs(it.objective), 1e-300));
            previous = it.objective;
        }
        out.push_back(result("cg_objective_monotone", std::max(0.0, worst), 0.0));
    }
    return out;
}

}  // namespace firm::cli
