#include "firm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace firm {

const char* to_string(Phase p) noexcept {
    switch (p) {
        case Phase::dropping:
            return "dropping";
        case Phase::transition:
            return "transition";
        case Phase::level:
            return "level";
    }
    return "unknown";
}

namespace {

double dot(const RealGrid& a, const RealGrid& b) {
    const auto& x = a.data();
    const auto& y = b.data();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i] * y[i];
    }
    return s;
}

void axpy(double alpha, const RealGrid& x, RealGrid& y) {
    auto& yd = y.data();
    const auto& xd = x.data();
    for (std::size_t i = 0; i < yd.size(); ++i) {
        yd[i] += alpha * xd[i];
    }
}

void require_finite(double v, const char* what, int iter) {
    if (!std::isfinite(v)) {
        throw NumericalFailure(std::string("conjugate gradients produced a non-finite ") + what + " at iteration " +
                                   std::to_string(iter),
                               iter);
    }
}

}  // namespace

DataResidualFn data_residual(const ProjectionOperator& op, std::span<const cplx> b) {
    std::vector<cplx> data(b.begin(), b.end());
    return [&op, data = std::move(data)](const RealGrid& x) {
        const auto ax = op.forward(to_complex(x));
        double s = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i) {
            s += std::norm(data[i] - ax[i]);
        }
        return std::sqrt(s);
    };
}

CgResult cg_solve(const NormalOperator& apply, const ComplexGrid& rhs, const CgOptions& opts,
                  const DataResidualFn& residual_fn) {
    if (opts.max_iters < 1) {
        throw std::invalid_argument("max_iters must be at least 1");
    }
    if (opts.record_data_residual_every < 0 || opts.objective_tolerance < 0.0) {
        throw std::invalid_argument("negative CG option");
    }
    const RealGrid b = real_part(rhs);
    CgResult result{RealGrid(rhs.side()), {}};
    RealGrid& x = result.x;
    CgTrace& trace = result.trace;

    RealGrid r = b;
    RealGrid p = r;
    double rr = dot(r, r);
    require_finite(rr, "right-hand side", 0);
    trace.initial_residual = std::sqrt(rr);
    if (rr == 0.0) {
        trace.stop = StopReason::zero_rhs;
        return result;
    }
    const double b_norm = trace.initial_residual;

    double previous_objective = 0.0;
    int stalled = 0;
    for (int k = 1; k <= opts.max_iters; ++k) {
        const RealGrid kp = apply(p);
        const double pkp = dot(p, kp);
        require_finite(pkp, "curvature", k);
        if (pkp <= 0.0) {
            trace.stop = StopReason::breakdown;
            break;
        }
        const double alpha = rr / pkp;
        axpy(alpha, p, x);
        axpy(-alpha, kp, r);
        const double rr_next = dot(r, r);
        require_finite(rr_next, "residual", k);

        CgIteration it;
        it.iter = k;
        it.normal_residual = std::sqrt(rr_next);
        // φ(x) = ½⟨x, Kx⟩ - ⟨x, b⟩ = -½(⟨x, b⟩ + ⟨x, r⟩) with r = b - Kx.
        it.objective = -0.5 * (dot(x, b) + dot(x, r));
        require_finite(it.objective, "objective", k);
        if (residual_fn && opts.record_data_residual_every > 0 && k % opts.record_data_residual_every == 0) {
            it.data_residual = residual_fn(x);
        }
        trace.iterations.push_back(it);

        if (rr_next == 0.0 || it.normal_residual <= 1e-15 * b_norm) {
            trace.stop = StopReason::converged;
            break;
        }
        if (opts.objective_tolerance > 0.0) {
            const double decrease = previous_objective - it.objective;
            const double scale = std::max(std::abs(it.objective), std::numeric_limits<double>::min());
            stalled = decrease / scale < opts.objective_tolerance ? stalled + 1 : 0;
            if (stalled >= 3) {
                trace.stop = StopReason::objective_stalled;
                break;
            }
        }
        previous_objective = it.objective;

        const double beta = rr_next / rr;
        rr = rr_next;
        auto& pd = p.data();
        const auto& rd = r.data();
        for (std::size_t i = 0; i < pd.size(); ++i) {
            pd[i] = rd[i] + beta * pd[i];
        }
    }
    return result;
}

CgResult cg_solve(const ToeplitzKernel& kernel, const ComplexGrid& rhs, const CgOptions& opts,
                  const DataResidualFn& residual_fn) {
    if (rhs.side() != kernel.n()) {
        throw std::invalid_argument("right-hand side " + std::to_string(rhs.side()) + " does not match kernel side " +
                                    std::to_string(kernel.n()));
    }
    return cg_solve([&kernel](const RealGrid& v) { return kernel.apply(v); }, rhs, opts, residual_fn);
}

namespace {

// Prefix sums for least-squares line fits of y over index ranges.
class LineFits {
public:
    explicit LineFits(std::span<const double> y) : s_(y.size() + 1), sx_(s_), sxx_(s_), sy_(s_), sxy_(s_), syy_(s_) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double x = static_cast<double>(i);
            s_[i + 1] = s_[i] + 1.0;
            sx_[i + 1] = sx_[i] + x;
            sxx_[i + 1] = sxx_[i] + x * x;
            sy_[i + 1] = sy_[i] + y[i];
            sxy_[i + 1] = sxy_[i] + x * y[i];
            syy_[i + 1] = syy_[i] + y[i] * y[i];
        }
    }

    /// Residual sum of squares of the best line over [a, b).
    [[nodiscard]] double sse(std::size_t a, std::size_t b) const {
        const double n = s_[b] - s_[a];
        const double sx = sx_[b] - sx_[a], sxx = sxx_[b] - sxx_[a];
        const double sy = sy_[b] - sy_[a], sxy = sxy_[b] - sxy_[a], syy = syy_[b] - syy_[a];
        const double vyy = syy - sy * sy / n;
        const double vxx = sxx - sx * sx / n;
        if (n < 2.0 || vxx <= 0.0) {
            return std::max(vyy, 0.0);
        }
        const double vxy = sxy - sx * sy / n;
        return std::max(vyy - vxy * vxy / vxx, 0.0);
    }

    [[nodiscard]] double slope(std::size_t a, std::size_t b) const {
        const double n = s_[b] - s_[a];
        const double vxx = (sxx_[b] - sxx_[a]) - (sx_[b] - sx_[a]) * (sx_[b] - sx_[a]) / n;
        if (vxx <= 0.0) {
            return 0.0;
        }
        return ((sxy_[b] - sxy_[a]) - (sx_[b] - sx_[a]) * (sy_[b] - sy_[a]) / n) / vxx;
    }

private:
    std::vector<double> s_, sx_, sxx_, sy_, sxy_, syy_;
};

}  // namespace

PhaseSplit classify_phases(std::span<const double> residuals) {
    const std::size_t k = residuals.size();
    if (k < 3) {
        throw std::invalid_argument("phase classification needs at least 3 residuals, got " + std::to_string(k));
    }
    std::vector<double> y(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(residuals[i] >= 0.0) || !std::isfinite(residuals[i])) {
            throw std::invalid_argument("residuals must be finite and non-negative");
        }
        y[i] = std::log10(std::max(residuals[i], std::numeric_limits<double>::min()));
    }
    const LineFits fits(y);
    const double sst = fits.sse(0, k);
    double mean = 0.0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(k);
    double total = 0.0;
    for (double v : y) {
        total += (v - mean) * (v - mean);
    }

    PhaseSplit out;
    const auto single = [&](Phase p) {
        out.labels.assign(k, p);
        out.first_break = out.second_break = p == Phase::dropping ? k : 0;
        return out;
    };
    if (total <= 1e-20 * static_cast<double>(k) * std::max(1.0, mean * mean)) {
        return single(Phase::level);
    }
    if (sst <= 1e-6 * total) {
        return single(fits.slope(0, k) < -1e-3 ? Phase::dropping : Phase::level);
    }

    const std::size_t min_len = k >= 6 ? 2 : 1;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = min_len, best_b = 2 * min_len;
    for (std::size_t a = min_len; a + 2 * min_len <= k; ++a) {
        const double left = fits.sse(0, a);
        for (std::size_t b = a + min_len; b + min_len <= k; ++b) {
            const double cost = left + fits.sse(a, b) + fits.sse(b, k);
            if (cost < best) {
                best = cost;
                best_a = a;
                best_b = b;
            }
        }
    }
    out.first_break = best_a;
    out.second_break = best_b;
    out.labels.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.labels[i] = i < best_a ? Phase::dropping : (i < best_b ? Phase::transition : Phase::level);
    }
    return out;
}

void annotate_phases(CgTrace& trace) {
    std::vector<double> residuals;
    residuals.reserve(trace.iterations.size());
    for (const auto& it : trace.iterations) {
        residuals.push_back(it.normal_residual);
    }
    const auto split = classify_phases(residuals);
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
        trace.iterations[i].phase = split.labels[i];
    }
}

}  // namespace firm
