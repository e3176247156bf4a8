#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "firm/grid.hpp"
#include "firm/toeplitz.hpp"

namespace firm {

class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, int iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    [[nodiscard]] int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

struct CgOptions {
    int max_iters = 30;
    /// Evaluate ‖b - A(x)‖ every this many iterations (0 disables it).
    int record_data_residual_every = 0;
    /// Stop once the relative objective decrease stays below this for three
    /// consecutive iterations (0 runs all iterations).
    double objective_tolerance = 0.0;
};

enum class Phase { dropping, transition, level };

const char* to_string(Phase p) noexcept;

struct CgIteration {
    int iter = 0;
    double normal_residual = 0.0;  // ‖A*b - K x‖
    double objective = 0.0;        // ½⟨x, Kx⟩ - ⟨x, A*b⟩
    std::optional<double> data_residual;
    std::optional<Phase> phase;
};

enum class StopReason { max_iters, converged, objective_stalled, breakdown, zero_rhs };

struct CgTrace {
    double initial_residual = 0.0;
    std::vector<CgIteration> iterations;
    StopReason stop = StopReason::max_iters;
};

struct CgResult {
    RealGrid x;
    CgTrace trace;
};

/// Callback computing ‖b - A(x)‖ for the optional data-residual record.
using DataResidualFn = std::function<double(const RealGrid&)>;

DataResidualFn data_residual(const ProjectionOperator& op, std::span<const cplx> b);

/// Normal operator abstraction so the solver can run on any symmetric PSD map.
using NormalOperator = std::function<RealGrid(const RealGrid&)>;

/// Plain conjugate gradients on K x = Re(rhs) from x = 0.
CgResult cg_solve(const NormalOperator& apply, const ComplexGrid& rhs, const CgOptions& opts,
                  const DataResidualFn& residual_fn = {});

CgResult cg_solve(const ToeplitzKernel& kernel, const ComplexGrid& rhs, const CgOptions& opts,
                  const DataResidualFn& residual_fn = {});

/// Three contiguous segments of a log₁₀ residual curve.
struct PhaseSplit {
    std::size_t first_break = 0;   // first index of the transition segment
    std::size_t second_break = 0;  // first index of the level segment
    std::vector<Phase> labels;
};

/// Fits independent lines to up to three contiguous segments of log₁₀(residuals)
/// and labels them dropping / transition / level. A curve explained by a single
/// line gets a single label based on its slope.
PhaseSplit classify_phases(std::span<const double> residuals);

/// Labels trace iterations in place from their normal residuals (needs ≥ 3).
void annotate_phases(CgTrace& trace);

}  // namespace firm
