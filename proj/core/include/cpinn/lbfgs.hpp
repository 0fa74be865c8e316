#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cpinn {

/// Objective callback: writes the gradient at x into grad (same length as x)
/// and returns the loss value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

enum class LbfgsStatus {
    Converged,        // gradient norm below tolerance
    Budget,           // iteration budget exhausted
    LineSearchFailed, // no strong-Wolfe step found; best-so-far returned
    AlreadyMinimized, // the start point satisfied the gradient tolerance
};

std::string to_string(LbfgsStatus status);

struct LbfgsOptions {
    int max_iterations = 500;
    int memory = 20;
    double grad_tol = 1e-9;
    double c1 = 1e-4; // sufficient decrease
    double c2 = 0.9;  // curvature
    int max_line_search = 60;
    double min_step = 1e-20;
    double max_step = 1e20;
};

struct LbfgsResult {
    std::vector<double> x;
    double f = 0.0;
    LbfgsStatus status = LbfgsStatus::Budget;
    int iterations = 0;
    int evaluations = 0;
};

/// Limited-memory BFGS with a strong-Wolfe line search. Accepted steps never
/// increase the objective. Throws NumericError if the objective is non-finite
/// at the start point; non-finite values encountered during the line search
/// are treated as overshoots and the step is shrunk.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsOptions& opts = {});

} // namespace cpinn
