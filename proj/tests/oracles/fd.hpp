#pragma once

// Finite-difference oracles, independent of the jet/backprop code paths they
// check. Five-point central stencils give O(h^4) truncation for the pure
// derivatives; the mixed derivative nests two five-point first-derivative
// stencils.

#include "cpinn/jet.hpp"
#include "cpinn/lbfgs.hpp"
#include "cpinn/network.hpp"

#include <functional>
#include <vector>

namespace cpinn::testing {

inline double fd_d1(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

inline double fd_d2(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) /
           (12 * h * h);
}

/// Jet2 estimate of a scalar field via finite differences.
inline Jet2 fd_jet(const std::function<double(double, double)>& f, double x, double t,
                   double h1 = 1e-4, double h2 = 5e-4) {
    Jet2 j;
    j.v = f(x, t);
    j.dx = fd_d1([&](double xx) { return f(xx, t); }, x, h1);
    j.dt = fd_d1([&](double tt) { return f(x, tt); }, t, h1);
    j.dxx = fd_d2([&](double xx) { return f(xx, t); }, x, h2);
    j.dtt = fd_d2([&](double tt) { return f(x, tt); }, t, h2);
    j.dxt = fd_d1(
        [&](double xx) {
            return fd_d1([&](double tt) { return f(xx, tt); }, t, 1e-3);
        },
        x, 1e-3);
    return j;
}

/// Central-difference gradient of a loss over flat parameters.
inline std::vector<double> fd_param_grad(const Objective& loss, std::vector<double> theta,
                                         double h = 1e-5) {
    std::vector<double> grad(theta.size());
    std::vector<double> scratch(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + h;
        const double fp = loss(theta, scratch);
        theta[i] = saved - h;
        const double fm = loss(theta, scratch);
        theta[i] = saved;
        grad[i] = (fp - fm) / (2 * h);
    }
    return grad;
}

/// |a - b| relative to the larger magnitude, floored to keep near-zero
/// denominators from manufacturing huge ratios the stencil noise cannot beat.
inline double rel_err(double a, double b, double floor = 1e-2) {
    const double denom = std::max({std::abs(a), std::abs(b), floor});
    return std::abs(a - b) / denom;
}

} // namespace cpinn::testing
