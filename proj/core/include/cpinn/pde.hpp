#pragma once

#include "cpinn/jet.hpp"

#include <functional>
#include <optional>
#include <string>

namespace cpinn {

enum class PdeKind { Heat1D, Wave1D };

std::string to_string(PdeKind kind);
PdeKind pde_kind_from_string(const std::string& name);

/// One benchmark problem on (0, L) x (0, T]: the differential operator
/// (u_t = a^2 u_xx + g or u_tt = a^2 u_xx + g), its boundary and initial
/// data, and — when known — the exact solution and exact source used for
/// synthetic labels and evaluation.
struct PdeProblem {
    PdeKind kind = PdeKind::Heat1D;
    double a = 1.0; // diffusivity (heat) or wave speed (wave)
    double L = 0.0;
    double T = 0.0;
    // Whether the source term varies in time. When false the source network
    // is evaluated at (x, 0) everywhere, sharing one spatial profile across
    // all times; with an unmeasurable source this is what makes the profile
    // identifiable away from the sampled instants.
    bool source_time_dependent = true;

    std::function<double(double)> ic;                 // u(x, 0)
    std::function<double(double)> ic_dt;              // du/dt(x, 0), wave only
    std::function<double(double)> bc_left;            // u(0, t), Dirichlet
    std::function<double(double)> bc_right;           // x = L: Dirichlet value (wave)
    bool right_neumann = false;                       // x = L: du/dx target instead (heat)
    std::function<double(double)> bc_right_slope;     // du/dx(L, t) when right_neumann

    std::function<double(double, double)> exact_u;    // optional ground truth
    std::function<Jet2(double, double)> exact_u_jet;  // analytic jet of exact_u
    std::function<double(double, double)> exact_g;    // optional exact source

    bool in_domain(double x, double t) const {
        return x >= 0.0 && x <= L && t >= 0.0 && t <= T;
    }
    void require_in_domain(double x, double t) const; // throws DataError
};

/// Nonhomogeneous residual at one point: u_t - a^2 u_xx - g for the heat
/// operator, u_tt - a^2 u_xx - g for the wave operator. Zero exactly when
/// the jet belongs to a solution with source g_hat.
double residual(const PdeProblem& problem, const Jet2& jet, double g_hat);

/// Heat benchmark: a = 1, L = pi, T = 10, u(x,0) = sin(x/2), u(0,t) = 0,
/// u_x(pi,t) = 0, source g(x) = sin(x/2). The exact solution is the single
/// eigenmode u = (4 - 3 e^{-t/4}) sin(x/2).
PdeProblem make_heat_problem();
double exact_heat(double x, double t);
double exact_source_heat(double x);

/// Wave benchmark: a = 1, L = pi, T = 6, zero initial data, fixed ends,
/// force g = sin(2x) sin(2t). Resonant with the n = 2 mode; the exact
/// solution u = [sin(2t)/8 - t cos(2t)/4] sin(2x) grows linearly in t.
PdeProblem make_wave_problem();
double exact_wave(double x, double t);
double exact_source_wave(double x, double t);

PdeProblem make_problem(PdeKind kind);

} // namespace cpinn
