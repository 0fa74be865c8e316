#include "cpinn/pde.hpp"

#include "cpinn/errors.hpp"

#include <cmath>

namespace cpinn {

std::string to_string(PdeKind kind) {
    return kind == PdeKind::Heat1D ? "heat" : "wave";
}

PdeKind pde_kind_from_string(const std::string& name) {
    if (name == "heat") return PdeKind::Heat1D;
    if (name == "wave") return PdeKind::Wave1D;
    throw ConfigError("unknown PDE kind: '" + name + "' (expected 'heat' or 'wave')");
}

void PdeProblem::require_in_domain(double x, double t) const {
    if (!in_domain(x, t))
        throw DataError("point (" + std::to_string(x) + ", " + std::to_string(t) +
                        ") outside domain [0," + std::to_string(L) + "]x[0," +
                        std::to_string(T) + "]");
}

double residual(const PdeProblem& problem, const Jet2& jet, double g_hat) {
    const double a2 = problem.a * problem.a;
    if (problem.kind == PdeKind::Heat1D) return jet.dt - a2 * jet.dxx - g_hat;
    return jet.dtt - a2 * jet.dxx - g_hat;
}

// --- Heat benchmark ---------------------------------------------------------
//
// u = c(t) sin(x/2) with c' = -c/4 + 1, c(0) = 1, hence c(t) = 4 - 3 e^{-t/4}.

namespace {

void require_range(double v, double lo, double hi, const char* what) {
    const double eps = 1e-12 * std::max(1.0, std::abs(hi)); // absorb grid rounding
    if (!(v >= lo - eps && v <= hi + eps))
        throw DataError(std::string(what) + "=" + std::to_string(v) + " outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

} // namespace

double exact_heat(double x, double t) {
    require_range(x, 0.0, M_PI, "x");
    if (t < 0.0) throw DataError("t=" + std::to_string(t) + " must be >= 0");
    return (4.0 - 3.0 * std::exp(-t / 4.0)) * std::sin(x / 2.0);
}

double exact_source_heat(double x) {
    require_range(x, 0.0, M_PI, "x");
    return std::sin(x / 2.0);
}

namespace {

Jet2 heat_jet(double x, double t) {
    const double c = 4.0 - 3.0 * std::exp(-t / 4.0);
    const double cp = 0.75 * std::exp(-t / 4.0);
    const double cpp = -cp / 4.0;
    const double s = std::sin(x / 2.0);
    const double sp = 0.5 * std::cos(x / 2.0);
    const double spp = -0.25 * s;
    return Jet2{c * s, c * sp, cp * s, c * spp, cpp * s, cp * sp};
}

Jet2 wave_jet(double x, double t) {
    const double Tt = std::sin(2.0 * t) / 8.0 - t * std::cos(2.0 * t) / 4.0;
    const double Tp = 0.5 * t * std::sin(2.0 * t);
    const double Tpp = 0.5 * std::sin(2.0 * t) + t * std::cos(2.0 * t);
    const double s = std::sin(2.0 * x);
    const double sp = 2.0 * std::cos(2.0 * x);
    const double spp = -4.0 * s;
    return Jet2{Tt * s, Tt * sp, Tp * s, Tt * spp, Tpp * s, Tp * sp};
}

} // namespace

PdeProblem make_heat_problem() {
    PdeProblem p;
    p.kind = PdeKind::Heat1D;
    p.a = 1.0;
    p.L = M_PI;
    p.T = 10.0;
    p.source_time_dependent = false; // g(x) = sin(x/2)
    p.ic = [](double x) { return std::sin(x / 2.0); };
    p.bc_left = [](double) { return 0.0; };
    p.right_neumann = true;
    p.bc_right_slope = [](double) { return 0.0; };
    p.exact_u = exact_heat;
    p.exact_u_jet = heat_jet;
    p.exact_g = [](double x, double) { return exact_source_heat(x); };
    return p;
}

// --- Wave benchmark ---------------------------------------------------------
//
// u = T(t) sin(2x) with T'' + 4T = sin(2t), T(0) = T'(0) = 0. The forcing is
// resonant, so T(t) = sin(2t)/8 - t cos(2t)/4.

double exact_wave(double x, double t) {
    require_range(x, 0.0, M_PI, "x");
    require_range(t, 0.0, 6.0, "t");
    return (std::sin(2.0 * t) / 8.0 - t * std::cos(2.0 * t) / 4.0) * std::sin(2.0 * x);
}

double exact_source_wave(double x, double t) {
    require_range(x, 0.0, M_PI, "x");
    require_range(t, 0.0, 6.0, "t");
    return std::sin(2.0 * x) * std::sin(2.0 * t);
}

PdeProblem make_wave_problem() {
    PdeProblem p;
    p.kind = PdeKind::Wave1D;
    p.a = 1.0;
    p.L = M_PI;
    p.T = 6.0;
    p.ic = [](double) { return 0.0; };
    p.ic_dt = [](double) { return 0.0; };
    p.bc_left = [](double) { return 0.0; };
    p.bc_right = [](double) { return 0.0; };
    p.exact_u = exact_wave;
    p.exact_u_jet = wave_jet;
    p.exact_g = exact_source_wave;
    return p;
}

PdeProblem make_problem(PdeKind kind) {
    return kind == PdeKind::Heat1D ? make_heat_problem() : make_wave_problem();
}

} // namespace cpinn
