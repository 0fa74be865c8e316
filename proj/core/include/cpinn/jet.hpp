#pragma once

#include <cmath>

namespace cpinn {

/// Value of a scalar field together with its first and second partial
/// derivatives with respect to the two independent variables (x, t).
/// Propagating Jet2 through arithmetic implements forward-mode automatic
/// differentiation up to second order, which is exactly what evaluating a
/// second-order PDE residual requires.
struct Jet2 {
    double v = 0.0;   // field value
    double dx = 0.0;  // d/dx
    double dt = 0.0;  // d/dt
    double dxx = 0.0; // d2/dx2
    double dtt = 0.0; // d2/dt2
    double dxt = 0.0; // d2/dxdt

    static Jet2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }
    static Jet2 var_x(double x) { return {x, 1, 0, 0, 0, 0}; }
    static Jet2 var_t(double t) { return {t, 0, 1, 0, 0, 0}; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.dx + b.dx, a.dt + b.dt, a.dxx + b.dxx, a.dtt + b.dtt, a.dxt + b.dxt};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.dx - b.dx, a.dt - b.dt, a.dxx - b.dxx, a.dtt - b.dtt, a.dxt - b.dxt};
}

inline Jet2 operator-(const Jet2& a) {
    return {-a.v, -a.dx, -a.dt, -a.dxx, -a.dtt, -a.dxt};
}

// Product rule through second order:
// (ab)_xx = a_xx b + 2 a_x b_x + a b_xx, (ab)_xt = a_xt b + a_x b_t + a_t b_x + a b_xt.
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v * b.v;
    r.dx = a.dx * b.v + a.v * b.dx;
    r.dt = a.dt * b.v + a.v * b.dt;
    r.dxx = a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx;
    r.dtt = a.dtt * b.v + 2.0 * a.dt * b.dt + a.v * b.dtt;
    r.dxt = a.dxt * b.v + a.dx * b.dt + a.dt * b.dx + a.v * b.dxt;
    return r;
}

inline Jet2 operator*(double s, const Jet2& a) {
    return {s * a.v, s * a.dx, s * a.dt, s * a.dxx, s * a.dtt, s * a.dxt};
}

inline Jet2 operator*(const Jet2& a, double s) { return s * a; }

inline Jet2 operator+(const Jet2& a, double c) {
    return {a.v + c, a.dx, a.dt, a.dxx, a.dtt, a.dxt};
}

inline Jet2 operator+(double c, const Jet2& a) { return a + c; }

inline Jet2 operator-(const Jet2& a, double c) { return a + (-c); }

inline Jet2 operator-(double c, const Jet2& a) { return (-a) + c; }

namespace detail {

// Chain rule for a scalar function with first and second derivative d1, d2
// evaluated at u.v:
//   f(u)_x  = d1 u_x
//   f(u)_xx = d2 u_x^2 + d1 u_xx
//   f(u)_xt = d2 u_x u_t + d1 u_xt
inline Jet2 apply_unary(const Jet2& u, double f, double d1, double d2) {
    Jet2 r;
    r.v = f;
    r.dx = d1 * u.dx;
    r.dt = d1 * u.dt;
    r.dxx = d2 * u.dx * u.dx + d1 * u.dxx;
    r.dtt = d2 * u.dt * u.dt + d1 * u.dtt;
    r.dxt = d2 * u.dx * u.dt + d1 * u.dxt;
    return r;
}

} // namespace detail

inline Jet2 tanh(const Jet2& u) {
    const double th = std::tanh(u.v);
    const double sech2 = 1.0 - th * th;
    return detail::apply_unary(u, th, sech2, -2.0 * th * sech2);
}

inline Jet2 sin(const Jet2& u) {
    return detail::apply_unary(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v));
}

inline Jet2 cos(const Jet2& u) {
    return detail::apply_unary(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v));
}

inline Jet2 exp(const Jet2& u) {
    const double e = std::exp(u.v);
    return detail::apply_unary(u, e, e, e);
}

inline bool finite(const Jet2& a) {
    return std::isfinite(a.v) && std::isfinite(a.dx) && std::isfinite(a.dt) &&
           std::isfinite(a.dxx) && std::isfinite(a.dtt) && std::isfinite(a.dxt);
}

} // namespace cpinn
