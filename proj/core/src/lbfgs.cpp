#include "cpinn/lbfgs.hpp"

#include "cpinn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace cpinn {

std::string to_string(LbfgsStatus status) {
    switch (status) {
        case LbfgsStatus::Converged: return "converged";
        case LbfgsStatus::Budget: return "budget";
        case LbfgsStatus::LineSearchFailed: return "line_search_failed";
        case LbfgsStatus::AlreadyMinimized: return "already_minimized";
    }
    return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Pair {
    std::vector<double> s, y;
    double rho;
};

// phi(alpha) = f(x + alpha d); evaluates f and g at the trial point.
struct LineEval {
    double phi;
    double dphi;
};

class LineFunction {
public:
    LineFunction(const Objective& obj, std::span<const double> x0, std::span<const double> d)
        : obj_(obj), x0_(x0), d_(d), xt_(x0.size()), gt_(x0.size()) {}

    LineEval eval(double alpha) {
        for (std::size_t i = 0; i < x0_.size(); ++i) xt_[i] = x0_[i] + alpha * d_[i];
        std::fill(gt_.begin(), gt_.end(), 0.0);
        const double f = obj_(xt_, gt_);
        ++count_;
        if (!std::isfinite(f)) return {std::numeric_limits<double>::infinity(), 0.0};
        return {f, dot(gt_, d_)};
    }

    std::span<const double> trial_x() const { return xt_; }
    std::span<const double> trial_g() const { return gt_; }
    int count() const { return count_; }

private:
    const Objective& obj_;
    std::span<const double> x0_;
    std::span<const double> d_;
    std::vector<double> xt_, gt_;
    int count_ = 0;
};

} // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsOptions& opts) {
    const std::size_t n = x0.size();
    LbfgsResult res;
    res.x = std::move(x0);

    std::vector<double> g(n, 0.0);
    double f = objective(res.x, g);
    res.evaluations = 1;
    if (!std::isfinite(f)) throw NumericError("lbfgs", "objective non-finite at start point");
    res.f = f;

    if (norm2(g) <= opts.grad_tol) {
        res.status = LbfgsStatus::AlreadyMinimized;
        return res;
    }

    std::deque<Pair> history;
    std::vector<double> d(n), g_new(n), alpha_coeff;

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        // Two-loop recursion for d = -H g.
        d.assign(g.begin(), g.end());
        alpha_coeff.assign(history.size(), 0.0);
        for (std::size_t i = history.size(); i-- > 0;) {
            const Pair& p = history[i];
            alpha_coeff[i] = p.rho * dot(p.s, d);
            for (std::size_t k = 0; k < n; ++k) d[k] -= alpha_coeff[i] * p.y[k];
        }
        if (!history.empty()) {
            const Pair& last = history.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (double& v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < history.size(); ++i) {
            const Pair& p = history[i];
            const double beta = p.rho * dot(p.y, d);
            for (std::size_t k = 0; k < n; ++k) d[k] += (alpha_coeff[i] - beta) * p.s[k];
        }
        for (double& v : d) v = -v;

        double dphi0 = dot(g, d);
        if (dphi0 >= 0.0) {
            // Curvature information went stale; fall back to steepest descent.
            history.clear();
            for (std::size_t k = 0; k < n; ++k) d[k] = -g[k];
            dphi0 = dot(g, d);
        }

        // Strong-Wolfe line search (bracket then zoom).
        LineFunction line(objective, res.x, d);
        const double phi0 = f;
        double alpha_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
        double alpha = 1.0;
        double alpha_lo = -1.0, alpha_hi = -1.0;
        double phi_lo = 0.0, dphi_lo = 0.0, phi_hi = 0.0;
        bool bracketed = false, accepted = false;
        LineEval e{};

        for (int ls = 0; ls < opts.max_line_search && !bracketed && !accepted; ++ls) {
            e = line.eval(alpha);
            if (e.phi > phi0 + opts.c1 * alpha * dphi0 || (ls > 0 && e.phi >= phi_prev)) {
                alpha_lo = alpha_prev; phi_lo = phi_prev; dphi_lo = dphi_prev;
                alpha_hi = alpha; phi_hi = e.phi;
                bracketed = true;
                break;
            }
            if (std::abs(e.dphi) <= -opts.c2 * dphi0) {
                accepted = true;
                break;
            }
            if (e.dphi >= 0.0) {
                alpha_lo = alpha; phi_lo = e.phi; dphi_lo = e.dphi;
                alpha_hi = alpha_prev; phi_hi = phi_prev;
                bracketed = true;
                break;
            }
            alpha_prev = alpha; phi_prev = e.phi; dphi_prev = e.dphi;
            alpha = std::min(2.0 * alpha, opts.max_step);
            if (alpha >= opts.max_step) break;
        }

        if (bracketed && !accepted) {
            for (int z = 0; z < opts.max_line_search; ++z) {
                // Quadratic interpolation using (alpha_lo, phi_lo, dphi_lo) and
                // phi_hi, safeguarded by bisection.
                double denom = 2.0 * (phi_hi - phi_lo - dphi_lo * (alpha_hi - alpha_lo));
                double trial = (denom != 0.0 && std::isfinite(phi_hi))
                                   ? alpha_lo - dphi_lo * (alpha_hi - alpha_lo) *
                                                    (alpha_hi - alpha_lo) / denom
                                   : 0.5 * (alpha_lo + alpha_hi);
                const double lo = std::min(alpha_lo, alpha_hi), hi = std::max(alpha_lo, alpha_hi);
                if (!(trial > lo + 0.1 * (hi - lo) && trial < hi - 0.1 * (hi - lo)))
                    trial = 0.5 * (alpha_lo + alpha_hi);

                e = line.eval(trial);
                if (e.phi > phi0 + opts.c1 * trial * dphi0 || e.phi >= phi_lo) {
                    alpha_hi = trial; phi_hi = e.phi;
                } else {
                    if (std::abs(e.dphi) <= -opts.c2 * dphi0) {
                        alpha = trial;
                        accepted = true;
                        break;
                    }
                    if (e.dphi * (alpha_hi - alpha_lo) >= 0.0) {
                        alpha_hi = alpha_lo; phi_hi = phi_lo;
                    }
                    alpha_lo = trial; phi_lo = e.phi; dphi_lo = e.dphi;
                }
                if (std::abs(alpha_hi - alpha_lo) < opts.min_step) break;
            }
        }

        res.evaluations += line.count();
        if (!accepted) {
            res.status = LbfgsStatus::LineSearchFailed;
            res.iterations = iter - 1;
            return res;
        }

        // Accept the step; e holds f and g at the accepted point.
        std::copy(line.trial_g().begin(), line.trial_g().end(), g_new.begin());
        Pair pair;
        pair.s.resize(n);
        pair.y.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            pair.s[k] = line.trial_x()[k] - res.x[k];
            pair.y[k] = g_new[k] - g[k];
        }
        std::copy(line.trial_x().begin(), line.trial_x().end(), res.x.begin());
        f = e.phi;
        res.f = f;
        g.swap(g_new);
        res.iterations = iter;

        const double sy = dot(pair.s, pair.y);
        if (sy > 1e-12 * norm2(pair.s) * norm2(pair.y)) {
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
        }

        if (norm2(g) <= opts.grad_tol) {
            res.status = LbfgsStatus::Converged;
            return res;
        }
    }

    res.status = LbfgsStatus::Budget;
    return res;
}

} // namespace cpinn
