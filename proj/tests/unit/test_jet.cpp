#include "cpinn/jet.hpp"
#include "cpinn/rng.hpp"

#include "../oracles/fd.hpp"

#include <doctest.h>

#include <cmath>

using namespace cpinn;
using cpinn::testing::fd_jet;
using cpinn::testing::rel_err;

namespace {

// A representative composition of every primitive the engine propagates.
// Templated so the same expression runs on jets and on plain doubles (the
// finite-difference reference path).
template <typename T>
T test_expression(const T& x, const T& t) {
    using std::cos;
    using std::exp;
    using std::sin;
    using std::tanh;
    T a = tanh(x * t + 0.3 * x);
    T b = sin(x) * cos(t) - 0.5 * t;
    T c = exp((-0.2) * x * x);
    return a * b + c - 2.0 * a + b * b * 0.1;
}

} // namespace

TEST_SUITE("jet") {

TEST_CASE("constant jets stay constant through arithmetic") {
    const Jet2 c1 = Jet2::constant(1.7);
    const Jet2 c2 = Jet2::constant(-0.4);
    const Jet2 r = tanh(c1 * c2 + c1 - 0.3) * 2.0 + sin(c2);
    CHECK(r.dx == 0.0);
    CHECK(r.dt == 0.0);
    CHECK(r.dxx == 0.0);
    CHECK(r.dtt == 0.0);
    CHECK(r.dxt == 0.0);
}

TEST_CASE("linear field has exact first derivatives and zero curvature") {
    const Jet2 u = 2.0 * Jet2::var_x(0.7) + 3.0 * Jet2::var_t(-1.2);
    CHECK(u.v == doctest::Approx(2.0 * 0.7 + 3.0 * (-1.2)));
    CHECK(u.dx == 2.0);
    CHECK(u.dt == 3.0);
    CHECK(u.dxx == 0.0);
    CHECK(u.dtt == 0.0);
    CHECK(u.dxt == 0.0);
}

TEST_CASE("product rule second derivatives") {
    // (x^2 * t)_xx = 2t, _xt = 2x, _tt = 0
    const double x = 1.3, t = -0.8;
    const Jet2 j = Jet2::var_x(x) * Jet2::var_x(x) * Jet2::var_t(t);
    CHECK(j.v == doctest::Approx(x * x * t));
    CHECK(j.dx == doctest::Approx(2 * x * t));
    CHECK(j.dt == doctest::Approx(x * x));
    CHECK(j.dxx == doctest::Approx(2 * t));
    CHECK(j.dxt == doctest::Approx(2 * x));
    CHECK(j.dtt == doctest::Approx(0.0));
}

TEST_CASE("chain rule matches finite differences on random points") {
    Rng rng(20240517);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = rng.uniform(-1.5, 1.5);
        const double t = rng.uniform(-1.5, 1.5);
        const Jet2 ad = test_expression(Jet2::var_x(x), Jet2::var_t(t));
        const Jet2 fd = fd_jet([](double xx, double tt) { return test_expression(xx, tt); }, x, t);

        CHECK(rel_err(ad.v, fd.v) <= 1e-9);
        CHECK(rel_err(ad.dx, fd.dx) <= 1e-6);
        CHECK(rel_err(ad.dt, fd.dt) <= 1e-6);
        CHECK(rel_err(ad.dxx, fd.dxx) <= 1e-6);
        CHECK(rel_err(ad.dtt, fd.dtt) <= 1e-6);
        CHECK(rel_err(ad.dxt, fd.dxt) <= 1e-5);
    }
}

TEST_CASE("unary primitives against finite differences") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const double x = rng.uniform(-1.0, 1.0);
        const double t = rng.uniform(-1.0, 1.0);
        const Jet2 seed = Jet2::var_x(x) * Jet2::var_t(t) + Jet2::var_x(x);

        auto scalar_seed = [](double xx, double tt) { return xx * tt + xx; };
        struct Case {
            Jet2 ad;
            std::function<double(double, double)> f;
        };
        const Case cases[] = {
            {tanh(seed), [&](double xx, double tt) { return std::tanh(scalar_seed(xx, tt)); }},
            {sin(seed), [&](double xx, double tt) { return std::sin(scalar_seed(xx, tt)); }},
            {cos(seed), [&](double xx, double tt) { return std::cos(scalar_seed(xx, tt)); }},
            {exp(seed), [&](double xx, double tt) { return std::exp(scalar_seed(xx, tt)); }},
        };
        for (const auto& c : cases) {
            const Jet2 fd = fd_jet(c.f, x, t);
            CHECK(rel_err(c.ad.dx, fd.dx) <= 1e-6);
            CHECK(rel_err(c.ad.dt, fd.dt) <= 1e-6);
            CHECK(rel_err(c.ad.dxx, fd.dxx) <= 1e-6);
            CHECK(rel_err(c.ad.dtt, fd.dtt) <= 1e-6);
            CHECK(rel_err(c.ad.dxt, fd.dxt) <= 1e-5);
        }
    }
}

TEST_CASE("finite detection") {
    CHECK(finite(Jet2::constant(1.0)));
    Jet2 bad = Jet2::constant(1.0);
    bad.dxx = std::numeric_limits<double>::infinity();
    CHECK(!finite(bad));
}

} // TEST_SUITE
