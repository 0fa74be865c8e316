#include "cpinn/autodiff.hpp"
#include "cpinn/lbfgs.hpp"
#include "cpinn/network.hpp"
#include "cpinn/sampling.hpp"
#include "cpinn/train.hpp"

#include <benchmark/benchmark.h>

using namespace cpinn;

namespace {

MlpParams netu_3x30() { return init_xavier(NetSpec{NetRole::NetU, 3, 30, 2, 42}); }
MlpParams netg_8x20() { return init_xavier(NetSpec{NetRole::NetG, 8, 20, 2, 43}); }

void JetForward(benchmark::State& state) {
    const MlpParams p = netu_3x30();
    JetEvaluator ev(p);
    double x = 0.3;
    for (auto _ : state) {
        const Jet2 j = ev.forward(p, x, 1.7);
        benchmark::DoNotOptimize(j);
        x += 1e-9;
    }
}
BENCHMARK(JetForward);

void JetBackward(benchmark::State& state) {
    const MlpParams p = netu_3x30();
    JetEvaluator ev(p);
    std::vector<double> grad(p.param_count(), 0.0);
    ev.forward(p, 0.3, 1.7);
    Jet2 adj{};
    adj.dt = 1.0;
    adj.dxx = -1.0;
    for (auto _ : state) {
        ev.backward(p, adj, grad);
        benchmark::DoNotOptimize(grad.data());
    }
}
BENCHMARK(JetBackward);

void ScalarBackprop(benchmark::State& state) {
    const MlpParams p = netg_8x20();
    ScalarEvaluator ev(p);
    std::vector<double> grad(p.param_count(), 0.0);
    const double in[2] = {0.5, 2.0};
    for (auto _ : state) {
        const double v = ev.forward(p, in);
        ev.backward(p, 2.0 * v, grad);
        benchmark::DoNotOptimize(grad.data());
    }
}
BENCHMARK(ScalarBackprop);

void HeatHybridLossGrad(benchmark::State& state) {
    const auto problem = make_heat_problem();
    const Dataset ds = sample_heat(problem, {.seed = 1});
    const MlpParams p = netu_3x30();
    HybridObjective objective(problem, ds, std::vector<double>(ds.collocation_count(), 0.0), 1.0,
                              p);
    const auto theta = p.flat();
    std::vector<double> grad(theta.size(), 0.0);
    for (auto _ : state) {
        std::fill(grad.begin(), grad.end(), 0.0);
        benchmark::DoNotOptimize(objective(theta, grad));
    }
}
BENCHMARK(HeatHybridLossGrad);

void RosenbrockSolve(benchmark::State& state) {
    Objective rosenbrock = [](std::span<const double> x, std::span<double> g) {
        const double a = x[1] - x[0] * x[0];
        const double b = 1.0 - x[0];
        g[0] = -400.0 * a * x[0] - 2.0 * b;
        g[1] = 200.0 * a;
        return 100.0 * a * a + b * b;
    };
    LbfgsOptions opts;
    opts.max_iterations = 200;
    for (auto _ : state) {
        const auto res = lbfgs_minimize(rosenbrock, {-1.2, 1.0}, opts);
        benchmark::DoNotOptimize(res.f);
    }
}
BENCHMARK(RosenbrockSolve);

} // namespace

BENCHMARK_MAIN();
