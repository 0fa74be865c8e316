#pragma once

#include "cpinn/jet.hpp"
#include "cpinn/network.hpp"

#include <span>
#include <vector>

namespace cpinn {

/// Forward pass of an MLP on jet inputs, keeping the per-layer jets so a
/// reverse sweep can accumulate exact parameter gradients of any scalar
/// formed from the output jet's slots. The tape is rebuilt on every forward
/// call; backward() must follow the forward() whose intermediates it uses.
///
/// Inputs beyond (x, t) — the recurrent taps — are treated as constants with
/// zero input-derivatives.
class JetEvaluator {
public:
    explicit JetEvaluator(const MlpParams& shape);

    Jet2 forward(const MlpParams& params, double x, double t,
                 std::span<const double> taps = {});

    /// Accumulates adjoint^T * d(output jet)/d(theta) into grad_flat,
    /// which must have MlpParams::param_count() entries.
    void backward(const MlpParams& params, const Jet2& out_adjoint,
                  std::span<double> grad_flat) const;

private:
    std::vector<int> sizes_;
    std::vector<std::vector<Jet2>> act_;          // act_[0] = inputs, act_[l+1] = output of layer l
    std::vector<std::vector<Jet2>> pre_;          // pre_[l]  = pre-activation of layer l
    mutable std::vector<std::vector<Jet2>> adj_;  // reverse-sweep workspace
    std::vector<std::size_t> w_off_, b_off_;      // flat-layout offsets per layer
};

/// Value-only MLP pass with standard backpropagation. Used where no input
/// derivatives are needed (NetG everywhere, NetU on plain value labels);
/// identical results to the jet path's value slot at a sixth of the cost.
class ScalarEvaluator {
public:
    explicit ScalarEvaluator(const MlpParams& shape);

    double forward(const MlpParams& params, std::span<const double> input);

    void backward(const MlpParams& params, double out_adjoint,
                  std::span<double> grad_flat) const;

private:
    std::vector<int> sizes_;
    std::vector<std::vector<double>> act_;
    mutable std::vector<std::vector<double>> delta_;
    std::vector<std::size_t> w_off_, b_off_;
};

/// One-shot jet evaluation of a network at (x, t). Convenience wrapper over
/// JetEvaluator for callers outside hot loops.
Jet2 jet_forward(const MlpParams& params, double x, double t,
                 std::span<const double> taps = {});

} // namespace cpinn
