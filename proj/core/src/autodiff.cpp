#include "cpinn/autodiff.hpp"

#include "cpinn/errors.hpp"

#include <cmath>

namespace cpinn {

namespace {

inline double dot6(const Jet2& a, const Jet2& b) {
    return a.v * b.v + a.dx * b.dx + a.dt * b.dt + a.dxx * b.dxx + a.dtt * b.dtt +
           a.dxt * b.dxt;
}

inline void axpy6(double s, const Jet2& a, Jet2& out) {
    out.v += s * a.v;
    out.dx += s * a.dx;
    out.dt += s * a.dt;
    out.dxx += s * a.dxx;
    out.dtt += s * a.dtt;
    out.dxt += s * a.dxt;
}

// Reverse of y = tanh(u) on jets. u is the stored pre-activation jet, ybar the
// adjoint of the output jet; returns the adjoint of u. Derivatives of tanh:
// f' = s = 1 - T^2, f'' = -2Ts, f''' = -2s(s - 2T^2).
inline Jet2 tanh_pullback(const Jet2& u, const Jet2& ybar) {
    const double T = std::tanh(u.v);
    const double s = 1.0 - T * T;
    const double A = -2.0 * T * s;
    const double B = -2.0 * s * (s - 2.0 * T * T);
    Jet2 ubar;
    ubar.v = ybar.v * s +
             A * (ybar.dx * u.dx + ybar.dt * u.dt + ybar.dxx * u.dxx + ybar.dtt * u.dtt +
                  ybar.dxt * u.dxt) +
             B * (ybar.dxx * u.dx * u.dx + ybar.dtt * u.dt * u.dt + ybar.dxt * u.dx * u.dt);
    ubar.dx = ybar.dx * s + 2.0 * A * ybar.dxx * u.dx + A * ybar.dxt * u.dt;
    ubar.dt = ybar.dt * s + 2.0 * A * ybar.dtt * u.dt + A * ybar.dxt * u.dx;
    ubar.dxx = ybar.dxx * s;
    ubar.dtt = ybar.dtt * s;
    ubar.dxt = ybar.dxt * s;
    return ubar;
}

void layout_offsets(const std::vector<int>& sizes, std::vector<std::size_t>& w_off,
                    std::vector<std::size_t>& b_off) {
    std::size_t pos = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t nw = static_cast<std::size_t>(sizes[l + 1]) * sizes[l];
        w_off.push_back(pos);
        pos += nw;
        b_off.push_back(pos);
        pos += static_cast<std::size_t>(sizes[l + 1]);
    }
}

} // namespace

JetEvaluator::JetEvaluator(const MlpParams& shape) : sizes_(shape.layer_sizes) {
    act_.resize(sizes_.size());
    for (std::size_t i = 0; i < sizes_.size(); ++i) act_[i].resize(sizes_[i]);
    pre_.resize(sizes_.size() - 1);
    adj_.resize(sizes_.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        pre_[l].resize(sizes_[l + 1]);
        adj_[l].resize(sizes_[l + 1]);
    }
    layout_offsets(sizes_, w_off_, b_off_);
}

Jet2 JetEvaluator::forward(const MlpParams& params, double x, double t,
                           std::span<const double> taps) {
    if (params.layer_sizes != sizes_)
        throw StructuralError("JetEvaluator: params shape differs from construction shape");
    if (static_cast<int>(taps.size()) + 2 != sizes_[0])
        throw StructuralError("JetEvaluator: input arity (2 + taps) does not match input_dim");

    act_[0][0] = Jet2::var_x(x);
    act_[0][1] = Jet2::var_t(t);
    for (std::size_t i = 0; i < taps.size(); ++i) act_[0][2 + i] = Jet2::constant(taps[i]);

    const int n_layers = static_cast<int>(sizes_.size()) - 1;
    for (int l = 0; l < n_layers; ++l) {
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        const double* w = params.weights[l].data();
        const std::vector<Jet2>& a = act_[l];
        for (int j = 0; j < out; ++j) {
            Jet2 z = Jet2::constant(params.biases[l][j]);
            const double* wj = w + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) axpy6(wj[k], a[k], z);
            pre_[l][j] = z;
            act_[l + 1][j] = (l + 1 < n_layers) ? tanh(z) : z;
        }
    }
    return act_[n_layers][0];
}

void JetEvaluator::backward(const MlpParams& params, const Jet2& out_adjoint,
                            std::span<double> grad_flat) const {
    const int n_layers = static_cast<int>(sizes_.size()) - 1;
    adj_[n_layers - 1][0] = out_adjoint;

    for (int l = n_layers - 1; l >= 0; --l) {
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        const double* w = params.weights[l].data();
        const std::vector<Jet2>& a_in = act_[l];
        const std::vector<Jet2>& zbar = adj_[l];

        double* gw = grad_flat.data() + w_off_[l];
        double* gb = grad_flat.data() + b_off_[l];
        for (int j = 0; j < out; ++j) {
            gb[j] += zbar[j].v;
            double* gwj = gw + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) gwj[k] += dot6(zbar[j], a_in[k]);
        }

        if (l == 0) break;
        std::vector<Jet2>& abar = adj_[l - 1];
        for (int k = 0; k < in; ++k) abar[k] = Jet2{};
        for (int j = 0; j < out; ++j) {
            const double* wj = w + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) axpy6(wj[k], zbar[j], abar[k]);
        }
        // abar holds post-activation adjoints; pull back through tanh.
        for (int k = 0; k < in; ++k) abar[k] = tanh_pullback(pre_[l - 1][k], abar[k]);
    }
}

ScalarEvaluator::ScalarEvaluator(const MlpParams& shape) : sizes_(shape.layer_sizes) {
    act_.resize(sizes_.size());
    for (std::size_t i = 0; i < sizes_.size(); ++i) act_[i].resize(sizes_[i]);
    delta_.resize(sizes_.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) delta_[l].resize(sizes_[l + 1]);
    layout_offsets(sizes_, w_off_, b_off_);
}

double ScalarEvaluator::forward(const MlpParams& params, std::span<const double> input) {
    if (params.layer_sizes != sizes_)
        throw StructuralError("ScalarEvaluator: params shape differs from construction shape");
    if (static_cast<int>(input.size()) != sizes_[0])
        throw StructuralError("ScalarEvaluator: input length does not match input_dim");

    for (std::size_t i = 0; i < input.size(); ++i) act_[0][i] = input[i];
    const int n_layers = static_cast<int>(sizes_.size()) - 1;
    for (int l = 0; l < n_layers; ++l) {
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        const double* w = params.weights[l].data();
        const std::vector<double>& a = act_[l];
        for (int j = 0; j < out; ++j) {
            double s = params.biases[l][j];
            const double* wj = w + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) s += wj[k] * a[k];
            act_[l + 1][j] = (l + 1 < n_layers) ? std::tanh(s) : s;
        }
    }
    return act_[n_layers][0];
}

void ScalarEvaluator::backward(const MlpParams& params, double out_adjoint,
                               std::span<double> grad_flat) const {
    const int n_layers = static_cast<int>(sizes_.size()) - 1;
    delta_[n_layers - 1][0] = out_adjoint;

    for (int l = n_layers - 1; l >= 0; --l) {
        const int in = sizes_[l];
        const int out = sizes_[l + 1];
        const double* w = params.weights[l].data();
        const std::vector<double>& a_in = act_[l];
        const std::vector<double>& d = delta_[l];

        double* gw = grad_flat.data() + w_off_[l];
        double* gb = grad_flat.data() + b_off_[l];
        for (int j = 0; j < out; ++j) {
            gb[j] += d[j];
            double* gwj = gw + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) gwj[k] += d[j] * a_in[k];
        }

        if (l == 0) break;
        std::vector<double>& dprev = delta_[l - 1];
        for (int k = 0; k < in; ++k) dprev[k] = 0.0;
        for (int j = 0; j < out; ++j) {
            const double* wj = w + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) dprev[k] += wj[k] * d[j];
        }
        const std::vector<double>& h = act_[l]; // tanh outputs of layer l-1
        for (int k = 0; k < in; ++k) dprev[k] *= 1.0 - h[k] * h[k];
    }
}

Jet2 jet_forward(const MlpParams& params, double x, double t, std::span<const double> taps) {
    JetEvaluator ev(params);
    return ev.forward(params, x, t, taps);
}

} // namespace cpinn
