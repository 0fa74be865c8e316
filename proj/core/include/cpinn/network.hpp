#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cpinn {

enum class NetRole { NetU, NetG, NetURp };

/// Architecture description for one fully-connected tanh network.
struct NetSpec {
    NetRole role = NetRole::NetU;
    int hidden_layers = 3;
    int hidden_width = 30;
    int input_dim = 2;
    std::uint64_t seed = 0;

    void validate() const; // throws ConfigError
    std::vector<int> layer_sizes() const; // input_dim, widths..., 1
};

/// Weights and biases of a fully-connected MLP with tanh hidden activations
/// and a linear output layer. Layout contract (also the checkpoint payload
/// and the flat gradient order): for each layer in order, row-major weights
/// (out x in), then biases.
struct MlpParams {
    std::vector<int> layer_sizes;
    std::vector<std::vector<double>> weights; // weights[l][j*in + k]
    std::vector<std::vector<double>> biases;  // biases[l][j]

    int input_dim() const { return layer_sizes.front(); }
    int num_layers() const { return static_cast<int>(weights.size()); }
    std::size_t param_count() const;

    void to_flat(std::span<double> out) const;
    void from_flat(std::span<const double> in);
    std::vector<double> flat() const;
};

/// Xavier-uniform initialization: weights in [-b, b] with b = sqrt(6/(fan_in+fan_out)),
/// biases zero. Deterministic per spec.seed; draw order is layer by layer, row-major.
MlpParams init_xavier(const NetSpec& spec);

/// Plain MLP evaluation. Bit-identical to the value slot of the jet forward pass.
double forward(const MlpParams& params, std::span<const double> input);

/// Self-describing binary checkpoint, little-endian f64, bit-exact round-trip.
void save_params(const MlpParams& params, const std::string& path);
MlpParams load_params(const std::string& path);

} // namespace cpinn
