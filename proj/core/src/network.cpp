#include "cpinn/network.hpp"

#include "cpinn/errors.hpp"
#include "cpinn/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace cpinn {

void NetSpec::validate() const {
    if (hidden_layers < 1) throw ConfigError("NetSpec: hidden_layers must be >= 1");
    if (hidden_width < 1) throw ConfigError("NetSpec: hidden_width must be >= 1");
    if (input_dim < 2) throw ConfigError("NetSpec: input_dim must be >= 2 (x, t)");
}

std::vector<int> NetSpec::layer_sizes() const {
    std::vector<int> sizes;
    sizes.push_back(input_dim);
    for (int i = 0; i < hidden_layers; ++i) sizes.push_back(hidden_width);
    sizes.push_back(1);
    return sizes;
}

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

void MlpParams::to_flat(std::span<double> out) const {
    if (out.size() != param_count()) throw StructuralError("to_flat: size mismatch");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        std::memcpy(out.data() + pos, weights[l].data(), weights[l].size() * sizeof(double));
        pos += weights[l].size();
        std::memcpy(out.data() + pos, biases[l].data(), biases[l].size() * sizeof(double));
        pos += biases[l].size();
    }
}

void MlpParams::from_flat(std::span<const double> in) {
    if (in.size() != param_count()) throw StructuralError("from_flat: size mismatch");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        std::memcpy(weights[l].data(), in.data() + pos, weights[l].size() * sizeof(double));
        pos += weights[l].size();
        std::memcpy(biases[l].data(), in.data() + pos, biases[l].size() * sizeof(double));
        pos += biases[l].size();
    }
}

std::vector<double> MlpParams::flat() const {
    std::vector<double> out(param_count());
    to_flat(out);
    return out;
}

MlpParams init_xavier(const NetSpec& spec) {
    spec.validate();
    MlpParams p;
    p.layer_sizes = spec.layer_sizes();
    Rng rng(spec.seed);
    for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        const int fan_in = p.layer_sizes[l];
        const int fan_out = p.layer_sizes[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
        for (double& x : w) x = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

double forward(const MlpParams& params, std::span<const double> input) {
    if (static_cast<int>(input.size()) != params.input_dim())
        throw StructuralError("forward: input length does not match network input_dim");
    std::vector<double> a(input.begin(), input.end());
    std::vector<double> z;
    const int n_layers = params.num_layers();
    for (int l = 0; l < n_layers; ++l) {
        const int in = params.layer_sizes[l];
        const int out = params.layer_sizes[l + 1];
        z.assign(static_cast<std::size_t>(out), 0.0);
        const double* w = params.weights[l].data();
        for (int j = 0; j < out; ++j) {
            double s = params.biases[l][j];
            const double* wj = w + static_cast<std::size_t>(j) * in;
            for (int k = 0; k < in; ++k) s += wj[k] * a[k];
            z[j] = s;
        }
        if (l + 1 < n_layers)
            for (double& x : z) x = std::tanh(x);
        a = z;
    }
    return a[0];
}

namespace {

constexpr char kMagic[8] = {'C', 'P', 'I', 'N', 'N', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::ifstream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw StructuralError("checkpoint: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

// Format: magic "CPINNNET", u32 version, u32 n_sizes, u32 layer_sizes[n_sizes],
// then per layer f64 weights (row-major) followed by f64 biases. Little-endian
// throughout; doubles are written verbatim on little-endian hosts.
void save_params(const MlpParams& params, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(params.layer_sizes.size()));
    for (int s : params.layer_sizes) write_u32(os, static_cast<std::uint32_t>(s));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        os.write(reinterpret_cast<const char*>(params.weights[l].data()),
                 static_cast<std::streamsize>(params.weights[l].size() * sizeof(double)));
        os.write(reinterpret_cast<const char*>(params.biases[l].data()),
                 static_cast<std::streamsize>(params.biases[l].size() * sizeof(double)));
    }
    if (!os) throw DataError("checkpoint write failed: " + path);
}

MlpParams load_params(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw StructuralError("checkpoint: bad magic in " + path);
    const std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw StructuralError("checkpoint: unsupported version " + std::to_string(version));
    const std::uint32_t n_sizes = read_u32(is);
    if (n_sizes < 2 || n_sizes > 64) throw StructuralError("checkpoint: implausible layer count");
    MlpParams p;
    p.layer_sizes.resize(n_sizes);
    for (std::uint32_t i = 0; i < n_sizes; ++i) {
        p.layer_sizes[i] = static_cast<int>(read_u32(is));
        if (p.layer_sizes[i] < 1) throw StructuralError("checkpoint: nonpositive layer size");
    }
    for (std::uint32_t l = 0; l + 1 < n_sizes; ++l) {
        const std::size_t in = static_cast<std::size_t>(p.layer_sizes[l]);
        const std::size_t out = static_cast<std::size_t>(p.layer_sizes[l + 1]);
        std::vector<double> w(out * in), b(out);
        is.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
        is.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
        if (!is) throw StructuralError("checkpoint: payload shorter than header layer_sizes imply");
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    // Reject trailing garbage so header and payload always agree.
    is.peek();
    if (!is.eof()) throw StructuralError("checkpoint: payload longer than header layer_sizes imply");
    return p;
}

} // namespace cpinn
