#pragma once

#include "cpinn/network.hpp"
#include "cpinn/pde.hpp"
#include "cpinn/rp.hpp"
#include "cpinn/sampling.hpp"
#include "cpinn/train.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cpinn {

/// Everything one experiment run needs, loadable from a JSON file. Missing
/// keys take problem-specific defaults; unknown keys are rejected so typos
/// fail loudly. The resolved form round-trips losslessly through its text
/// representation.
struct ExperimentConfig {
    PdeKind kind = PdeKind::Heat1D;
    double a = 1.0;
    double L = 0.0; // resolved from the problem when 0
    double T = 0.0;

    NetSpec netu;
    NetSpec netg;

    TrainConfig train;
    SamplingConfig sampling;

    // Recurrent prediction
    int rp_taps = 4;
    std::vector<double> rp_tap_points; // overrides equispaced default when nonempty
    double rp_delay = 0.0;             // 0: evaluation grid temporal spacing
    int rp_train_iters = 1500; // single L-BFGS run for NetU-RP

    int grid_nx = 201;
    int grid_nt = 201;
    std::vector<double> snapshots; // defaults: heat {3, 7}, wave {2, 4}

    // Soft-sensor experiment
    int sensor_count = 4;
    int sensor_masked = 4;        // 1-based; 0 masks nothing
    int sensor_samples = 2048;    // per-sensor series length
    double train_fraction = 0.01; // share of sampled sensor data used as labels

    std::string output_dir = "out";

    void validate() const;
};

ExperimentConfig default_config(PdeKind kind);

/// Parses the file, overlays it on the defaults for its problem kind, and
/// validates. Throws ConfigError on unknown keys or bad values.
ExperimentConfig load_config(const std::string& path);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Writes the fully resolved configuration (all defaults filled in).
void save_config(const ExperimentConfig& cfg, const std::string& path);

/// Applies one "dotted.path=value" override; the value is parsed as JSON
/// (falling back to a string). Used by CLI flags.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Builds the PdeProblem this config describes. Overriding a or L away from
/// the benchmark constants invalidates the closed-form solution, so exact_u
/// and exact_g are dropped in that case; overriding T is always safe.
PdeProblem make_problem_from_config(const ExperimentConfig& cfg);

RpConfig make_rp_config(const ExperimentConfig& cfg, const PdeProblem& problem);

} // namespace cpinn
