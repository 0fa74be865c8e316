#pragma once

#include "cpinn/metrics.hpp"
#include "cpinn/network.hpp"
#include "cpinn/pde.hpp"
#include "cpinn/sampling.hpp"
#include "cpinn/train.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpinn {

enum class TapSource { HardSensor, CpinnFallback };

/// Recurrent-prediction configuration: spatial tap locations, the temporal
/// delay of the recurrent inputs, and which source feeds each tap.
struct RpConfig {
    std::vector<double> tap_points;
    double delay = 0.0;
    std::vector<TapSource> sensor_availability; // per tap

    int tap_count() const { return static_cast<int>(tap_points.size()); }
    void validate(const PdeProblem& problem) const;
};

/// Default taps for the synthetic benchmarks: four equispaced interior
/// points fed from the trained CPINN, delay = the evaluation grid's temporal
/// spacing.
RpConfig default_rp_config(const PdeProblem& problem, int n_taps, double grid_dt);

/// Uniformly sampled measurement record of one hard sensor.
struct SensorSeries {
    double x = 0.0;
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;

    static SensorSeries from_samples(double x, std::span<const double> times,
                                     std::span<const double> values);
    double time_at(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
    double t_end() const { return time_at(values.empty() ? 0 : values.size() - 1); }
};

/// Series value at query time q using only samples taken at or before q:
/// exact hits return the sample, otherwise the line through the two most
/// recent samples is extended to q. Throws DataError when the series does
/// not cover q.
double sensor_value_at(const SensorSeries& series, double q);

/// Where each tap value came from, for audit.
enum class TapProvenance { InitialCondition, HardSensor, CpinnFallback };

/// Full NetU-RP input vector [x, t, v_1..v_m]: v_i is the value at
/// (tap_i, t - delay), taken from the hard-sensor series when the tap has
/// one, otherwise from the trained CPINN; queries before t = 0 fall back to
/// the initial condition.
std::vector<double> build_rp_input(double x, double t, const RpConfig& rp_cfg,
                                   const std::vector<SensorSeries>& sensors,
                                   const MlpParams& cpinn_u, const PdeProblem& problem,
                                   std::vector<TapProvenance>* provenance = nullptr);

/// Just the tap values (they depend on t only).
std::vector<double> rp_tap_values(double t, const RpConfig& rp_cfg,
                                  const std::vector<SensorSeries>& sensors,
                                  const MlpParams& cpinn_u, const PdeProblem& problem,
                                  std::vector<TapProvenance>* provenance = nullptr);

/// NetU-RP initialization: hidden and output layers plus the (x, t) columns
/// of the first layer are copied from the trained CPINN solution network;
/// tap columns start at zero, so the untrained NetU-RP computes exactly the
/// CPINN surface and training can only move away from it when the taps pay.
MlpParams init_netu_rp(const MlpParams& cpinn_u, int n_taps);

/// Tap inputs for every dataset point, precomputed from the frozen CPINN and
/// the sensor series so the RP loss is a static objective.
TapInputs precompute_taps(const Dataset& dataset, const RpConfig& rp_cfg,
                          const std::vector<SensorSeries>& sensors, const MlpParams& cpinn_u,
                          const PdeProblem& problem);

struct RpTrainOutput {
    MlpParams net;
    HybridLossParts initial;
    HybridLossParts final;
    LbfgsStatus opt_status = LbfgsStatus::Budget;
    int opt_iterations = 0;
    double wall_ms = 0.0;
};

/// Trains NetU-RP with the same hybrid loss as CPINN; the source values and
/// all tap inputs are frozen before optimization. Budget: cfg.inner_iters_u.
RpTrainOutput train_netu_rp(const MlpParams& cpinn_u, const MlpParams& cpinn_g,
                            const Dataset& dataset, const PdeProblem& problem,
                            const RpConfig& rp_cfg, const std::vector<SensorSeries>& sensors,
                            const TrainConfig& cfg);

/// Soft-sensor surface: NetU-RP evaluated at every grid point with taps built
/// from the sensors/CPINN. Values in grid order.
std::vector<double> predict(const MlpParams& net_u_rp, const RpConfig& rp_cfg,
                            const std::vector<SensorSeries>& sensors, const MlpParams& cpinn_u,
                            const PdeProblem& problem, const EvalGrid& grid);

struct SensorReport {
    int index = 0; // 1-based, matching file naming
    double x = 0.0;
    std::size_t n = 0;
    double rmse = 0.0;
    double cc = 0.0;
    bool masked = false;
};

struct MaskedSensorSetup {
    std::vector<double> sensor_locs;
    int masked_index = -1; // 0-based; -1 masks nothing
    int n_samples = 2048;  // per-sensor series length over [0, T]
    double train_fraction = 0.01;
    NetSpec spec_u, spec_g;
    TrainConfig train;
    int rp_train_iters = 1500;
    double delay = 0.0; // 0: default to the series spacing
    int boundary_points = -1; // -1: problem default
};

struct MaskedSensorResult {
    std::vector<SensorReport> reports;
    std::vector<SensorSeries> sensors;
    MlpParams cpinn_u, cpinn_g, net_u_rp;
    RpConfig rp_cfg;
    TrainReport cpinn_report;
    RpTrainOutput rp_output;
};

/// The §-style masked-sensor protocol on synthetic data: series are generated
/// from the exact solution at the sensor locations, the masked sensor
/// contributes no training data and its tap falls back to the CPINN, and
/// per-sensor RMSE/CC (including the masked one) are reported.
MaskedSensorResult masked_sensor_experiment(const PdeProblem& problem,
                                            const MaskedSensorSetup& setup);

/// Same protocol on externally provided series (e.g. ingested CSV files).
MaskedSensorResult masked_sensor_experiment(const PdeProblem& problem,
                                            std::vector<SensorSeries> sensors,
                                            const MaskedSensorSetup& setup);

// Sensor CSV: one "t,u" file per sensor plus a JSON manifest mapping file
// names to x locations.
void write_sensor_series(const std::vector<SensorSeries>& sensors, const std::string& dir);
std::vector<SensorSeries> read_sensor_series(const std::string& dir);

void write_sensor_report_csv(const std::vector<SensorReport>& reports, const std::string& path);

/// Prediction surface CSV with header "x,t,u_hat", grid order.
void write_prediction_csv(const EvalGrid& grid, std::span<const double> values,
                          const std::string& path);

} // namespace cpinn
