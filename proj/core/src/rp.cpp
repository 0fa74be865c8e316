#include "cpinn/rp.hpp"

#include "cpinn/autodiff.hpp"
#include "cpinn/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cpinn {

namespace fs = std::filesystem;

void RpConfig::validate(const PdeProblem& problem) const {
    if (tap_points.size() != sensor_availability.size())
        throw ConfigError("RpConfig: one availability flag per tap required");
    if (!tap_points.empty()) {
        if (delay <= 0.0 || delay >= problem.T)
            throw ConfigError("RpConfig: delay must lie in (0, T)");
        for (double x : tap_points)
            if (x < 0.0 || x > problem.L)
                throw ConfigError("RpConfig: tap location outside [0, L]");
    }
}

RpConfig default_rp_config(const PdeProblem& problem, int n_taps, double grid_dt) {
    RpConfig cfg;
    for (int i = 1; i <= n_taps; ++i)
        cfg.tap_points.push_back(problem.L * i / (n_taps + 1));
    cfg.sensor_availability.assign(n_taps, TapSource::CpinnFallback);
    cfg.delay = grid_dt;
    return cfg;
}

SensorSeries SensorSeries::from_samples(double x, std::span<const double> times,
                                        std::span<const double> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw DataError("sensor series: need at least two aligned samples");
    SensorSeries s;
    s.x = x;
    s.t0 = times[0];
    s.dt = times[1] - times[0];
    if (s.dt <= 0.0) throw DataError("sensor series: sample times must be strictly increasing");
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double step = times[j] - times[j - 1];
        if (step <= 0.0) throw DataError("sensor series: sample times must be strictly increasing");
        if (std::abs(step - s.dt) > 1e-9 * s.dt)
            throw DataError("sensor series: sample spacing is not uniform");
    }
    s.values.assign(values.begin(), values.end());
    return s;
}

double sensor_value_at(const SensorSeries& series, double q) {
    if (series.values.size() < 2) throw DataError("sensor series: too short");
    const double eps = 1e-9 * series.dt;
    if (q < series.t0 - eps || q > series.t_end() + eps)
        throw DataError("sensor series at x=" + std::to_string(series.x) +
                        ": no samples covering t=" + std::to_string(q));

    // Index of the most recent sample taken at or before q. Only samples up
    // to that index are touched: no future leakage past the query time.
    double fidx = (q - series.t0) / series.dt;
    std::size_t j = static_cast<std::size_t>(std::max(0.0, std::floor(fidx + 1e-9)));
    j = std::min(j, series.values.size() - 1);

    const double tj = series.time_at(j);
    if (std::abs(q - tj) <= eps) return series.values[j];
    if (j == 0) return series.values[0]; // only one past sample: hold
    const double v0 = series.values[j - 1];
    const double v1 = series.values[j];
    return v0 + (v1 - v0) * (q - series.time_at(j - 1)) / series.dt;
}

namespace {

// Maps each hard tap to its series by location.
std::vector<int> match_sensors(const RpConfig& cfg, const std::vector<SensorSeries>& sensors,
                               double L) {
    std::vector<int> idx(cfg.tap_points.size(), -1);
    const double tol = 1e-9 * std::max(L, 1.0);
    for (std::size_t i = 0; i < cfg.tap_points.size(); ++i) {
        if (cfg.sensor_availability[i] != TapSource::HardSensor) continue;
        for (std::size_t s = 0; s < sensors.size(); ++s) {
            if (std::abs(sensors[s].x - cfg.tap_points[i]) <= tol) {
                idx[i] = static_cast<int>(s);
                break;
            }
        }
        if (idx[i] < 0)
            throw DataError("no sensor series at hard tap location x=" +
                            std::to_string(cfg.tap_points[i]));
    }
    return idx;
}

} // namespace

std::vector<double> rp_tap_values(double t, const RpConfig& rp_cfg,
                                  const std::vector<SensorSeries>& sensors,
                                  const MlpParams& cpinn_u, const PdeProblem& problem,
                                  std::vector<TapProvenance>* provenance) {
    const auto series_idx = match_sensors(rp_cfg, sensors, problem.L);
    std::vector<double> taps(rp_cfg.tap_points.size());
    if (provenance) provenance->assign(rp_cfg.tap_points.size(), TapProvenance::InitialCondition);

    ScalarEvaluator ev(cpinn_u);
    const double q = t - rp_cfg.delay;
    for (std::size_t i = 0; i < rp_cfg.tap_points.size(); ++i) {
        const double xs = rp_cfg.tap_points[i];
        if (q < 0.0) {
            taps[i] = problem.ic(xs);
            if (provenance) (*provenance)[i] = TapProvenance::InitialCondition;
        } else if (rp_cfg.sensor_availability[i] == TapSource::HardSensor) {
            taps[i] = sensor_value_at(sensors[series_idx[i]], q);
            if (provenance) (*provenance)[i] = TapProvenance::HardSensor;
        } else {
            const double in[2] = {xs, q};
            taps[i] = ev.forward(cpinn_u, in);
            if (provenance) (*provenance)[i] = TapProvenance::CpinnFallback;
        }
    }
    return taps;
}

std::vector<double> build_rp_input(double x, double t, const RpConfig& rp_cfg,
                                   const std::vector<SensorSeries>& sensors,
                                   const MlpParams& cpinn_u, const PdeProblem& problem,
                                   std::vector<TapProvenance>* provenance) {
    problem.require_in_domain(x, t);
    std::vector<double> input{x, t};
    const auto taps = rp_tap_values(t, rp_cfg, sensors, cpinn_u, problem, provenance);
    input.insert(input.end(), taps.begin(), taps.end());
    return input;
}

MlpParams init_netu_rp(const MlpParams& cpinn_u, int n_taps) {
    NetSpec spec;
    spec.role = NetRole::NetURp;
    spec.input_dim = cpinn_u.input_dim() + n_taps;
    spec.hidden_layers = static_cast<int>(cpinn_u.layer_sizes.size()) - 2;
    spec.hidden_width = cpinn_u.layer_sizes[1];
    MlpParams rp = init_xavier(spec);

    // First layer: (x, t) columns and biases from CPINN, tap columns zeroed.
    // A randomly initialized tap block feeds O(1) solution values through
    // fresh weights into every hidden unit, which knocks the network out of
    // the trained basin; retraining then recovers the data sites but not the
    // surface between them.
    const int in_u = cpinn_u.layer_sizes[0];
    const int in_rp = rp.layer_sizes[0];
    const int out0 = rp.layer_sizes[1];
    for (int j = 0; j < out0; ++j) {
        for (int k = 0; k < in_u; ++k)
            rp.weights[0][static_cast<std::size_t>(j) * in_rp + k] =
                cpinn_u.weights[0][static_cast<std::size_t>(j) * in_u + k];
        for (int k = in_u; k < in_rp; ++k)
            rp.weights[0][static_cast<std::size_t>(j) * in_rp + k] = 0.0;
    }
    rp.biases[0] = cpinn_u.biases[0];
    for (std::size_t l = 1; l < cpinn_u.weights.size(); ++l) {
        rp.weights[l] = cpinn_u.weights[l];
        rp.biases[l] = cpinn_u.biases[l];
    }
    return rp;
}

TapInputs precompute_taps(const Dataset& dataset, const RpConfig& rp_cfg,
                          const std::vector<SensorSeries>& sensors, const MlpParams& cpinn_u,
                          const PdeProblem& problem) {
    TapInputs taps;
    taps.width = rp_cfg.tap_count();
    if (taps.width == 0) return taps;

    auto append = [&](std::vector<double>& out, double t) {
        const auto v = rp_tap_values(t, rp_cfg, sensors, cpinn_u, problem, nullptr);
        out.insert(out.end(), v.begin(), v.end());
    };
    for (const auto& p : dataset.d_b) append(taps.labeled, p.t);
    for (const auto& p : dataset.d_i) append(taps.labeled, p.t);
    for (const auto& p : dataset.all_collocation()) append(taps.collocation, p.t);
    return taps;
}

RpTrainOutput train_netu_rp(const MlpParams& cpinn_u, const MlpParams& cpinn_g,
                            const Dataset& dataset, const PdeProblem& problem,
                            const RpConfig& rp_cfg, const std::vector<SensorSeries>& sensors,
                            const TrainConfig& cfg) {
    cfg.validate();
    rp_cfg.validate(problem);
    const auto t0 = std::chrono::steady_clock::now();

    RpTrainOutput out;
    out.net = init_netu_rp(cpinn_u, rp_cfg.tap_count());

    // Source values at collocation points and tap inputs are frozen now; the
    // optimization below sees a static objective.
    ScalarEvaluator gev(cpinn_g);
    const auto collocation = dataset.all_collocation();
    std::vector<double> g_at(collocation.size());
    for (std::size_t i = 0; i < collocation.size(); ++i) {
        const double in[2] = {collocation[i].x,
                              problem.source_time_dependent ? collocation[i].t : 0.0};
        g_at[i] = gev.forward(cpinn_g, in);
    }

    HybridObjective objective(problem, dataset, std::move(g_at), cfg.physics_weight, out.net,
                              precompute_taps(dataset, rp_cfg, sensors, cpinn_u, problem));

    out.initial = objective.parts(out.net);
    if (cfg.inner_iters_u > 0) {
        LbfgsOptions opts;
        opts.max_iterations = cfg.inner_iters_u;
        opts.memory = cfg.lbfgs_memory;
        auto result = lbfgs_minimize(std::ref(objective), out.net.flat(), opts);
        out.net.from_flat(result.x);
        out.opt_status = result.status;
        out.opt_iterations = result.iterations;
    }
    out.final = objective.parts(out.net);
    out.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<double> predict(const MlpParams& net_u_rp, const RpConfig& rp_cfg,
                            const std::vector<SensorSeries>& sensors, const MlpParams& cpinn_u,
                            const PdeProblem& problem, const EvalGrid& grid) {
    if (net_u_rp.input_dim() != 2 + rp_cfg.tap_count())
        throw StructuralError("predict: network input_dim does not match tap count");
    std::vector<double> field(grid.size());
    ScalarEvaluator ev(net_u_rp);
    std::vector<double> input(static_cast<std::size_t>(2 + rp_cfg.tap_count()));
    for (int it = 0; it < grid.nt; ++it) {
        // Taps depend on t only; build them once per grid row.
        const double t = grid.t_at(it);
        const auto taps = rp_tap_values(t, rp_cfg, sensors, cpinn_u, problem, nullptr);
        input[1] = t;
        std::copy(taps.begin(), taps.end(), input.begin() + 2);
        for (int ix = 0; ix < grid.nx; ++ix) {
            input[0] = grid.x_at(ix);
            field[static_cast<std::size_t>(it) * grid.nx + ix] = ev.forward(net_u_rp, input);
        }
    }
    return field;
}

// --- Masked-sensor experiment ---------------------------------------------------

MaskedSensorResult masked_sensor_experiment(const PdeProblem& problem,
                                            const MaskedSensorSetup& setup) {
    if (!problem.exact_u)
        throw ConfigError("masked_sensor_experiment: synthetic series require exact_u");
    if (setup.n_samples < 2) throw ConfigError("masked_sensor_experiment: n_samples must be >= 2");

    std::vector<SensorSeries> sensors;
    for (double xs : setup.sensor_locs) {
        SensorSeries s;
        s.x = xs;
        s.t0 = 0.0;
        s.dt = problem.T / (setup.n_samples - 1);
        s.values.resize(setup.n_samples);
        for (int j = 0; j < setup.n_samples; ++j)
            s.values[static_cast<std::size_t>(j)] = problem.exact_u(xs, s.time_at(j));
        sensors.push_back(std::move(s));
    }
    return masked_sensor_experiment(problem, std::move(sensors), setup);
}

MaskedSensorResult masked_sensor_experiment(const PdeProblem& problem,
                                            std::vector<SensorSeries> sensors,
                                            const MaskedSensorSetup& setup) {
    const int n_sensors = static_cast<int>(sensors.size());
    if (n_sensors < 2) throw ConfigError("masked_sensor_experiment: need at least 2 sensors");
    if (setup.masked_index < -1 || setup.masked_index >= n_sensors)
        throw ConfigError("masked_sensor_experiment: masked index " +
                          std::to_string(setup.masked_index + 1) + " out of range (have " +
                          std::to_string(n_sensors) + " sensors)");
    if (setup.train_fraction <= 0.0 || setup.train_fraction > 1.0)
        throw ConfigError("masked_sensor_experiment: train_fraction must be in (0, 1]");

    MaskedSensorResult res;
    res.sensors = std::move(sensors);

    // Boundary/initial labels come from the problem's known conditions; the
    // interior labels are a sparse subset of the unmasked series.
    SamplingConfig scfg;
    scfg.seed = setup.train.seed;
    scfg.n_boundary = setup.boundary_points;
    scfg.n_interior = 0;
    scfg.n_collocation = 0;
    Dataset dataset = sample_dataset(problem, scfg);

    const std::size_t total_samples =
        res.sensors.size() * res.sensors.front().values.size();
    const int n_unmasked = setup.masked_index >= 0 ? n_sensors - 1 : n_sensors;
    const std::size_t n_interior = std::max<std::size_t>(
        static_cast<std::size_t>(std::llround(setup.train_fraction * total_samples)),
        static_cast<std::size_t>(n_unmasked));
    const std::size_t per_sensor = std::max<std::size_t>(1, n_interior / n_unmasked);

    for (int s = 0; s < n_sensors; ++s) {
        if (s == setup.masked_index) continue; // the masked sensor contributes nothing
        const SensorSeries& series = res.sensors[static_cast<std::size_t>(s)];
        const std::size_t n = series.values.size();
        const std::size_t stride = std::max<std::size_t>(1, n / per_sensor);
        for (std::size_t j = stride / 2; j < n; j += stride) {
            const double t = series.time_at(j);
            if (t > problem.T) break;
            dataset.d_i.push_back({series.x, t, series.values[j], LabelKind::Value});
            dataset.e_i.push_back({series.x, t});
        }
    }

    res.cpinn_report = TrainReport{};
    auto trained = hierarchical_train(problem, dataset, setup.spec_u, setup.spec_g, setup.train);
    res.cpinn_u = std::move(trained.net_u);
    res.cpinn_g = std::move(trained.net_g);
    res.cpinn_report = std::move(trained.report);

    res.rp_cfg.tap_points.assign(setup.sensor_locs.begin(), setup.sensor_locs.end());
    if (res.rp_cfg.tap_points.empty())
        for (const auto& s : res.sensors) res.rp_cfg.tap_points.push_back(s.x);
    res.rp_cfg.sensor_availability.assign(res.rp_cfg.tap_points.size(), TapSource::HardSensor);
    if (setup.masked_index >= 0)
        res.rp_cfg.sensor_availability[static_cast<std::size_t>(setup.masked_index)] =
            TapSource::CpinnFallback;
    res.rp_cfg.delay = setup.delay > 0.0 ? setup.delay : res.sensors.front().dt;

    TrainConfig rp_train = setup.train;
    rp_train.inner_iters_u = setup.rp_train_iters;
    res.rp_output = train_netu_rp(res.cpinn_u, res.cpinn_g, dataset, problem, res.rp_cfg,
                                  res.sensors, rp_train);
    res.net_u_rp = res.rp_output.net;

    // Per-sensor evaluation of the soft-sensor output along each series.
    ScalarEvaluator ev(res.net_u_rp);
    std::vector<double> input(static_cast<std::size_t>(res.net_u_rp.input_dim()));
    for (int s = 0; s < n_sensors; ++s) {
        const SensorSeries& series = res.sensors[static_cast<std::size_t>(s)];
        std::vector<double> pred, truth;
        for (std::size_t j = 0; j < series.values.size(); ++j) {
            const double t = series.time_at(j);
            if (t > problem.T) break;
            const auto taps =
                rp_tap_values(t, res.rp_cfg, res.sensors, res.cpinn_u, problem, nullptr);
            input[0] = series.x;
            input[1] = t;
            std::copy(taps.begin(), taps.end(), input.begin() + 2);
            pred.push_back(ev.forward(res.net_u_rp, input));
            truth.push_back(series.values[j]);
        }
        SensorReport rep;
        rep.index = s + 1;
        rep.x = series.x;
        rep.n = pred.size();
        rep.rmse = rmse(pred, truth);
        rep.cc = pearson_cc(pred, truth);
        rep.masked = (s == setup.masked_index);
        res.reports.push_back(rep);
    }
    return res;
}

// --- Sensor CSV / manifest -------------------------------------------------------

void write_sensor_series(const std::vector<SensorSeries>& sensors, const std::string& dir) {
    fs::create_directories(dir);
    nlohmann::json manifest = nlohmann::json::array();
    char buf[64];
    for (std::size_t s = 0; s < sensors.size(); ++s) {
        std::snprintf(buf, sizeof(buf), "sensor_%zu.csv", s + 1);
        const std::string name = buf;
        std::ofstream os(fs::path(dir) / name);
        if (!os) throw DataError("cannot write sensor series: " + name);
        os << "t,u\n";
        for (std::size_t j = 0; j < sensors[s].values.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", sensors[s].time_at(j),
                          sensors[s].values[j]);
            os << buf;
        }
        manifest.push_back({{"file", name}, {"x", sensors[s].x}});
    }
    std::ofstream ms(fs::path(dir) / "sensors.json");
    ms << manifest.dump(2) << '\n';
    if (!ms) throw DataError("cannot write sensor manifest in " + dir);
}

std::vector<SensorSeries> read_sensor_series(const std::string& dir) {
    const fs::path manifest_path = fs::path(dir) / "sensors.json";
    std::ifstream ms(manifest_path);
    if (!ms) throw DataError("missing sensor manifest: " + manifest_path.string());
    nlohmann::json manifest;
    try {
        ms >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad sensor manifest: " + std::string(e.what()));
    }
    if (!manifest.is_array()) throw DataError("sensor manifest must be a JSON array");

    std::vector<SensorSeries> sensors;
    for (const auto& entry : manifest) {
        if (!entry.contains("file") || !entry.contains("x"))
            throw DataError("sensor manifest entries need 'file' and 'x'");
        const fs::path file = fs::path(dir) / entry["file"].get<std::string>();
        std::ifstream is(file);
        if (!is) throw DataError("cannot open sensor series: " + file.string());
        std::string line;
        if (!std::getline(is, line) || line != "t,u")
            throw DataError("sensor series " + file.string() + ": expected header 't,u'");
        std::vector<double> times, values;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw DataError("sensor series " + file.string() + ": malformed row");
            times.push_back(std::stod(line.substr(0, comma)));
            values.push_back(std::stod(line.substr(comma + 1)));
        }
        sensors.push_back(SensorSeries::from_samples(entry["x"].get<double>(), times, values));
    }
    return sensors;
}

void write_sensor_report_csv(const std::vector<SensorReport>& reports, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open sensor report for writing: " + path);
    os << "sensor,x,n,rmse,cc,masked\n";
    char buf[160];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%zu,%.17g,%.17g,%d\n", r.index, r.x, r.n, r.rmse,
                      r.cc, r.masked ? 1 : 0);
        os << buf;
    }
    if (!os) throw DataError("sensor report write failed: " + path);
}

void write_prediction_csv(const EvalGrid& grid, std::span<const double> values,
                          const std::string& path) {
    if (values.size() != grid.size())
        throw StructuralError("prediction surface size does not match grid");
    std::ofstream os(path);
    if (!os) throw DataError("cannot open prediction CSV for writing: " + path);
    os << "x,t,u_hat\n";
    char buf[128];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Point2 p = grid.point(i);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x, p.t, values[i]);
        os << buf;
    }
    if (!os) throw DataError("prediction CSV write failed: " + path);
}

} // namespace cpinn
