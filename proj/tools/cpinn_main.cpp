// cpinn — command-line driver for the CPINN-RP pipeline: dataset generation,
// coupled training, recurrent-prediction training, evaluation, and the
// masked-sensor soft-sensing experiment. All commands are driven by a JSON
// config; flags override config keys; outputs land in the config's
// output_dir together with a fully resolved config echo.

#include "cpinn/config.hpp"
#include "cpinn/errors.hpp"
#include "cpinn/metrics.hpp"
#include "cpinn/network.hpp"
#include "cpinn/rp.hpp"
#include "cpinn/sampling.hpp"
#include "cpinn/train.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir; // overrides config output_dir when set
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "JSON experiment config")->required();
    cmd->add_option("--set", args.overrides,
                    "Override a config key, e.g. --set train.seed=9 --set problem.kind=wave");
    cmd->add_option("-o,--out", args.out_dir, "Output directory (overrides config output_dir)");
}

cpinn::ExperimentConfig resolve_config(const CommonArgs& args) {
    std::ifstream is(args.config_path);
    if (!is) throw cpinn::ConfigError("cannot open config file: " + args.config_path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw cpinn::ConfigError("config " + args.config_path + " is not valid JSON: " + e.what());
    }
    for (const auto& assignment : args.overrides) cpinn::apply_override(j, assignment);
    cpinn::ExperimentConfig cfg = cpinn::config_from_json(j);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    return cfg;
}

void echo_config(const cpinn::ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    cpinn::save_config(cfg, (fs::path(cfg.output_dir) / "config_resolved.json").string());
}

std::string out_path(const cpinn::ExperimentConfig& cfg, const char* name) {
    return (fs::path(cfg.output_dir) / name).string();
}

cpinn::Dataset load_dataset_or_fail(const cpinn::ExperimentConfig& cfg,
                                    const cpinn::PdeProblem& problem) {
    const fs::path d_b = fs::path(cfg.output_dir) / "d_b.csv";
    if (!fs::exists(d_b))
        throw cpinn::DataError("no dataset in " + cfg.output_dir +
                               " — run `cpinn generate` first (missing " + d_b.string() + ")");
    return cpinn::read_dataset(problem, cfg.output_dir);
}

int cmd_generate(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto problem = cpinn::make_problem_from_config(cfg);
    const auto dataset = cpinn::sample_dataset(problem, cfg.sampling);
    dataset.validate(problem);

    echo_config(cfg);
    cpinn::write_dataset(dataset, cfg.output_dir);
    json grid = {{"nx", cfg.grid_nx}, {"nt", cfg.grid_nt}, {"L", problem.L}, {"T", problem.T}};
    std::ofstream gs(out_path(cfg, "grid.json"));
    gs << grid.dump(2) << '\n';
    if (!gs) throw cpinn::DataError("cannot write grid manifest");

    std::printf("generate: %zu boundary/initial labels, %zu interior labels, "
                "%zu extra collocation points -> %s\n",
                dataset.d_b.size(), dataset.d_i.size(), dataset.extra_collocation.size(),
                cfg.output_dir.c_str());
    return 0;
}

int cmd_train(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto problem = cpinn::make_problem_from_config(cfg);
    const auto dataset = load_dataset_or_fail(cfg, problem);
    echo_config(cfg);

    cpinn::NetSpec spec_u = cfg.netu;
    spec_u.input_dim = 2;
    cpinn::NetSpec spec_g = cfg.netg;
    spec_g.role = cpinn::NetRole::NetG;
    spec_g.input_dim = 2;

    cpinn::TrainConfig tcfg = cfg.train;
    tcfg.record_diagnostics = cfg.train.record_diagnostics && static_cast<bool>(problem.exact_u);

    auto result = cpinn::hierarchical_train(problem, dataset, spec_u, spec_g, tcfg);
    for (const auto& rec : result.report.iterations)
        std::printf("outer %3d: mse_dn %.6e  mse_pn %.6e  total %.6e  (%.0f ms)\n", rec.k,
                    rec.after_u.mse_dn, rec.after_u.mse_pn, rec.after_u.total, rec.wall_ms);
    std::printf("train: %s after %zu outer iterations, final total %.6e\n",
                cpinn::to_string(result.report.status).c_str(), result.report.iterations.size(),
                result.report.final_parts().total);

    cpinn::save_params(result.net_u, out_path(cfg, "netu.ckpt"));
    cpinn::save_params(result.net_g, out_path(cfg, "netg.ckpt"));
    cpinn::write_train_report_csv(result.report, out_path(cfg, "train_report.csv"));

    if (result.report.status == cpinn::TrainStatus::Diverged)
        throw cpinn::NumericError("train", "training diverged; last finite checkpoint saved");
    return 0;
}

int cmd_train_rp(const CommonArgs& args) {
    const auto cfg = resolve_config(args);
    const auto problem = cpinn::make_problem_from_config(cfg);
    const auto dataset = load_dataset_or_fail(cfg, problem);

    const fs::path u_path = fs::path(cfg.output_dir) / "netu.ckpt";
    const fs::path g_path = fs::path(cfg.output_dir) / "netg.ckpt";
    if (!fs::exists(u_path) || !fs::exists(g_path))
        throw cpinn::DataError("missing CPINN checkpoints in " + cfg.output_dir +
                               " — run `cpinn train` first");
    const auto net_u = cpinn::load_params(u_path.string());
    const auto net_g = cpinn::load_params(g_path.string());
    echo_config(cfg);

    const auto rp_cfg = cpinn::make_rp_config(cfg, problem);
    std::vector<cpinn::SensorSeries> sensors; // benchmark taps fall back to the CPINN

    cpinn::TrainConfig tcfg = cfg.train;
    tcfg.inner_iters_u = cfg.rp_train_iters;
    auto rp = cpinn::train_netu_rp(net_u, net_g, dataset, problem, rp_cfg, sensors, tcfg);

    cpinn::save_params(rp.net, out_path(cfg, "netu_rp.ckpt"));
    cpinn::TrainReport report;
    report.initial = rp.initial;
    cpinn::OuterRecord rec;
    rec.k = 1;
    rec.after_g = rp.initial;
    rec.after_u = rp.final;
    rec.wall_ms = rp.wall_ms;
    report.iterations.push_back(std::move(rec));
    cpinn::write_train_report_csv(report, out_path(cfg, "rp_train_report.csv"));

    std::printf("train-rp: %d taps, loss %.6e -> %.6e (%s, %d iterations)\n", rp_cfg.tap_count(),
                rp.initial.total, rp.final.total, cpinn::to_string(rp.opt_status).c_str(),
                rp.opt_iterations);
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& net_choice) {
    const auto cfg = resolve_config(args);
    const auto problem = cpinn::make_problem_from_config(cfg);
    if (!problem.exact_u)
        throw cpinn::DataError("eval: no exact solution for this problem configuration");

    const fs::path u_path = fs::path(cfg.output_dir) / "netu.ckpt";
    if (!fs::exists(u_path))
        throw cpinn::DataError("missing checkpoint " + u_path.string() + " — run `cpinn train`");
    const auto net_u = cpinn::load_params(u_path.string());
    echo_config(cfg);

    const auto grid = cpinn::make_grid(problem, cfg.grid_nx, cfg.grid_nt);

    const fs::path rp_path = fs::path(cfg.output_dir) / "netu_rp.ckpt";
    bool use_rp = false;
    if (net_choice == "rp") {
        if (!fs::exists(rp_path))
            throw cpinn::DataError("eval --net rp: missing " + rp_path.string());
        use_rp = true;
    } else if (net_choice == "auto") {
        use_rp = fs::exists(rp_path);
    }

    // One field functor drives both the surface fill and the snapshot lines,
    // so snapshots are evaluated at exactly the requested times.
    std::vector<double> field;
    std::function<double(double, double)> field_fn;
    cpinn::MlpParams net_rp;
    cpinn::RpConfig rp_cfg;
    if (use_rp) {
        net_rp = cpinn::load_params(rp_path.string());
        rp_cfg = cpinn::make_rp_config(cfg, problem);
        field = cpinn::predict(net_rp, rp_cfg, {}, net_u, problem, grid);
        field_fn = [&](double x, double t) {
            auto input = cpinn::build_rp_input(x, t, rp_cfg, {}, net_u, problem);
            return cpinn::forward(net_rp, input);
        };
    } else {
        field.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto p = grid.point(i);
            const double in[2] = {p.x, p.t};
            field[i] = cpinn::forward(net_u, in);
        }
        field_fn = [&](double x, double t) {
            const double in[2] = {x, t};
            return cpinn::forward(net_u, in);
        };
    }

    // Snapshot rows then the full domain, matching the paper tables' layout.
    std::vector<cpinn::EvalResult> rows;
    for (double ts : cfg.snapshots)
        rows.push_back(cpinn::snapshot_eval(field_fn, problem.exact_u, ts, problem.L, grid.nx));
    std::vector<double> truth(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto p = grid.point(i);
        truth[i] = problem.exact_u(p.x, p.t);
    }
    rows.push_back({"full domain", grid.size(), cpinn::rmse(field, truth),
                    cpinn::pearson_cc(field, truth)});

    cpinn::write_eval_csv(rows, out_path(cfg, "report.csv"));
    cpinn::write_prediction_csv(grid, field, out_path(cfg, "predictions.csv"));

    for (const auto& r : rows)
        std::printf("%-16s n=%-7zu RMSE %.6e  CC %.6e\n", r.scope.c_str(), r.n, r.rmse, r.cc);
    std::printf("eval: %s surface -> %s\n", use_rp ? "CPINN-RP" : "CPINN (NetU)",
                out_path(cfg, "report.csv").c_str());
    return 0;
}

int cmd_soft_sensor(const CommonArgs& args, const std::string& sensors_dir, int masked_flag) {
    const auto cfg = resolve_config(args);
    const auto problem = cpinn::make_problem_from_config(cfg);
    echo_config(cfg);

    cpinn::MaskedSensorSetup setup;
    setup.masked_index = (masked_flag >= 0 ? masked_flag : cfg.sensor_masked) - 1;
    setup.n_samples = cfg.sensor_samples;
    setup.train_fraction = cfg.train_fraction;
    setup.spec_u = cfg.netu;
    setup.spec_u.input_dim = 2;
    setup.spec_g = cfg.netg;
    setup.spec_g.role = cpinn::NetRole::NetG;
    setup.spec_g.input_dim = 2;
    setup.train = cfg.train;
    setup.rp_train_iters = cfg.rp_train_iters;
    setup.delay = cfg.rp_delay;
    setup.boundary_points = cfg.sampling.n_boundary;

    cpinn::MaskedSensorResult result;
    if (!sensors_dir.empty()) {
        auto sensors = cpinn::read_sensor_series(sensors_dir);
        for (const auto& s : sensors) setup.sensor_locs.push_back(s.x);
        result = cpinn::masked_sensor_experiment(problem, std::move(sensors), setup);
    } else {
        if (!problem.exact_u)
            throw cpinn::DataError("soft-sensor: synthetic series need an exact solution; "
                                   "pass --sensors for measured data");
        for (int i = 1; i <= cfg.sensor_count; ++i)
            setup.sensor_locs.push_back(problem.L * i / (cfg.sensor_count + 1));
        result = cpinn::masked_sensor_experiment(problem, setup);
        cpinn::write_sensor_series(result.sensors, (fs::path(cfg.output_dir) / "sensors").string());
    }

    cpinn::save_params(result.cpinn_u, out_path(cfg, "netu.ckpt"));
    cpinn::save_params(result.cpinn_g, out_path(cfg, "netg.ckpt"));
    cpinn::save_params(result.net_u_rp, out_path(cfg, "netu_rp.ckpt"));
    cpinn::write_train_report_csv(result.cpinn_report, out_path(cfg, "train_report.csv"));
    cpinn::write_sensor_report_csv(result.reports, out_path(cfg, "sensor_report.csv"));

    for (const auto& r : result.reports)
        std::printf("sensor %d (x=%.4f)%s: n=%zu RMSE %.6e  CC %.6e\n", r.index, r.x,
                    r.masked ? " [masked]" : "", r.n, r.rmse, r.cc);
    return 0;
}

int cmd_report(const CommonArgs& args, const std::string& file_flag) {
    std::string path = file_flag;
    if (path.empty()) {
        const auto cfg = resolve_config(args);
        path = out_path(cfg, "train_report.csv");
    }
    const auto rows = cpinn::read_train_report_csv(path);
    std::printf("%-5s %-14s %-14s %-14s %s\n", "k", "mse_dn", "mse_pn", "total", "wall_ms");
    for (const auto& r : rows)
        std::printf("%-5d %-14.6e %-14.6e %-14.6e %.1f\n", r.k, r.mse_dn, r.mse_pn, r.total,
                    r.wall_ms);
    if (rows.empty()) std::printf("(no outer iterations recorded)\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPINN-RP: coupled physics-informed neural networks with recurrent "
                 "prediction for soft sensing"};
    app.require_subcommand(1);

    CommonArgs gen_args, train_args, rp_args, eval_args, sensor_args, report_args;
    std::string eval_net = "auto";
    std::string sensors_dir;
    int masked_flag = -1;
    std::string report_file;

    auto* generate = app.add_subcommand("generate", "Sample training data and write dataset CSVs");
    add_common(generate, gen_args);

    auto* train = app.add_subcommand("train", "Hierarchical CPINN training (NetG then NetU per outer iteration)");
    add_common(train, train_args);

    auto* train_rp = app.add_subcommand("train-rp", "Train NetU-RP from the trained CPINN");
    add_common(train_rp, rp_args);

    auto* eval = app.add_subcommand("eval", "Evaluate the trained networks on the benchmark grid");
    add_common(eval, eval_args);
    eval->add_option("--net", eval_net, "Surface to evaluate: auto, netu, rp")
        ->check(CLI::IsMember({"auto", "netu", "rp"}));

    auto* soft = app.add_subcommand("soft-sensor", "Masked-sensor soft-sensing experiment");
    add_common(soft, sensor_args);
    soft->add_option("--sensors", sensors_dir, "Directory with sensor CSVs and sensors.json");
    soft->add_option("--masked", masked_flag, "1-based sensor to mask (0 = none); overrides config");

    auto* report = app.add_subcommand("report", "Print a training record file as a table");
    report->add_option("-c,--config", report_args.config_path, "Config whose output_dir holds the record");
    report->add_option("--set", report_args.overrides, "Config overrides");
    report->add_option("-o,--out", report_args.out_dir, "Output directory override");
    report->add_option("--file", report_file, "Explicit record file path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen_args);
        if (train->parsed()) return cmd_train(train_args);
        if (train_rp->parsed()) return cmd_train_rp(rp_args);
        if (eval->parsed()) return cmd_eval(eval_args, eval_net);
        if (soft->parsed()) return cmd_soft_sensor(sensor_args, sensors_dir, masked_flag);
        if (report->parsed()) {
            if (report_args.config_path.empty() && report_file.empty())
                throw cpinn::ConfigError("report: pass --config or --file");
            return cmd_report(report_args, report_file);
        }
    } catch (const cpinn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const cpinn::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const cpinn::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const cpinn::StructuralError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
