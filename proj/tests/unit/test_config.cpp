#include "cpinn/config.hpp"

#include "cpinn/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace cpinn;
using nlohmann::json;

namespace {

std::string write_temp(const json& j) {
    const auto path = std::filesystem::temp_directory_path() / "cpinn_test_config.json";
    std::ofstream os(path);
    os << j.dump(2);
    return path.string();
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("defaults follow the benchmark setups") {
    const auto heat = default_config(PdeKind::Heat1D);
    CHECK(heat.T == 10.0);
    CHECK(heat.netu.hidden_layers == 3);
    CHECK(heat.netu.hidden_width == 30);
    CHECK(heat.netg.hidden_layers == 8);
    CHECK(heat.netg.hidden_width == 20);
    CHECK(heat.snapshots == std::vector<double>{3.0, 7.0});
    CHECK(heat.train.max_outer_iters == 300);
    CHECK(heat.train.inner_iters_u == 30);
    CHECK(heat.train.physics_weight == 1.0);

    const auto wave = default_config(PdeKind::Wave1D);
    CHECK(wave.T == 6.0);
    CHECK(wave.snapshots == std::vector<double>{2.0, 4.0});
    CHECK(wave.train.inner_iters_u == 150);
}

TEST_CASE("partial config overlays onto defaults") {
    const json j = {{"problem", {{"kind", "wave"}}}, {"train", {{"seed", 99}}}};
    const auto cfg = config_from_json(j);
    CHECK(cfg.kind == PdeKind::Wave1D);
    CHECK(cfg.train.seed == 99);
    CHECK(cfg.train.inner_iters_u == 150); // untouched wave default
}

TEST_CASE("round-trip through the text format is lossless") {
    auto cfg = default_config(PdeKind::Wave1D);
    cfg.train.tol_loss = 1.2345678901234567e-7;
    cfg.rp_delay = 0.03;
    cfg.output_dir = "some/dir";
    const json first = config_to_json(cfg);
    const auto path = write_temp(first);
    const auto loaded = load_config(path);
    CHECK(config_to_json(loaded) == first);
    std::filesystem::remove(path);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(config_from_json({{"trainn", json::object()}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"train", {{"max_outer", 3}}}}), ConfigError);
}

TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(config_from_json({{"problem", {{"kind", "advection"}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"grid", {{"nx", 1}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"soft_sensor", {{"masked", 9}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"snapshots", {999.0}}}), ConfigError);
}

TEST_CASE("overrides rewrite nested keys") {
    json j = json::object();
    apply_override(j, "train.seed=9");
    apply_override(j, "problem.kind=wave");
    apply_override(j, "rp.tap_points=[0.5,1.5]");
    CHECK(j["train"]["seed"] == 9);
    CHECK(j["problem"]["kind"] == "wave");
    CHECK(j["rp"]["tap_points"].size() == 2);
    CHECK_THROWS_AS(apply_override(j, "no-equals-sign"), ConfigError);
}

TEST_CASE("problem construction honours overrides and drops stale exacts") {
    auto cfg = default_config(PdeKind::Heat1D);
    auto p = make_problem_from_config(cfg);
    CHECK(static_cast<bool>(p.exact_u)); // benchmark constants keep the closed form

    cfg.L = 2.0;
    p = make_problem_from_config(cfg);
    CHECK(!p.exact_u);
    CHECK(!p.exact_g);

    cfg = default_config(PdeKind::Heat1D);
    cfg.T = 5.0; // horizon override is safe
    p = make_problem_from_config(cfg);
    CHECK(static_cast<bool>(p.exact_u));
    CHECK(p.T == 5.0);
}

TEST_CASE("rp config defaults to equispaced fallback taps") {
    const auto cfg = default_config(PdeKind::Heat1D);
    const auto problem = make_problem_from_config(cfg);
    const auto rp = make_rp_config(cfg, problem);
    REQUIRE(rp.tap_points.size() == 4);
    CHECK(rp.tap_points[0] == doctest::Approx(problem.L / 5));
    CHECK(rp.tap_points[3] == doctest::Approx(4 * problem.L / 5));
    CHECK(rp.delay == doctest::Approx(problem.T / 200));
    for (auto s : rp.sensor_availability) CHECK(s == TapSource::CpinnFallback);
}

} // TEST_SUITE
