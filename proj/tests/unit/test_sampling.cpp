#include "cpinn/sampling.hpp"

#include "cpinn/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace cpinn;

namespace {

std::filesystem::path temp_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("sampling") {

TEST_CASE("heat defaults: 130 boundary labels, 20 interior collocation points") {
    const auto problem = make_heat_problem();
    const auto ds = sample_heat(problem, {.seed = 1});
    CHECK(ds.d_b.size() == 130);
    CHECK(ds.d_i.size() == 20); // sparse interior measurements, also collocation
    CHECK(ds.e_b.size() == 74); // value rows only: slope rows get no residual site
    CHECK(ds.e_i.size() == 20);
    CHECK(ds.extra_collocation.empty());
    CHECK(ds.collocation_count() == 94);
    for (const auto& p : ds.d_i) CHECK(p.target == exact_heat(p.x, p.t));
    ds.validate(problem);

    // Proportional manifold split: measures (pi, 10, 10) over 130 points.
    int n_t0 = 0, n_left = 0, n_right = 0;
    for (const auto& p : ds.d_b) {
        if (p.t == 0.0) ++n_t0;
        else if (p.x == 0.0) ++n_left;
        else if (p.x == problem.L) ++n_right;
    }
    CHECK(n_t0 + n_left + n_right == 130);
    CHECK(n_t0 == 18);
    CHECK(n_left == 56);
    CHECK(n_right == 56);
}

TEST_CASE("heat labels follow the boundary and initial data") {
    const auto problem = make_heat_problem();
    const auto ds = sample_heat(problem, {.seed = 9});
    for (const auto& p : ds.d_b) {
        if (p.t == 0.0) {
            CHECK(p.kind == LabelKind::Value);
            CHECK(p.target == doctest::Approx(std::sin(p.x / 2)).epsilon(1e-15));
        } else if (p.x == 0.0) {
            CHECK(p.kind == LabelKind::Value);
            CHECK(p.target == 0.0);
        } else {
            CHECK(p.x == problem.L);
            CHECK(p.kind == LabelKind::SlopeX); // Neumann edge: slope target
            CHECK(p.target == 0.0);
        }
    }
}

TEST_CASE("wave defaults: 170 boundary + 40 interior labels, co-located collocation") {
    const auto problem = make_wave_problem();
    const auto ds = sample_wave(problem, {.seed = 2});
    CHECK(ds.d_b.size() == 170);
    CHECK(ds.d_i.size() == 40);
    CHECK(ds.e_b.size() == 170);
    CHECK(ds.e_i.size() == 40);
    CHECK(ds.extra_collocation.empty());
    CHECK(ds.collocation_count() == 210);
    ds.validate(problem);

    for (const auto& p : ds.d_b)
        if (p.x == 0.0 || p.x == problem.L) CHECK(p.target == 0.0);
    for (const auto& p : ds.d_i)
        CHECK(p.target == exact_wave(p.x, p.t)); // machine-exact synthetic labels
}

TEST_CASE("sampling is deterministic per seed") {
    const auto problem = make_wave_problem();
    const auto a = sample_wave(problem, {.seed = 77});
    const auto b = sample_wave(problem, {.seed = 77});
    REQUIRE(a.d_b.size() == b.d_b.size());
    for (std::size_t i = 0; i < a.d_b.size(); ++i) {
        CHECK(a.d_b[i].x == b.d_b[i].x);
        CHECK(a.d_b[i].t == b.d_b[i].t);
        CHECK(a.d_b[i].target == b.d_b[i].target);
    }
    const auto c = sample_wave(problem, {.seed = 78});
    CHECK(a.d_b[0].x != c.d_b[0].x);
}

TEST_CASE("label noise is optional and off by default") {
    const auto problem = make_heat_problem();
    SamplingConfig noisy{.seed = 5, .noise_std = 0.01};
    const auto clean = sample_heat(problem, {.seed = 5});
    const auto jittered = sample_heat(problem, noisy);
    bool any_diff = false;
    for (std::size_t i = 0; i < clean.d_b.size(); ++i)
        any_diff |= clean.d_b[i].target != jittered.d_b[i].target;
    CHECK(any_diff);
}

TEST_CASE("eval grid lattice") {
    const auto problem = make_heat_problem();
    const auto tiny = make_grid(problem, 2, 2);
    CHECK(tiny.size() == 4);
    CHECK(tiny.point(0).x == 0.0);
    CHECK(tiny.point(0).t == 0.0);
    CHECK(tiny.point(3).x == problem.L);
    CHECK(tiny.point(3).t == problem.T);

    const auto grid = make_grid(problem, 5, 3);
    CHECK(grid.dx() == doctest::Approx(problem.L / 4));
    CHECK(grid.dt() == doctest::Approx(problem.T / 2));
    CHECK(grid.point(grid.size() - 1).x == problem.L);
    CHECK_THROWS_AS(make_grid(problem, 1, 5), ConfigError);
}

TEST_CASE("dataset CSV round-trip is exact") {
    const auto problem = make_heat_problem();
    const auto ds = sample_heat(problem, {.seed = 31});
    const auto dir = temp_dir("cpinn_test_dataset");
    write_dataset(ds, dir.string());
    const auto back = read_dataset(problem, dir.string());

    REQUIRE(back.d_b.size() == ds.d_b.size());
    for (std::size_t i = 0; i < ds.d_b.size(); ++i) {
        CHECK(back.d_b[i].x == ds.d_b[i].x);
        CHECK(back.d_b[i].t == ds.d_b[i].t);
        CHECK(back.d_b[i].target == ds.d_b[i].target);
        CHECK(back.d_b[i].kind == ds.d_b[i].kind);
    }
    REQUIRE(back.extra_collocation.size() == ds.extra_collocation.size());
    for (std::size_t i = 0; i < ds.extra_collocation.size(); ++i) {
        CHECK(back.extra_collocation[i].x == ds.extra_collocation[i].x);
        CHECK(back.extra_collocation[i].t == ds.extra_collocation[i].t);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed CSVs are rejected") {
    const auto dir = temp_dir("cpinn_test_badcsv");
    const auto problem = make_heat_problem();

    std::ofstream(dir / "d_b.csv") << "x,t\n0,0\n"; // wrong header for labeled data
    CHECK_THROWS_AS(read_dataset(problem, dir.string()), DataError);

    std::ofstream(dir / "d_b.csv") << "x,t,u\n0.1,0.2\n"; // missing column
    CHECK_THROWS_AS(read_labeled_csv(problem, (dir / "d_b.csv").string()), DataError);

    std::ofstream(dir / "d_b.csv") << "x,t,u\n0.1,abc,0.3\n"; // not a number
    CHECK_THROWS_AS(read_labeled_csv(problem, (dir / "d_b.csv").string()), DataError);

    CHECK_THROWS_AS(read_dataset(problem, (dir / "missing").string()), DataError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("overlapping labeled sets fail validation") {
    const auto problem = make_wave_problem();
    Dataset ds = sample_wave(problem, {.seed = 4});
    ds.d_i.push_back(ds.d_b.front());
    ds.e_i.push_back({ds.d_b.front().x, ds.d_b.front().t});
    CHECK_THROWS_AS(ds.validate(problem), DataError);
}

} // TEST_SUITE
