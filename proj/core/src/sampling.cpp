#include "cpinn/sampling.hpp"

#include "cpinn/errors.hpp"
#include "cpinn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cpinn {

std::vector<Point2> Dataset::all_collocation() const {
    std::vector<Point2> e;
    e.reserve(collocation_count());
    e.insert(e.end(), e_b.begin(), e_b.end());
    e.insert(e.end(), e_i.begin(), e_i.end());
    e.insert(e.end(), extra_collocation.begin(), extra_collocation.end());
    return e;
}

void Dataset::validate(const PdeProblem& problem) const {
    auto check_domain = [&](double x, double t) { problem.require_in_domain(x, t); };
    for (const auto& p : d_b) check_domain(p.x, p.t);
    for (const auto& p : d_i) check_domain(p.x, p.t);
    for (const auto& p : extra_collocation) check_domain(p.x, p.t);
    // e_b corresponds to the value-measured rows of d_b, in order; slope rows
    // carry no residual site.
    std::size_t eb = 0;
    for (const auto& p : d_b) {
        if (p.kind != LabelKind::Value) continue;
        if (eb >= e_b.size() || e_b[eb].x != p.x || e_b[eb].t != p.t)
            throw DataError("dataset: e_b not co-located with the value rows of d_b");
        ++eb;
    }
    if (eb != e_b.size()) throw DataError("dataset: e_b has extra points");
    if (e_i.size() != d_i.size())
        throw DataError("dataset: collocation sets not aligned with labeled sets");
    for (std::size_t i = 0; i < d_i.size(); ++i)
        if (e_i[i].x != d_i[i].x || e_i[i].t != d_i[i].t)
            throw DataError("dataset: e_i not co-located with d_i");
    for (const auto& b : d_b)
        for (const auto& i : d_i)
            if (b.x == i.x && b.t == i.t) throw DataError("dataset: D_B and D_I overlap");
}

namespace {

// Largest-remainder split of n points across manifolds proportionally to
// their measures; ties broken toward lower index. Deterministic.
std::vector<int> proportional_allocation(int n, const std::vector<double>& measures) {
    double total = 0.0;
    for (double m : measures) total += m;
    std::vector<int> counts(measures.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t i = 0; i < measures.size(); ++i) {
        const double share = n * measures[i] / total;
        counts[i] = static_cast<int>(std::floor(share));
        assigned += counts[i];
        remainders.push_back({share - counts[i], i});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < n - assigned; ++k) counts[remainders[k].second] += 1;
    return counts;
}

double maybe_noise(Rng& rng, double value, double noise_std) {
    return noise_std > 0.0 ? value + noise_std * rng.normal() : value;
}

} // namespace

Dataset sample_heat(const PdeProblem& problem, const SamplingConfig& cfg) {
    if (problem.kind != PdeKind::Heat1D) throw ConfigError("sample_heat: problem kind is not heat");
    const int n_b = cfg.n_boundary >= 0 ? cfg.n_boundary : 130;
    const int n_i = cfg.n_interior >= 0 ? cfg.n_interior : 20;
    const int n_col = cfg.n_collocation >= 0 ? cfg.n_collocation : 0;
    if (n_i > 0 && !problem.exact_u)
        throw ConfigError("sample_heat: interior labels require exact_u");

    Rng rng(cfg.seed);
    Dataset ds;
    // Manifolds in fixed order: t=0 (length L), x=0 (length T), x=L (length T).
    const auto counts = proportional_allocation(n_b, {problem.L, problem.T, problem.T});

    for (int i = 0; i < counts[0]; ++i) {
        const double x = rng.uniform(0.0, problem.L);
        ds.d_b.push_back({x, 0.0, maybe_noise(rng, problem.ic(x), cfg.noise_std), LabelKind::Value});
    }
    for (int i = 0; i < counts[1]; ++i) {
        const double t = problem.T - problem.T * rng.uniform(); // (0, T]
        ds.d_b.push_back({0.0, t, maybe_noise(rng, problem.bc_left(t), cfg.noise_std), LabelKind::Value});
    }
    for (int i = 0; i < counts[2]; ++i) {
        const double t = problem.T - problem.T * rng.uniform();
        ds.d_b.push_back(
            {problem.L, t, maybe_noise(rng, problem.bc_right_slope(t), cfg.noise_std), LabelKind::SlopeX});
    }

    // The sparse interior points: measured AND used as collocation sites (the
    // collocation sets correspond to the labeled sets). An unknown source
    // makes boundary data alone insufficient — u_t - a^2 u_xx = g(x) admits a
    // family of solutions matching every boundary/initial condition here, so
    // without interior measurements no training procedure could single out
    // the true one.
    for (int i = 0; i < n_i; ++i) {
        const double x = rng.uniform(0.0, problem.L);
        const double t = rng.uniform(0.0, problem.T);
        ds.d_i.push_back({x, t, maybe_noise(rng, problem.exact_u(x, t), cfg.noise_std), LabelKind::Value});
    }
    // Collocation sites correspond to the measured (x, t, u) points. Slope
    // rows carry no value measurement and get no residual site: enforcing
    // the residual on the Neumann edge only couples the locally
    // unidentifiable pair (source value, edge curvature) and lets them lock
    // each other into a consistent wrong profile.
    for (const auto& p : ds.d_b)
        if (p.kind == LabelKind::Value) ds.e_b.push_back({p.x, p.t});
    for (const auto& p : ds.d_i) ds.e_i.push_back({p.x, p.t});

    for (int i = 0; i < n_col; ++i) {
        const double x = rng.uniform(0.0, problem.L);
        const double t = rng.uniform(0.0, problem.T);
        ds.extra_collocation.push_back({x, t});
    }
    return ds;
}

Dataset sample_wave(const PdeProblem& problem, const SamplingConfig& cfg) {
    if (problem.kind != PdeKind::Wave1D) throw ConfigError("sample_wave: problem kind is not wave");
    const int n_b = cfg.n_boundary >= 0 ? cfg.n_boundary : 170;
    const int n_i = cfg.n_interior >= 0 ? cfg.n_interior : 40;
    const int n_col = cfg.n_collocation >= 0 ? cfg.n_collocation : 0;
    if (n_i > 0 && !problem.exact_u)
        throw ConfigError("sample_wave: interior labels require exact_u");

    Rng rng(cfg.seed);
    Dataset ds;
    const auto counts = proportional_allocation(n_b, {problem.L, problem.T, problem.T});

    for (int i = 0; i < counts[0]; ++i) {
        const double x = rng.uniform(0.0, problem.L);
        ds.d_b.push_back({x, 0.0, maybe_noise(rng, problem.ic(x), cfg.noise_std), LabelKind::Value});
    }
    for (int i = 0; i < counts[1]; ++i) {
        const double t = problem.T - problem.T * rng.uniform();
        ds.d_b.push_back({0.0, t, maybe_noise(rng, problem.bc_left(t), cfg.noise_std), LabelKind::Value});
    }
    for (int i = 0; i < counts[2]; ++i) {
        const double t = problem.T - problem.T * rng.uniform();
        ds.d_b.push_back(
            {problem.L, t, maybe_noise(rng, problem.bc_right(t), cfg.noise_std), LabelKind::Value});
    }
    for (int i = 0; i < n_i; ++i) {
        const double x = rng.uniform(0.0, problem.L);
        const double t = rng.uniform(0.0, problem.T);
        ds.d_i.push_back({x, t, maybe_noise(rng, problem.exact_u(x, t), cfg.noise_std), LabelKind::Value});
    }
    for (const auto& p : ds.d_b)
        if (p.kind == LabelKind::Value) ds.e_b.push_back({p.x, p.t});
    for (const auto& p : ds.d_i) ds.e_i.push_back({p.x, p.t});

    for (int i = 0; i < n_col; ++i) {
        const double x = rng.uniform(0.0, problem.L);
        const double t = rng.uniform(0.0, problem.T);
        ds.extra_collocation.push_back({x, t});
    }
    return ds;
}

Dataset sample_dataset(const PdeProblem& problem, const SamplingConfig& cfg) {
    return problem.kind == PdeKind::Heat1D ? sample_heat(problem, cfg) : sample_wave(problem, cfg);
}

EvalGrid make_grid(const PdeProblem& problem, int nx, int nt) {
    if (nx < 2 || nt < 2) throw ConfigError("make_grid: nx and nt must be >= 2");
    return EvalGrid{nx, nt, problem.L, problem.T};
}

// --- CSV --------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::string& expect_header) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open CSV: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty CSV: " + path);
    if (line != expect_header)
        throw DataError("CSV " + path + ": expected header '" + expect_header + "', got '" + line + "'");
    const std::size_t n_cols = std::count(expect_header.begin(), expect_header.end(), ',') + 1;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw DataError("CSV " + path + " line " + std::to_string(line_no) +
                                ": bad number '" + cell + "'");
            }
            if (used != cell.size())
                throw DataError("CSV " + path + " line " + std::to_string(line_no) +
                                ": trailing characters in '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != n_cols)
            throw DataError("CSV " + path + " line " + std::to_string(line_no) +
                            ": expected " + std::to_string(n_cols) + " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

void write_labeled_csv(const std::vector<LabeledPoint>& points, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open CSV for writing: " + path);
    os << "x,t,u\n";
    for (const auto& p : points)
        os << fmt17(p.x) << ',' << fmt17(p.t) << ',' << fmt17(p.target) << '\n';
    if (!os) throw DataError("CSV write failed: " + path);
}

void write_collocation_csv(const std::vector<Point2>& points, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open CSV for writing: " + path);
    os << "x,t\n";
    for (const auto& p : points) os << fmt17(p.x) << ',' << fmt17(p.t) << '\n';
    if (!os) throw DataError("CSV write failed: " + path);
}

std::vector<LabeledPoint> read_labeled_csv(const PdeProblem& problem, const std::string& path) {
    std::vector<LabeledPoint> points;
    for (const auto& row : read_numeric_csv(path, "x,t,u")) {
        LabeledPoint p{row[0], row[1], row[2], LabelKind::Value};
        // Points on a Neumann edge carry a slope target, not a value; the
        // corner t = 0 belongs to the initial manifold.
        if (problem.right_neumann && std::abs(p.x - problem.L) <= 1e-9 * problem.L && p.t > 0.0)
            p.kind = LabelKind::SlopeX;
        points.push_back(p);
    }
    return points;
}

std::vector<Point2> read_collocation_csv(const std::string& path) {
    std::vector<Point2> points;
    for (const auto& row : read_numeric_csv(path, "x,t")) points.push_back({row[0], row[1]});
    return points;
}

void write_dataset(const Dataset& ds, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_labeled_csv(ds.d_b, (fs::path(dir) / "d_b.csv").string());
    if (!ds.d_i.empty()) write_labeled_csv(ds.d_i, (fs::path(dir) / "d_i.csv").string());
    if (!ds.extra_collocation.empty())
        write_collocation_csv(ds.extra_collocation, (fs::path(dir) / "collocation.csv").string());
}

Dataset read_dataset(const PdeProblem& problem, const std::string& dir) {
    namespace fs = std::filesystem;
    Dataset ds;
    const auto d_b_path = fs::path(dir) / "d_b.csv";
    if (!fs::exists(d_b_path)) throw DataError("missing dataset file: " + d_b_path.string());
    ds.d_b = read_labeled_csv(problem, d_b_path.string());
    const auto d_i_path = fs::path(dir) / "d_i.csv";
    if (fs::exists(d_i_path)) ds.d_i = read_labeled_csv(problem, d_i_path.string());
    const auto col_path = fs::path(dir) / "collocation.csv";
    if (fs::exists(col_path)) ds.extra_collocation = read_collocation_csv(col_path.string());
    for (const auto& p : ds.d_b)
        if (p.kind == LabelKind::Value) ds.e_b.push_back({p.x, p.t});
    for (const auto& p : ds.d_i) ds.e_i.push_back({p.x, p.t});
    ds.validate(problem);
    return ds;
}

} // namespace cpinn
