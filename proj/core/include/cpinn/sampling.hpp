#pragma once

#include "cpinn/pde.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cpinn {

struct Point2 {
    double x = 0.0;
    double t = 0.0;
};

enum class LabelKind {
    Value,  // target is u(x, t)
    SlopeX, // target is du/dx(x, t) — Neumann boundary data
};

struct LabeledPoint {
    double x = 0.0;
    double t = 0.0;
    double target = 0.0;
    LabelKind kind = LabelKind::Value;
};

/// Training data for one problem: labeled boundary/initial points d_b,
/// labeled interior points d_i, collocation sets e_b/e_i co-located with the
/// value-measured points (slope-target rows induce no residual site), and
/// extra unlabeled collocation points.
struct Dataset {
    std::vector<LabeledPoint> d_b;
    std::vector<LabeledPoint> d_i;
    std::vector<Point2> e_b;
    std::vector<Point2> e_i;
    std::vector<Point2> extra_collocation;

    std::size_t labeled_count() const { return d_b.size() + d_i.size(); }
    std::size_t collocation_count() const {
        return e_b.size() + e_i.size() + extra_collocation.size();
    }
    /// Concatenated collocation set E in the fixed order e_b, e_i, extra.
    std::vector<Point2> all_collocation() const;

    void validate(const PdeProblem& problem) const; // throws DataError
};

struct SamplingConfig {
    std::uint64_t seed = 0;
    int n_boundary = -1;    // -1: problem default (heat 130, wave 170)
    int n_interior = -1;    // -1: problem default (heat 20, wave 40)
    int n_collocation = -1; // extra label-free collocation points (default 0)
    double noise_std = 0.0; // optional Gaussian label noise, off by default
};

/// Heat setup: labeled points on the three boundary/initial manifolds plus a
/// handful of sparse interior measurements that double as collocation sites.
/// Boundary points are allocated to manifolds in proportion to their measure
/// (t=0 edge has length L, each x edge length T).
Dataset sample_heat(const PdeProblem& problem, const SamplingConfig& cfg);

/// Wave setup: labeled boundary/initial points plus labeled interior points
/// drawn from the exact solution; collocation co-located with the labels.
Dataset sample_wave(const PdeProblem& problem, const SamplingConfig& cfg);

Dataset sample_dataset(const PdeProblem& problem, const SamplingConfig& cfg);

/// Uniform nx x nt lattice over [0,L] x [0,T], boundary included, row-major
/// in t (index = it*nx + ix).
struct EvalGrid {
    int nx = 0;
    int nt = 0;
    double L = 0.0;
    double T = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(nx) * nt; }
    double x_at(int ix) const { return L * ix / (nx - 1); }
    double t_at(int it) const { return T * it / (nt - 1); }
    Point2 point(std::size_t idx) const {
        return {x_at(static_cast<int>(idx % nx)), t_at(static_cast<int>(idx / nx))};
    }
    double dx() const { return L / (nx - 1); }
    double dt() const { return T / (nt - 1); }
};

EvalGrid make_grid(const PdeProblem& problem, int nx, int nt);

// CSV round-trip. Labeled files carry header "x,t,u", collocation files
// "x,t"; values are written with 17 significant digits so the round-trip is
// exact. Label kinds are not stored: they are reconstructed from the problem
// geometry on load (points on a Neumann edge become slope targets).
void write_labeled_csv(const std::vector<LabeledPoint>& points, const std::string& path);
void write_collocation_csv(const std::vector<Point2>& points, const std::string& path);
std::vector<LabeledPoint> read_labeled_csv(const PdeProblem& problem, const std::string& path);
std::vector<Point2> read_collocation_csv(const std::string& path);

void write_dataset(const Dataset& ds, const std::string& dir);
Dataset read_dataset(const PdeProblem& problem, const std::string& dir);

} // namespace cpinn
