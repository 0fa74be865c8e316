#include "cpinn/train.hpp"

#include "cpinn/errors.hpp"
#include "cpinn/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace cpinn {

void TrainConfig::validate() const {
    if (max_outer_iters < 0) throw ConfigError("TrainConfig: max_outer_iters must be >= 0");
    if (inner_iters_u < 0 || inner_iters_g < 0)
        throw ConfigError("TrainConfig: inner iteration budgets must be >= 0");
    if (lbfgs_memory < 1) throw ConfigError("TrainConfig: lbfgs_memory must be >= 1");
    if (tol_loss <= 0.0 || tol_stall <= 0.0)
        throw ConfigError("TrainConfig: tolerances must be > 0");
    if (physics_weight < 0.0) throw ConfigError("TrainConfig: physics_weight must be >= 0");
    if (record_diagnostics && (diagnostics_nx < 2 || diagnostics_nt < 2))
        throw ConfigError("TrainConfig: diagnostics grid must be at least 2x2");
}

std::string to_string(TrainStatus status) {
    switch (status) {
        case TrainStatus::Converged: return "converged";
        case TrainStatus::MaxIters: return "max_iters";
        case TrainStatus::Diverged: return "diverged";
    }
    return "unknown";
}

// --- HybridObjective -----------------------------------------------------------

struct HybridObjective::Scratch {
    JetEvaluator jet;
    ScalarEvaluator scalar;
    std::vector<double> grad;
    double dn = 0.0, pn = 0.0;
    std::vector<double> input; // reused (x, t, taps...) buffer

    explicit Scratch(const MlpParams& shape)
        : jet(shape), scalar(shape), grad(shape.param_count(), 0.0), input(shape.input_dim(), 0.0) {}
};

HybridObjective::HybridObjective(const PdeProblem& problem, const Dataset& dataset,
                                 std::vector<double> g_at_collocation, double physics_weight,
                                 const MlpParams& shape, TapInputs taps)
    : problem_(&problem), physics_weight_(physics_weight), shape_(shape), taps_(std::move(taps)) {
    labeled_.reserve(dataset.labeled_count());
    labeled_.insert(labeled_.end(), dataset.d_b.begin(), dataset.d_b.end());
    labeled_.insert(labeled_.end(), dataset.d_i.begin(), dataset.d_i.end());
    collocation_ = dataset.all_collocation();
    g_at_collocation_ = std::move(g_at_collocation);

    if (labeled_.empty()) throw ConfigError("hybrid loss: empty labeled set");
    if (collocation_.empty()) throw ConfigError("hybrid loss: empty collocation set");
    if (g_at_collocation_.size() != collocation_.size())
        throw StructuralError("hybrid loss: source values not aligned with collocation set");
    if (taps_.width + 2 != shape_.input_dim())
        throw StructuralError("hybrid loss: tap width does not match network input_dim");
    if (taps_.width > 0 &&
        (taps_.labeled.size() != labeled_.size() * taps_.width ||
         taps_.collocation.size() != collocation_.size() * taps_.width))
        throw StructuralError("hybrid loss: tap arrays not aligned with point sets");

    const std::size_t chunks =
        std::max(chunk_count(labeled_.size()), chunk_count(collocation_.size()));
    scratch_.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) scratch_.emplace_back(shape_);
}

HybridObjective::~HybridObjective() = default;

double HybridObjective::operator()(std::span<const double> theta, std::span<double> grad) {
    shape_.from_flat(theta);
    return evaluate(true, grad);
}

HybridLossParts HybridObjective::parts(const MlpParams& net_u) {
    shape_.from_flat(net_u.flat());
    evaluate(false, {});
    return {last_dn_, last_pn_, last_dn_ + last_pn_};
}

double HybridObjective::evaluate(bool with_grad, std::span<double> grad) {
    const double n_d = static_cast<double>(labeled_.size());
    const double n_e = static_cast<double>(collocation_.size());
    const int m = taps_.width;

    for (auto& s : scratch_) {
        s.dn = s.pn = 0.0;
        if (with_grad) std::fill(s.grad.begin(), s.grad.end(), 0.0);
    }

    // Labeled points: squared value errors, or squared slope errors on
    // Neumann rows (those need the jet's dx slot).
    for_each_chunk(labeled_.size(), [&](std::size_t c, std::size_t begin, std::size_t end) {
        Scratch& s = scratch_[c];
        for (std::size_t i = begin; i < end; ++i) {
            const LabeledPoint& p = labeled_[i];
            const std::span<const double> row =
                m > 0 ? taps_.labeled_row(i) : std::span<const double>{};
            if (p.kind == LabelKind::Value) {
                s.input[0] = p.x;
                s.input[1] = p.t;
                for (int j = 0; j < m; ++j) s.input[2 + j] = row[j];
                const double u_hat = s.scalar.forward(shape_, s.input);
                const double e = u_hat - p.target;
                s.dn += e * e;
                if (with_grad) s.scalar.backward(shape_, 2.0 * e / n_d, s.grad);
            } else {
                const Jet2 jet = s.jet.forward(shape_, p.x, p.t, row);
                const double e = jet.dx - p.target;
                s.dn += e * e;
                if (with_grad) {
                    Jet2 adj{};
                    adj.dx = 2.0 * e / n_d;
                    s.jet.backward(shape_, adj, s.grad);
                }
            }
        }
    });

    // Collocation points: squared PDE residuals with the source frozen.
    const double a2 = problem_->a * problem_->a;
    const bool heat = problem_->kind == PdeKind::Heat1D;
    for_each_chunk(collocation_.size(), [&](std::size_t c, std::size_t begin, std::size_t end) {
        Scratch& s = scratch_[c];
        for (std::size_t i = begin; i < end; ++i) {
            const Point2& p = collocation_[i];
            const std::span<const double> row =
                m > 0 ? taps_.collocation_row(i) : std::span<const double>{};
            const Jet2 jet = s.jet.forward(shape_, p.x, p.t, row);
            const double r = residual(*problem_, jet, g_at_collocation_[i]);
            s.pn += r * r;
            if (with_grad) {
                Jet2 adj{};
                const double w = 2.0 * physics_weight_ * r / n_e;
                if (heat)
                    adj.dt = w;
                else
                    adj.dtt = w;
                adj.dxx = -a2 * w;
                s.jet.backward(shape_, adj, s.grad);
            }
        }
    });

    double dn = 0.0, pn = 0.0;
    for (const auto& s : scratch_) {
        dn += s.dn;
        pn += s.pn;
    }
    dn /= n_d;
    pn /= n_e;
    last_dn_ = dn;
    last_pn_ = pn;

    if (with_grad)
        for (const auto& s : scratch_)
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += s.grad[i];

    return dn + physics_weight_ * pn;
}

// --- RegressionObjective ---------------------------------------------------------

struct RegressionObjective::Scratch {
    ScalarEvaluator scalar;
    std::vector<double> grad;
    double loss = 0.0;

    explicit Scratch(const MlpParams& shape)
        : scalar(shape), grad(shape.param_count(), 0.0) {}
};

RegressionObjective::RegressionObjective(std::vector<Point2> points, std::vector<double> targets,
                                         const MlpParams& shape)
    : shape_(shape), points_(std::move(points)), targets_(std::move(targets)) {
    if (points_.empty()) throw ConfigError("regression objective: empty point set");
    if (points_.size() != targets_.size())
        throw StructuralError("regression objective: points/targets length mismatch");
    const std::size_t chunks = chunk_count(points_.size());
    scratch_.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) scratch_.emplace_back(shape_);
}

RegressionObjective::~RegressionObjective() = default;

double RegressionObjective::operator()(std::span<const double> theta, std::span<double> grad) {
    shape_.from_flat(theta);
    const double n = static_cast<double>(points_.size());
    for (auto& s : scratch_) {
        s.loss = 0.0;
        std::fill(s.grad.begin(), s.grad.end(), 0.0);
    }
    for_each_chunk(points_.size(), [&](std::size_t c, std::size_t begin, std::size_t end) {
        Scratch& s = scratch_[c];
        for (std::size_t i = begin; i < end; ++i) {
            const double in[2] = {points_[i].x, points_[i].t};
            const double y = s.scalar.forward(shape_, in);
            const double e = y - targets_[i];
            s.loss += e * e;
            s.scalar.backward(shape_, 2.0 * e / n, s.grad);
        }
    });
    double loss = 0.0;
    for (const auto& s : scratch_) {
        loss += s.loss;
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += s.grad[i];
    }
    return loss / n;
}

// --- Loss values -------------------------------------------------------------

namespace {

// Time-independent sources share one spatial profile: the source network is
// always queried at t = 0 for them.
double source_time(const PdeProblem& problem, double t) {
    return problem.source_time_dependent ? t : 0.0;
}

std::vector<double> eval_source_at(const PdeProblem& problem, const MlpParams& net_g,
                                   const std::vector<Point2>& points) {
    ScalarEvaluator ev(net_g);
    std::vector<double> g(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double in[2] = {points[i].x, source_time(problem, points[i].t)};
        g[i] = ev.forward(net_g, in);
    }
    return g;
}

std::vector<double> frozen_field_at(const PdeProblem& problem, const MlpParams& net_u,
                                    const std::vector<Point2>& points) {
    JetEvaluator ev(net_u);
    std::vector<double> phi(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Jet2 jet = ev.forward(net_u, points[i].x, points[i].t);
        phi[i] = residual(problem, jet, 0.0); // u_t + N[u] of the frozen network
    }
    return phi;
}

} // namespace

double mse_dn_over(const std::vector<LabeledPoint>& labeled, const FieldJetFn& u_jet) {
    if (labeled.empty()) throw ConfigError("mse_dn: empty labeled set");
    double sum = 0.0;
    for (const auto& p : labeled) {
        const Jet2 jet = u_jet(p.x, p.t);
        const double e = (p.kind == LabelKind::Value ? jet.v : jet.dx) - p.target;
        sum += e * e;
    }
    return sum / static_cast<double>(labeled.size());
}

double mse_pn_over(const PdeProblem& problem, const std::vector<Point2>& points,
                   const FieldJetFn& u_jet, const FieldFn& g) {
    if (points.empty()) throw ConfigError("mse_pn: empty collocation set");
    double sum = 0.0;
    for (const auto& p : points) {
        const double r = residual(problem, u_jet(p.x, p.t), g(p.x, p.t));
        sum += r * r;
    }
    return sum / static_cast<double>(points.size());
}

double mse_dn(const MlpParams& net_u, const Dataset& dataset) {
    std::vector<LabeledPoint> labeled;
    labeled.insert(labeled.end(), dataset.d_b.begin(), dataset.d_b.end());
    labeled.insert(labeled.end(), dataset.d_i.begin(), dataset.d_i.end());
    auto jev = std::make_shared<JetEvaluator>(net_u);
    return mse_dn_over(labeled, [&net_u, jev](double x, double t) {
        return jev->forward(net_u, x, t);
    });
}

double mse_pn(const MlpParams& net_u, const MlpParams& net_g, const Dataset& dataset,
              const PdeProblem& problem) {
    auto jev = std::make_shared<JetEvaluator>(net_u);
    auto gev = std::make_shared<ScalarEvaluator>(net_g);
    return mse_pn_over(
        problem, dataset.all_collocation(),
        [&net_u, jev](double x, double t) { return jev->forward(net_u, x, t); },
        [&net_g, gev, &problem](double x, double t) {
            const double in[2] = {x, source_time(problem, t)};
            return gev->forward(net_g, in);
        });
}

HybridLossParts hybrid_loss(const MlpParams& net_u, const MlpParams& net_g,
                            const Dataset& dataset, const PdeProblem& problem) {
    const double dn = mse_dn(net_u, dataset);
    const double pn = mse_pn(net_u, net_g, dataset, problem);
    return {dn, pn, dn + pn};
}

std::pair<double, std::vector<double>> loss_grad(Objective loss, const MlpParams& params) {
    std::vector<double> x = params.flat();
    std::vector<double> grad(x.size(), 0.0);
    const double value = loss(x, grad);
    if (!std::isfinite(value)) throw NumericError("loss_grad", "loss value is non-finite");
    for (double g : grad)
        if (!std::isfinite(g)) throw NumericError("loss_grad", "gradient entry is non-finite");
    return {value, std::move(grad)};
}

// --- Phases ------------------------------------------------------------------

namespace {

LbfgsOptions phase_options(const TrainConfig& cfg, int budget) {
    LbfgsOptions o;
    o.max_iterations = budget;
    o.memory = cfg.lbfgs_memory;
    return o;
}

} // namespace

MlpParams train_netg_phase(const MlpParams& net_g, const MlpParams& net_u_frozen,
                           const Dataset& dataset, const PdeProblem& problem,
                           const TrainConfig& cfg) {
    if (cfg.inner_iters_g <= 0) return net_g;
    const auto points = dataset.all_collocation();
    if (points.empty()) throw ConfigError("train_netg_phase: empty collocation set");
    std::vector<Point2> inputs(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        inputs[i] = {points[i].x, source_time(problem, points[i].t)};
    RegressionObjective objective(std::move(inputs),
                                  frozen_field_at(problem, net_u_frozen, points), net_g);
    auto result = lbfgs_minimize(std::ref(objective), net_g.flat(),
                                 phase_options(cfg, cfg.inner_iters_g));
    MlpParams out = net_g;
    out.from_flat(result.x);
    return out;
}

MlpParams train_netu_phase(const MlpParams& net_u, const MlpParams& net_g_frozen,
                           const Dataset& dataset, const PdeProblem& problem,
                           const TrainConfig& cfg) {
    if (cfg.inner_iters_u <= 0) return net_u;
    HybridObjective objective(problem, dataset,
                              eval_source_at(problem, net_g_frozen, dataset.all_collocation()),
                              cfg.physics_weight, net_u);
    auto result = lbfgs_minimize(std::ref(objective), net_u.flat(),
                                 phase_options(cfg, cfg.inner_iters_u));
    MlpParams out = net_u;
    out.from_flat(result.x);
    return out;
}

// --- Hierarchical training -----------------------------------------------------

void scale_first_layer_to_domain(MlpParams& params, double L, double T) {
    const int in = params.layer_sizes[0];
    const int out = params.layer_sizes[1];
    for (int j = 0; j < out; ++j) {
        double& wx = params.weights[0][static_cast<std::size_t>(j) * in + 0];
        double& wt = params.weights[0][static_cast<std::size_t>(j) * in + 1];
        params.biases[0][j] -= wx + wt;
        wx *= 2.0 / L;
        wt *= 2.0 / T;
    }
}

TrainOutput hierarchical_train(const PdeProblem& problem, const Dataset& dataset,
                               const NetSpec& spec_u, const NetSpec& spec_g,
                               const TrainConfig& cfg) {
    cfg.validate();
    TrainOutput out;
    out.net_u = init_xavier(spec_u);
    out.net_g = init_xavier(spec_g);
    if (cfg.domain_scaled_init) {
        scale_first_layer_to_domain(out.net_u, problem.L, problem.T);
        scale_first_layer_to_domain(out.net_g, problem.L, problem.T);
    }

    const bool with_diag = cfg.record_diagnostics && static_cast<bool>(problem.exact_u);
    const EvalGrid diag_grid =
        with_diag ? make_grid(problem, cfg.diagnostics_nx, cfg.diagnostics_nt) : EvalGrid{};

    TrainReport& report = out.report;
    report.initial = hybrid_loss(out.net_u, out.net_g, dataset, problem);
    report.init_u = out.net_u;
    report.init_g = out.net_g;
    if (with_diag) report.initial_diag = diagnostics(out.net_u, out.net_g, problem, diag_grid);
    report.status = TrainStatus::MaxIters;

    double prev_total = report.initial.total;
    for (int k = 1; k <= cfg.max_outer_iters; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        MlpParams g_candidate, u_candidate;
        try {
            g_candidate = train_netg_phase(out.net_g, out.net_u, dataset, problem, cfg);
            u_candidate = train_netu_phase(out.net_u, g_candidate, dataset, problem, cfg);
        } catch (const NumericError&) {
            report.status = TrainStatus::Diverged;
            break; // out.net_u / out.net_g still hold the last finite checkpoint
        }

        OuterRecord rec;
        rec.k = k;
        rec.after_g = hybrid_loss(out.net_u, g_candidate, dataset, problem);
        rec.after_u = hybrid_loss(u_candidate, g_candidate, dataset, problem);
        if (!std::isfinite(rec.after_u.total) || !std::isfinite(rec.after_g.total)) {
            report.status = TrainStatus::Diverged;
            break;
        }

        out.net_g = std::move(g_candidate);
        out.net_u = std::move(u_candidate);
        rec.net_u = out.net_u;
        rec.net_g = out.net_g;
        if (with_diag) rec.diag = diagnostics(out.net_u, out.net_g, problem, diag_grid);
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        report.iterations.push_back(std::move(rec));

        const double total = report.iterations.back().after_u.total;
        if (total <= cfg.tol_loss) {
            report.status = TrainStatus::Converged;
            break;
        }
        const double improve = (prev_total - total) / std::max(prev_total, 1e-300);
        if (improve < cfg.tol_stall) {
            report.status = TrainStatus::Converged; // stalled
            break;
        }
        prev_total = total;
    }
    return out;
}

// --- Diagnostics -----------------------------------------------------------------

Diagnostics diagnostics(const MlpParams& net_u, const MlpParams& net_g,
                        const PdeProblem& problem, const EvalGrid& grid) {
    auto jev = std::make_shared<JetEvaluator>(net_u);
    auto gev = std::make_shared<ScalarEvaluator>(net_g);
    return diagnostics_over(
        problem, grid,
        [&net_u, jev](double x, double t) { return jev->forward(net_u, x, t); },
        [&net_g, gev, &problem](double x, double t) {
            const double in[2] = {x, source_time(problem, t)};
            return gev->forward(net_g, in);
        });
}

Diagnostics diagnostics_over(const PdeProblem& problem, const EvalGrid& grid,
                             const FieldJetFn& u_jet, const FieldFn& g_hat_fn) {
    if (!problem.exact_u)
        throw DataError("diagnostics: exact solution unavailable for this problem");
    const std::size_t n = grid.size();

    double sum_e2 = 0.0, sum_f2 = 0.0, sum_g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = grid.point(i);
        const Jet2 jet = u_jet(p.x, p.t);
        const double g_hat = g_hat_fn(p.x, p.t);
        const double e = jet.v - problem.exact_u(p.x, p.t);
        const double f = residual(problem, jet, g_hat);
        sum_e2 += e * e;
        sum_f2 += f * f;
        if (problem.exact_g) {
            const double ge = g_hat - problem.exact_g(p.x, p.t);
            sum_g2 += ge * ge;
        }
    }
    const double nn = static_cast<double>(n);
    const double measure = grid.L * grid.T;

    Diagnostics d;
    d.l_dn = measure * sum_e2 / nn;
    d.l_pn = measure * sum_f2 / nn;
    d.l_u = (d.l_dn + d.l_pn) / measure;
    d.sol_err_l2 = std::sqrt(d.l_dn);
    d.sol_rmse = std::sqrt(sum_e2 / nn);
    if (problem.exact_g) {
        d.src_err_l2 = std::sqrt(measure * sum_g2 / nn);
        d.src_rmse = std::sqrt(sum_g2 / nn);
    } else {
        d.src_err_l2 = std::numeric_limits<double>::quiet_NaN();
        d.src_rmse = std::numeric_limits<double>::quiet_NaN();
    }
    d.err_ratio = d.sol_err_l2 / std::sqrt(d.l_pn);
    return d;
}

// --- Report CSV ------------------------------------------------------------------

void write_train_report_csv(const TrainReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open report for writing: " + path);
    os << "k,mse_dn,mse_pn,total,wall_ms\n";
    char buf[192];
    for (const auto& rec : report.iterations) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.3f\n", rec.k, rec.after_u.mse_dn,
                      rec.after_u.mse_pn, rec.after_u.total, rec.wall_ms);
        os << buf;
    }
    if (!os) throw DataError("report write failed: " + path);
}

std::vector<ReportRow> read_train_report_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open report: " + path);
    std::string line;
    if (!std::getline(is, line) || line != "k,mse_dn,mse_pn,total,wall_ms")
        throw DataError("report " + path + ": unexpected header");
    std::vector<ReportRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ReportRow row;
        std::stringstream ss(line);
        std::string cell;
        auto next = [&](const char* what) {
            if (!std::getline(ss, cell, ','))
                throw DataError("report " + path + ": missing column " + what);
            return std::stod(cell);
        };
        row.k = static_cast<int>(next("k"));
        row.mse_dn = next("mse_dn");
        row.mse_pn = next("mse_pn");
        row.total = next("total");
        row.wall_ms = next("wall_ms");
        rows.push_back(row);
    }
    return rows;
}

} // namespace cpinn
