#include "cpinn/metrics.hpp"

#include "cpinn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cpinn {

double rmse(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw DataError("rmse: length mismatch");
    if (pred.empty()) throw DataError("rmse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - truth[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(pred.size()));
}

double pearson_cc(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw DataError("pearson_cc: length mismatch");
    if (pred.size() < 2) throw DataError("pearson_cc: needs at least 2 points");
    const double n = static_cast<double>(pred.size());
    double mp = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        mp += pred[i];
        mt += truth[i];
    }
    mp /= n;
    mt /= n;
    double cov = 0.0, vp = 0.0, vt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double a = pred[i] - mp, b = truth[i] - mt;
        cov += a * b;
        vp += a * a;
        vt += b * b;
    }
    if (vp == 0.0 || vt == 0.0)
        throw NumericError("pearson_cc", "undefined for zero-variance input");
    return cov / (std::sqrt(vp) * std::sqrt(vt));
}

EvalResult snapshot_eval(const std::function<double(double, double)>& field,
                         const std::function<double(double, double)>& exact_u,
                         double t_fixed, double L, int nx) {
    if (nx < 2) throw ConfigError("snapshot_eval: nx must be >= 2");
    std::vector<double> pred(nx), truth(nx);
    for (int i = 0; i < nx; ++i) {
        const double x = L * i / (nx - 1);
        pred[i] = field(x, t_fixed);
        truth[i] = exact_u(x, t_fixed);
    }
    char scope[64];
    std::snprintf(scope, sizeof(scope), "t=%g snapshot", t_fixed);
    return {scope, static_cast<std::size_t>(nx), rmse(pred, truth), pearson_cc(pred, truth)};
}

void write_eval_csv(const std::vector<EvalResult>& rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open CSV for writing: " + path);
    os << "scope,n,rmse,cc\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g\n", r.scope.c_str(), r.n, r.rmse, r.cc);
        os << buf;
    }
    if (!os) throw DataError("CSV write failed: " + path);
}

} // namespace cpinn
