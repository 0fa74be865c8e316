#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cpinn {

struct EvalResult {
    std::string scope;
    std::size_t n = 0;
    double rmse = 0.0;
    double cc = 0.0;
};

/// Root mean squared error over two equally long, nonempty vectors.
double rmse(std::span<const double> pred, std::span<const double> truth);

/// Pearson correlation coefficient. Throws NumericError("pearson_cc") when
/// either argument has zero variance — silent NaN would corrupt report tables.
double pearson_cc(std::span<const double> pred, std::span<const double> truth);

/// Metrics along the x-line at fixed time t_fixed, nx uniform samples over
/// [0, L]. `field` is the prediction surface, `exact_u` the ground truth.
EvalResult snapshot_eval(const std::function<double(double, double)>& field,
                         const std::function<double(double, double)>& exact_u,
                         double t_fixed, double L, int nx);

void write_eval_csv(const std::vector<EvalResult>& rows, const std::string& path);

} // namespace cpinn
