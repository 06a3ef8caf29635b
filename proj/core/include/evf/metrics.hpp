#pragma once

#include <cstddef>
#include <vector>

#include "evf/linalg.hpp"

namespace evf {

struct MetricsReport {
    double mape = 0.0;  // percent
    double mse = 0.0;   // kWh^2
    double rmse = 0.0;  // kWh
    double mae = 0.0;   // kWh
    std::size_t n = 0;
    std::size_t mape_excluded = 0;  // rows with actual == 0, left out of MAPE
};

/// MAPE / MSE / RMSE / MAE over equal-length series. Rows with actual == 0
/// are excluded from MAPE only, with the count reported.
MetricsReport metrics(const Vector& actual, const Vector& predicted);

enum class MwMethod { Exact, NormalApproximation };

struct MannWhitneyResult {
    double u_statistic = 0.0;  // U of the first sample
    double p_value = 1.0;      // two-sided
    MwMethod method = MwMethod::Exact;
    std::size_t n1 = 0, n2 = 0;
    bool reject = false;  // at the alpha passed in
};

/// Two-sided Mann-Whitney U test. Exact p by enumeration when n1+n2 <= 16
/// and the pooled sample is tie-free; otherwise a normal approximation with
/// midranks, tie-corrected variance, and continuity correction.
MannWhitneyResult mann_whitney(const Vector& a, const Vector& b, double alpha = 0.05);

/// Force one method (testing hook; the exact path still requires no ties).
MannWhitneyResult mann_whitney_with_method(const Vector& a, const Vector& b,
                                           double alpha, MwMethod method);

}  // namespace evf
