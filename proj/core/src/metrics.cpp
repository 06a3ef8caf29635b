#include "evf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evf/errors.hpp"

namespace evf {

MetricsReport metrics(const Vector& actual, const Vector& predicted) {
    if (actual.empty()) throw DataError("metrics: empty input");
    if (actual.size() != predicted.size())
        throw DimensionError("metrics: lengths " + std::to_string(actual.size()) +
                             " and " + std::to_string(predicted.size()) + " differ");
    MetricsReport r;
    r.n = actual.size();
    double ape = 0.0, se = 0.0, ae = 0.0;
    std::size_t mape_n = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        se += d * d;
        ae += std::abs(d);
        if (actual[i] != 0.0) {
            ape += std::abs(d) / std::abs(actual[i]);
            ++mape_n;
        } else {
            ++r.mape_excluded;
        }
    }
    if (mape_n == 0) throw DataError("metrics: all actuals are zero, MAPE undefined");
    const double n = static_cast<double>(actual.size());
    r.mape = 100.0 * ape / static_cast<double>(mape_n);
    r.mse = se / n;
    r.rmse = std::sqrt(r.mse);
    r.mae = ae / n;
    return r;
}

namespace {

struct Ranked {
    double u1 = 0.0;       // U of the first sample, from midranks
    double tie_term = 0.0; // sum over tie groups of t^3 - t
    bool has_ties = false;
};

Ranked rank_stats(const Vector& a, const Vector& b) {
    struct Item {
        double v;
        int group;  // 0 = a, 1 = b
    };
    std::vector<Item> pool;
    pool.reserve(a.size() + b.size());
    for (double v : a) pool.push_back({v, 0});
    for (double v : b) pool.push_back({v, 1});
    std::sort(pool.begin(), pool.end(), [](const Item& x, const Item& y) { return x.v < y.v; });

    Ranked out;
    double rank_sum_a = 0.0;
    std::size_t i = 0;
    while (i < pool.size()) {
        std::size_t j = i;
        while (j < pool.size() && pool[j].v == pool[i].v) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (pool[k].group == 0) rank_sum_a += midrank;
        if (t > 1.0) {
            out.has_ties = true;
            out.tie_term += t * t * t - t;
        }
        i = j;
    }
    const double n1 = static_cast<double>(a.size());
    out.u1 = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    return out;
}

// Exact null distribution of the rank sum of the first sample: number of
// n1-subsets of {1..n} with each possible sum.
std::vector<double> rank_sum_counts(std::size_t n, std::size_t n1) {
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<std::vector<double>> dp(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    dp[0][0] = 1.0;
    for (std::size_t r = 1; r <= n; ++r)
        for (std::size_t k = std::min(n1, r); k >= 1; --k)
            for (std::size_t s = max_sum; s >= r; --s)
                dp[k][s] += dp[k - 1][s - r];
    return dp[n1];
}

double exact_two_sided_p(double u1, std::size_t n1, std::size_t n2) {
    const std::size_t n = n1 + n2;
    const double nn = static_cast<double>(n1) * static_cast<double>(n2);
    const double umin = std::min(u1, nn - u1);
    const std::vector<double> counts = rank_sum_counts(n, n1);
    const double base = static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    double total = 0.0, tail = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts[s] == 0.0) continue;
        total += counts[s];
        const double u = static_cast<double>(s) - base;
        if (u <= umin + 1e-9 || u >= nn - umin - 1e-9) tail += counts[s];
    }
    return std::min(1.0, tail / total);
}

double approx_two_sided_p(double u1, std::size_t n1, std::size_t n2, double tie_term) {
    const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
    const double n = dn1 + dn2;
    const double mean = dn1 * dn2 / 2.0;
    double var = dn1 * dn2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0;  // all observations tied
    double z = (std::abs(u1 - mean) - 0.5) / std::sqrt(var);
    if (z < 0.0) z = 0.0;
    return std::erfc(z / std::sqrt(2.0));
}

}  // namespace

MannWhitneyResult mann_whitney_with_method(const Vector& a, const Vector& b,
                                           double alpha, MwMethod method) {
    if (a.empty() || b.empty()) throw DataError("mann_whitney: empty sample");
    const Ranked r = rank_stats(a, b);
    MannWhitneyResult res;
    res.n1 = a.size();
    res.n2 = b.size();
    res.u_statistic = r.u1;
    if (method == MwMethod::Exact) {
        if (r.has_ties)
            throw DataError("mann_whitney: exact method requires a tie-free sample");
        res.method = MwMethod::Exact;
        res.p_value = exact_two_sided_p(r.u1, a.size(), b.size());
    } else {
        res.method = MwMethod::NormalApproximation;
        res.p_value = approx_two_sided_p(r.u1, a.size(), b.size(), r.tie_term);
    }
    res.reject = res.p_value < alpha;
    return res;
}

MannWhitneyResult mann_whitney(const Vector& a, const Vector& b, double alpha) {
    if (a.empty() || b.empty()) throw DataError("mann_whitney: empty sample");
    const Ranked r = rank_stats(a, b);
    const bool exact = !r.has_ties && a.size() + b.size() <= 16;
    return mann_whitney_with_method(a, b, alpha,
                                    exact ? MwMethod::Exact : MwMethod::NormalApproximation);
}

}  // namespace evf
