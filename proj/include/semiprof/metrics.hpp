#pragma once

// Replicate-level records and the bias / SE / MAE / RMSE aggregation used
// by the Monte Carlo harness.

#include "semiprof/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace semiprof {

struct PerRepRecord {
    std::string method;
    int rep = 0;
    Vec estimate;
    int iterations = 0;
    double seconds = 0;
    bool converged = false;
    int extrapolation_warnings = 0;
};

struct CoordinateMetrics {
    double bias = 0;  // theta_j - mean(theta_hat_j)
    double se = 0;    // sample sd across replicates
    double mae = 0;
    double rmse = 0;
};

struct Aggregates {
    std::vector<CoordinateMetrics> coords;
    double mse = 0;  // p^{-1} sum_j B^{-1} sum_b (theta_hat_jb - theta_j)^2
    double rmse_scalar = 0;  // {B^{-1} sum_b ||theta_hat_b - theta||^2}^{1/2}
    int converged_count = 0;
    int excluded_count = 0;
    double mean_iterations = 0;
    double total_seconds = 0;
};

/// Aggregate over the converged replicates of one method.
inline Aggregates aggregate_metrics(const std::vector<PerRepRecord>& per_rep, const Vec& truth) {
    std::vector<const PerRepRecord*> kept;
    int excluded = 0;
    for (const auto& r : per_rep) {
        if (r.converged) {
            kept.push_back(&r);
        } else {
            ++excluded;
        }
    }
    if (kept.empty()) {
        throw std::runtime_error("aggregate_metrics: zero converged replicates");
    }
    const int b = static_cast<int>(kept.size());
    const int p = static_cast<int>(truth.size());

    Aggregates agg;
    agg.converged_count = b;
    agg.excluded_count = excluded;
    agg.coords.resize(p);

    Vec mean = Vec::Zero(p);
    for (const auto* r : kept) mean += r->estimate;
    mean /= double(b);

    for (int j = 0; j < p; ++j) {
        double ss_mean = 0, ss_truth = 0, abs_err = 0;
        for (const auto* r : kept) {
            const double e = r->estimate[j];
            ss_mean += (e - mean[j]) * (e - mean[j]);
            ss_truth += (e - truth[j]) * (e - truth[j]);
            abs_err += std::abs(e - truth[j]);
        }
        auto& cm = agg.coords[j];
        cm.bias = truth[j] - mean[j];
        cm.se = b > 1 ? std::sqrt(ss_mean / double(b - 1)) : 0.0;
        cm.mae = abs_err / double(b);
        cm.rmse = std::sqrt(ss_truth / double(b));
        agg.mse += ss_truth / double(b);
    }
    agg.rmse_scalar = std::sqrt(agg.mse);
    agg.mse /= double(p);

    for (const auto* r : kept) {
        agg.mean_iterations += r->iterations;
        agg.total_seconds += r->seconds;
    }
    agg.mean_iterations /= double(b);
    return agg;
}

}  // namespace semiprof
