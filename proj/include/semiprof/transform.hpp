#pragma once

// Semiparametric transformation model: censored-outcome data generation,
// kernel-smoothed estimating equations with one nuisance coordinate per
// observation, and the closed-form implicit gradient / profiling Hessian.

#include "semiprof/linalg.hpp"
#include "semiprof/metrics.hpp"
#include "semiprof/parallel.hpp"
#include "semiprof/rng.hpp"
#include "semiprof/solver.hpp"
#include "semiprof/system.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace semiprof {

inline double logistic(double u) {
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

inline double logistic_deriv(double u) {
    const double pi = logistic(u);
    return pi * (1.0 - pi);
}

// Guard against exp overflow in saturated nuisance coordinates.
inline double clamp_lambda(double v) { return std::min(30.0, std::max(-30.0, v)); }

struct TransformData {
    Mat z;      // n x p covariates
    Vec c;      // follow-up times
    Vec delta;  // event indicators in {0, 1}
    int n = 0;
    int p = 0;
};

struct TransformModelSpec {
    double bandwidth_h = 0;
    int theta_dim = 0;

    void validate() const {
        if (!(bandwidth_h > 0)) throw std::domain_error("TransformModelSpec: h > 0 required");
    }
};

inline Vec transform_paper_theta() {
    Vec t(10);
    t << 0.7, 0.7, 0.7, -0.5, -0.5, -0.5, 0.3, 0.3, 0.3, 0.0;
    return t;
}

/// Event time as a function of the uniform draw and the linear predictor.
inline double transform_event_time(double u, double ztheta) {
    return 4.0 * std::exp((std::log(u) - std::log(1.0 - u) - ztheta) / 3.0);
}

inline TransformData generate_transform_data(int n, const Vec& theta_star, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_transform_data: n >= 1");
    const int p = static_cast<int>(theta_star.size());
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif01(0.0, 1.0);
    std::uniform_real_distribution<double> unifc(0.0, 12.0);

    TransformData data;
    data.n = n;
    data.p = p;
    data.z.resize(n, p);
    data.c.resize(n);
    data.delta.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) data.z(i, j) = normal(rng);
        const double u = unif01(rng);
        data.c[i] = unifc(rng);
        const double t = transform_event_time(u, data.z.row(i).dot(theta_star));
        data.delta[i] = t <= data.c[i] ? 1.0 : 0.0;
    }
    return data;
}

/// Rule-of-thumb bandwidth sd(C) * n^{-1/5}.
inline double transform_default_bandwidth(const TransformData& data, double h_scale = 1.0) {
    const double mean = data.c.mean();
    const double var = (data.c.array() - mean).square().sum() / double(data.n - 1);
    return std::sqrt(var) * std::pow(double(data.n), -0.2) * h_scale;
}

namespace detail {

struct TransformWorkspace {
    TransformData data;
    Mat w;  // kernel weights, w(i, j) = K_h(C_j - C_i)

    TransformWorkspace(TransformData d, double h) : data(std::move(d)) {
        const int n = data.n;
        const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
        w.resize(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double u = (data.c[j] - data.c[i]) / h;
                const double k = norm * std::exp(-0.5 * u * u);
                w(i, j) = k;
                w(j, i) = k;
            }
        }
    }
};

}  // namespace detail

/// Build the estimating system. The lambda block holds the n kernel
/// equations (one per follow-up time, diagonal in lambda), the theta
/// block the p covariate equations.
inline EstimatingSystem transform_system(const TransformData& data,
                                         const TransformModelSpec& spec) {
    spec.validate();
    auto ws = std::make_shared<detail::TransformWorkspace>(data, spec.bandwidth_h);
    const int n = data.n;
    const int p = data.p;

    EstimatingSystem sys;
    sys.p = p;
    sys.q = n;
    sys.lambda_jacobian_structure = LambdaJacobianStructure::diagonal;

    sys.psi = [ws, n, p](const Vec& theta, const Vec& lambda) {
        const Vec s = ws->data.z * theta;
        Vec resid(n);
        for (int j = 0; j < n; ++j) {
            resid[j] = ws->data.delta[j] - logistic(clamp_lambda(lambda[j]) + s[j]);
        }
        return Vec(ws->data.z.transpose() * resid / double(n));
    };
    sys.phi = [ws, n](const Vec& theta, const Vec& lambda) {
        const Vec s = ws->data.z * theta;
        Vec out(n);
        for (int i = 0; i < n; ++i) {
            const double li = clamp_lambda(lambda[i]);
            double acc = 0;
            for (int j = 0; j < n; ++j) {
                acc += ws->w(i, j) * (ws->data.delta[j] - logistic(li + s[j]));
            }
            out[i] = acc / double(n);
        }
        return out;
    };
    sys.jac_psi_theta = [ws, n, p](const Vec& theta, const Vec& lambda) {
        const Vec s = ws->data.z * theta;
        Mat jac = Mat::Zero(p, p);
        for (int j = 0; j < n; ++j) {
            const double w = logistic_deriv(clamp_lambda(lambda[j]) + s[j]);
            jac.noalias() -= w * ws->data.z.row(j).transpose() * ws->data.z.row(j);
        }
        return Mat(jac / double(n));
    };
    sys.jac_psi_lambda = [ws, n, p](const Vec& theta, const Vec& lambda) {
        const Vec s = ws->data.z * theta;
        Mat jac(p, n);
        for (int j = 0; j < n; ++j) {
            const double w = logistic_deriv(clamp_lambda(lambda[j]) + s[j]);
            jac.col(j) = -w * ws->data.z.row(j).transpose() / double(n);
        }
        return jac;
    };
    sys.jac_phi_theta = [ws, n, p](const Vec& theta, const Vec& lambda) {
        const Vec s = ws->data.z * theta;
        Mat jac = Mat::Zero(n, p);
        for (int i = 0; i < n; ++i) {
            const double li = clamp_lambda(lambda[i]);
            for (int j = 0; j < n; ++j) {
                const double w = ws->w(i, j) * logistic_deriv(li + s[j]);
                jac.row(i) -= w * ws->data.z.row(j);
            }
        }
        return Mat(jac / double(n));
    };
    sys.jac_phi_lambda = [ws, n](const Vec& theta, const Vec& lambda) {
        const Vec s = ws->data.z * theta;
        Mat jac = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const double li = clamp_lambda(lambda[i]);
            double acc = 0;
            for (int j = 0; j < n; ++j) {
                acc += ws->w(i, j) * logistic_deriv(li + s[j]);
            }
            jac(i, i) = -acc / double(n);
        }
        return jac;
    };
    return sys;
}

/// Closed-form implicit gradient: row i is
///   d_i = -sum_j K_h(C_j-C_i) pi'(lambda_i + theta^T Z_j) Z_j
///         / sum_j K_h(C_j-C_i) pi'(lambda_i + theta^T Z_j).
inline Mat transform_implicit_gradient(const TransformData& data, const TransformModelSpec& spec,
                                       const Vec& theta, const Vec& lambda) {
    spec.validate();
    detail::TransformWorkspace ws(data, spec.bandwidth_h);
    const int n = data.n;
    const int p = data.p;
    const Vec s = data.z * theta;
    Mat d = Mat::Zero(n, p);
    for (int i = 0; i < n; ++i) {
        const double li = clamp_lambda(lambda[i]);
        Vec num = Vec::Zero(p);
        double den = 0;
        for (int j = 0; j < n; ++j) {
            const double w = ws.w(i, j) * logistic_deriv(li + s[j]);
            num += w * data.z.row(j).transpose();
            den += w;
        }
        if (den == 0.0) {
            throw std::runtime_error("transform_implicit_gradient: isolated point i=" +
                                     std::to_string(i));
        }
        d.row(i) = -num.transpose() / den;
    }
    return d;
}

/// Profiling Hessian of the theta block along the lambda profile,
///   -n^{-1} [ sum_i Z_i Z_i^T pi'_i + sum_i Z_i d_i^T pi'_i ],
/// signed as the Jacobian of the theta residual so that the root-finding
/// step theta+ = theta - H^{-1} Psi applies directly.
inline Mat transform_ip_hessian(const TransformData& data, const TransformModelSpec& spec,
                                const Vec& theta, const Vec& lambda, const Mat& d) {
    spec.validate();
    const int n = data.n;
    const int p = data.p;
    const Vec s = data.z * theta;
    Mat hess = Mat::Zero(p, p);
    for (int i = 0; i < n; ++i) {
        const double w = logistic_deriv(clamp_lambda(lambda[i]) + s[i]);
        hess.noalias() -= w * data.z.row(i).transpose() * (data.z.row(i) + d.row(i));
    }
    return hess / double(n);
}

struct TransformExperimentConfig {
    int n = 500;
    int reps = 100;
    std::uint64_t seed = 1;
    std::vector<SolveMethod> methods = {SolveMethod::implicit_profiling,
                                        SolveMethod::naive_iteration,
                                        SolveMethod::newton_raphson};
    double h_scale = 1.0;
    double tol = 1e-8;
    int max_iter = 100;
    int threads = 0;
    Vec theta_star = transform_paper_theta();
};

struct ExperimentResult {
    std::vector<PerRepRecord> per_rep;
    std::map<std::string, Aggregates> aggregates;
    Vec truth;
    int failed_replicates = 0;
};

/// Shared-init Monte Carlo study: per replicate, generate data once,
/// solve with every requested method from theta = 0 and the common
/// lambda root. More than 5% failed replicates aborts the experiment.
inline ExperimentResult run_transform_experiment(const TransformExperimentConfig& cfg) {
    if (cfg.n < 50) throw std::invalid_argument("run_transform_experiment: n >= 50 required");
    const int m = static_cast<int>(cfg.methods.size());
    std::vector<PerRepRecord> records(static_cast<std::size_t>(cfg.reps) * m);

    parallel_for(resolve_threads(cfg.threads), cfg.reps, [&](int rep) {
        const TransformData data =
            generate_transform_data(cfg.n, cfg.theta_star, split_seed(cfg.seed, rep));
        TransformModelSpec spec;
        spec.theta_dim = data.p;
        spec.bandwidth_h = transform_default_bandwidth(data, cfg.h_scale);
        const EstimatingSystem sys = transform_system(data, spec);

        SolverConfig scfg;
        scfg.tol = cfg.tol;
        scfg.max_iter = cfg.max_iter;

        ParameterState init;
        init.theta = Vec::Zero(data.p);
        bool init_ok = true;
        try {
            init.lambda = init_lambda(sys, init.theta, scfg);
        } catch (const InitLambdaError& e) {
            init.lambda = e.best_lambda();
            init_ok = e.residual() <= 1e-4;  // usable fallback start
        }

        for (int mi = 0; mi < m; ++mi) {
            PerRepRecord rec;
            rec.method = method_name(cfg.methods[mi]);
            rec.rep = rep;
            rec.estimate = Vec::Zero(data.p);
            if (init_ok) {
                try {
                    SolverConfig run_cfg = scfg;
                    run_cfg.method = cfg.methods[mi];
                    const SolveReport rep_out = run_solver(sys, init, run_cfg);
                    rec.estimate = rep_out.final.theta;
                    rec.iterations = rep_out.iterations;
                    rec.seconds = rep_out.total_time;
                    rec.converged = rep_out.converged;
                } catch (const std::exception&) {
                    rec.converged = false;
                }
            }
            records[static_cast<std::size_t>(rep) * m + mi] = std::move(rec);
        }
    });

    ExperimentResult result;
    result.truth = cfg.theta_star;
    result.per_rep = std::move(records);
    for (const auto& rec : result.per_rep) {
        if (!rec.converged) ++result.failed_replicates;
    }
    if (result.failed_replicates > 0.05 * double(result.per_rep.size())) {
        throw std::runtime_error("run_transform_experiment: failure rate above 5%");
    }
    for (SolveMethod method : cfg.methods) {
        std::vector<PerRepRecord> rows;
        for (const auto& rec : result.per_rep) {
            if (rec.method == method_name(method)) rows.push_back(rec);
        }
        result.aggregates[method_name(method)] = aggregate_metrics(rows, result.truth);
    }
    return result;
}

}  // namespace semiprof
