#pragma once

// Semiparametric GARCH-in-mean model: simulation DGPs, the variance
// recursion with analytic theta-sensitivities, the spline-profiled
// quasi-score, and the implicit-profiling / backfitting solvers.

#include "semiprof/linalg.hpp"
#include "semiprof/metrics.hpp"
#include "semiprof/parallel.hpp"
#include "semiprof/rng.hpp"
#include "semiprof/spline.hpp"
#include "semiprof/system.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace semiprof {

struct GarchTheta {
    double omega = 0.01;
    double alpha = 0.1;
    double beta = 0.68;

    bool stationary() const {
        return omega > 0 && alpha >= 0 && beta >= 0 && alpha + beta < 1;
    }

    Vec to_vec() const {
        Vec v(3);
        v << omega, alpha, beta;
        return v;
    }

    static GarchTheta from_vec(const Vec& v) { return {v[0], v[1], v[2]}; }
};

enum class GarchSetup { A, B };

inline double garch_mean_function(GarchSetup setup, double sigma2) {
    if (setup == GarchSetup::A) {
        return sigma2 + 0.5 * std::sin(10.0 * sigma2);
    }
    return 0.5 * sigma2 + 0.1 * std::sin(0.5 + 20.0 * sigma2);
}

inline GarchTheta garch_paper_theta(GarchSetup setup) {
    return {0.01, 0.1, setup == GarchSetup::A ? 0.68 : 0.80};
}

/// Simulate T observations after discarding the burn-in, with
/// y_t = m(sigma_t^2) + noise_scale * sigma_t * eps_t and the GARCH
/// recursion started at the unconditional variance.
inline Vec generate_garchm(GarchSetup setup, int t_len, const GarchTheta& theta,
                           double noise_scale, std::uint64_t seed, int burn_in = 500) {
    if (!theta.stationary()) throw std::domain_error("generate_garchm: nonstationary theta");
    if (t_len < 50) throw std::invalid_argument("generate_garchm: T >= 50");
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Vec y(t_len);
    double sigma2 = theta.omega / (1.0 - theta.alpha - theta.beta);
    for (int t = 0; t < burn_in + t_len; ++t) {
        const double yt =
            garch_mean_function(setup, sigma2) + noise_scale * std::sqrt(sigma2) * normal(rng);
        if (t >= burn_in) y[t - burn_in] = yt;
        sigma2 = theta.omega + theta.alpha * yt * yt + theta.beta * sigma2;
    }
    return y;
}

struct SigmaRecursion {
    Vec sigma2;  // T
    Mat sens;    // T x 3, d sigma_t^2 / d (omega, alpha, beta)
};

/// Forward recursion sigma_t^2 = omega + alpha y_{t-1}^2 + beta sigma_{t-1}^2
/// with sigma_1^2 = omega / (1 - alpha - beta), and sensitivities obtained
/// by differentiating the recursion.
inline SigmaRecursion sigma_recursion(const GarchTheta& theta, const Vec& y) {
    const int t_len = static_cast<int>(y.size());
    SigmaRecursion out;
    out.sigma2.resize(t_len);
    out.sens.resize(t_len, 3);

    const double denom = 1.0 - theta.alpha - theta.beta;
    out.sigma2[0] = theta.omega / denom;
    out.sens(0, 0) = 1.0 / denom;
    out.sens(0, 1) = theta.omega / (denom * denom);
    out.sens(0, 2) = theta.omega / (denom * denom);
    for (int t = 1; t < t_len; ++t) {
        const double y2 = y[t - 1] * y[t - 1];
        out.sigma2[t] = theta.omega + theta.alpha * y2 + theta.beta * out.sigma2[t - 1];
        out.sens(t, 0) = 1.0 + theta.beta * out.sens(t - 1, 0);
        out.sens(t, 1) = y2 + theta.beta * out.sens(t - 1, 1);
        out.sens(t, 2) = out.sigma2[t - 1] + theta.beta * out.sens(t - 1, 2);
        if (!(out.sigma2[t] > 0)) {
            throw std::runtime_error("sigma_recursion: non-positive variance");
        }
    }
    return out;
}

inline int garch_knot_count(int t_len) {
    return static_cast<int>(std::ceil(std::pow(double(t_len), 3.0 / 20.0)));
}

/// Quasi-score Psi = Psi1 - Psi2 with residual eps_t = y_t - fit(sigma_t^2):
///   Psi1 = 1/2 sum (1/s - eps^2/s^2) ds/dtheta,
///   Psi2 = sum (eps/s) fit'(s) ds/dtheta   (chain rule through sigma^2).
inline Vec garchm_score(const GarchTheta& theta, const Vec& y, const SplineFit& fit) {
    const SigmaRecursion rec = sigma_recursion(theta, y);
    const int t_len = static_cast<int>(y.size());
    Vec score = Vec::Zero(3);
    for (int t = 0; t < t_len; ++t) {
        const double s = rec.sigma2[t];
        const double eps = y[t] - fit.evaluate(s);
        const double w1 = 0.5 * (1.0 / s - eps * eps / (s * s));
        const double w2 = (eps / s) * fit.derivative(s);
        score += (w1 - w2) * rec.sens.row(t).transpose();
    }
    return score;
}

enum class GarchMethod { ip, backfit };

inline const char* garch_method_name(GarchMethod m) {
    return m == GarchMethod::ip ? "ip" : "backfit";
}

struct GarchSolveConfig {
    double tol = 1e-6;
    int max_iter = 200;
    double fd_step = 1e-4;
    double max_step = 0.05;  // infinity-norm cap on the Newton step
    int stall_limit = 15;    // iterations without a new best residual
    double travel_limit = 0.2;  // infinity-norm distance from the init
};

struct GarchmSolveReport {
    GarchTheta final;
    SplineFit fit;
    bool converged = false;
    int iterations = 0;
    double residual = 0;  // ||Psi||_inf at exit
    double total_time = 0;
    int extrapolation_warnings = 0;
};

namespace detail {

inline bool garch_in_region(const GarchTheta& t) {
    return t.omega >= 1e-8 && t.alpha >= 0 && t.beta >= 0 && t.alpha + t.beta <= 1.0 - 1e-4;
}

}  // namespace detail

/// Newton iteration on theta with spline re-fit each round. method=ip
/// differentiates the fully profiled score (the re-fit included) by
/// central differences; method=backfit freezes the current fit when
/// forming the Hessian.
///
/// Two phases. Phase one runs plain Newton steps (capped in the infinity
/// norm, halved back into the stationarity region) and succeeds only on
/// an actual root, ||Psi||_inf <= tol. The spline derivative is piecewise
/// constant, so the profiled score jumps when an observation crosses a
/// knot and a root need not exist; if phase one stalls, cycles, or
/// drifts, phase two restarts from the same init with damped steps
/// (Armijo on the quasi-likelihood at the frozen fit, whose exact
/// gradient the score is, plus a nonmonotone residual cap) and accepts
/// the residual floor it settles on. Reported iterations count both
/// phases up to the returned point.
inline GarchmSolveReport garchm_solve(const Vec& y, GarchMethod method, const GarchTheta& init,
                                      const GarchSolveConfig& cfg = {}) {
    if (!init.stationary()) throw std::domain_error("garchm_solve: nonstationary init");
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const int t_len = static_cast<int>(y.size());
    const int r_t = garch_knot_count(t_len);

    auto profiled_fit = [&](const GarchTheta& th) {
        const SigmaRecursion rec = sigma_recursion(th, y);
        return fit_lambda_spline(rec.sigma2, y, r_t);
    };
    auto profiled_score = [&](const Vec& thv) {
        const GarchTheta th = GarchTheta::from_vec(thv);
        return garchm_score(th, y, profiled_fit(th));
    };
    auto frozen_objective = [&](const GarchTheta& th, const SplineFit& fit) {
        const SigmaRecursion rec = sigma_recursion(th, y);
        double f = 0;
        for (int t = 0; t < t_len; ++t) {
            const double s = rec.sigma2[t];
            const double eps = y[t] - fit.evaluate(s);
            f += 0.5 * (std::log(s) + eps * eps / s);
        }
        return f;
    };
    auto newton_direction = [&](const GarchTheta& th, const SplineFit& fit, const Vec& score) {
        std::function<Vec(const Vec&)> score_fn;
        if (method == GarchMethod::ip) {
            score_fn = profiled_score;
        } else {
            score_fn = [&](const Vec& thv) {
                return garchm_score(GarchTheta::from_vec(thv), y, fit);
            };
        }
        const Mat hess = fd_jacobian(score_fn, th.to_vec(), cfg.fd_step);
        Vec delta;
        try {
            delta = solve_dense(hess, score, "profiled score Hessian");
        } catch (const SingularMatrixError&) {
            delta = score;
        }
        const double step_norm = delta.cwiseAbs().maxCoeff();
        if (step_norm > cfg.max_step) delta *= cfg.max_step / step_norm;
        return delta;
    };

    GarchmSolveReport report;
    int warnings = 0;
    auto finish = [&](GarchTheta th, bool converged, int iterations) {
        SplineFit fit = profiled_fit(th);
        report.final = th;
        report.converged = converged;
        report.iterations = iterations;
        report.residual = garchm_score(th, y, fit).cwiseAbs().maxCoeff();
        report.fit = std::move(fit);
        report.extrapolation_warnings = warnings;
        report.total_time = std::chrono::duration<double>(clock::now() - t0).count();
        return report;
    };

    // phase one: plain Newton, success only at a root
    GarchTheta theta = init;
    GarchTheta prev1 = init;
    GarchTheta prev2 = init;
    double first_res = 0;
    int spent = 0;
    for (int k = 0; k < cfg.max_iter; ++k, ++spent) {
        SplineFit fit = profiled_fit(theta);
        fit.extrapolation_warnings = 0;
        const Vec score = garchm_score(theta, y, fit);
        warnings += fit.extrapolation_warnings;
        const double res = score.cwiseAbs().maxCoeff();
        if (k == 0) first_res = res;
        if (res <= cfg.tol) {
            return finish(theta, true, k);
        }
        // bail out to phase two on a two-cycle between refits, drift far
        // from the init or the starting residual scale, or too many rounds
        const bool cycling =
            k >= 2 && (theta.to_vec() - prev2.to_vec()).cwiseAbs().maxCoeff() <= cfg.tol;
        const bool drifted =
            (theta.to_vec() - init.to_vec()).cwiseAbs().maxCoeff() > cfg.travel_limit ||
            res > 50.0 * (first_res + 1.0);
        if (cycling || drifted || k >= cfg.stall_limit * 3) break;

        Vec delta = newton_direction(theta, fit, score);
        GarchTheta next = GarchTheta::from_vec(Vec(theta.to_vec() - delta));
        int halvings = 0;
        while (!detail::garch_in_region(next) && halvings < 40) {
            delta *= 0.5;
            next = GarchTheta::from_vec(Vec(theta.to_vec() - delta));
            ++halvings;
        }
        if (!detail::garch_in_region(next)) break;
        prev2 = prev1;
        prev1 = theta;
        theta = next;
    }

    // phase two: damped restart settling on the residual floor
    theta = init;
    prev1 = prev2 = init;
    GarchTheta best = init;
    double best_res = std::numeric_limits<double>::infinity();
    int best_k = spent;
    double last_step = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int k = spent; k < cfg.max_iter; ++k) {
        SplineFit fit = profiled_fit(theta);
        fit.extrapolation_warnings = 0;
        const Vec score = garchm_score(theta, y, fit);
        warnings += fit.extrapolation_warnings;
        const double res = score.cwiseAbs().maxCoeff();
        if (res < best_res) {
            best = theta;
            best_res = res;
            best_k = k;
            since_best = 0;
        } else {
            ++since_best;
        }
        const bool cycling =
            k >= spent + 2 && (theta.to_vec() - prev2.to_vec()).cwiseAbs().maxCoeff() <= cfg.tol;
        // iterations reported are those needed to reach the returned point
        if (res <= cfg.tol || (k > spent && last_step <= cfg.tol) || cycling ||
            since_best >= cfg.stall_limit) {
            return res <= best_res ? finish(theta, true, k) : finish(best, true, best_k);
        }

        Vec delta = newton_direction(theta, fit, score);
        if (score.dot(delta) <= 0) delta = score;
        const double f0 = frozen_objective(theta, fit);
        double slope = score.dot(delta);
        double accepted = -1.0;
        GarchTheta next = theta;
        for (int bt = 0; bt < 30; ++bt) {
            const GarchTheta cand = GarchTheta::from_vec(Vec(theta.to_vec() - delta));
            // Armijo decrease of the frozen objective plus a nonmonotone
            // cap keeping the profiled residual near the best seen, so
            // the refit cannot ratchet the iterate away from the solution
            if (detail::garch_in_region(cand) &&
                (cand.to_vec() - init.to_vec()).cwiseAbs().maxCoeff() <= cfg.travel_limit &&
                frozen_objective(cand, fit) <= f0 - 1e-4 * slope &&
                profiled_score(cand.to_vec()).cwiseAbs().maxCoeff() <= 2.0 * best_res) {
                next = cand;
                accepted = delta.cwiseAbs().maxCoeff();
                break;
            }
            delta *= 0.5;
            slope *= 0.5;
        }
        if (accepted < 0) {
            // no acceptable point: theta is numerically stationary
            return res <= best_res ? finish(theta, true, k) : finish(best, true, best_k);
        }
        prev2 = prev1;
        prev1 = theta;
        theta = next;
        last_step = accepted;
    }

    return finish(best, false, best_k);
}

struct GarchExperimentConfig {
    GarchSetup setup = GarchSetup::A;
    int t_len = 500;
    int reps = 100;
    std::uint64_t seed = 1;
    std::vector<GarchMethod> methods = {GarchMethod::ip, GarchMethod::backfit};
    double noise_scale = 1.0;
    int burn_in = 500;
    double tol = 1e-6;
    int max_iter = 200;
    double fd_step = 1e-4;
    int threads = 0;
};

struct ExperimentResultGarch {
    std::vector<PerRepRecord> per_rep;
    std::map<std::string, Aggregates> aggregates;
    Vec truth;
    int failed_replicates = 0;
};

/// Shared-init replication study; theta^(0) is the truth perturbed by
/// N(0, 0.01^2) per coordinate (redrawn while nonstationary).
inline ExperimentResultGarch run_garchm_experiment(const GarchExperimentConfig& cfg) {
    const GarchTheta truth = garch_paper_theta(cfg.setup);
    const int m = static_cast<int>(cfg.methods.size());
    std::vector<PerRepRecord> records(static_cast<std::size_t>(cfg.reps) * m);

    parallel_for(resolve_threads(cfg.threads), cfg.reps, [&](int rep) {
        const std::uint64_t rep_seed = split_seed(cfg.seed, rep);
        const Vec y =
            generate_garchm(cfg.setup, cfg.t_len, truth, cfg.noise_scale, rep_seed, cfg.burn_in);

        auto init_rng = make_rng(rep_seed, 1);
        std::normal_distribution<double> normal(0.0, 0.01);
        GarchTheta init;
        do {
            init.omega = truth.omega + normal(init_rng);
            init.alpha = truth.alpha + normal(init_rng);
            init.beta = truth.beta + normal(init_rng);
        } while (!init.stationary() || init.omega <= 1e-6);

        GarchSolveConfig scfg;
        scfg.tol = cfg.tol;
        scfg.max_iter = cfg.max_iter;
        scfg.fd_step = cfg.fd_step;

        for (int mi = 0; mi < m; ++mi) {
            PerRepRecord rec;
            rec.method = garch_method_name(cfg.methods[mi]);
            rec.rep = rep;
            rec.estimate = Vec::Zero(3);
            try {
                const GarchmSolveReport out = garchm_solve(y, cfg.methods[mi], init, scfg);
                rec.estimate = out.final.to_vec();
                rec.iterations = out.iterations;
                rec.seconds = out.total_time;
                rec.converged = out.converged;
                rec.extrapolation_warnings = out.extrapolation_warnings;
            } catch (const std::exception&) {
                rec.converged = false;
            }
            records[static_cast<std::size_t>(rep) * m + mi] = std::move(rec);
        }
    });

    ExperimentResultGarch result;
    result.truth = truth.to_vec();
    result.per_rep = std::move(records);
    for (const auto& rec : result.per_rep) {
        if (!rec.converged) ++result.failed_replicates;
    }
    if (result.failed_replicates > 0.05 * double(result.per_rep.size())) {
        throw std::runtime_error("run_garchm_experiment: failure rate above 5%");
    }
    for (GarchMethod method : cfg.methods) {
        std::vector<PerRepRecord> rows;
        for (const auto& rec : result.per_rep) {
            if (rec.method == garch_method_name(method)) rows.push_back(rec);
        }
        result.aggregates[garch_method_name(method)] = aggregate_metrics(rows, result.truth);
    }
    return result;
}

}  // namespace semiprof
