#pragma once

// Bivariate loss L(x, y) = x^2 + y^2 + alpha * x * y as a two-block
// estimating system, with the contour initial-point generator and the
// step-count experiment over the (alpha, C) grid.

#include "semiprof/solver.hpp"
#include "semiprof/system.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace semiprof {

struct ToyProblem {
    double alpha;

    explicit ToyProblem(double a) : alpha(a) {
        if (!(std::abs(a) < 2.0)) {
            throw std::domain_error("ToyProblem: |alpha| < 2 required for strict convexity");
        }
    }
};

/// Gradient system of the toy loss: Psi = 2x + alpha*y, Phi = 2y + alpha*x.
inline EstimatingSystem toy_system(double alpha) {
    ToyProblem prob(alpha);
    EstimatingSystem sys;
    sys.p = 1;
    sys.q = 1;
    sys.lambda_jacobian_structure = LambdaJacobianStructure::diagonal;
    sys.psi = [alpha](const Vec& t, const Vec& l) {
        Vec v(1);
        v[0] = 2.0 * t[0] + alpha * l[0];
        return v;
    };
    sys.phi = [alpha](const Vec& t, const Vec& l) {
        Vec v(1);
        v[0] = 2.0 * l[0] + alpha * t[0];
        return v;
    };
    sys.jac_psi_theta = [](const Vec&, const Vec&) { return Mat::Constant(1, 1, 2.0); };
    sys.jac_psi_lambda = [alpha](const Vec&, const Vec&) { return Mat::Constant(1, 1, alpha); };
    sys.jac_phi_theta = [alpha](const Vec&, const Vec&) { return Mat::Constant(1, 1, alpha); };
    sys.jac_phi_lambda = [](const Vec&, const Vec&) { return Mat::Constant(1, 1, 2.0); };
    return sys;
}

inline double toy_loss(double alpha, double x, double y) {
    return x * x + y * y + alpha * x * y;
}

/// Initial point on the loss contour indexed by (C, gamma):
///   x0 = (2 - a^2/2)^{-1/2} (sqrt(C(1-a/2)) cos g + sqrt(C(1+a/2)) sin g)
///   y0 = (2 - a^2/2)^{-1/2} (sqrt(C(1-a/2)) cos g - sqrt(C(1+a/2)) sin g)
inline std::pair<double, double> toy_initial_point(double alpha, double c, double gamma) {
    if (!(std::abs(alpha) < 2.0)) throw std::domain_error("toy_initial_point: |alpha| < 2");
    if (!(c > 0.0)) throw std::domain_error("toy_initial_point: C > 0");
    const double scale = 1.0 / std::sqrt(2.0 - alpha * alpha / 2.0);
    const double u = std::sqrt(c * (1.0 - alpha / 2.0)) * std::cos(gamma);
    const double v = std::sqrt(c * (1.0 + alpha / 2.0)) * std::sin(gamma);
    return {scale * (u + v), scale * (u - v)};
}

/// The ten angles gamma = 2*pi*{0.1, ..., 1.0} used with every C.
inline std::vector<double> toy_gamma_values() {
    std::vector<double> gammas;
    for (int i = 1; i <= 10; ++i) {
        gammas.push_back(2.0 * std::numbers::pi * (0.1 * i));
    }
    return gammas;
}

inline std::vector<double> toy_default_c_values() {
    std::vector<double> cs;
    for (int k = 1; k <= 10; ++k) cs.push_back(double(k) * k);
    return cs;
}

struct ToyCellResult {
    SolveMethod method;
    double alpha;
    double c;
    double mean_steps;
};

/// Mean iteration counts per (method, alpha, C) cell over the ten gamma
/// initial points.
inline std::vector<ToyCellResult> toy_step_experiment(const std::vector<double>& alpha_grid,
                                                      const std::vector<double>& c_grid,
                                                      double tol,
                                                      int max_iter = 500) {
    if (alpha_grid.empty() || c_grid.empty()) {
        throw std::invalid_argument("toy_step_experiment: empty grid");
    }
    const auto gammas = toy_gamma_values();
    std::vector<ToyCellResult> out;
    for (SolveMethod method : {SolveMethod::newton_raphson, SolveMethod::naive_iteration,
                               SolveMethod::implicit_profiling}) {
        for (double alpha : alpha_grid) {
            const EstimatingSystem sys = toy_system(alpha);
            SolverConfig cfg;
            cfg.method = method;
            cfg.tol = tol;
            cfg.max_iter = max_iter;
            for (double c : c_grid) {
                double steps = 0;
                for (double gamma : gammas) {
                    auto [x0, y0] = toy_initial_point(alpha, c, gamma);
                    ParameterState init{Vec::Constant(1, x0), Vec::Constant(1, y0)};
                    const SolveReport rep = run_solver(sys, init, cfg);
                    if (!rep.converged) {
                        throw std::runtime_error("toy_step_experiment: solver failed at alpha=" +
                                                 std::to_string(alpha));
                    }
                    steps += rep.iterations;
                }
                out.push_back({method, alpha, c, steps / double(gammas.size())});
            }
        }
    }
    return out;
}

}  // namespace semiprof
