#pragma once

// Two-block estimating systems: the parameter split (theta, lambda), the
// callback bundle evaluating the residual blocks and their Jacobians, and
// the solver configuration / report types.

#include "semiprof/linalg.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semiprof {

/// The split parameter pair. theta is the p-dimensional parameter of
/// interest; lambda the q-dimensional nuisance block. The stacked vector
/// is always (theta^T, lambda^T)^T.
struct ParameterState {
    Vec theta;
    Vec lambda;

    bool all_finite() const { return theta.allFinite() && lambda.allFinite(); }
};

enum class LambdaJacobianStructure { dense, diagonal };

/// Callback bundle for the estimating equations Psi (p equations, the
/// theta block) and Phi (q equations, the lambda block). Any absent
/// analytic Jacobian block is replaced by a central finite difference.
struct EstimatingSystem {
    using Residual = std::function<Vec(const Vec& theta, const Vec& lambda)>;
    using Block = std::function<Mat(const Vec& theta, const Vec& lambda)>;

    int p = 0;
    int q = 0;
    Residual psi;
    Residual phi;
    Block jac_psi_theta;    // p x p, optional
    Block jac_psi_lambda;   // p x q, optional
    Block jac_phi_theta;    // q x p, optional
    Block jac_phi_lambda;   // q x q, optional
    LambdaJacobianStructure lambda_jacobian_structure = LambdaJacobianStructure::dense;
};

enum class SolveMethod { implicit_profiling, newton_raphson, naive_iteration };

enum class InitLambdaMode { solve_phi, given };

inline const char* method_name(SolveMethod m) {
    switch (m) {
        case SolveMethod::implicit_profiling: return "ip";
        case SolveMethod::newton_raphson: return "nr";
        case SolveMethod::naive_iteration: return "naive";
    }
    return "?";
}

struct SolverConfig {
    SolveMethod method = SolveMethod::implicit_profiling;
    double tol = 1e-8;  // infinity norm on both Psi and Phi
    int max_iter = 200;
    double fd_step = 1e-6;
    InitLambdaMode init_lambda_mode = InitLambdaMode::solve_phi;
    int init_lambda_max_iter = 50;

    void validate() const {
        if (tol <= 0) throw std::invalid_argument("SolverConfig: tol must be positive");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
        if (fd_step <= 0) throw std::invalid_argument("SolverConfig: fd_step must be positive");
    }
};

struct IterationRecord {
    Vec theta;
    Vec lambda;
    double residual_psi = 0;
    double residual_phi = 0;
    double seconds = 0;
};

struct SolveReport {
    ParameterState final;
    bool converged = false;
    int iterations = 0;
    double residual_psi = 0;
    double residual_phi = 0;
    std::vector<IterationRecord> trace;
    double total_time = 0;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& msg, ParameterState last)
        : std::runtime_error(msg), last_finite_(std::move(last)) {}
    const ParameterState& last_finite() const noexcept { return last_finite_; }

private:
    ParameterState last_finite_;
};

class InitLambdaError : public std::runtime_error {
public:
    InitLambdaError(const std::string& msg, Vec best, double residual)
        : std::runtime_error(msg), best_lambda_(std::move(best)), residual_(residual) {}
    const Vec& best_lambda() const noexcept { return best_lambda_; }
    double residual() const noexcept { return residual_; }

private:
    Vec best_lambda_;
    double residual_;
};

}  // namespace semiprof
