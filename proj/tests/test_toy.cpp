#include "semiprof/toy.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace semiprof;

namespace {

double run_steps(SolveMethod method, double alpha, double c, double gamma, double tol) {
    const EstimatingSystem sys = toy_system(alpha);
    auto [x0, y0] = toy_initial_point(alpha, c, gamma);
    ParameterState init{Vec::Constant(1, x0), Vec::Constant(1, y0)};
    SolverConfig cfg;
    cfg.method = method;
    cfg.tol = tol;
    cfg.max_iter = 500;
    cfg.init_lambda_mode = InitLambdaMode::given;
    const SolveReport rep = run_solver(sys, init, cfg);
    REQUIRE(rep.converged);
    REQUIRE(std::abs(rep.final.theta[0]) < 10.0 * tol);
    REQUIRE(std::abs(rep.final.lambda[0]) < 10.0 * tol);
    return rep.iterations;
}

}  // namespace

TEST_CASE("initial points lie on the loss contour L = C") {
    for (double alpha : {0.0, 0.6, 1.2, 1.8}) {
        for (double c : {1.0, 4.0, 25.0, 100.0}) {
            double first = -1;
            for (double gamma : toy_gamma_values()) {
                auto [x0, y0] = toy_initial_point(alpha, c, gamma);
                const double loss = toy_loss(alpha, x0, y0);
                REQUIRE(std::abs(loss - c) < 1e-10 * c);
                if (first < 0) first = loss;
                REQUIRE(std::abs(loss - first) < 1e-10 * c);
            }
        }
    }
}

TEST_CASE("toy problem rejects |alpha| >= 2 and C <= 0") {
    REQUIRE_THROWS_AS(ToyProblem(2.0), std::domain_error);
    REQUIRE_THROWS_AS(toy_initial_point(2.5, 1.0, 0.3), std::domain_error);
    REQUIRE_THROWS_AS(toy_initial_point(0.5, 0.0, 0.3), std::domain_error);
}

TEST_CASE("one Newton step and two profiling steps, exactly") {
    const double tol = 1e-6;
    for (double alpha : {0.0, 0.4, 1.0, 1.6}) {
        for (double c : {1.0, 16.0, 100.0}) {
            for (double gamma : toy_gamma_values()) {
                REQUIRE(run_steps(SolveMethod::newton_raphson, alpha, c, gamma, tol) == 1);
                REQUIRE(run_steps(SolveMethod::implicit_profiling, alpha, c, gamma, tol) == 2);
            }
        }
    }
}

TEST_CASE("naive step count follows the contraction-rate estimate") {
    // each sweep scales |x| by alpha^2/4, so from x0 the count is about
    // ceil(log(tol_x / |x0|) / log(alpha^2/4))
    const double tol = 1e-6;
    const double alpha = 1.6;
    const double c = 4.0;
    double mean = 0;
    for (double gamma : toy_gamma_values()) {
        mean += run_steps(SolveMethod::naive_iteration, alpha, c, gamma, tol);
    }
    mean /= 10.0;
    const double rate = alpha * alpha / 4.0;
    // residual Psi = (2 - alpha^2/2) x after a sweep; average over the
    // contour radii gives the expected count scale
    double oracle = 0;
    for (double gamma : toy_gamma_values()) {
        auto [x0, y0] = toy_initial_point(alpha, c, gamma);
        const double x_target = tol / (2.0 - alpha * alpha / 2.0);
        const double k = std::ceil(std::log(x_target / std::abs(x0)) / std::log(rate));
        oracle += std::max(1.0, k);
    }
    oracle /= 10.0;
    REQUIRE(std::abs(mean - oracle) <= 1.0);
    REQUIRE(std::abs(mean - 30.0) <= 5.0);
}

TEST_CASE("naive step counts are nondecreasing in alpha and C") {
    const double tol = 1e-6;
    const std::vector<double> alphas = {0.2, 0.6, 1.0, 1.4, 1.8};
    const std::vector<double> cs = {1.0, 9.0, 36.0, 100.0};
    const auto table = toy_step_experiment(alphas, cs, tol);
    std::map<std::pair<double, double>, double> naive;
    for (const auto& cell : table) {
        if (cell.method == SolveMethod::naive_iteration) {
            naive[{cell.alpha, cell.c}] = cell.mean_steps;
        }
    }
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        for (double c : cs) {
            REQUIRE(naive[{alphas[i], c}] >= naive[{alphas[i - 1], c}]);
        }
    }
    for (double a : alphas) {
        for (std::size_t j = 1; j < cs.size(); ++j) {
            REQUIRE(naive[{a, cs[j]}] >= naive[{a, cs[j - 1]}]);
        }
    }
}

TEST_CASE("step experiment reports exact means for the direct methods") {
    const auto table = toy_step_experiment({0.0, 0.8, 1.6}, {4.0, 49.0}, 1e-6);
    for (const auto& cell : table) {
        if (cell.method == SolveMethod::newton_raphson) {
            REQUIRE(cell.mean_steps == 1.0);
        } else if (cell.method == SolveMethod::implicit_profiling) {
            REQUIRE(cell.mean_steps == 2.0);
        }
    }
}
