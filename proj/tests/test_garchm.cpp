#include "semiprof/garchm.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace semiprof;

TEST_CASE("knot count grows like T^{3/20}") {
    REQUIRE(garch_knot_count(500) == 3);
    REQUIRE(garch_knot_count(1000) == 3);
    REQUIRE(garch_knot_count(100) == 2);
    REQUIRE(garch_knot_count(100000) == 6);
}

TEST_CASE("variance recursion sensitivities match finite differences") {
    const Vec y = generate_garchm(GarchSetup::A, 300, garch_paper_theta(GarchSetup::A), 1.0, 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        GarchTheta theta;
        theta.omega = 0.005 + 0.02 * unif(rng);
        theta.alpha = 0.05 + 0.2 * unif(rng);
        theta.beta = 0.3 + 0.6 * unif(rng);
        if (!theta.stationary()) continue;

        const SigmaRecursion rec = sigma_recursion(theta, y);
        auto sigma_fn = [&](const Vec& v) {
            return sigma_recursion(GarchTheta::from_vec(v), y).sigma2;
        };
        const Mat fd = fd_jacobian(sigma_fn, theta.to_vec(), 1e-6);
        for (int t = 0; t < int(y.size()); ++t) {
            for (int j = 0; j < 3; ++j) {
                const double scale = std::max(1.0, std::abs(fd(t, j)));
                REQUIRE(std::abs(rec.sens(t, j) - fd(t, j)) < 1e-5 * scale);
            }
        }
    }
}

TEST_CASE("recursion starts at the unconditional variance") {
    GarchTheta theta{0.02, 0.15, 0.6};
    Vec y = Vec::Zero(10);
    const SigmaRecursion rec = sigma_recursion(theta, y);
    REQUIRE(rec.sigma2[0] == Catch::Approx(0.02 / (1.0 - 0.15 - 0.6)));
    for (int t = 1; t < 10; ++t) {
        REQUIRE(rec.sigma2[t] ==
                Catch::Approx(theta.omega + theta.beta * rec.sigma2[t - 1]));
    }
}

TEST_CASE("hat basis rows sum to one inside the knot span") {
    Vec knots(5);
    knots << 0.0, 0.25, 0.5, 0.75, 1.0;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vec x(40);
    for (int i = 0; i < 40; ++i) x[i] = unif(rng);
    const Mat basis = spline_basis(x, knots);
    for (int i = 0; i < 40; ++i) {
        REQUIRE(basis.row(i).sum() == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(basis.row(i).minCoeff() >= 0.0);
    }
}

TEST_CASE("least squares fit reproduces a linear target exactly") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> unif(0.02, 0.12);
    Vec x(200);
    Vec y(200);
    for (int i = 0; i < 200; ++i) {
        x[i] = unif(rng);
        y[i] = 3.0 * x[i] - 0.7;
    }
    const SplineFit fit = fit_lambda_spline(x, y, 3);
    for (int i = 0; i < 200; ++i) {
        REQUIRE(std::abs(fit.evaluate(x[i]) - y[i]) < 1e-6);
    }
    REQUIRE(std::abs(fit.derivative(0.05) - 3.0) < 1e-4);
}

TEST_CASE("spline extrapolation is linear and counted") {
    Vec x(50);
    Vec y(50);
    for (int i = 0; i < 50; ++i) {
        x[i] = 0.1 + 0.01 * i;
        y[i] = 2.0 * x[i];
    }
    const SplineFit fit = fit_lambda_spline(x, y, 2);
    fit.extrapolation_warnings = 0;
    const double v = fit.evaluate(0.05);
    REQUIRE(fit.extrapolation_warnings == 1);
    REQUIRE(std::abs(v - 0.1) < 1e-6);
}

TEST_CASE("degenerate variance range still yields a usable fit") {
    const Vec x = Vec::Constant(60, 0.04);
    const Vec y = Vec::Constant(60, 1.5);
    const SplineFit fit = fit_lambda_spline(x, y, 3);
    REQUIRE(std::abs(fit.evaluate(0.04) - 1.5) < 1e-6);
}

TEST_CASE("simulation is deterministic and respects stationarity") {
    const GarchTheta theta = garch_paper_theta(GarchSetup::B);
    const Vec a = generate_garchm(GarchSetup::B, 400, theta, 1.0, 77);
    const Vec b = generate_garchm(GarchSetup::B, 400, theta, 1.0, 77);
    REQUIRE((a - b).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE_THROWS_AS(generate_garchm(GarchSetup::A, 400, GarchTheta{0.01, 0.6, 0.5}, 1.0, 1),
                      std::domain_error);
    REQUIRE_THROWS_AS(generate_garchm(GarchSetup::A, 10, theta, 1.0, 1), std::invalid_argument);
}

TEST_CASE("quasi-score is the gradient of the frozen-fit objective") {
    const GarchTheta truth = garch_paper_theta(GarchSetup::A);
    const Vec y = generate_garchm(GarchSetup::A, 500, truth, 1.0, 6);
    const SigmaRecursion rec = sigma_recursion(truth, y);
    const SplineFit fit = fit_lambda_spline(rec.sigma2, y, garch_knot_count(500));

    auto objective = [&](const Vec& v) {
        const SigmaRecursion r = sigma_recursion(GarchTheta::from_vec(v), y);
        Vec out(1);
        out[0] = 0;
        for (int t = 0; t < int(y.size()); ++t) {
            const double s = r.sigma2[t];
            const double eps = y[t] - fit.evaluate(s);
            out[0] += 0.5 * (std::log(s) + eps * eps / s);
        }
        return out;
    };
    const Vec score = garchm_score(truth, y, fit);
    const Mat grad = fd_jacobian(objective, truth.to_vec(), 1e-6);
    for (int j = 0; j < 3; ++j) {
        const double scale = std::max(1.0, std::abs(grad(0, j)));
        REQUIRE(std::abs(score[j] - grad(0, j)) < 1e-4 * scale);
    }
}

TEST_CASE("single replicate solve lands near the truth") {
    const GarchTheta truth = garch_paper_theta(GarchSetup::A);
    const Vec y = generate_garchm(GarchSetup::A, 500, truth, 1.0, 101);
    GarchTheta init{0.012, 0.09, 0.66};
    for (GarchMethod method : {GarchMethod::ip, GarchMethod::backfit}) {
        const GarchmSolveReport rep = garchm_solve(y, method, init);
        REQUIRE(rep.converged);
        REQUIRE(rep.final.stationary());
        REQUIRE(std::abs(rep.final.omega - truth.omega) < 0.05);
        REQUIRE(std::abs(rep.final.alpha - truth.alpha) < 0.15);
        REQUIRE(std::abs(rep.final.beta - truth.beta) < 0.3);
    }
    REQUIRE_THROWS_AS(garchm_solve(y, GarchMethod::ip, GarchTheta{0.01, 0.7, 0.4}),
                      std::domain_error);
}

TEST_CASE("experiment replicates are independent of the thread count") {
    GarchExperimentConfig cfg;
    cfg.t_len = 300;
    cfg.reps = 6;
    cfg.seed = 5;
    cfg.threads = 1;
    const ExperimentResultGarch one = run_garchm_experiment(cfg);
    cfg.threads = 4;
    const ExperimentResultGarch four = run_garchm_experiment(cfg);
    REQUIRE(one.per_rep.size() == four.per_rep.size());
    for (std::size_t i = 0; i < one.per_rep.size(); ++i) {
        REQUIRE(one.per_rep[i].method == four.per_rep[i].method);
        REQUIRE(one.per_rep[i].rep == four.per_rep[i].rep);
        REQUIRE((one.per_rep[i].estimate - four.per_rep[i].estimate).cwiseAbs().maxCoeff() ==
                0.0);
        REQUIRE(one.per_rep[i].iterations == four.per_rep[i].iterations);
    }
    REQUIRE(one.aggregates.count("ip") == 1);
    REQUIRE(one.aggregates.count("backfit") == 1);
}
