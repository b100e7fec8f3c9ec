#include "semiprof/linalg.hpp"
#include "semiprof/quadratic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <random>

using namespace semiprof;

TEST_CASE("solve_dense matches Eigen on random systems") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + int(rng() % 8);
        Mat a(n, n);
        Vec b(n);
        for (int i = 0; i < n; ++i) {
            b[i] = normal(rng);
            for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
        }
        const Vec x = solve_dense(a, b);
        const Vec ref = a.partialPivLu().solve(b);
        REQUIRE((x - ref).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + ref.cwiseAbs().maxCoeff()));
        REQUIRE((a * x - b).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("solve_dense handles multiple right-hand sides") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat a(4, 4);
    Mat b(4, 3);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) a(i, j) = normal(rng);
        for (int j = 0; j < 3; ++j) b(i, j) = normal(rng);
    }
    const Mat x = solve_dense(a, b);
    REQUIRE((a * x - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("solve_dense rejects singular matrices") {
    Mat a(3, 3);
    a << 1, 2, 3, 2, 4, 6, 1, 0, 1;  // first two rows dependent
    Vec b(3);
    b << 1, 2, 3;
    REQUIRE_THROWS_AS(solve_dense(a, b, "bad"), SingularMatrixError);
}

TEST_CASE("solve_dense needs pivoting") {
    Mat a(2, 2);
    a << 0, 1, 1, 0;  // zero leading pivot
    Vec b(2);
    b << 3, 5;
    const Vec x = solve_dense(a, b);
    REQUIRE(x[0] == Catch::Approx(5.0));
    REQUIRE(x[1] == Catch::Approx(3.0));
}

TEST_CASE("fd_jacobian recovers an analytic Jacobian") {
    auto f = [](const Vec& x) {
        Vec out(2);
        out[0] = x[0] * x[0] + 3.0 * x[1];
        out[1] = std::sin(x[0]) * x[2];
        return out;
    };
    Vec x(3);
    x << 0.7, -1.2, 2.0;
    const Mat jac = fd_jacobian(f, x, 1e-6);
    Mat ref(2, 3);
    ref << 2.0 * x[0], 3.0, 0.0, std::cos(x[0]) * x[2], 0.0, std::sin(x[0]);
    REQUIRE((jac - ref).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("random_quadratic is symmetric, well conditioned, deterministic") {
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        const QuadraticProblem qp = random_quadratic(3, 10, 1e3, seed);
        const Mat h = qp.stacked_h();
        REQUIRE((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);

        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        const Vec eigs = es.eigenvalues();
        REQUIRE(eigs.minCoeff() > 1.0 - 1e-8);
        REQUIRE(eigs.maxCoeff() < 1e3 + 1e-6);

        const QuadraticProblem again = random_quadratic(3, 10, 1e3, seed);
        REQUIRE((again.stacked_h() - h).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((again.stacked_g() - qp.stacked_g()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("random_quadratic validates its arguments") {
    REQUIRE_THROWS_AS(random_quadratic(0, 5, 10.0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(random_quadratic(2, 0, 10.0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(random_quadratic(2, 5, 0.5, 1), std::invalid_argument);
}

TEST_CASE("schur_F inverts the theta block complement") {
    const QuadraticProblem qp = random_quadratic(4, 12, 100.0, 17);
    const Mat f = schur_F(qp);
    const Mat complement =
        qp.h11 - qp.h12 * qp.h22.partialPivLu().solve(qp.h21);
    REQUIRE((f * complement - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("minimizer solves the stacked gradient system") {
    const QuadraticProblem qp = random_quadratic(2, 6, 50.0, 5);
    const ParameterState s = qp.minimizer();
    const EstimatingSystem sys = qp.system();
    REQUIRE(sys.psi(s.theta, s.lambda).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE(sys.phi(s.theta, s.lambda).cwiseAbs().maxCoeff() < 1e-9);
}
