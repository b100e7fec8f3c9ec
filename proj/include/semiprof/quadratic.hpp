#pragma once

// Generic block quadratic Q(beta) = g^T beta + 1/2 beta^T H beta with the
// (theta, lambda) split, the random problem generator behind the two-step
// property suite, and the Schur complement utilities.

#include "semiprof/linalg.hpp"
#include "semiprof/rng.hpp"
#include "semiprof/system.hpp"

#include <Eigen/Householder>
#include <Eigen/QR>

#include <cmath>
#include <random>

namespace semiprof {

struct QuadraticProblem {
    Vec g1;   // p
    Vec g2;   // q
    Mat h11;  // p x p
    Mat h12;  // p x q
    Mat h21;  // q x p
    Mat h22;  // q x q

    int p() const { return static_cast<int>(g1.size()); }
    int q() const { return static_cast<int>(g2.size()); }

    Mat stacked_h() const {
        Mat h(p() + q(), p() + q());
        h.topLeftCorner(p(), p()) = h11;
        h.topRightCorner(p(), q()) = h12;
        h.bottomLeftCorner(q(), p()) = h21;
        h.bottomRightCorner(q(), q()) = h22;
        return h;
    }

    Vec stacked_g() const {
        Vec g(p() + q());
        g.head(p()) = g1;
        g.tail(q()) = g2;
        return g;
    }

    /// Gradient system: Psi = g1 + H11 theta + H12 lambda,
    ///                  Phi = g2 + H21 theta + H22 lambda.
    EstimatingSystem system() const {
        EstimatingSystem sys;
        sys.p = p();
        sys.q = q();
        const QuadraticProblem self = *this;
        sys.psi = [self](const Vec& t, const Vec& l) { return Vec(self.g1 + self.h11 * t + self.h12 * l); };
        sys.phi = [self](const Vec& t, const Vec& l) { return Vec(self.g2 + self.h21 * t + self.h22 * l); };
        sys.jac_psi_theta = [self](const Vec&, const Vec&) { return self.h11; };
        sys.jac_psi_lambda = [self](const Vec&, const Vec&) { return self.h12; };
        sys.jac_phi_theta = [self](const Vec&, const Vec&) { return self.h21; };
        sys.jac_phi_lambda = [self](const Vec&, const Vec&) { return self.h22; };
        return sys;
    }

    /// Stationary point -H^{-1} g.
    ParameterState minimizer() const {
        const Vec beta = solve_dense(stacked_h(), Vec(-stacked_g()), "H");
        ParameterState s;
        s.theta = beta.head(p());
        s.lambda = beta.tail(q());
        return s;
    }
};

/// H = Q D Q^T with a random orthogonal Q and log-uniform eigenvalues in
/// [1, cond_max]; g standard normal. Deterministic given the seed.
inline QuadraticProblem random_quadratic(int p, int q, double cond_max, std::uint64_t seed) {
    if (p < 1 || q < 1 || cond_max < 1.0) {
        throw std::invalid_argument("random_quadratic: need p,q >= 1 and cond_max >= 1");
    }
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const int n = p + q;
    Mat gauss(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gauss(i, j) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(gauss);
    Mat orth = qr.householderQ();
    // fix the sign convention so Q is a deterministic function of gauss
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        if (r(j, j) < 0) orth.col(j) = -orth.col(j);
    }

    Vec eigs(n);
    const double logc = std::log(cond_max);
    for (int i = 0; i < n; ++i) eigs[i] = std::exp(unif(rng) * logc);

    Mat h = orth * eigs.asDiagonal() * orth.transpose();
    h = 0.5 * (h + h.transpose());  // exact symmetry

    QuadraticProblem qp;
    qp.g1.resize(p);
    qp.g2.resize(q);
    for (int i = 0; i < p; ++i) qp.g1[i] = normal(rng);
    for (int i = 0; i < q; ++i) qp.g2[i] = normal(rng);
    qp.h11 = h.topLeftCorner(p, p);
    qp.h12 = h.topRightCorner(p, q);
    qp.h21 = h.bottomLeftCorner(q, p);
    qp.h22 = h.bottomRightCorner(q, q);
    return qp;
}

/// F = (H11 - H12 H22^{-1} H21)^{-1}; the implicit profiling Hessian of a
/// quadratic problem equals F^{-1}.
inline Mat schur_F(const QuadraticProblem& qp) {
    const Mat inner = qp.h11 - qp.h12 * solve_dense(qp.h22, qp.h21, "H22");
    return solve_dense(inner, Mat(Mat::Identity(qp.p(), qp.p())), "H11 - H12 H22^-1 H21");
}

}  // namespace semiprof
