#pragma once

// Linear (order-2) B-spline basis on equally spaced knots with a
// least-squares fitter. With hat functions the fitted curve is the
// piecewise-linear interpolant of the coefficients at the breakpoints.

#include "semiprof/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semiprof {

struct SplineFit {
    Vec knots;   // breakpoints, strictly increasing; R_T interior + 2 boundary
    Vec gamma;   // one coefficient per breakpoint (hat basis)
    int degree = 1;
    mutable int extrapolation_warnings = 0;

    int segment_of(double x) const {
        const int m = static_cast<int>(knots.size());
        if (x <= knots[0]) return 0;
        if (x >= knots[m - 1]) return m - 2;
        const auto it = std::upper_bound(knots.data(), knots.data() + m, x);
        return static_cast<int>(it - knots.data()) - 1;
    }

    /// Fitted value; outside [a, b] the boundary segment is continued
    /// linearly and a warning is counted.
    double evaluate(double x) const {
        if (x < knots[0] || x > knots[knots.size() - 1]) ++extrapolation_warnings;
        const int s = segment_of(x);
        const double t0 = knots[s];
        const double t1 = knots[s + 1];
        const double w = (x - t0) / (t1 - t0);
        return gamma[s] * (1.0 - w) + gamma[s + 1] * w;
    }

    /// Piecewise-constant first derivative of the fitted curve.
    double derivative(double x) const {
        const int s = segment_of(x);
        return (gamma[s + 1] - gamma[s]) / (knots[s + 1] - knots[s]);
    }
};

/// Hat-basis design matrix for the given breakpoints.
inline Mat spline_basis(const Vec& x, const Vec& knots) {
    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(knots.size());
    Mat basis = Mat::Zero(n, m);
    SplineFit probe;
    probe.knots = knots;
    for (int i = 0; i < n; ++i) {
        const int s = probe.segment_of(x[i]);
        const double w = (x[i] - knots[s]) / (knots[s + 1] - knots[s]);
        basis(i, s) = 1.0 - w;
        basis(i, s + 1) = w;
    }
    return basis;
}

/// Least-squares spline fit of y on sigma2 with R_T equally spaced
/// interior knots over [min sigma2, max sigma2]. Normal equations carry a
/// 1e-10 ridge jitter on the diagonal.
inline SplineFit fit_lambda_spline(const Vec& sigma2, const Vec& y, int r_t) {
    const int t = static_cast<int>(sigma2.size());
    if (t <= r_t + 2) throw std::invalid_argument("fit_lambda_spline: need T > R_T + 2");
    if (y.size() != t) throw std::invalid_argument("fit_lambda_spline: length mismatch");

    double a = sigma2.minCoeff();
    double b = sigma2.maxCoeff();
    if (!(b - a > 1e-12)) {
        // degenerate range (constant variance); widen so the basis stays valid
        a -= 1e-8;
        b += 1e-8;
    }
    const int m = r_t + 2;
    Vec knots(m);
    for (int k = 0; k < m; ++k) knots[k] = a + (b - a) * double(k) / double(m - 1);

    const Mat basis = spline_basis(sigma2, knots);
    Mat gram = basis.transpose() * basis;
    gram.diagonal().array() += 1e-10;
    SplineFit fit;
    fit.knots = std::move(knots);
    try {
        fit.gamma = solve_dense(gram, Vec(basis.transpose() * y), "spline normal equations");
    } catch (const SingularMatrixError&) {
        throw std::runtime_error("fit_lambda_spline: rank-deficient basis (empty knot interval)");
    }
    return fit;
}

}  // namespace semiprof
