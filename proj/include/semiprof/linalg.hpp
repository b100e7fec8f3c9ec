#pragma once

// Dense linear solves and finite-difference Jacobians shared by the
// solver engine and the model instantiations.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace semiprof {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what_block)
        : std::runtime_error("singular matrix: " + what_block), block_(what_block) {}
    const std::string& block() const noexcept { return block_; }

private:
    std::string block_;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solve A X = B by LU with partial pivoting. B may have several columns.
/// A pivot below 1e-14 * ||A||_inf is treated as singular.
inline Mat solve_dense(const Mat& a, const Mat& b, const std::string& label = "A") {
    const auto n = a.rows();
    if (a.cols() != n || b.rows() != n) {
        throw std::invalid_argument("solve_dense: dimension mismatch");
    }
    if (!a.allFinite() || !b.allFinite()) {
        throw EvaluationError("solve_dense: non-finite input (" + label + ")");
    }
    const double pivot_floor = 1e-14 * a.cwiseAbs().rowwise().sum().maxCoeff();

    Mat lu = a;
    Mat x = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        double best = std::abs(lu(k, k));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                piv = i;
            }
        }
        if (best <= pivot_floor) {
            throw SingularMatrixError(label);
        }
        if (piv != k) {
            lu.row(k).swap(lu.row(piv));
            x.row(k).swap(x.row(piv));
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double m = lu(i, k) / lu(k, k);
            lu(i, k) = m;
            lu.row(i).tail(n - k - 1) -= m * lu.row(k).tail(n - k - 1);
            x.row(i) -= m * x.row(k);
        }
    }
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        x.row(k) /= lu(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            x.row(i) -= lu(i, k) * x.row(k);
        }
    }
    return x;
}

inline Vec solve_dense(const Mat& a, const Vec& b, const std::string& label = "A") {
    return Vec(solve_dense(a, Mat(b), label));
}

/// Central-difference Jacobian of f at x. Column j uses the per-coordinate
/// step h_j = step * max(1, |x_j|).
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double step) {
    const auto n = x.size();
    Mat jac;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = step * std::max(1.0, std::abs(x[j]));
        Vec xp = x;
        Vec xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vec fp = f(xp);
        const Vec fm = f(xm);
        if (!fp.allFinite() || !fm.allFinite()) {
            throw EvaluationError("fd_jacobian: non-finite function value");
        }
        if (jac.size() == 0) {
            jac.resize(fp.size(), n);
        }
        jac.col(j) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

}  // namespace semiprof
