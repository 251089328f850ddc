#pragma once
/**
 * Objective evaluation contract (value through third derivatives)
 * and finite-difference oracles for validating analytic derivatives.
 */

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace divnewton {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

/// Stack of n symmetric matrices; entry k holds dH/dx_k.
using ThirdStack = std::vector<Matrix>;

/// Raised when a finite-difference probe produces a non-finite value.
class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DerivativeBundle {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
    ThirdStack third;

    int dimension() const { return static_cast<int>(gradient.size()); }

    bool all_finite() const {
        if (!std::isfinite(value) || !gradient.allFinite() || !hessian.allFinite()) {
            return false;
        }
        for (const auto& t : third) {
            if (!t.allFinite()) {
                return false;
            }
        }
        return true;
    }
};

/// Allocates a zeroed bundle of dimension n.
inline DerivativeBundle make_bundle(int n) {
    DerivativeBundle b;
    b.gradient = Vector::Zero(n);
    b.hessian = Matrix::Zero(n, n);
    b.third.assign(static_cast<std::size_t>(n), Matrix::Zero(n, n));
    return b;
}

/**
 * An objective function together with exact derivatives through third
 * order. The evaluator must be deterministic and free of shared mutable
 * state so that models can be evaluated from several threads.
 */
struct ObjectiveModel {
    int dimension = 0;
    std::string name;
    std::map<std::string, double> params;
    std::function<DerivativeBundle(const Point&)> eval;

    DerivativeBundle operator()(const Point& x) const {
        if (x.size() != dimension) {
            throw std::invalid_argument("point dimension does not match model '" + name + "'");
        }
        return eval(x);
    }

    double value(const Point& x) const { return (*this)(x).value; }
};

inline Point point2(double x, double y) {
    Point p(2);
    p << x, y;
    return p;
}

inline bool is_finite_point(const Point& x) { return x.size() >= 1 && x.allFinite(); }

namespace detail {

inline Point unit_offset(const Point& x, int k, double h) {
    Point y = x;
    y(k) += h;
    return y;
}

inline double checked_value(const ObjectiveModel& model, const Point& x) {
    const double v = model.value(x);
    if (!std::isfinite(v)) {
        throw OracleFailure("non-finite function value at finite-difference probe");
    }
    return v;
}

}  // namespace detail

/// Central-difference gradient from function values.
inline Vector fd_gradient(const ObjectiveModel& model, const Point& x, double h = 1e-5) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("fd_gradient: step must be positive");
    }
    const int n = model.dimension;
    Vector g(n);
    for (int k = 0; k < n; ++k) {
        const double fp = detail::checked_value(model, detail::unit_offset(x, k, h));
        const double fm = detail::checked_value(model, detail::unit_offset(x, k, -h));
        g(k) = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Second-order central differences of function values, symmetrized.
inline Matrix fd_hessian(const ObjectiveModel& model, const Point& x, double h = 1e-5) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("fd_hessian: step must be positive");
    }
    const int n = model.dimension;
    Matrix a(n, n);
    const double f0 = detail::checked_value(model, x);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                const double fp = detail::checked_value(model, detail::unit_offset(x, i, h));
                const double fm = detail::checked_value(model, detail::unit_offset(x, i, -h));
                a(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
                continue;
            }
            Point pp = x, pm = x, mp = x, mm = x;
            pp(i) += h; pp(j) += h;
            pm(i) += h; pm(j) -= h;
            mp(i) -= h; mp(j) += h;
            mm(i) -= h; mm(j) -= h;
            a(i, j) = (detail::checked_value(model, pp) - detail::checked_value(model, pm) -
                       detail::checked_value(model, mp) + detail::checked_value(model, mm)) /
                      (4.0 * h * h);
        }
    }
    return 0.5 * (a + a.transpose());
}

/// Central difference of the analytic Hessian: (H(x+h e_k) - H(x-h e_k)) / 2h.
inline ThirdStack fd_third(const ObjectiveModel& model, const Point& x, double h = 1e-6) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("fd_third: step must be positive");
    }
    const int n = model.dimension;
    ThirdStack out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const Matrix hp = model(detail::unit_offset(x, k, h)).hessian;
        const Matrix hm = model(detail::unit_offset(x, k, -h)).hessian;
        if (!hp.allFinite() || !hm.allFinite()) {
            throw OracleFailure("non-finite Hessian at finite-difference probe");
        }
        out.push_back((hp - hm) / (2.0 * h));
    }
    return out;
}

/// Number of distinct third partial derivatives under full index symmetry, C(n+2, 3).
inline std::int64_t unique_third_count(int n) {
    if (n < 1) {
        throw std::invalid_argument("unique_third_count: n must be >= 1");
    }
    const std::int64_t m = n;
    return (m + 2) * (m + 1) * m / 6;
}

/**
 * f_R(x) = f(R x) for an orthogonal R, with all derivatives transported:
 * grad = R^T g, H = R^T H R, dH_R/dx_k = sum_l R_lk R^T (dH/dz_l) R.
 */
inline ObjectiveModel rotated(ObjectiveModel base, Matrix rotation) {
    if (rotation.rows() != base.dimension || rotation.cols() != base.dimension) {
        throw std::invalid_argument("rotated: rotation size does not match model dimension");
    }
    ObjectiveModel m;
    m.dimension = base.dimension;
    m.name = base.name + "-rotated";
    m.params = base.params;
    m.eval = [base = std::move(base), r = std::move(rotation)](const Point& x) {
        const DerivativeBundle inner = base(r * x);
        const int n = base.dimension;
        DerivativeBundle out = make_bundle(n);
        out.value = inner.value;
        out.gradient = r.transpose() * inner.gradient;
        const Matrix h = r.transpose() * inner.hessian * r;
        out.hessian = 0.5 * (h + h.transpose());
        std::vector<Matrix> conj(static_cast<std::size_t>(n));
        for (int l = 0; l < n; ++l) {
            conj[l] = r.transpose() * inner.third[l] * r;
        }
        for (int k = 0; k < n; ++k) {
            Matrix acc = Matrix::Zero(n, n);
            for (int l = 0; l < n; ++l) {
                acc += r(l, k) * conj[l];
            }
            out.third[k] = 0.5 * (acc + acc.transpose());
        }
        return out;
    };
    return m;
}

}  // namespace divnewton
