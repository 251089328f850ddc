#pragma once
/**
 * Newton step, the divergence criterion tau and its squared
 * deviation tau-check, the two pullback directions, and the
 * determinant of the Hessian.
 *
 * tau(x) = -(1/n) div nu(x) = 1 + (1/n) sum_i (H^-1)_{i,*} (dH/dx_i) nu
 *
 * All quantities share one pivoted LU factorization of the Hessian.
 */

#include "divnewton/derivatives.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

namespace divnewton {

/// The Hessian is numerically singular (or not finite).
class SingularHessianError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The unnormalized pullback vector vanishes, e.g. in purely quadratic regions.
class ZeroDirectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relative pivot threshold below which the Hessian is declared singular.
inline constexpr double kSingularPivotRatio = 1e-12;
/// Norm below which an unnormalized pullback vector counts as zero.
inline constexpr double kZeroDirectionNorm = 1e-12;
/// Dimension up to which the inverse Hessian is formed explicitly.
inline constexpr int kDenseInverseLimit = 16;

/**
 * Pivoted LU factorization of a Hessian with access to rows/columns of the
 * inverse. Throws SingularHessianError on construction when any pivot is
 * at most kSingularPivotRatio * max|H|.
 */
class HessianFactor {
public:
    explicit HessianFactor(const Matrix& hessian) : lu_(hessian) {
        if (!hessian.allFinite()) {
            throw SingularHessianError("Hessian has non-finite entries");
        }
        const double scale = hessian.cwiseAbs().maxCoeff();
        const Matrix& packed = lu_.matrixLU();
        const double min_pivot = packed.diagonal().cwiseAbs().minCoeff();
        if (!(scale > 0.0) || min_pivot <= kSingularPivotRatio * scale) {
            throw SingularHessianError("Hessian is numerically singular");
        }
        if (dimension() <= kDenseInverseLimit) {
            inverse_ = lu_.inverse();
        }
    }

    int dimension() const { return static_cast<int>(lu_.rows()); }

    Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }

    double determinant() const { return lu_.determinant(); }

    /// Row i of H^-1 (equal to column i, as H is symmetric).
    Vector inverse_row(int i) const {
        if (inverse_.size() > 0) {
            return inverse_.row(i).transpose();
        }
        return lu_.solve(Vector::Unit(dimension(), i));
    }

    /// tr(H^-1 A)
    double trace_inverse_times(const Matrix& a) const {
        if (inverse_.size() > 0) {
            return inverse_.cwiseProduct(a.transpose()).sum();
        }
        return lu_.solve(a).trace();
    }

private:
    Eigen::FullPivLU<Matrix> lu_;
    Matrix inverse_;
};

/// Unit pullback direction; its sign carries no meaning.
struct PullbackDirection {
    Vector dir;
    double raw_norm = 0.0;
};

/// nu = -H^-1 gamma
inline Vector newton_step(const HessianFactor& factor, const Vector& gradient) {
    return -factor.solve(gradient);
}

inline Vector newton_step(const DerivativeBundle& bundle) {
    return newton_step(HessianFactor(bundle.hessian), bundle.gradient);
}

inline double tau(const HessianFactor& factor, const DerivativeBundle& bundle, const Vector& nu) {
    const int n = bundle.dimension();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += factor.inverse_row(i).dot(bundle.third[i] * nu);
    }
    return 1.0 + sum / n;
}

inline double tau(const DerivativeBundle& bundle, const Vector& nu) {
    return tau(HessianFactor(bundle.hessian), bundle, nu);
}

inline double tau_check(double tau_value) {
    const double d = tau_value - 1.0;
    return d * d;
}

namespace detail {

inline PullbackDirection normalize_pullback(const Vector& raw) {
    const double norm = raw.norm();
    if (!(norm > kZeroDirectionNorm)) {
        throw ZeroDirectionError("pullback direction vanishes");
    }
    return {raw / norm, norm};
}

}  // namespace detail

/// p~ = sum_i (dH/dx_i) (H^-1)_{*,i}
inline Vector pullback_p_raw(const HessianFactor& factor, const DerivativeBundle& bundle) {
    const int n = bundle.dimension();
    Vector p = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        p += bundle.third[i] * factor.inverse_row(i);
    }
    return p;
}

/// q~_k = tr(H^-1 dH/dx_k), the gradient of det H divided by det H (Jacobi).
inline Vector pullback_q_raw(const HessianFactor& factor, const DerivativeBundle& bundle) {
    const int n = bundle.dimension();
    Vector q(n);
    for (int k = 0; k < n; ++k) {
        q(k) = factor.trace_inverse_times(bundle.third[k]);
    }
    return q;
}

inline PullbackDirection pullback_p(const HessianFactor& factor, const DerivativeBundle& bundle) {
    return detail::normalize_pullback(pullback_p_raw(factor, bundle));
}

inline PullbackDirection pullback_p(const DerivativeBundle& bundle) {
    return pullback_p(HessianFactor(bundle.hessian), bundle);
}

inline PullbackDirection pullback_q(const HessianFactor& factor, const DerivativeBundle& bundle) {
    return detail::normalize_pullback(pullback_q_raw(factor, bundle));
}

inline PullbackDirection pullback_q(const DerivativeBundle& bundle) {
    return pullback_q(HessianFactor(bundle.hessian), bundle);
}

/// Sign-preserving determinant; defined for singular Hessians as well.
inline double det_hessian(const DerivativeBundle& bundle) {
    return Eigen::FullPivLU<Matrix>(bundle.hessian).determinant();
}

/**
 * Jacobian of the Newton-step field,
 * N = -I - ((H^-1)_{i,*} (dH/dx_j) nu)_{i,j}; tr(N) = -n tau.
 */
inline Matrix newton_jacobian(const DerivativeBundle& bundle) {
    const HessianFactor factor(bundle.hessian);
    const Vector nu = newton_step(factor, bundle.gradient);
    const int n = bundle.dimension();
    Matrix cols(n, n);
    for (int j = 0; j < n; ++j) {
        cols.col(j) = bundle.third[j] * nu;
    }
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
        out.row(i) = -(factor.inverse_row(i).transpose() * cols);
    }
    out.diagonal().array() -= 1.0;
    return out;
}

/// Per-point quantities of one Newton iteration.
struct NewtonState {
    Point x;
    Vector gamma;
    Matrix hess;
    Vector nu;
    double tau = 1.0;
    double tau_check = 0.0;
    double det_hess = 0.0;
};

/// Evaluates the model at x and derives every Newton quantity from one factorization.
inline NewtonState newton_state(const ObjectiveModel& model, const Point& x) {
    const DerivativeBundle b = model(x);
    if (!b.all_finite()) {
        throw SingularHessianError("non-finite derivatives at evaluation point");
    }
    const HessianFactor factor(b.hessian);
    NewtonState s;
    s.x = x;
    s.gamma = b.gradient;
    s.hess = b.hessian;
    s.nu = newton_step(factor, b.gradient);
    s.tau = tau(factor, b, s.nu);
    s.tau_check = tau_check(s.tau);
    s.det_hess = factor.determinant();
    return s;
}

/// tau-check at x, or NaN where the Hessian cannot be factorized.
inline double tau_check_at(const ObjectiveModel& model, const Point& x) {
    try {
        const double v = newton_state(model, x).tau_check;
        return std::isfinite(v) ? v : std::nan("");
    } catch (const SingularHessianError&) {
        return std::nan("");
    }
}

}  // namespace divnewton
