#pragma once
/**
 * Equality-constrained problems as objectives over z = (x, lambda):
 * Lagrangian with bordered Hessian, the eigenpair problem, and an
 * executable check that the bordered Hessian is indefinite.
 */

#include "divnewton/derivatives.hpp"
#include "divnewton/newton.hpp"
#include "divnewton/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace divnewton {

/// min f(x) subject to g_k(x) = 0, k = 1..m.
struct ConstrainedProblem {
    int n = 0;
    int m = 0;
    ObjectiveModel objective;
    std::vector<ObjectiveModel> constraints;

    void validate() const {
        if (n < 1 || m < 1 || m > n) {
            throw std::invalid_argument("ConstrainedProblem: need 1 <= m <= n");
        }
        if (objective.dimension != n || static_cast<int>(constraints.size()) != m) {
            throw std::invalid_argument("ConstrainedProblem: dimension mismatch");
        }
        for (const auto& g : constraints) {
            if (g.dimension != n) {
                throw std::invalid_argument("ConstrainedProblem: constraint dimension mismatch");
            }
        }
    }
};

/**
 * L(x, lambda) = f(x) + sum_k lambda_k g_k(x) over dimension n + m.
 *
 * Third-derivative slices:
 *   d/dx_j      xx block  T^f_j + sum_k lambda_k T^{g_k}_j
 *               x,lambda_k border  column j of the Hessian of g_k
 *   d/dlambda_k xx block  Hessian of g_k, everything else zero
 */
inline ObjectiveModel lagrangian_model(ConstrainedProblem problem) {
    problem.validate();
    ObjectiveModel model;
    model.dimension = problem.n + problem.m;
    model.name = "lagrangian(" + problem.objective.name + ")";
    model.eval = [p = std::move(problem)](const Point& z) {
        const int n = p.n, m = p.m;
        const Point x = z.head(n);
        const Vector lambda = z.tail(m);
        const DerivativeBundle f = p.objective(x);
        std::vector<DerivativeBundle> g;
        g.reserve(static_cast<std::size_t>(m));
        for (const auto& c : p.constraints) {
            g.push_back(c(x));
        }

        DerivativeBundle out = make_bundle(n + m);
        out.value = f.value;
        Vector gx = f.gradient;
        Matrix hxx = f.hessian;
        for (int k = 0; k < m; ++k) {
            out.value += lambda(k) * g[k].value;
            gx += lambda(k) * g[k].gradient;
            hxx += lambda(k) * g[k].hessian;
            out.gradient(n + k) = g[k].value;
            out.hessian.block(0, n + k, n, 1) = g[k].gradient;
            out.hessian.block(n + k, 0, 1, n) = g[k].gradient.transpose();
        }
        out.gradient.head(n) = gx;
        out.hessian.topLeftCorner(n, n) = hxx;

        for (int j = 0; j < n; ++j) {
            Matrix& t = out.third[j];
            Matrix xx = f.third[j];
            for (int k = 0; k < m; ++k) {
                xx += lambda(k) * g[k].third[j];
                t.block(0, n + k, n, 1) = g[k].hessian.col(j);
                t.block(n + k, 0, 1, n) = g[k].hessian.col(j).transpose();
            }
            t.topLeftCorner(n, n) = xx;
        }
        for (int k = 0; k < m; ++k) {
            out.third[n + k].topLeftCorner(n, n) = g[k].hessian;
        }
        return out;
    };
    return model;
}

struct EigenProblem {
    int n = 0;
    Matrix q;
    Vector spectrum;
    Matrix c;
};

/// D = diag(1, 2, 4, ..., 2^(n-1))
inline Vector doubling_spectrum(int n) {
    Vector d(n);
    double v = 1.0;
    for (int i = 0; i < n; ++i, v *= 2.0) {
        d(i) = v;
    }
    return d;
}

/// Random orthogonal Q from the QR factorization of a Gaussian matrix, with R's diagonal made positive.
inline Matrix random_orthogonal(int n, Rng& rng) {
    Matrix a(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            a(i, j) = rng.normal();
        }
    }
    const Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        if (r(i, i) < 0.0) {
            q.col(i) = -q.col(i);
        }
    }
    return q;
}

inline EigenProblem build_eigen_problem(int n, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("build_eigen_problem: n must be >= 2");
    }
    Rng rng(seed);
    EigenProblem ep;
    ep.n = n;
    ep.q = random_orthogonal(n, rng);
    ep.spectrum = doubling_spectrum(n);
    const Matrix c = ep.q * ep.spectrum.asDiagonal() * ep.q.transpose();
    ep.c = 0.5 * (c + c.transpose());
    return ep;
}

/// Eigen problem with an explicitly given symmetric C (spectrum filled from C).
inline EigenProblem eigen_problem_from(const Matrix& c) {
    if (c.rows() != c.cols() || c.rows() < 2 || !c.isApprox(c.transpose(), 0.0)) {
        throw std::invalid_argument("eigen_problem_from: C must be square, symmetric, n >= 2");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    return {static_cast<int>(c.rows()), es.eigenvectors(), es.eigenvalues(), c};
}

/**
 * L(w, lambda) = 1/2 w^T C w + 1/2 lambda (1 - w^T w), built from closed forms:
 *   H = [[C - lambda I, -w], [-w^T, 0]]
 *   dH/dw_k = [[0, -e_k], [-e_k^T, 0]],  dH/dlambda = [[-I, 0], [0, 0]]
 */
inline ObjectiveModel eigen_model(const EigenProblem& ep) {
    if (ep.c.rows() != ep.n || ep.c.cols() != ep.n) {
        throw std::invalid_argument("eigen_model: C has wrong shape");
    }
    ObjectiveModel model;
    model.dimension = ep.n + 1;
    model.name = "eigen";
    model.params = {{"n", static_cast<double>(ep.n)}};
    model.eval = [c = ep.c, n = ep.n](const Point& z) {
        const Vector w = z.head(n);
        const double lambda = z(n);
        const Vector cw = c * w;
        const double ww = w.squaredNorm();
        DerivativeBundle out = make_bundle(n + 1);
        out.value = 0.5 * w.dot(cw) + 0.5 * lambda * (1.0 - ww);
        out.gradient.head(n) = cw - lambda * w;
        out.gradient(n) = 0.5 * (1.0 - ww);
        out.hessian.topLeftCorner(n, n) = c;
        out.hessian.topLeftCorner(n, n).diagonal().array() -= lambda;
        out.hessian.block(0, n, n, 1) = -w;
        out.hessian.block(n, 0, 1, n) = -w.transpose();
        for (int k = 0; k < n; ++k) {
            out.third[k](k, n) = -1.0;
            out.third[k](n, k) = -1.0;
        }
        out.third[n].topLeftCorner(n, n).diagonal().setConstant(-1.0);
        return out;
    };
    return model;
}

/// s * x^T A x + offset for symmetric A.
inline ObjectiveModel quadratic_form_model(const Matrix& a, double s, std::string name, double offset = 0.0) {
    ObjectiveModel model;
    model.dimension = static_cast<int>(a.rows());
    model.name = std::move(name);
    model.eval = [h = Matrix(s * (a + a.transpose())), offset](const Point& x) {
        DerivativeBundle b = make_bundle(static_cast<int>(x.size()));
        b.gradient = h * x;
        b.value = 0.5 * x.dot(b.gradient) + offset;
        b.hessian = h;
        return b;
    };
    return model;
}

/// The eigen problem written as a general constrained problem, for cross-checks.
inline ConstrainedProblem eigen_constrained(const EigenProblem& ep) {
    const int n = ep.n;
    ConstrainedProblem p;
    p.n = n;
    p.m = 1;
    p.objective = quadratic_form_model(ep.c, 0.5, "eigen-objective");
    p.constraints.push_back(quadratic_form_model(Matrix::Identity(n, n), -0.5, "unit-norm", 0.5));
    return p;
}

/// Start for the eigen experiment: w_i ~ U[-1, 1], lambda ~ U[0, 100].
inline Point sample_start(const EigenProblem& ep, std::uint64_t seed) {
    Rng rng(seed);
    Point z(ep.n + 1);
    for (int i = 0; i < ep.n; ++i) {
        z(i) = rng.uniform(-1.0, 1.0);
    }
    z(ep.n) = rng.uniform(0.0, 100.0);
    return z;
}

/**
 * Checks z^T H_b z = 0 for z = (0, u) and that H_b has eigenvalues of both
 * signs. Returns nullopt when H_b is numerically singular (inconclusive).
 */
inline std::optional<bool> indefiniteness_check(const Matrix& bordered, int m, const Vector& u) {
    if (m < 1 || m >= bordered.rows()) {
        throw std::invalid_argument("indefiniteness_check: need a border with 1 <= m < dimension");
    }
    if (u.size() != m || !(u.norm() > 0.0)) {
        throw std::invalid_argument("indefiniteness_check: probe must be a nonzero m-vector");
    }
    try {
        const HessianFactor factor(bordered);
        (void)factor;
    } catch (const SingularHessianError&) {
        return std::nullopt;
    }
    const int dim = static_cast<int>(bordered.rows());
    Vector z = Vector::Zero(dim);
    z.tail(m) = u;
    const double scale = bordered.cwiseAbs().maxCoeff();
    const bool null_form = std::abs(z.dot(bordered * z)) <= 1e-12 * scale * u.squaredNorm();

    const Matrix sym = 0.5 * (bordered + bordered.transpose());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues();
    const bool both_signs = ev.minCoeff() < 0.0 && ev.maxCoeff() > 0.0;
    return null_form && both_signs;
}

}  // namespace divnewton
