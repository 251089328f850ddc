#pragma once
/**
 * Third-order derivative jets for 1D and 2D closed-form functions,
 * a third-order chain rule for composing them, and a dense bivariate
 * polynomial with exact differentiation.
 *
 * Tensors are only computed for sorted index tuples and then mirrored, so
 * the Hessian and the third-derivative stack are exactly symmetric.
 */

#include "divnewton/derivatives.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

namespace divnewton {

/// Value and first three derivatives of a scalar function of one variable.
struct Jet1 {
    double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

/// Value and derivatives through third order of a scalar function on R^2.
struct Jet2 {
    double v = 0.0;
    std::array<double, 2> g{};
    std::array<std::array<double, 2>, 2> h{};
    std::array<std::array<std::array<double, 2>, 2>, 2> t{};

    Jet2& operator+=(const Jet2& o) {
        v += o.v;
        for (int i = 0; i < 2; ++i) {
            g[i] += o.g[i];
            for (int j = 0; j < 2; ++j) {
                h[i][j] += o.h[i][j];
                for (int k = 0; k < 2; ++k) {
                    t[i][j][k] += o.t[i][j][k];
                }
            }
        }
        return *this;
    }

    Jet2& operator*=(double s) {
        v *= s;
        for (int i = 0; i < 2; ++i) {
            g[i] *= s;
            for (int j = 0; j < 2; ++j) {
                h[i][j] *= s;
                for (int k = 0; k < 2; ++k) {
                    t[i][j][k] *= s;
                }
            }
        }
        return *this;
    }
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }

namespace detail {

/// Copies the canonical (sorted-index) entries to every permutation.
inline void mirror(Jet2& j) {
    j.h[1][0] = j.h[0][1];
    j.t[0][1][0] = j.t[1][0][0] = j.t[0][0][1];
    j.t[1][0][1] = j.t[1][1][0] = j.t[0][1][1];
}

}  // namespace detail

/// Jet of the coordinate function x_axis.
inline Jet2 coordinate(int axis, double value) {
    Jet2 j;
    j.v = value;
    j.g[axis] = 1.0;
    return j;
}

inline Jet2 constant_jet(double value) {
    Jet2 j;
    j.v = value;
    return j;
}

/// phi(u(x)) for a 1D outer function phi.
inline Jet2 apply(const Jet1& phi, const Jet2& u) {
    Jet2 r;
    r.v = phi.v;
    for (int i = 0; i < 2; ++i) {
        r.g[i] = phi.d1 * u.g[i];
    }
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
            r.h[i][j] = phi.d2 * u.g[i] * u.g[j] + phi.d1 * u.h[i][j];
            for (int k = j; k < 2; ++k) {
                r.t[i][j][k] = phi.d3 * u.g[i] * u.g[j] * u.g[k] +
                               phi.d2 * (u.h[i][j] * u.g[k] + u.h[i][k] * u.g[j] + u.h[j][k] * u.g[i]) +
                               phi.d1 * u.t[i][j][k];
            }
        }
    }
    detail::mirror(r);
    return r;
}

/// Product rule through third order.
inline Jet2 multiply(const Jet2& a, const Jet2& b) {
    Jet2 r;
    r.v = a.v * b.v;
    for (int i = 0; i < 2; ++i) {
        r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    }
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
            r.h[i][j] = a.h[i][j] * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] + a.v * b.h[i][j];
            for (int k = j; k < 2; ++k) {
                r.t[i][j][k] = a.t[i][j][k] * b.v + a.v * b.t[i][j][k] +
                               a.h[i][j] * b.g[k] + a.h[i][k] * b.g[j] + a.h[j][k] * b.g[i] +
                               a.g[i] * b.h[j][k] + a.g[j] * b.h[i][k] + a.g[k] * b.h[i][j];
            }
        }
    }
    detail::mirror(r);
    return r;
}

/**
 * F(u(x)) where F is given as a jet in (u1, u2) and u = (u1, u2) as jets in x.
 *
 *   f_i   = F_a u^a_i
 *   f_ij  = F_ab u^a_i u^b_j + F_a u^a_ij
 *   f_ijk = F_abc u^a_i u^b_j u^c_k
 *         + F_ab (u^a_ij u^b_k + u^a_ik u^b_j + u^a_jk u^b_i) + F_a u^a_ijk
 */
inline Jet2 compose(const Jet2& outer, const std::array<Jet2, 2>& u) {
    Jet2 r;
    r.v = outer.v;
    for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int a = 0; a < 2; ++a) {
            s += outer.g[a] * u[a].g[i];
        }
        r.g[i] = s;
    }
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
            double s = 0.0;
            for (int a = 0; a < 2; ++a) {
                s += outer.g[a] * u[a].h[i][j];
                for (int b = 0; b < 2; ++b) {
                    s += outer.h[a][b] * u[a].g[i] * u[b].g[j];
                }
            }
            r.h[i][j] = s;
            for (int k = j; k < 2; ++k) {
                double w = 0.0;
                for (int a = 0; a < 2; ++a) {
                    w += outer.g[a] * u[a].t[i][j][k];
                    for (int b = 0; b < 2; ++b) {
                        w += outer.h[a][b] * (u[a].h[i][j] * u[b].g[k] + u[a].h[i][k] * u[b].g[j] +
                                              u[a].h[j][k] * u[b].g[i]);
                        for (int c = 0; c < 2; ++c) {
                            w += outer.t[a][b][c] * u[a].g[i] * u[b].g[j] * u[c].g[k];
                        }
                    }
                }
                r.t[i][j][k] = w;
            }
        }
    }
    detail::mirror(r);
    return r;
}

inline DerivativeBundle to_bundle(const Jet2& j) {
    DerivativeBundle b = make_bundle(2);
    b.value = j.v;
    for (int i = 0; i < 2; ++i) {
        b.gradient(i) = j.g[i];
        for (int k = 0; k < 2; ++k) {
            b.hessian(i, k) = j.h[i][k];
        }
    }
    for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < 2; ++i) {
            for (int l = 0; l < 2; ++l) {
                b.third[k](i, l) = j.t[k][i][l];
            }
        }
    }
    return b;
}

/// Dense bivariate polynomial sum c(i,j) x^i y^j.
class Poly2 {
public:
    Poly2() = default;

    static Poly2 constant(double c) {
        Poly2 p(0, 0);
        p.c_[0] = c;
        return p;
    }
    static Poly2 x() { return monomial(1, 0); }
    static Poly2 y() { return monomial(0, 1); }

    static Poly2 monomial(int i, int j, double c = 1.0) {
        Poly2 p(i, j);
        p.at(i, j) = c;
        return p;
    }

    int degree_x() const { return dx_; }
    int degree_y() const { return dy_; }

    double coeff(int i, int j) const {
        if (i < 0 || j < 0 || i > dx_ || j > dy_) {
            return 0.0;
        }
        return c_[static_cast<std::size_t>(i * (dy_ + 1) + j)];
    }

    friend Poly2 operator+(const Poly2& a, const Poly2& b) {
        Poly2 r(std::max(a.dx_, b.dx_), std::max(a.dy_, b.dy_));
        for (int i = 0; i <= r.dx_; ++i) {
            for (int j = 0; j <= r.dy_; ++j) {
                r.at(i, j) = a.coeff(i, j) + b.coeff(i, j);
            }
        }
        return r;
    }
    friend Poly2 operator-(const Poly2& a, const Poly2& b) { return a + (-1.0) * b; }
    friend Poly2 operator+(const Poly2& a, double s) { return a + constant(s); }
    friend Poly2 operator*(double s, Poly2 a) {
        for (auto& c : a.c_) {
            c *= s;
        }
        return a;
    }
    friend Poly2 operator*(const Poly2& a, const Poly2& b) {
        if (a.c_.empty() || b.c_.empty()) {
            return Poly2{};
        }
        Poly2 r(a.dx_ + b.dx_, a.dy_ + b.dy_);
        for (int i = 0; i <= a.dx_; ++i) {
            for (int j = 0; j <= a.dy_; ++j) {
                const double ca = a.coeff(i, j);
                if (ca == 0.0) {
                    continue;
                }
                for (int k = 0; k <= b.dx_; ++k) {
                    for (int l = 0; l <= b.dy_; ++l) {
                        r.at(i + k, j + l) += ca * b.coeff(k, l);
                    }
                }
            }
        }
        return r;
    }

    Poly2 derivative(int axis) const {
        if (c_.empty()) {
            return Poly2{};
        }
        if (axis == 0) {
            if (dx_ == 0) {
                return constant(0.0);
            }
            Poly2 r(dx_ - 1, dy_);
            for (int i = 1; i <= dx_; ++i) {
                for (int j = 0; j <= dy_; ++j) {
                    r.at(i - 1, j) = i * coeff(i, j);
                }
            }
            return r;
        }
        if (dy_ == 0) {
            return constant(0.0);
        }
        Poly2 r(dx_, dy_ - 1);
        for (int i = 0; i <= dx_; ++i) {
            for (int j = 1; j <= dy_; ++j) {
                r.at(i, j - 1) = j * coeff(i, j);
            }
        }
        return r;
    }

    /// Horner in y nested inside Horner in x.
    double operator()(double xv, double yv) const {
        double acc = 0.0;
        for (int i = dx_; i >= 0; --i) {
            double row = 0.0;
            for (int j = dy_; j >= 0; --j) {
                row = row * yv + coeff(i, j);
            }
            acc = acc * xv + row;
        }
        return acc;
    }

private:
    Poly2(int dx, int dy)
        : dx_(dx), dy_(dy), c_(static_cast<std::size_t>((dx + 1) * (dy + 1)), 0.0) {}

    double& at(int i, int j) { return c_[static_cast<std::size_t>(i * (dy_ + 1) + j)]; }

    int dx_ = -1;
    int dy_ = -1;
    std::vector<double> c_;
};

/// All partial derivatives of a polynomial through third order, precomputed.
class PolyJet {
public:
    explicit PolyJet(const Poly2& p) : f_(p) {
        const Poly2 fx = p.derivative(0), fy = p.derivative(1);
        const Poly2 fxx = fx.derivative(0), fxy = fx.derivative(1), fyy = fy.derivative(1);
        g_ = {fx, fy};
        h_ = {fxx, fxy, fyy};
        t_ = {fxx.derivative(0), fxx.derivative(1), fxy.derivative(1), fyy.derivative(1)};
    }

    Jet2 operator()(double x, double y) const {
        Jet2 j;
        j.v = f_(x, y);
        j.g = {g_[0](x, y), g_[1](x, y)};
        j.h[0][0] = h_[0](x, y);
        j.h[0][1] = h_[1](x, y);
        j.h[1][1] = h_[2](x, y);
        j.t[0][0][0] = t_[0](x, y);
        j.t[0][0][1] = t_[1](x, y);
        j.t[0][1][1] = t_[2](x, y);
        j.t[1][1][1] = t_[3](x, y);
        detail::mirror(j);
        return j;
    }

private:
    Poly2 f_;
    std::array<Poly2, 2> g_;
    std::array<Poly2, 3> h_;
    std::array<Poly2, 4> t_;
};

}  // namespace divnewton
