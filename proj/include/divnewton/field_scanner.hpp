#pragma once
/**
 * Grid sampling of tau, tau-check, det H and the Newton field for 2D
 * models, zero-crossing polylines by marching squares, and a
 * classification of Hessian-singularity curves.
 */

#include "divnewton/derivatives.hpp"
#include "divnewton/newton.hpp"
#include "divnewton/test_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace divnewton {

inline const std::vector<std::string>& layer_names() {
    static const std::vector<std::string> names = {"value", "grad_x", "grad_y", "nu_x",
                                                   "nu_y",  "tau",    "tau_check", "det_hess"};
    return names;
}

/// Cell-centered samples; cell (ix, iy) is stored at iy * nx + ix.
struct FieldGrid {
    Window bounds;
    int nx = 0;
    int ny = 0;
    std::map<std::string, std::vector<double>> layers;
    /// 1 where the Hessian factorization succeeded.
    std::vector<std::uint8_t> mask;

    double dx() const { return (bounds.xmax - bounds.xmin) / nx; }
    double dy() const { return (bounds.ymax - bounds.ymin) / ny; }
    double x_at(int ix) const { return bounds.xmin + (ix + 0.5) * dx(); }
    double y_at(int iy) const { return bounds.ymin + (iy + 0.5) * dy(); }
    double cell_diagonal() const { return std::hypot(dx(), dy()); }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }
    bool valid(int ix, int iy) const { return mask[index(ix, iy)] != 0; }

    double at(const std::string& layer, int ix, int iy) const { return layers.at(layer)[index(ix, iy)]; }

    static FieldGrid empty(const Window& w, int nx, int ny) {
        if (nx < 2 || ny < 2) {
            throw std::invalid_argument("FieldGrid: resolution must be at least 2 x 2");
        }
        if (!(w.xmin < w.xmax && w.ymin < w.ymax)) {
            throw std::invalid_argument("FieldGrid: empty window");
        }
        FieldGrid g;
        g.bounds = w;
        g.nx = nx;
        g.ny = ny;
        const std::size_t size = static_cast<std::size_t>(nx) * ny;
        for (const auto& name : layer_names()) {
            g.layers[name].assign(size, std::numeric_limits<double>::quiet_NaN());
        }
        g.mask.assign(size, 0);
        return g;
    }
};

namespace detail {

inline void scan_rows(const ObjectiveModel& model, FieldGrid& g, int row_begin, int row_end) {
    auto& value = g.layers.at("value");
    auto& gx = g.layers.at("grad_x");
    auto& gy = g.layers.at("grad_y");
    auto& nx = g.layers.at("nu_x");
    auto& ny = g.layers.at("nu_y");
    auto& tau_l = g.layers.at("tau");
    auto& tc = g.layers.at("tau_check");
    auto& det = g.layers.at("det_hess");
    for (int iy = row_begin; iy < row_end; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const std::size_t k = g.index(ix, iy);
            DerivativeBundle b;
            try {
                b = model(point2(g.x_at(ix), g.y_at(iy)));
            } catch (const std::runtime_error&) {
                continue;
            }
            value[k] = b.value;
            gx[k] = b.gradient(0);
            gy[k] = b.gradient(1);
            if (b.hessian.allFinite()) {
                det[k] = b.hessian(0, 0) * b.hessian(1, 1) - b.hessian(0, 1) * b.hessian(1, 0);
            }
            if (!b.all_finite()) {
                continue;
            }
            try {
                const HessianFactor factor(b.hessian);
                const Vector nu = newton_step(factor, b.gradient);
                const double t = tau(factor, b, nu);
                if (!nu.allFinite() || !std::isfinite(t)) {
                    continue;
                }
                nx[k] = nu(0);
                ny[k] = nu(1);
                tau_l[k] = t;
                tc[k] = tau_check(t);
                g.mask[k] = 1;
            } catch (const SingularHessianError&) {
            }
        }
    }
}

}  // namespace detail

/// Samples every layer at cell centers. Rows are split across workers; the result does not depend on the worker count.
inline FieldGrid scan(const ObjectiveModel& model, const Window& bounds, int nx, int ny, int workers = 1) {
    if (model.dimension != 2) {
        throw std::invalid_argument("scan: model must be two-dimensional");
    }
    FieldGrid g = FieldGrid::empty(bounds, nx, ny);
    workers = std::clamp(workers, 1, ny);
    if (workers == 1) {
        detail::scan_rows(model, g, 0, ny);
        return g;
    }
    // layers are preallocated; workers write disjoint row ranges
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        const int begin = ny * w / workers;
        const int end = ny * (w + 1) / workers;
        pool.emplace_back([&model, &g, begin, end] { detail::scan_rows(model, g, begin, end); });
    }
    for (auto& t : pool) {
        t.join();
    }
    return g;
}

enum class CurveField { tau_minus_one, det_hess };

inline const char* to_string(CurveField f) {
    return f == CurveField::tau_minus_one ? "tau_minus_one" : "det_hess";
}

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    /// tau-check interpolated at this point exceeds the entry threshold, i.e.
    /// the sign change of tau - 1 comes from a Hessian singularity.
    bool singular = false;
};

struct ZeroCurve {
    CurveField field = CurveField::tau_minus_one;
    std::vector<CurvePoint> polyline;
    bool closed = false;

    double singular_fraction() const {
        if (polyline.empty()) {
            return 0.0;
        }
        const auto n = std::count_if(polyline.begin(), polyline.end(), [](const CurvePoint& p) { return p.singular; });
        return static_cast<double>(n) / static_cast<double>(polyline.size());
    }
};

namespace detail {

struct FieldView {
    const FieldGrid& g;
    CurveField field;

    bool usable(int ix, int iy) const {
        if (field == CurveField::tau_minus_one) {
            return g.valid(ix, iy);
        }
        return std::isfinite(g.at("det_hess", ix, iy));
    }
    double operator()(int ix, int iy) const {
        return field == CurveField::tau_minus_one ? g.at("tau", ix, iy) - 1.0 : g.at("det_hess", ix, iy);
    }
};

}  // namespace detail

/**
 * Marching squares over the lattice of cell centers. Squares with an
 * unusable corner are skipped. Saddle squares are disambiguated by the
 * mean of the four corners. Crossing points are shared between squares
 * through their edge, so segments link into polylines exactly.
 */
inline std::vector<ZeroCurve> zero_curves(const FieldGrid& g, CurveField field,
                                          double entry_threshold = 1e-3) {
    const detail::FieldView f{g, field};
    const auto& tc = g.layers.at("tau_check");
    // edge key: 2 * (iy * nx + ix) for the edge to (ix+1, iy), +1 for the edge to (ix, iy+1)
    auto hkey = [&](int ix, int iy) { return 2 * static_cast<std::int64_t>(g.index(ix, iy)); };
    auto vkey = [&](int ix, int iy) { return 2 * static_cast<std::int64_t>(g.index(ix, iy)) + 1; };

    std::map<std::int64_t, CurvePoint> points;
    auto crossing = [&](std::int64_t key, int ax, int ay, int bx, int by) {
        if (points.count(key)) {
            return;
        }
        const double va = f(ax, ay), vb = f(bx, by);
        const double t = va / (va - vb);
        CurvePoint p;
        p.x = g.x_at(ax) + t * (g.x_at(bx) - g.x_at(ax));
        p.y = g.y_at(ay) + t * (g.y_at(by) - g.y_at(ay));
        if (field == CurveField::tau_minus_one) {
            const double ca = tc[g.index(ax, ay)], cb = tc[g.index(bx, by)];
            p.singular = std::abs(ca + t * (cb - ca)) > entry_threshold;
        }
        points.emplace(key, p);
    };

    std::map<std::int64_t, std::vector<std::int64_t>> adj;
    auto link = [&](std::int64_t a, std::int64_t b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };

    for (int iy = 0; iy + 1 < g.ny; ++iy) {
        for (int ix = 0; ix + 1 < g.nx; ++ix) {
            if (!f.usable(ix, iy) || !f.usable(ix + 1, iy) || !f.usable(ix + 1, iy + 1) || !f.usable(ix, iy + 1)) {
                continue;
            }
            const double v0 = f(ix, iy), v1 = f(ix + 1, iy), v2 = f(ix + 1, iy + 1), v3 = f(ix, iy + 1);
            const int code = (v0 > 0) | ((v1 > 0) << 1) | ((v2 > 0) << 2) | ((v3 > 0) << 3);
            if (code == 0 || code == 15) {
                continue;
            }
            // edges: 0 bottom (c0-c1), 1 right (c1-c2), 2 top (c3-c2), 3 left (c0-c3)
            const std::array<std::int64_t, 4> key = {hkey(ix, iy), vkey(ix + 1, iy), hkey(ix, iy + 1), vkey(ix, iy)};
            const bool cut[4] = {(v0 > 0) != (v1 > 0), (v1 > 0) != (v2 > 0), (v3 > 0) != (v2 > 0),
                                 (v0 > 0) != (v3 > 0)};
            if (cut[0]) crossing(key[0], ix, iy, ix + 1, iy);
            if (cut[1]) crossing(key[1], ix + 1, iy, ix + 1, iy + 1);
            if (cut[2]) crossing(key[2], ix, iy + 1, ix + 1, iy + 1);
            if (cut[3]) crossing(key[3], ix, iy, ix, iy + 1);

            if (code == 5 || code == 10) {
                const bool center_pos = 0.25 * (v0 + v1 + v2 + v3) > 0;
                const bool c0_pos = v0 > 0;
                if (center_pos == c0_pos) {
                    // c0's region connects through the center: separate c1 and c3
                    link(key[0], key[1]);
                    link(key[2], key[3]);
                } else {
                    link(key[3], key[0]);
                    link(key[1], key[2]);
                }
                continue;
            }
            std::int64_t ends[2];
            int k = 0;
            for (int e = 0; e < 4; ++e) {
                if (cut[e]) {
                    ends[k++] = key[e];
                }
            }
            link(ends[0], ends[1]);
        }
    }

    std::vector<ZeroCurve> curves;
    std::map<std::int64_t, bool> used;
    auto walk = [&](std::int64_t start) {
        ZeroCurve c;
        c.field = field;
        std::int64_t prev = -1, cur = start;
        for (;;) {
            used[cur] = true;
            c.polyline.push_back(points.at(cur));
            std::int64_t next = -1;
            for (std::int64_t nb : adj[cur]) {
                if (nb != prev && !used[nb]) {
                    next = nb;
                    break;
                }
            }
            if (next < 0) {
                const auto& nbs = adj[cur];
                c.closed = c.polyline.size() > 2 && std::find(nbs.begin(), nbs.end(), start) != nbs.end();
                break;
            }
            prev = cur;
            cur = next;
        }
        curves.push_back(std::move(c));
    };
    for (const auto& [key, nbs] : adj) {
        if (nbs.size() == 1 && !used[key]) {
            walk(key);
        }
    }
    for (const auto& [key, nbs] : adj) {
        if (!used[key]) {
            walk(key);
        }
    }
    return curves;
}

enum class SingularityKind { countercurrent, inflection, mixed };

inline const char* to_string(SingularityKind k) {
    switch (k) {
        case SingularityKind::countercurrent: return "countercurrent";
        case SingularityKind::inflection: return "inflection";
        case SingularityKind::mixed: return "mixed";
    }
    return "unknown";
}

struct SingularityStats {
    SingularityKind kind = SingularityKind::mixed;
    /// mean |cos| between the Newton vector and the curve tangent, per side
    double tangent_cos_plus = 0.0;
    double tangent_cos_minus = 0.0;
    /// share of matched pairs whose Newton vectors point in opposing directions
    double opposing_fraction = 0.0;
    int samples = 0;
};

inline constexpr double kCountercurrentCos = 0.9;
inline constexpr double kInflectionCos = 0.5;

/**
 * Compares Newton vectors at matched points on both sides of a det H = 0
 * curve, offset along the local normal by `offset_cells` cell diagonals and
 * read from the nearest cell center.
 */
inline SingularityStats singularity_stats(const FieldGrid& g, const ZeroCurve& curve, double offset_cells = 1.5) {
    SingularityStats s;
    const double h = offset_cells * g.cell_diagonal();
    auto lookup = [&](double x, double y, Vector& out) {
        const int ix = static_cast<int>(std::floor((x - g.bounds.xmin) / g.dx()));
        const int iy = static_cast<int>(std::floor((y - g.bounds.ymin) / g.dy()));
        if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.ny || !g.valid(ix, iy)) {
            return false;
        }
        out = point2(g.at("nu_x", ix, iy), g.at("nu_y", ix, iy));
        return out.norm() > 0.0;
    };
    double sum_plus = 0.0, sum_minus = 0.0;
    int opposing = 0;
    const auto& pl = curve.polyline;
    for (std::size_t i = 0; i + 1 < pl.size(); ++i) {
        Vector t = point2(pl[i + 1].x - pl[i].x, pl[i + 1].y - pl[i].y);
        if (!(t.norm() > 0.0)) {
            continue;
        }
        t.normalize();
        const Vector n = point2(-t(1), t(0));
        const Vector mid = point2(0.5 * (pl[i].x + pl[i + 1].x), 0.5 * (pl[i].y + pl[i + 1].y));
        const Vector a = mid + h * n, b = mid - h * n;
        Vector va, vb;
        if (!lookup(a(0), a(1), va) || !lookup(b(0), b(1), vb)) {
            continue;
        }
        sum_plus += std::abs(va.normalized().dot(t));
        sum_minus += std::abs(vb.normalized().dot(t));
        opposing += va.dot(vb) < 0.0 ? 1 : 0;
        ++s.samples;
    }
    if (s.samples < 5) {
        return s;
    }
    s.tangent_cos_plus = sum_plus / s.samples;
    s.tangent_cos_minus = sum_minus / s.samples;
    s.opposing_fraction = static_cast<double>(opposing) / s.samples;
    const bool opposed = s.opposing_fraction > 0.5;
    if (opposed && s.tangent_cos_plus > kCountercurrentCos && s.tangent_cos_minus > kCountercurrentCos) {
        s.kind = SingularityKind::countercurrent;
    } else if (opposed && s.tangent_cos_plus < kInflectionCos && s.tangent_cos_minus < kInflectionCos) {
        s.kind = SingularityKind::inflection;
    }
    return s;
}

inline SingularityKind classify_singularity(const FieldGrid& g, const ZeroCurve& curve) {
    if (curve.field != CurveField::det_hess) {
        throw std::invalid_argument("classify_singularity: curve must come from the det_hess layer");
    }
    return singularity_stats(g, curve).kind;
}

}  // namespace divnewton
