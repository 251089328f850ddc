#pragma once
/**
 * Documented start-point sets per preset.
 *
 * Rosenbrock variants use a hand-picked set around the valley, including
 * the far start (-10, 0) and the valley-side start (-1, 0.25). Every other
 * preset uses ten points on an ellipse at 40% of its window half-extent,
 * rotated by 7 degrees so no start sits on a symmetry axis.
 */

#include "divnewton/test_functions.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace divnewton {

inline std::vector<Point> rosenbrock_starts() {
    return {point2(-10.0, 0.0), point2(-1.0, 0.25), point2(-1.5, 2.5),  point2(-0.5, -0.5),
            point2(0.0, 2.0),   point2(0.5, 0.0),   point2(1.5, -0.5),  point2(1.5, 2.5),
            point2(-1.8, -0.8), point2(1.8, 1.0)};
}

inline std::vector<Point> ring_starts(const Window& w, int count = 10, double fraction = 0.4) {
    const double cx = 0.5 * (w.xmin + w.xmax), cy = 0.5 * (w.ymin + w.ymax);
    const double rx = 0.5 * fraction * (w.xmax - w.xmin), ry = 0.5 * fraction * (w.ymax - w.ymin);
    const double pi = 3.14159265358979323846;
    std::vector<Point> out;
    for (int k = 0; k < count; ++k) {
        const double phi = (7.0 + 360.0 * k / count) * pi / 180.0;
        out.push_back(point2(cx + rx * std::cos(phi), cy + ry * std::sin(phi)));
    }
    return out;
}

inline std::vector<Point> fixture_starts(const FunctionPreset& p) {
    if (p.family == Family::rosenbrock || p.family == Family::rosenbrock_ditch) {
        return rosenbrock_starts();
    }
    return ring_starts(p.window);
}

inline std::vector<Point> fixture_starts(const std::string& preset_name) {
    return fixture_starts(require_preset(preset_name));
}

}  // namespace divnewton
