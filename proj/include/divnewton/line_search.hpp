#pragma once
/**
 * Line-search strategies for Newton's method:
 *
 *   Sno-Mno-Cval2  plain Newton step
 *   Sno-Mex-Cval2  explicit search on the objective value over alpha in [0, 1]
 *   Szz-Mlm-Ctau   zigzag traversal of tau-check ravines
 *   Szzp-Mlm-Ctau  zigzag with the parallelity check
 *
 * The zigzag strategy is state-free: every call looks only at the current
 * point. If tau-check exceeds the entry threshold it runs the down phase
 * (coarse scan for local minima, Golden Section refinement, first
 * sub-threshold minimum wins, otherwise a full step). Inside a ravine it
 * runs a zig along the Newton step until tau-check passes the escape
 * threshold and a zag back along the pullback direction.
 *
 * Each step reports a short identifier:
 *   N        Sno step
 *   D / D-   ravine reached by coarse search / after refinement
 *   F        no ravine found, full Newton step
 *   ^ / A    zig escaped the ravine / stayed inside up to alpha = 1
 *   v        appended after a successful zag
 *   U        pullback direction unavailable, zig endpoint kept
 *   P        zig and pullback nearly parallel, full step from the escape point
 */

#include "divnewton/derivatives.hpp"
#include "divnewton/newton.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace divnewton {

/// A one-dimensional search produced no finite criterion value.
class SearchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Strategy { plain, explicit_value, zigzag, zigzag_parallel };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::plain: return "Sno-Mno-Cval2";
        case Strategy::explicit_value: return "Sno-Mex-Cval2";
        case Strategy::zigzag: return "Szz-Mlm-Ctau";
        case Strategy::zigzag_parallel: return "Szzp-Mlm-Ctau";
    }
    return "unknown";
}

inline Strategy parse_strategy(const std::string& name) {
    for (Strategy s : {Strategy::plain, Strategy::explicit_value, Strategy::zigzag,
                       Strategy::zigzag_parallel}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

struct ZigzagConfig {
    double entry_threshold = 1e-3;
    double escape_threshold = 1e-1;
    double parallelity_angle = 0.2;
    int explicit_steps = 100;
    double golden_bracket = 1e-5;
    int golden_max_steps = 100;
    double golden_tolerance = 1e-3;
    double refine_alpha_limit = 1e-1;
    bool parallelity_enabled = true;

    void validate() const {
        if (!(entry_threshold > 0.0 && entry_threshold < escape_threshold)) {
            throw std::invalid_argument("ZigzagConfig: need 0 < entry_threshold < escape_threshold");
        }
        if (!(parallelity_angle > 0.0) || explicit_steps <= 0 || !(golden_bracket > 0.0) ||
            golden_max_steps <= 0 || !(golden_tolerance > 0.0) || !(refine_alpha_limit > 0.0)) {
            throw std::invalid_argument("ZigzagConfig: search parameters must be strictly positive");
        }
    }
};

enum class Phase { down_coarse, down_refine, zig, zag, plain };

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::down_coarse: return "down-coarse";
        case Phase::down_refine: return "down-refine";
        case Phase::zig: return "zig";
        case Phase::zag: return "zag";
        case Phase::plain: return "plain";
    }
    return "unknown";
}

struct AlphaSample {
    double alpha = 0.0;
    double criterion = 0.0;
};

/// Criterion over alpha for one sub-step, in the logged (sign-normalized) view.
struct AlphaSection {
    Phase phase = Phase::plain;
    std::vector<AlphaSample> samples;
    double chosen_alpha = 0.0;
};

struct StepOutcome {
    Point next;
    std::string identifier;
    std::vector<AlphaSection> sections;
};

using Criterion1D = std::function<double(double)>;

namespace detail {

inline double as_cost(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

inline Criterion1D along(std::function<double(const Point&)> criterion, const Point& x,
                         const Vector& dir) {
    return [criterion = std::move(criterion), x, dir](double alpha) {
        const Point p = x + alpha * dir;
        return criterion(p);
    };
}

}  // namespace detail

/**
 * Samples alpha = k / steps for k = 0..steps and picks the smallest finite
 * criterion value (ties go to the smaller alpha). Non-finite samples are kept
 * in the log but never chosen.
 */
inline AlphaSection explicit_search(const Criterion1D& criterion, int steps, Phase phase = Phase::plain) {
    if (steps <= 0) {
        throw std::invalid_argument("explicit_search: steps must be positive");
    }
    AlphaSection s;
    s.phase = phase;
    s.samples.reserve(static_cast<std::size_t>(steps) + 1);
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int k = 0; k <= steps; ++k) {
        const double alpha = static_cast<double>(k) / steps;
        double v = std::numeric_limits<double>::quiet_NaN();
        try {
            v = criterion(alpha);
        } catch (const std::runtime_error&) {
        }
        s.samples.push_back({alpha, v});
        if (std::isfinite(v) && v < best) {
            best = v;
            s.chosen_alpha = alpha;
            found = true;
        }
    }
    if (!found) {
        throw SearchFailure("explicit search: criterion non-finite at every sample");
    }
    return s;
}

inline AlphaSection explicit_search(const std::function<double(const Point&)>& criterion, const Point& x,
                                    const Vector& nu, int steps, Phase phase = Phase::plain) {
    if (!(nu.norm() > 0.0)) {
        throw std::invalid_argument("explicit_search: direction must be nonzero");
    }
    return explicit_search(detail::along(criterion, x, nu), steps, phase);
}

struct GoldenResult {
    double alpha = 0.0;
    double value = 0.0;
    std::vector<AlphaSample> samples;
};

/**
 * Golden Section minimization starting from the bracket [lo, hi] with its
 * midpoint as the interior point. While the midpoint is not below both ends
 * the bracket is walked toward the lower end with doubling spacing. The
 * evaluation budget covers expansion and reduction together. Returns the
 * best point ever evaluated, so the result never exceeds the midpoint value.
 */
inline GoldenResult golden_section(const Criterion1D& criterion, double lo, double hi, int max_steps,
                                   double tol) {
    if (!(lo < hi)) {
        throw std::invalid_argument("golden_section: need lo < hi");
    }
    GoldenResult r;
    double best = std::numeric_limits<double>::infinity();
    int evals = 0;
    auto eval = [&](double a) {
        double v = std::numeric_limits<double>::quiet_NaN();
        try {
            v = criterion(a);
        } catch (const std::runtime_error&) {
        }
        ++evals;
        r.samples.push_back({a, v});
        const double c = detail::as_cost(v);
        if (c < best) {
            best = c;
            r.alpha = a;
            r.value = v;
        }
        return c;
    };

    double a = lo, b = hi, m = 0.5 * (lo + hi);
    double fm = eval(m);
    double fa = eval(a);
    double fb = eval(b);
    while (evals < max_steps && !(fm <= fa && fm <= fb)) {
        if (fa < fb) {
            const double na = a - 2.0 * (m - a);
            b = m; fb = fm;
            m = a; fm = fa;
            a = na; fa = eval(a);
        } else {
            const double nb = b + 2.0 * (b - m);
            a = m; fa = fm;
            m = b; fm = fb;
            b = nb; fb = eval(b);
        }
    }

    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    if (evals < max_steps && (b - a) > tol) {
        double c = b - ratio * (b - a);
        double fc = eval(c);
        double d = a + ratio * (b - a);
        double fd = evals < max_steps ? eval(d) : std::numeric_limits<double>::infinity();
        while (evals < max_steps && (b - a) > tol) {
            if (fc <= fd) {
                b = d;
                d = c; fd = fc;
                c = b - ratio * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d; fc = fd;
                d = a + ratio * (b - a);
                fd = eval(d);
            }
        }
    }
    if (!std::isfinite(best)) {
        throw SearchFailure("golden section: criterion non-finite everywhere");
    }
    return r;
}

/// Strategy-level criteria.
inline double value_at(const ObjectiveModel& model, const Point& x) {
    const double v = model.value(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
}

struct DownResult {
    StepOutcome step;
    bool reached_ravine = false;
};

/**
 * Down phase: coarse scan of tau-check along nu, Golden Section refinement at
 * every coarse local minimum (first sample excluded, last sample included),
 * then the smallest-alpha minimum at or below the entry threshold. Without
 * such a minimum a full Newton step is taken ("F").
 */
inline DownResult down_phase(const ObjectiveModel& model, const Point& x, const Vector& nu,
                             const ZigzagConfig& cfg) {
    if (!(nu.norm() > 0.0)) {
        throw std::invalid_argument("down_phase: Newton step must be nonzero");
    }
    const auto crit = [&model](const Point& p) { return tau_check_at(model, p); };
    const Criterion1D line = detail::along(crit, x, nu);

    DownResult out;
    out.step.next = x + nu;
    out.step.identifier = "F";

    AlphaSection coarse;
    try {
        coarse = explicit_search(line, cfg.explicit_steps, Phase::down_coarse);
    } catch (const SearchFailure&) {
        coarse.phase = Phase::down_coarse;
        for (int k = 0; k <= cfg.explicit_steps; ++k) {
            coarse.samples.push_back({static_cast<double>(k) / cfg.explicit_steps,
                                      std::numeric_limits<double>::quiet_NaN()});
        }
        coarse.chosen_alpha = 1.0;
        out.step.sections.push_back(std::move(coarse));
        return out;
    }

    const auto& s = coarse.samples;
    const int last = static_cast<int>(s.size()) - 1;
    std::vector<int> minima;
    for (int k = 1; k <= last; ++k) {
        const double v = s[k].criterion;
        if (!std::isfinite(v)) {
            continue;
        }
        const bool left = v < detail::as_cost(s[k - 1].criterion);
        const bool right = k == last || v < detail::as_cost(s[k + 1].criterion);
        if (left && right) {
            minima.push_back(k);
        }
    }

    struct Candidate {
        double alpha;
        double value;
        bool refined;
        std::vector<AlphaSample> trace;
    };
    std::vector<Candidate> candidates;
    for (int k : minima) {
        const double base = s[k].alpha;
        if (s[k].criterion <= cfg.entry_threshold) {
            candidates.push_back({base, s[k].criterion, false, {}});
            continue;
        }
        try {
            const GoldenResult g = golden_section([&line, base](double d) { return line(base + d); },
                                                  -cfg.golden_bracket, cfg.golden_bracket,
                                                  cfg.golden_max_steps, cfg.golden_tolerance);
            if (std::abs(g.alpha) > cfg.refine_alpha_limit || base + g.alpha < 0.0) {
                continue;
            }
            std::vector<AlphaSample> trace;
            trace.reserve(g.samples.size());
            for (const auto& smp : g.samples) {
                trace.push_back({base + smp.alpha, smp.criterion});
            }
            candidates.push_back({base + g.alpha, g.value, true, std::move(trace)});
        } catch (const SearchFailure&) {
        }
    }

    const Candidate* accepted = nullptr;
    for (const auto& c : candidates) {
        if (c.value <= cfg.entry_threshold && (!accepted || c.alpha < accepted->alpha)) {
            accepted = &c;
        }
    }
    const Candidate* logged = accepted;
    if (!logged) {
        for (const auto& c : candidates) {
            if (c.refined && (!logged || c.value < logged->value ||
                              (c.value == logged->value && c.alpha < logged->alpha))) {
                logged = &c;
            }
        }
    }

    if (logged) {
        if (logged->refined) {
            // coarse minimum the refinement started from
            double start = s.front().alpha;
            double dist = std::numeric_limits<double>::infinity();
            for (int k : minima) {
                if (std::abs(s[k].alpha - logged->alpha) < dist) {
                    dist = std::abs(s[k].alpha - logged->alpha);
                    start = s[k].alpha;
                }
            }
            coarse.chosen_alpha = start;
        } else {
            coarse.chosen_alpha = logged->alpha;
        }
    }
    out.step.sections.push_back(coarse);
    if (logged && logged->refined) {
        out.step.sections.push_back({Phase::down_refine, logged->trace, logged->alpha});
    }

    if (accepted) {
        out.step.next = x + accepted->alpha * nu;
        out.step.identifier = accepted->refined ? "D-" : "D";
        out.reached_ravine = true;
        return out;
    }
    out.step.sections.push_back({Phase::plain, {{0.0, s.front().criterion}, {1.0, s.back().criterion}}, 1.0});
    return out;
}

struct ZigResult {
    Point escape;
    double alpha = 1.0;
    std::string identifier;
    AlphaSection section;
};

/// Follows nu from inside a ravine until tau-check first exceeds the escape threshold.
inline ZigResult zig_phase(const ObjectiveModel& model, const Point& x, const Vector& nu,
                           const ZigzagConfig& cfg) {
    if (!(nu.norm() > 0.0)) {
        throw std::invalid_argument("zig_phase: Newton step must be nonzero");
    }
    ZigResult r;
    r.section.phase = Phase::zig;
    r.identifier = "A";
    r.alpha = 1.0;
    for (int k = 0; k <= cfg.explicit_steps; ++k) {
        const double alpha = static_cast<double>(k) / cfg.explicit_steps;
        const double v = tau_check_at(model, x + alpha * nu);
        r.section.samples.push_back({alpha, v});
        if (std::isfinite(v) && v > cfg.escape_threshold) {
            r.identifier = "^";
            r.alpha = alpha;
            break;
        }
    }
    r.section.chosen_alpha = r.alpha;
    r.escape = x + r.alpha * nu;
    return r;
}

struct ZagResult {
    Point next;
    /// "U", "P", "v" (success) or empty (search failed, escape point kept).
    std::string identifier;
    std::vector<AlphaSection> sections;
};

/// Angle between two lines, in [0, pi/2].
inline double line_angle(const Vector& a, const Vector& b) {
    const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
    return std::acos(std::min(1.0, c));
}

/**
 * Pulls back from the escape point along the pullback direction q, scaled by
 * the length of the zig Newton step, minimizing tau-check by Golden Section.
 */
inline ZagResult zag_phase(const ObjectiveModel& model, const Point& escape, const Vector& zig_nu,
                           const ZigzagConfig& cfg, bool parallelity_enabled) {
    ZagResult r;
    r.next = escape;

    Vector dir;
    Vector escape_nu;
    double escape_value = std::numeric_limits<double>::quiet_NaN();
    try {
        const DerivativeBundle b = model(escape);
        if (!b.all_finite()) {
            throw SingularHessianError("non-finite derivatives at escape point");
        }
        const HessianFactor factor(b.hessian);
        escape_nu = newton_step(factor, b.gradient);
        escape_value = tau_check(tau(factor, b, escape_nu));
        dir = pullback_q(factor, b).dir;
    } catch (const SingularHessianError&) {
        r.identifier = "U";
        return r;
    } catch (const ZeroDirectionError&) {
        r.identifier = "U";
        return r;
    }

    if (parallelity_enabled && line_angle(dir, zig_nu) < cfg.parallelity_angle) {
        r.next = escape + escape_nu;
        r.identifier = "P";
        r.sections.push_back(
            {Phase::plain, {{0.0, escape_value}, {1.0, tau_check_at(model, r.next)}}, 1.0});
        return r;
    }

    const Vector step = dir * zig_nu.norm();
    const auto crit = [&model](const Point& p) { return tau_check_at(model, p); };
    const Criterion1D line = detail::along(crit, escape, step);
    try {
        GoldenResult g = golden_section(line, -cfg.golden_bracket, cfg.golden_bracket,
                                        cfg.golden_max_steps, cfg.golden_tolerance);
        if (!(g.value < escape_value)) {
            return r;
        }
        r.next = escape + g.alpha * step;
        r.identifier = "v";
        AlphaSection sec{Phase::zag, std::move(g.samples), g.alpha};
        if (sec.chosen_alpha < 0.0) {
            sec.chosen_alpha = -sec.chosen_alpha;
            for (auto& smp : sec.samples) {
                smp.alpha = -smp.alpha;
            }
        }
        r.sections.push_back(std::move(sec));
    } catch (const SearchFailure&) {
    }
    return r;
}

/**
 * One strategy step from x. The Newton step at x must be computable and
 * nonzero; a singular Hessian at x propagates as SingularHessianError.
 */
inline StepOutcome strategy_step(Strategy strategy, const ObjectiveModel& model, const Point& x,
                                 const ZigzagConfig& cfg) {
    const NewtonState st = newton_state(model, x);
    const Vector& nu = st.nu;
    StepOutcome out;

    switch (strategy) {
        case Strategy::plain: {
            out.next = x + nu;
            out.identifier = "N";
            out.sections.push_back(
                {Phase::plain, {{0.0, value_at(model, x)}, {1.0, value_at(model, out.next)}}, 1.0});
            return out;
        }
        case Strategy::explicit_value: {
            const auto crit = [&model](const Point& p) { return value_at(model, p); };
            AlphaSection s = explicit_search(crit, x, nu, cfg.explicit_steps, Phase::plain);
            out.next = x + s.chosen_alpha * nu;
            out.identifier = "N";
            out.sections.push_back(std::move(s));
            return out;
        }
        case Strategy::zigzag:
        case Strategy::zigzag_parallel:
            break;
    }

    if (!(st.tau_check <= cfg.entry_threshold)) {
        return down_phase(model, x, nu, cfg).step;
    }

    ZigResult zig = zig_phase(model, x, nu, cfg);
    out.sections.push_back(zig.section);
    const bool parallel_check = strategy == Strategy::zigzag_parallel && cfg.parallelity_enabled;
    ZagResult zag = zag_phase(model, zig.escape, nu, cfg, parallel_check);
    out.next = zag.next;
    if (zag.identifier == "U" || zag.identifier == "P") {
        out.identifier = zag.identifier;
    } else {
        out.identifier = zig.identifier + zag.identifier;
    }
    for (auto& s : zag.sections) {
        out.sections.push_back(std::move(s));
    }
    return out;
}

/// True when id is one of N, F, D, D-, ^, ^v, A, Av, U, P.
inline bool valid_identifier(const std::string& id) {
    static const char* const kValid[] = {"N", "F", "D", "D-", "^", "^v", "A", "Av", "U", "P"};
    return std::any_of(std::begin(kValid), std::end(kValid), [&](const char* v) { return id == v; });
}

}  // namespace divnewton
