#pragma once
/**
 * Outer Newton iteration: evaluate, delegate to a strategy, stop,
 * classify the final point by the signs of the Hessian eigenvalues.
 */

#include "divnewton/derivatives.hpp"
#include "divnewton/line_search.hpp"
#include "divnewton/newton.hpp"

#include <Eigen/Eigenvalues>

#include <string>
#include <vector>

namespace divnewton {

enum class Outcome { minimum, maximum, saddle, failure };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::minimum: return "minimum";
        case Outcome::maximum: return "maximum";
        case Outcome::saddle: return "saddle";
        case Outcome::failure: return "failure";
    }
    return "unknown";
}

struct Classification {
    Outcome outcome = Outcome::failure;
    /// Some eigenvalue is negligible relative to the largest; counted as saddle.
    bool degenerate = false;
};

inline constexpr double kDegenerateEigenRatio = 1e-8;

inline Classification classify(const Matrix& hessian) {
    Classification c;
    if (hessian.rows() == 0 || !hessian.allFinite()) {
        return c;
    }
    const Matrix sym = 0.5 * (hessian + hessian.transpose());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
        c.outcome = Outcome::saddle;
        c.degenerate = true;
        return c;
    }
    int pos = 0, neg = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) <= kDegenerateEigenRatio * scale) {
            c.degenerate = true;
        } else if (ev(i) > 0.0) {
            ++pos;
        } else {
            ++neg;
        }
    }
    if (c.degenerate) {
        c.outcome = Outcome::saddle;
    } else if (neg == 0) {
        c.outcome = Outcome::minimum;
    } else if (pos == 0) {
        c.outcome = Outcome::maximum;
    } else {
        c.outcome = Outcome::saddle;
    }
    return c;
}

struct RunLimits {
    int max_steps = 100;
    double step_tolerance = 1e-5;
    double gradient_tolerance = 1e-5;
    double zero_step_norm = 1e-14;
};

struct TrajectoryRecord {
    Point start;
    std::vector<Point> iterates;
    std::vector<std::string> identifiers;
    std::string strategy_string;
    Outcome outcome = Outcome::failure;
    bool degenerate = false;
    double final_gradient_norm = 0.0;
    int steps_taken = 0;
    std::vector<std::vector<AlphaSection>> sections_per_step;
    /// tau-check at each iterate (NaN where the Hessian is singular).
    std::vector<double> tau_check;
    std::string diagnostic;

    bool converged() const { return outcome != Outcome::failure; }
    const Point& final_point() const { return iterates.back(); }
};

inline TrajectoryRecord run(const ObjectiveModel& model, const Point& start, Strategy strategy,
                            const ZigzagConfig& cfg = {}, const RunLimits& limits = {}) {
    if (start.size() != model.dimension || !is_finite_point(start)) {
        throw std::invalid_argument("run: start point must be finite and match the model dimension");
    }
    cfg.validate();

    TrajectoryRecord rec;
    rec.start = start;
    rec.iterates.push_back(start);
    Point x = start;

    for (;;) {
        const DerivativeBundle b = model(x);
        if (!b.all_finite()) {
            rec.diagnostic = "non-finite derivatives";
            rec.tau_check.push_back(std::nan(""));
            break;
        }
        Vector nu;
        try {
            const HessianFactor factor(b.hessian);
            nu = newton_step(factor, b.gradient);
            rec.tau_check.push_back(tau_check(tau(factor, b, nu)));
        } catch (const SingularHessianError&) {
            rec.tau_check.push_back(std::nan(""));
            rec.diagnostic = "singular Hessian";
            break;
        }
        if (nu.norm() <= limits.zero_step_norm) {
            break;
        }
        if (rec.steps_taken >= limits.max_steps) {
            rec.diagnostic = "step limit reached";
            break;
        }
        StepOutcome step;
        try {
            step = strategy_step(strategy, model, x, cfg);
        } catch (const SingularHessianError&) {
            rec.diagnostic = "singular Hessian";
            break;
        } catch (const SearchFailure&) {
            rec.diagnostic = "line search failed";
            break;
        }
        if (!step.next.allFinite()) {
            rec.diagnostic = "non-finite iterate";
            break;
        }
        const double moved = (step.next - x).norm();
        x = step.next;
        rec.iterates.push_back(x);
        rec.identifiers.push_back(step.identifier);
        rec.strategy_string += step.identifier;
        rec.sections_per_step.push_back(std::move(step.sections));
        ++rec.steps_taken;
        if (moved < limits.step_tolerance) {
            rec.tau_check.push_back(tau_check_at(model, x));
            break;
        }
    }

    const DerivativeBundle fin = model(x);
    rec.final_gradient_norm = fin.gradient.norm();
    if (!fin.all_finite() || !(rec.final_gradient_norm <= limits.gradient_tolerance)) {
        rec.outcome = Outcome::failure;
        if (rec.diagnostic.empty()) {
            rec.diagnostic = "final gradient norm above tolerance";
        }
        return rec;
    }
    const Classification c = classify(fin.hessian);
    rec.outcome = c.outcome;
    rec.degenerate = c.degenerate;
    return rec;
}

}  // namespace divnewton
