// Minimal tour: evaluate the divergence criterion, run the zigzag driver on
// the saddle variant of Rosenbrock, and extract the singular curve.

#include "divnewton/divnewton.hpp"

#include <cstdio>

namespace dn = divnewton;

int main() {
    const auto model = dn::make_model("Rosenbrock-wide-saddle");

    const auto s = dn::newton_state(model, dn::point2(-1.0, 0.25));
    std::printf("tau at (-1, 0.25): %.6f  tau-check: %.3e\n", s.tau, s.tau_check);

    const auto r = dn::run(model, dn::point2(-1.0, 0.25), dn::Strategy::zigzag_parallel);
    std::printf("%s: %s after %d steps at (%s), |grad| = %.2e\n  ids %s\n", dn::to_string(dn::Strategy::zigzag_parallel),
                dn::to_string(r.outcome), r.steps_taken, dn::format_point(r.final_point()).c_str(),
                r.final_gradient_norm, r.strategy_string.c_str());

    const auto p = dn::require_preset("Rosenbrock-wide-saddle");
    const auto grid = dn::scan(model, p.window, 120, 120);
    const auto curves = dn::zero_curves(grid, dn::CurveField::det_hess);
    std::printf("det H = 0: %zu curve(s)\n", curves.size());
    return r.converged() ? 0 : 1;
}
