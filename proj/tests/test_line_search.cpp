#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <regex>

using namespace dnt;

namespace {

/// 1D model with gradient -1 and Hessian 1, so nu = 1 everywhere and
/// tau-check(x) = third(x)^2 can be prescribed freely.
ObjectiveModel line_model(std::function<double(double)> tau_check_of_x) {
    ObjectiveModel m;
    m.dimension = 1;
    m.name = "line";
    m.eval = [f = std::move(tau_check_of_x)](const Point& x) {
        DerivativeBundle b = make_bundle(1);
        b.value = -x(0);
        b.gradient(0) = -1.0;
        b.hessian(0, 0) = 1.0;
        b.third[0](0, 0) = std::sqrt(f(x(0)));
        return b;
    };
    return m;
}

Point at(double v) {
    Point p(1);
    p << v;
    return p;
}

const std::regex kGrammar("^(N|F|D|D-|\\^|\\^v|A|Av|U|P)$");

}  // namespace

TEST(ExplicitSearch, ParabolaMinimum) {
    const auto s = explicit_search([](double a) { return (a - 0.42) * (a - 0.42); }, 100);
    EXPECT_NEAR(s.chosen_alpha, 0.42, 0.005);
    EXPECT_EQ(s.samples.size(), 101u);
    EXPECT_EQ(s.samples.front().alpha, 0.0);
    EXPECT_EQ(s.samples.back().alpha, 1.0);
}

TEST(ExplicitSearch, MonotoneAndConstantPickZero) {
    EXPECT_EQ(explicit_search([](double a) { return a; }, 100).chosen_alpha, 0.0);
    EXPECT_EQ(explicit_search([](double) { return 3.0; }, 100).chosen_alpha, 0.0);
}

TEST(ExplicitSearch, FailuresAreRecordedAndSkipped) {
    const auto s = explicit_search(
        [](double a) {
            if (a < 0.5) throw SingularHessianError("x");
            return a;
        },
        10);
    EXPECT_TRUE(std::isnan(s.samples[0].criterion));
    EXPECT_EQ(s.chosen_alpha, 0.5);
    EXPECT_THROW(explicit_search([](double) { return std::nan(""); }, 10), SearchFailure);
}

TEST(ExplicitSearch, RosenbrockWideValueAlongFirstStep) {
    // brute-force argmin over the 101 samples, computed in exact rationals
    const auto m = make_model("Rosenbrock-wide");
    const Point x = point2(-2, 2);
    const Vector nu = newton_step(m(x));
    const auto s = explicit_search([&m](const Point& p) { return m.value(p); }, x, nu, 100);
    EXPECT_EQ(s.chosen_alpha, 1.0);
    EXPECT_NEAR(m.value(x + nu), 8.566616214180888, 1e-12);
    EXPECT_THROW(explicit_search([&m](const Point& p) { return m.value(p); }, x, Vector::Zero(2), 100),
                 std::invalid_argument);
}

TEST(GoldenSection, ExpandsFromTightBracket) {
    const auto g = golden_section([](double a) { return (a - 0.3) * (a - 0.3); }, -1e-5, 1e-5, 100, 1e-3);
    EXPECT_NEAR(g.alpha, 0.3, 1e-3);
    EXPECT_LE(g.samples.size(), 100u);
}

TEST(GoldenSection, ConstantAndAbsolute) {
    const auto c = golden_section([](double) { return 1.0; }, -1e-5, 1e-5, 100, 1e-3);
    EXPECT_GE(c.alpha, -1e-5);
    EXPECT_LE(c.alpha, 1e-5);
    const auto a = golden_section([](double x) { return std::abs(x - 0.0); }, -0.5, 0.7, 100, 1e-3);
    EXPECT_NEAR(a.alpha, 0.0, 1e-3);
}

TEST(GoldenSection, Errors) {
    EXPECT_THROW(golden_section([](double) { return std::nan(""); }, -1, 1, 50, 1e-3), SearchFailure);
    EXPECT_THROW(golden_section([](double a) { return a; }, 1, -1, 50, 1e-3), std::invalid_argument);
}

TEST(GoldenSection, BudgetIsRespected) {
    // minimum far away: expansion alone would need more than 20 evaluations
    const auto g = golden_section([](double a) { return -a; }, -1e-5, 1e-5, 20, 1e-3);
    EXPECT_EQ(g.samples.size(), 20u);
}

TEST(ZigzagConfig, Validation) {
    ZigzagConfig c;
    EXPECT_NO_THROW(c.validate());
    c.entry_threshold = 0.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.golden_max_steps = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(DownPhase, CoarseZeroGivesD) {
    const auto m = line_model([](double x) { return (x - 0.37) * (x - 0.37); });
    const auto r = down_phase(m, at(0), at(1), {});
    EXPECT_EQ(r.step.identifier, "D");
    EXPECT_TRUE(r.reached_ravine);
    EXPECT_NEAR(r.step.next(0), 0.37, 1e-15);
}

TEST(DownPhase, RefinementGivesDMinus) {
    const auto m = line_model([](double x) { return 1e3 * (x - 0.373) * (x - 0.373); });
    const auto r = down_phase(m, at(0), at(1), {});
    EXPECT_EQ(r.step.identifier, "D-");
    EXPECT_NEAR(r.step.next(0), 0.373, 1e-3);
    ASSERT_EQ(r.step.sections.size(), 2u);
    EXPECT_EQ(r.step.sections[1].phase, Phase::down_refine);
    EXPECT_EQ(r.step.sections[0].chosen_alpha, 0.37);
}

TEST(DownPhase, NoRavineGivesFullStep) {
    const auto m = line_model([](double x) { return 1.0 + (x - 0.5) * (x - 0.5); });
    const auto r = down_phase(m, at(2), at(1), {});
    EXPECT_EQ(r.step.identifier, "F");
    EXPECT_FALSE(r.reached_ravine);
    EXPECT_EQ(r.step.next(0), 3.0);
}

TEST(DownPhase, RejectsRefinementIntoNegativeAlpha) {
    // coarse minimum at alpha = 0.01; the criterion keeps falling toward -0.03
    const auto m = line_model([](double x) {
        return 0.5 + (x + 0.03) * (x + 0.03) + (std::abs(x) < 1e-4 ? 0.3 : 0.0);
    });
    const auto r = down_phase(m, at(0), at(1), {});
    EXPECT_EQ(r.step.identifier, "F");
    EXPECT_EQ(r.step.next(0), 1.0);
    for (const auto& s : r.step.sections) {
        EXPECT_NE(s.phase, Phase::down_refine);
    }
}

TEST(DownPhase, AllEvaluationsFail) {
    ObjectiveModel m = line_model([](double) { return 1.0; });
    auto inner = m.eval;
    m.eval = [inner](const Point& x) {
        auto b = inner(x);
        b.hessian(0, 0) = 0.0;
        return b;
    };
    const auto r = down_phase(m, at(0), at(1), {});
    EXPECT_EQ(r.step.identifier, "F");
    EXPECT_EQ(r.step.next(0), 1.0);
}

TEST(ZigPhase, EscapesAtFirstSampleAboveThreshold) {
    const auto m = line_model([](double x) { return x * 0.1 / 0.225; });
    const auto z = zig_phase(m, at(0), at(1), {});
    EXPECT_EQ(z.identifier, "^");
    EXPECT_DOUBLE_EQ(z.alpha, 0.23);
    for (const auto& s : z.section.samples) {
        if (s.alpha < z.alpha) {
            EXPECT_LE(s.criterion, 0.1);
        }
    }
    EXPECT_GT(z.section.samples.back().criterion, 0.1);
}

TEST(ZigPhase, BoundaryAndQuadratic) {
    const auto m = line_model([](double x) { return 0.1000001 * x * x; });
    const auto z = zig_phase(m, at(0), at(1), {});
    EXPECT_EQ(z.identifier, "^");
    EXPECT_EQ(z.alpha, 1.0);

    const auto q = make_model("quadratic");
    const Point x = point2(1, 1);
    const auto zq = zig_phase(q, x, newton_step(q(x)), {});
    EXPECT_EQ(zq.identifier, "A");
    EXPECT_EQ(zq.alpha, 1.0);
}

TEST(ZagPhase, ParallelPullbackTriggersFullStep) {
    // in 1D the pullback line always coincides with the zig line
    const auto m = line_model([](double x) { return 0.2 * x * x; });
    const auto s = strategy_step(Strategy::zigzag_parallel, m, at(0.01), {});
    EXPECT_EQ(s.identifier, "P");
    const double escape = 0.01 + 0.70;  // first sample with 0.2 (0.01 + a)^2 > 0.1
    EXPECT_NEAR(s.next(0), escape + 1.0, 1e-12);
    EXPECT_LT(line_angle(at(1), at(-1)), 1e-12);
}

TEST(ZagPhase, QuadraticGivesU) {
    const auto q = make_model("quadratic");
    const Point x = point2(1.5, -1);
    for (Strategy s : {Strategy::zigzag, Strategy::zigzag_parallel}) {
        const auto out = strategy_step(s, q, x, {});
        EXPECT_EQ(out.identifier, "U");
        EXPECT_LT((out.next - detail::demo_quadratic_center()).norm(), 1e-12);
    }
}

TEST(StrategyStep, PlainNewtonOnQuadratic) {
    const auto q = make_model("quadratic");
    const auto out = strategy_step(Strategy::plain, q, point2(-1.5, 1.25), {});
    EXPECT_EQ(out.identifier, "N");
    EXPECT_LT((out.next - detail::demo_quadratic_center()).norm(), 1e-12);
}

TEST(StrategyStep, ValueSearchStallsOnSaddleVariant) {
    const auto m = make_model("Rosenbrock-wide-saddle");
    for (const Point& x : fixture_starts("Rosenbrock-wide-saddle")) {
        const auto out = strategy_step(Strategy::explicit_value, m, x, {});
        EXPECT_EQ(out.identifier, "N");
        EXPECT_LE(m.value(out.next), m.value(x));
    }
}

TEST(StrategyStep, SingularHessianPropagates) {
    const auto m = make_model("Rosenbrock-wide");
    EXPECT_THROW(strategy_step(Strategy::zigzag, m, point2(0, 0.05), {}), SingularHessianError);
}

namespace {

std::vector<std::pair<std::string, Point>> sample_points(int per_function, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<std::string, Point>> out;
    for (const auto& p : function_presets()) {
        for (int i = 0; i < per_function; ++i) out.emplace_back(p.name, random_in(p.window, rng));
    }
    return out;
}

}  // namespace

TEST(StrategyProperties, GrammarMonotoneEscapeZagImprovement) {
    std::map<std::string, int> seen;
    for (const auto& [name, x] : sample_points(15, 21)) {
        const auto m = make_model(name);
        for (Strategy s : {Strategy::zigzag, Strategy::zigzag_parallel}) {
            StepOutcome out;
            try {
                out = strategy_step(s, m, x, {});
            } catch (const SingularHessianError&) {
                continue;
            }
            ++seen[out.identifier];
            EXPECT_TRUE(std::regex_match(out.identifier, kGrammar)) << out.identifier;
            ASSERT_FALSE(out.sections.empty());
            for (const auto& sec : out.sections) {
                EXPECT_FALSE(sec.samples.empty());
                EXPECT_GE(sec.chosen_alpha, 0.0) << name;
            }
            if (out.sections[0].phase == Phase::zig) {
                const auto& zig = out.sections[0];
                const double esc = 1e-1;
                for (std::size_t k = 0; k + 1 < zig.samples.size(); ++k) {
                    const double c = zig.samples[k].criterion;
                    EXPECT_TRUE(!(c > esc)) << name;
                }
                if (out.identifier[0] == '^') {
                    EXPECT_GT(zig.samples.back().criterion, esc);
                }
                if (out.identifier.back() == 'v') {
                    const Point escape = x + zig.chosen_alpha * newton_step(m(x));
                    EXPECT_LE(tau_check_at(m, out.next), tau_check_at(m, escape)) << name;
                }
            }
        }
    }
    // the random sample covers the main branches
    for (const char* id : {"D", "D-", "F", "^v"}) {
        EXPECT_GT(seen[id], 0) << id;
    }
}

TEST(StrategyProperties, StateFreeUnderShuffledCallOrder) {
    auto pts = sample_points(4, 33);
    auto eval_all = [](const std::vector<std::pair<std::string, Point>>& v) {
        std::map<std::string, std::string> out;
        for (const auto& [name, x] : v) {
            std::string key = name + format_point(x);
            try {
                const auto s = strategy_step(Strategy::zigzag_parallel, make_model(name), x, {});
                out[key] = s.identifier + format_point(s.next);
            } catch (const SingularHessianError&) {
                out[key] = "singular";
            }
        }
        return out;
    };
    const auto first = eval_all(pts);
    std::mt19937 shuffle_rng(5);
    std::shuffle(pts.begin(), pts.end(), shuffle_rng);
    EXPECT_EQ(first, eval_all(pts));
}
