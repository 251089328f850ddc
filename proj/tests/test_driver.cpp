#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace dnt;

TEST(Classify, EigenvalueSigns) {
    EXPECT_EQ(classify(Matrix::Identity(3, 3)).outcome, Outcome::minimum);
    EXPECT_EQ(classify(-Matrix::Identity(3, 3)).outcome, Outcome::maximum);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = -1;
    const auto s = classify(d);
    EXPECT_EQ(s.outcome, Outcome::saddle);
    EXPECT_FALSE(s.degenerate);
    d(1, 1) = 1e-10;
    const auto g = classify(d);
    EXPECT_EQ(g.outcome, Outcome::saddle);
    EXPECT_TRUE(g.degenerate);
}

TEST(Run, QuadraticConvergesInOneStep) {
    const auto m = make_model("quadratic");
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
        const auto r = run(m, point2(rng.uniform(-2, 2), rng.uniform(-2, 2)), Strategy::plain);
        EXPECT_EQ(r.steps_taken, 1);
        EXPECT_EQ(r.outcome, Outcome::minimum);
        EXPECT_EQ(r.strategy_string, "N");
    }
}

TEST(Run, RosenbrockWideFromFarStart) {
    const auto r = run(make_model("Rosenbrock-wide"), point2(-10, 0), Strategy::plain);
    EXPECT_EQ(r.outcome, Outcome::minimum);
    EXPECT_LT((r.final_point() - point2(1, 1)).norm(), 1e-8);
}

TEST(Run, ZigzagReachesSaddleFromValleySide) {
    const auto r = run(make_model("Rosenbrock-wide-saddle"), point2(-1, 0.25), Strategy::zigzag_parallel);
    EXPECT_EQ(r.outcome, Outcome::saddle);
    EXPECT_LT((r.final_point() - point2(1, 1)).norm(), 1e-6);
}

TEST(Run, ValueSearchFailsOnSaddleVariant) {
    const auto r = run(make_model("Rosenbrock-wide-saddle"), point2(-1, 0.25), Strategy::explicit_value);
    EXPECT_EQ(r.outcome, Outcome::failure);
}

TEST(Run, InvariantsOverFixtures) {
    for (const auto& p : function_presets()) {
        const auto m = make_model(p);
        for (Strategy s : {Strategy::plain, Strategy::explicit_value, Strategy::zigzag, Strategy::zigzag_parallel}) {
            for (const auto& x : fixture_starts(p)) {
                const auto r = run(m, x, s);
                EXPECT_EQ(r.iterates.front(), x);
                EXPECT_EQ(r.steps_taken + 1, static_cast<int>(r.iterates.size()));
                EXPECT_LE(r.steps_taken, 100);
                EXPECT_EQ(r.identifiers.size(), static_cast<std::size_t>(r.steps_taken));
                EXPECT_EQ(r.sections_per_step.size(), static_cast<std::size_t>(r.steps_taken));
                if (r.converged()) {
                    EXPECT_LE(r.final_gradient_norm, 1e-5);
                }
                if (s == Strategy::plain) {
                    EXPECT_EQ(r.strategy_string, std::string(r.steps_taken, 'N'));
                }
            }
        }
    }
}

TEST(Run, Deterministic) {
    const auto m = make_model("Himmelblau");
    const auto a = run(m, point2(0.3, -4.1), Strategy::zigzag);
    const auto b = run(m, point2(0.3, -4.1), Strategy::zigzag);
    EXPECT_EQ(trajectory_line(0, "Himmelblau", Strategy::zigzag, a),
              trajectory_line(0, "Himmelblau", Strategy::zigzag, b));
}

TEST(Run, FailureModes) {
    const auto m = make_model("Rosenbrock-wide");
    const auto singular = run(m, point2(0, 0.05), Strategy::zigzag);
    EXPECT_EQ(singular.outcome, Outcome::failure);
    EXPECT_EQ(singular.steps_taken, 0);
    EXPECT_EQ(singular.diagnostic, "singular Hessian");

    RunLimits lim;
    lim.max_steps = 2;
    const auto limited = run(make_model("Rosenbrock-narrow"), point2(-1.5, 2.5), Strategy::zigzag, {}, lim);
    EXPECT_EQ(limited.steps_taken, 2);
    EXPECT_EQ(limited.outcome, Outcome::failure);

    EXPECT_THROW(run(m, point2(std::nan(""), 0), Strategy::plain), std::invalid_argument);
    EXPECT_THROW(run(m, Vector::Zero(3), Strategy::plain), std::invalid_argument);
}

TEST(Run, StartAtStationaryPointTakesNoStep) {
    const auto r = run(make_model("Himmelblau"), point2(3, 2), Strategy::zigzag_parallel);
    EXPECT_EQ(r.steps_taken, 0);
    EXPECT_EQ(r.outcome, Outcome::minimum);
}
