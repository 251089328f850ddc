#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace dnt;

TEST(EigenProblem, SpectrumAndOrthogonality) {
    const auto ep = build_eigen_problem(10, 42);
    EXPECT_LT((ep.q.transpose() * ep.q - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10);
    Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(ep.c).eigenvalues();
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(ev(i), std::ldexp(1.0, i), 1e-8 * std::ldexp(1.0, i));
    }
    EXPECT_NEAR(ev.maxCoeff(), 512.0, 512e-8);
    EXPECT_EQ(build_eigen_problem(10, 42).c, ep.c);
    EXPECT_NE(build_eigen_problem(10, 43).c, ep.c);
    EXPECT_THROW(build_eigen_problem(1, 1), std::invalid_argument);
}

TEST(EigenModel, DiagonalEigenpairsAreStationary) {
    const int n = 5;
    const auto ep = eigen_problem_from(Matrix(doubling_spectrum(n).asDiagonal()));
    const auto m = eigen_model(ep);
    for (int k = 0; k < n; ++k) {
        Point z = Point::Zero(n + 1);
        z(k) = 1.0;
        z(n) = std::ldexp(1.0, k);
        EXPECT_EQ(m(z).gradient.norm(), 0.0);
    }
}

TEST(EigenModel, MatchesOraclesAndGeneralLagrangian) {
    const auto ep = build_eigen_problem(6, 7);
    const auto m = eigen_model(ep);
    const auto general = lagrangian_model(eigen_constrained(ep));
    for (int s = 0; s < 10; ++s) {
        const Point z = sample_start(ep, 100 + s);
        const auto b = m(z);
        EXPECT_LT(rel_err(b.hessian, fd_hessian(m, z)), 1e-4);
        EXPECT_LT(rel_err(b.third, fd_third(m, z)), 1e-6);
        const auto g = general(z);
        EXPECT_NEAR(g.value, b.value, 1e-9 * std::max(1.0, std::abs(b.value)));
        EXPECT_LT(rel_err(g.gradient, b.gradient), 1e-12);
        EXPECT_LT(rel_err(g.hessian, b.hessian), 1e-12);
        EXPECT_LT(rel_err(g.third, b.third), 1e-12);
    }
}

TEST(EigenModel, ThirdStackSparsity) {
    const int n = 4;
    const auto b = eigen_model(build_eigen_problem(n, 1))(sample_start(build_eigen_problem(n, 1), 2));
    for (int k = 0; k < n; ++k) {
        Matrix expect = Matrix::Zero(n + 1, n + 1);
        expect(k, n) = expect(n, k) = -1.0;
        EXPECT_EQ(b.third[k], expect);
    }
    Matrix expect = Matrix::Zero(n + 1, n + 1);
    expect.topLeftCorner(n, n) = -Matrix::Identity(n, n);
    EXPECT_EQ(b.third[n], expect);
}

TEST(Lagrangian, BorderedHessianStructure) {
    // f = x0^2 x1 + x2^3 on the unit sphere and a plane
    ConstrainedProblem p;
    p.n = 3;
    p.m = 2;
    p.objective.dimension = 3;
    p.objective.name = "cubic";
    p.objective.eval = [](const Point& x) {
        DerivativeBundle b = make_bundle(3);
        b.value = x(0) * x(0) * x(1) + x(2) * x(2) * x(2);
        b.gradient << 2 * x(0) * x(1), x(0) * x(0), 3 * x(2) * x(2);
        b.hessian << 2 * x(1), 2 * x(0), 0, 2 * x(0), 0, 0, 0, 0, 6 * x(2);
        b.third[0](0, 1) = b.third[0](1, 0) = 2;
        b.third[1](0, 0) = 2;
        b.third[2](2, 2) = 6;
        return b;
    };
    p.constraints.push_back(quadratic_form_model(Matrix::Identity(3, 3), 1.0, "sphere", -1.0));
    ObjectiveModel lin;
    lin.dimension = 3;
    lin.name = "plane";
    lin.eval = [](const Point& x) {
        DerivativeBundle b = make_bundle(3);
        b.value = x(0) + 2 * x(1) - x(2);
        b.gradient << 1, 2, -1;
        return b;
    };
    p.constraints.push_back(lin);
    const auto m = lagrangian_model(p);
    Rng rng(6);
    for (int s = 0; s < 10; ++s) {
        Point z(5);
        for (int i = 0; i < 5; ++i) z(i) = rng.uniform(-1, 1);
        const auto b = m(z);
        EXPECT_EQ(b.hessian.bottomRightCorner(2, 2), Matrix::Zero(2, 2));
        EXPECT_LT(rel_err(b.gradient, fd_gradient(m, z)), 1e-6);
        EXPECT_LT(rel_err(b.hessian, fd_hessian(m, z)), 1e-4);
        EXPECT_LT(rel_err(b.third, fd_third(m, z)), 1e-6);
    }
    p.m = 4;
    EXPECT_THROW(lagrangian_model(p), std::invalid_argument);
}

TEST(Lagrangian, QuadraticObjectiveLinearConstraintIsConstant) {
    ConstrainedProblem p;
    p.n = 2;
    p.m = 1;
    p.objective = quadratic(Matrix::Identity(2, 2), point2(1, 2));
    ObjectiveModel lin;
    lin.dimension = 2;
    lin.name = "line";
    lin.eval = [](const Point& x) {
        DerivativeBundle b = make_bundle(2);
        b.value = x(0) - x(1);
        b.gradient << 1, -1;
        return b;
    };
    p.constraints.push_back(lin);
    const auto m = lagrangian_model(p);
    Point z1(3), z2(3);
    z1 << 0.1, 0.2, 0.3;
    z2 << -4, 5, 9;
    EXPECT_EQ(m(z1).hessian, m(z2).hessian);
}

TEST(SampleStart, RangesSeedsAndMean) {
    const auto ep = build_eigen_problem(10, 1);
    EXPECT_EQ(sample_start(ep, 9), sample_start(ep, 9));
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Point z = sample_start(ep, derive_seed(77, i));
        ASSERT_LE(z.head(10).cwiseAbs().maxCoeff(), 1.0);
        ASSERT_GE(z(10), 0.0);
        ASSERT_LE(z(10), 100.0);
        sum += z(10);
    }
    EXPECT_NEAR(sum / draws, 50.0, 1.0);
}

TEST(Rng, UniformRangeOverManyDraws) {
    Rng rng(123);
    for (int i = 0; i < 1000000; ++i) {
        const double u = rng.uniform(-1.0, 1.0);
        ASSERT_GE(u, -1.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Indefiniteness, BorderedHessianHasBothSigns) {
    const auto ep = build_eigen_problem(10, 5);
    const auto m = eigen_model(ep);
    Vector u(1);
    u << 0.7;
    for (int s = 0; s < 20; ++s) {
        const auto r = indefiniteness_check(m(sample_start(ep, s)).hessian, 1, u);
        ASSERT_TRUE(r.has_value());
        EXPECT_TRUE(*r);
    }
    // at a stationary point (eigenpair of C)
    Point z(11);
    z.head(10) = ep.q.col(3);
    z(10) = ep.spectrum(3);
    const auto r = indefiniteness_check(m(z).hessian, 1, u);
    ASSERT_TRUE(r.has_value());
    EXPECT_TRUE(*r);
}

TEST(Indefiniteness, SingularAndInvalidInputs) {
    const Matrix zero = Matrix::Zero(3, 3);
    Vector u(1);
    u << 1;
    EXPECT_FALSE(indefiniteness_check(zero, 1, u).has_value());
    EXPECT_THROW(indefiniteness_check(Matrix::Identity(2, 2), 0, Vector()), std::invalid_argument);
    EXPECT_THROW(indefiniteness_check(Matrix::Identity(3, 3), 1, Vector::Zero(1)), std::invalid_argument);
}

TEST(EigenRuns, ConvergeToEigenpairsAsSaddles) {
    const auto ex = run_eigen_experiment(5, 4, 11);
    for (const auto& r : ex.runs) {
        ASSERT_TRUE(r.record.converged());
        EXPECT_LE(r.relative_error, 1e-6);
        EXPECT_NEAR(r.w_norm, 1.0, 1e-6);
        EXPECT_EQ(r.record.outcome, Outcome::saddle);
    }
}
