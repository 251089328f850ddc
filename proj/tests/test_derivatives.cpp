#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace dnt;

TEST(UniqueThirdCount, SmallDimensions) {
    EXPECT_EQ(unique_third_count(1), 1);
    EXPECT_EQ(unique_third_count(2), 4);
    EXPECT_EQ(unique_third_count(5), 35);
    EXPECT_EQ(unique_third_count(10), 220);
    EXPECT_THROW(unique_third_count(0), std::invalid_argument);
}

TEST(ObjectiveModel, RejectsWrongDimension) {
    const auto m = make_model("Himmelblau");
    EXPECT_THROW(m(Vector::Zero(3)), std::invalid_argument);
}

TEST(FdOracles, QuadraticIsExactUpToRounding) {
    Matrix c(2, 2);
    c << 3, 1, 1, 2;
    const auto m = quadratic(c, point2(0.5, -1));
    const Point x = point2(1.2, 0.7);
    EXPECT_LT(rel_err(fd_gradient(m, x), m(x).gradient), 1e-9);
    EXPECT_LT(rel_err(fd_hessian(m, x, 1e-3), c), 1e-7);
    for (const auto& t : fd_third(m, x)) {
        EXPECT_LT(t.cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(FdOracles, NonFiniteProbeRaises) {
    ObjectiveModel bad;
    bad.dimension = 1;
    bad.name = "log";
    bad.eval = [](const Point& x) {
        DerivativeBundle b = make_bundle(1);
        b.value = std::log(x(0));
        return b;
    };
    Point x(1);
    x << 0.0;
    EXPECT_THROW(fd_gradient(bad, x), OracleFailure);
    EXPECT_THROW(fd_gradient(bad, x, -1.0), std::invalid_argument);
}

TEST(Derivatives, TensorsAreExactlySymmetric) {
    Rng rng(11);
    for (const auto& p : presets()) {
        const auto m = make_model(p);
        for (int s = 0; s < 20; ++s) {
            const auto b = m(random_in(p.window, rng));
            EXPECT_EQ(b.hessian(0, 1), b.hessian(1, 0)) << p.name;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    for (int k = 0; k < 2; ++k) {
                        EXPECT_EQ(b.third[k](i, j), b.third[i](k, j)) << p.name;
                        EXPECT_EQ(b.third[k](i, j), b.third[k](j, i)) << p.name;
                    }
                }
            }
        }
    }
}

TEST(Derivatives, AnalyticMatchesFiniteDifferences) {
    Rng rng(5);
    for (const auto& p : presets()) {
        const auto m = make_model(p);
        for (int s = 0; s < 20; ++s) {
            const Point x = random_in(p.window, rng);
            const auto b = m(x);
            EXPECT_LT(rel_err(b.gradient, fd_gradient(m, x)), 1e-4) << p.name;
            EXPECT_LT(rel_err(b.hessian, fd_hessian(m, x)), 1e-4) << p.name;
            EXPECT_LT(rel_err(b.third, fd_third(m, x)), 1e-4) << p.name;
        }
    }
}

TEST(Rotated, TransportsAllDerivatives) {
    Rng rng(3);
    const auto base = make_model("Rosenbrock-wide");
    const Matrix r = random_rotation(2, rng);
    const auto m = rotated(base, r);
    for (int s = 0; s < 10; ++s) {
        const Point x = point2(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const auto b = m(x);
        EXPECT_NEAR(b.value, base.value(r * x), 1e-12 * std::max(1.0, std::abs(b.value)));
        EXPECT_LT(rel_err(b.gradient, fd_gradient(m, x)), 1e-6);
        EXPECT_LT(rel_err(b.hessian, fd_hessian(m, x)), 1e-4);
        EXPECT_LT(rel_err(b.third, fd_third(m, x)), 1e-6);
    }
    EXPECT_THROW(rotated(base, Matrix::Identity(3, 3)), std::invalid_argument);
}
