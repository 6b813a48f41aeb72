#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "tcilab/costs.hpp"

using namespace tcilab;

namespace {

std::vector<CostFunction> convex_builtins() {
    return {quadratic(), theta_p(1.0), theta_p(1.5), theta_p(2.0), theta_p(3.0), alpha_p(2.0),
            alpha_p(3.0), talagrand_gamma(0.5), absolute()};
}

std::vector<CostFunction> class_a_builtins() {
    return {alpha1(), alpha_p(1.5), alpha_p(2.0), theta_p(1.0), theta_p(1.5), theta_p(2.0), theta_p(3.0)};
}

}  // namespace

TEST(Costs, Alpha1Values) {
    const CostFunction a = alpha1();
    EXPECT_DOUBLE_EQ(a(0.5), 0.25);
    EXPECT_DOUBLE_EQ(a(2.0), 2.0);
    EXPECT_DOUBLE_EQ(a(-2.0), 2.0);
    EXPECT_DOUBLE_EQ(a(0.0), 0.0);
    EXPECT_TRUE(a.in_class_A());
    EXPECT_FALSE(a.convex());
}

TEST(Costs, Theta2IsSquare) {
    const CostFunction t = theta_p(2.0);
    for (double x = -20; x <= 20; x += 0.37) EXPECT_NEAR(t(x), x * x, 1e-12 * std::max(1.0, x * x));
}

TEST(Costs, MaureyDominatesScaledAlpha1) {
    const CostFunction m = maurey_tilde(), a = alpha1();
    for (int i = 0; i <= 4000; ++i) {
        const double x = 0.01 * i;
        ASSERT_GE(m(x), a(x) / 36.0 - 1e-15) << x;
    }
}

TEST(Costs, Flags) {
    EXPECT_TRUE(quadratic().convex());
    EXPECT_TRUE(theta_p(1.5).convex());
    EXPECT_TRUE(theta_p(1.5).in_class_A());
    EXPECT_FALSE(absolute().in_class_A());
    EXPECT_TRUE(talagrand_gamma(0.5).convex());
    EXPECT_THROW(alpha_p(0.5), std::invalid_argument);
    EXPECT_THROW(theta_p(0.9), std::invalid_argument);
    EXPECT_THROW(talagrand_gamma(1.0), std::invalid_argument);
}

TEST(Costs, GammaFormula) {
    const CostFunction g = talagrand_gamma(0.25);
    const double x = 3.0;
    EXPECT_NEAR(g(x), 3.0 * (std::exp(-0.75) - 1.0 + 0.75), 1e-14);
}

TEST(ClassA, Examples) {
    EXPECT_TRUE(validate_class_A(alpha1()).holds());
    const Verdict abs = validate_class_A(absolute());
    EXPECT_TRUE(abs.fails());
    EXPECT_EQ(abs.details["condition"], "quadratic near 0");
    const CostFunction root = spliced("sqrt", [](double t) { return std::sqrt(t); });
    const Verdict r = validate_class_A(root);
    EXPECT_TRUE(r.fails());
    EXPECT_EQ(r.details["condition"], "superadditivity");
}

TEST(ClassA, SuperadditiveLinearLowerBound) {
    // alpha(t) >= alpha(1) (t - 1)
    for (const CostFunction& a : class_a_builtins()) {
        ASSERT_TRUE(a.in_class_A()) << a.name();
        for (int i = 0; i <= 6400; ++i) {
            const double t = 0.01 * i;
            ASSERT_GE(a(t), a(1.0) * (t - 1.0) - 1e-12) << a.name() << " t=" << t;
        }
    }
}

TEST(ClassV, Checks) {
    EXPECT_TRUE(validate_class_V([](double x) { return x * x; }, [](double x) { return 2 * x; }).holds());
    EXPECT_TRUE(
        validate_class_V([](double x) { return x * x; }, [](double x) { return 2 * x; }, -1.0).holds());
    // e^x: f''/f'^2 = e^{-x} -> 0
    EXPECT_TRUE(validate_class_V([](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }).holds());
    // log x: f''/f'^2 = -1
    EXPECT_TRUE(validate_class_V([](double x) { return std::log(x); }, [](double x) { return 1 / x; }).fails());
}

TEST(Inverse, RoundTrip) {
    for (const CostFunction& a : {alpha1(), theta_p(1.5), maurey_tilde(), talagrand_gamma(0.3), alpha_p(3.0)}) {
        for (int i = 0; i <= 400; ++i) {
            const double t = 0.05 * i;
            ASSERT_NEAR(a.inverse(a(t)), t, 1e-9 * std::max(1.0, t)) << a.name() << " t=" << t;
        }
    }
}

TEST(Conjugate, ClosedForms) {
    const CostFunction q = quadratic();
    for (double y : {0.0, 0.5, 1.0, 3.0, -7.0}) EXPECT_NEAR(q.conjugate(y), y * y / 4, 1e-10);
    EXPECT_EQ(alpha1().conjugate(0.0), 0.0);
    const CostFunction t1 = theta_p(1.0);
    EXPECT_TRUE(std::isinf(t1.conjugate(2.5)));
    EXPECT_TRUE(std::isinf(t1.conjugate(-3.0)));
    EXPECT_NEAR(t1.conjugate(1.0), 0.25, 1e-10);
}

TEST(Conjugate, OrderReversing) {
    // x^2 <= theta_{1.5} pointwise fails; use x^2/2 <= x^2
    const CostFunction small = quadratic().scaled(0.5), big = quadratic();
    for (int i = -40; i <= 40; ++i) {
        const double y = 0.25 * i;
        EXPECT_GE(small.conjugate(y), big.conjugate(y) - 1e-10);
    }
    const CostFunction a = theta_p(3.0), b = theta_p(3.0).scaled(2.0);
    for (int i = 0; i <= 40; ++i) EXPECT_GE(a.conjugate(0.5 * i), b.conjugate(0.5 * i) - 1e-9);
}

TEST(Conjugate, YoungInequality) {
    for (const CostFunction& a : convex_builtins()) {
        for (int i = -30; i <= 30; ++i) {
            const double x = 0.2 * i;
            for (int j = -30; j <= 30; ++j) {
                const double y = 0.2 * j;
                const double c = a.conjugate(y);
                if (std::isinf(c)) continue;
                ASSERT_LE(x * y, a(x) + c + 1e-9) << a.name() << " x=" << x << " y=" << y;
            }
        }
    }
}

TEST(Conjugate, BiconjugateBelow) {
    const CostFunction a = alpha1();
    for (int i = 0; i <= 30; ++i) {
        const double x = 0.2 * i;
        double best = 0.0;
        for (int j = 0; j <= 100; ++j) {
            const double y = 0.01 * j;
            best = std::max(best, x * y - a.conjugate(y));
        }
        EXPECT_LE(best, a(x) + 1e-9);
    }
}

TEST(Scaling, EquivalenceConstant) {
    const CostFunction t = theta_p(2.0);
    EXPECT_DOUBLE_EQ(scaling_equivalence_constant(t, 1.0, 1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(scaling_equivalence_constant(t, 2.5, 1.0, 1.0), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(scaling_equivalence_constant(t, 1.0, 4.0, 2.0), 0.5);
    // theta(kx) >= k theta(x) fails for sqrt-like growth
    const CostFunction root = spliced("sqrt", [](double s) { return std::sqrt(s); });
    EXPECT_THROW(scaling_equivalence_constant(root, 1.0, 1.0), std::invalid_argument);
}

TEST(Scaling, Scaled) {
    const CostFunction a = alpha1().scaled(1.0 / 36.0, 2.0);
    EXPECT_NEAR(a(3.0), 6.0 / 36.0, 1e-15);
    EXPECT_NEAR(a.inverse(a(3.0)), 3.0, 1e-12);
    EXPECT_THROW(alpha1().scaled(0.0), std::invalid_argument);
}

TEST(Kink, AtSplice) {
    EXPECT_NEAR(kink(alpha1(), 1.0), 0.5, 1e-6);
    EXPECT_NEAR(kink(theta_p(1.5), 1.0), 0.0, 1e-6);
    EXPECT_NEAR(kink(quadratic(), 2.0), 0.0, 1e-6);
}

TEST(Table, Costs) {
    std::vector<double> t, v;
    for (int i = 0; i <= 80; ++i) {
        t.push_back(0.1 * i);
        v.push_back(0.01 * i * i);
    }
    const CostFunction c = cost_from_table(t, v);
    EXPECT_NEAR(c(2.5), 6.25, 1e-9);
    EXPECT_THROW(cost_from_table({0.5, 1.0}, {0.0, 1.0}), std::invalid_argument);
    const std::string path = ::testing::TempDir() + "cost_table.csv";
    {
        std::ofstream f(path);
        f << "t,alpha\n";
        for (std::size_t i = 0; i < t.size(); ++i) f << t[i] << "," << v[i] << "\n";
    }
    EXPECT_NEAR(load_cost_table(path)(3.3), 3.3 * 3.3, 1e-9);
}

TEST(Builtin, Dispatch) {
    EXPECT_EQ(builtin_cost(BuiltinCost::alpha1).name(), "alpha1");
    EXPECT_DOUBLE_EQ(builtin_cost(BuiltinCost::theta_p, 2.0)(3.0), 9.0);
}
