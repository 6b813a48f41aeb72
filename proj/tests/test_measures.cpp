#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tcilab/measures.hpp"
#include "tcilab/numeric/quadrature.hpp"

using namespace tcilab;

namespace {

std::vector<Measure1D> builtins() {
    return {exponential_symmetric(), exp_power(1.5), exp_power(2.0), exp_power(3.0),
            gaussian(),              gaussian(0.3, 0.5), cauchy(), one_sided_exp(2.0)};
}

double total_mass(const Measure1D& mu) {
    const Support s = mu.support();
    const double lo = std::isfinite(s.lo) ? s.lo : mu.quantile_log_lower(-40.0);
    const double hi = std::isfinite(s.hi) ? s.hi : mu.quantile_log_upper(-40.0);
    const double m = mu.median();
    numeric::QuadratureOptions o{1e-13, 1e-12, 8000};
    auto d = [&](double x) { return mu.density(x); };
    double v = numeric::integrate(d, lo, m, o).value + numeric::integrate(d, m, hi, o).value;
    if (!std::isfinite(s.lo)) v += std::exp(-40.0);
    if (!std::isfinite(s.hi)) v += std::exp(-40.0);
    return v;
}

}  // namespace

TEST(Measures, ExponentialClosedForm) {
    const Measure1D mu = exponential_symmetric();
    EXPECT_NEAR(mu.cdf(0.0), 0.5, 1e-15);
    EXPECT_NEAR(mu.cdf(std::log(2.0)), 0.75, 1e-14);
    for (double x : {0.1, 1.0, 5.0, 30.0}) {
        EXPECT_NEAR(mu.sf(x), 0.5 * std::exp(-x), 1e-15 + 1e-13 * std::exp(-x));
        EXPECT_NEAR(mu.cdf(-x), 0.5 * std::exp(-x), 1e-15 + 1e-13 * std::exp(-x));
    }
    EXPECT_NEAR(mu.log_sf(500.0), std::log(0.5) - 500.0, 1e-9);
}

TEST(Measures, Medians) {
    EXPECT_NEAR(gaussian().median(), 0.0, 1e-12);
    EXPECT_NEAR(gaussian(0.3, 0.5).median(), 0.3, 1e-10);
    EXPECT_NEAR(one_sided_exp(2.0).median(), std::log(2.0) / 2, 1e-10);
    for (const Measure1D& mu : builtins()) EXPECT_NEAR(mu.cdf(mu.median()), 0.5, 1e-10) << mu.name();
}

TEST(Measures, GaussianResidualTail) {
    const ResidualDistribution r = residual(gaussian(), 0.0, Side::plus);
    EXPECT_NEAR(r.tail(1.0), 0.317310507862914, 1e-10);
    EXPECT_DOUBLE_EQ(r.tail(0.0), 1.0);
}

TEST(Measures, RejectsBadParameters) {
    EXPECT_THROW(exp_power(0.3), std::invalid_argument);
    EXPECT_THROW(gaussian(0.0, -1.0), std::invalid_argument);
    EXPECT_THROW(one_sided_exp(0.0), std::invalid_argument);
}

TEST(Measures, FromPotential) {
    const Measure1D g = make_from_potential([](double x) { return x * x; });
    EXPECT_NEAR(g.log_normalizer(), std::log(std::sqrt(M_PI)), 1e-9);
    const Measure1D l = make_from_potential([](double x) { return std::abs(x); });
    EXPECT_NEAR(l.log_normalizer(), std::log(2.0), 1e-9);
    EXPECT_NEAR(l.sf(3.0), 0.5 * std::exp(-3.0), 1e-10);
    try {
        make_from_potential([](double x) { return -x; });
        FAIL() << "expected rejection";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("not a finite measure"), std::string::npos);
    }
}

TEST(Measures, TableMeasure) {
    std::vector<double> xs, vs;
    for (int i = -40; i <= 40; ++i) {
        xs.push_back(0.25 * i);
        vs.push_back(std::abs(0.25 * i));
    }
    const Measure1D t = make_from_table(xs, vs);
    EXPECT_NEAR(t.cdf(0.0), 0.5, 1e-6);
    EXPECT_NEAR(t.sf(2.0), 0.5 * std::exp(-2.0), 1e-3);

    const std::string path = ::testing::TempDir() + "v_table.csv";
    {
        std::ofstream f(path);
        f << "x,V\n";
        for (std::size_t i = 0; i < xs.size(); ++i) f << xs[i] << "," << vs[i] << "\n";
    }
    const Measure1D loaded = load_table(path);
    EXPECT_NEAR(loaded.sf(1.0), t.sf(1.0), 1e-12);
}

TEST(Measures, TableRejectsWrongSlope) {
    EXPECT_THROW(make_from_table({-1, 0, 1}, {1, 0, -1}), std::invalid_argument);
    EXPECT_THROW(make_from_table({0, 0, 1}, {1, 0, 1}), std::invalid_argument);
}

// property: every built-in has unit mass and quantile(cdf(x)) = x
TEST(MeasureProperties, MassAndQuantileRoundTrip) {
    for (const Measure1D& mu : builtins()) {
        if (mu.name() != "cauchy") EXPECT_NEAR(total_mass(mu), 1.0, 1e-9) << mu.name();
        const double lo = mu.quantile(1e-6), hi = mu.quantile(1 - 1e-6);
        for (int i = 0; i < 1000; ++i) {
            const double x = lo + (hi - lo) * (i + 0.5) / 1000;
            ASSERT_NEAR(mu.quantile(mu.cdf(x)), x, 1e-9 * std::max(1.0, std::abs(x))) << mu.name() << " x=" << x;
        }
    }
}

TEST(MeasureProperties, CauchyMassByCdf) {
    const Measure1D c = cauchy();
    EXPECT_NEAR(c.cdf(1.0) - c.cdf(-1.0), 0.5, 1e-10);
    EXPECT_NEAR(c.sf(1e6), 1.0 / (M_PI * 1e6), 1e-15);
}

TEST(MeasureProperties, CdfIncreasing) {
    for (const Measure1D& mu : builtins()) {
        const double lo = mu.quantile(1e-9), hi = mu.quantile(1 - 1e-9);
        double prev = -1.0;
        for (int i = 0; i <= 2000; ++i) {
            const double F = mu.cdf(lo + (hi - lo) * i / 2000);
            ASSERT_GT(F, prev) << mu.name();
            prev = F;
        }
    }
}

TEST(MeasureProperties, ExponentialMemoryless) {
    const Measure1D mu = exponential_symmetric();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = 0.3 * i;
        const ResidualDistribution r = residual(mu, x, Side::plus);
        for (int j = 0; j < 100; ++j) {
            const double h = 0.25 * j;
            worst = std::max(worst, std::abs(r.tail(h) - std::exp(-h)));
        }
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(MeasureProperties, ResidualTailsNonincreasing) {
    for (const Measure1D& mu : builtins()) {
        for (Side side : {Side::plus, Side::minus}) {
            const ResidualDistribution r = residual(mu, mu.quantile(side == Side::plus ? 0.75 : 0.25), side);
            EXPECT_DOUBLE_EQ(r.tail(0.0), 1.0);
            double prev = 1.0;
            for (int j = 1; j < 200; ++j) {
                const double t = r.tail(0.05 * j);
                ASSERT_LE(t, prev + 1e-15) << mu.name();
                prev = t;
            }
        }
    }
}

TEST(MeasureProperties, ResidualRejectsZeroMass) {
    EXPECT_THROW(residual(one_sided_exp(1.0), -1.0, Side::minus), std::invalid_argument);
}

TEST(StochasticDomination, Examples) {
    const std::vector<double> h = linear_grid(0.0, 10.0, 101);
    auto e1 = [](double t) { return std::exp(-t); };
    auto e2 = [](double t) { return std::exp(-2 * t); };
    const Verdict self = stochastically_dominated(e1, e1, h);
    EXPECT_TRUE(self.holds());
    EXPECT_EQ(decode_real(self.details["worst_margin"]), 0.0);
    EXPECT_TRUE(stochastically_dominated(e2, e1, h).holds());
    EXPECT_TRUE(stochastically_dominated(e1, e2, h).fails());
}

TEST(StochasticDomination, ReflexiveTransitive) {
    const std::vector<double> h = linear_grid(0.0, 8.0, 161);
    std::vector<TailFn> tails;
    for (const Measure1D& mu : builtins()) {
        const ResidualDistribution r = residual(mu, mu.median(), Side::plus);
        tails.push_back([r](double t) { return r.tail(t); });
    }
    const std::size_t n = tails.size();
    std::vector<std::vector<bool>> dom(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dom[i][j] = stochastically_dominated(tails[i], tails[j], h).holds();
        EXPECT_TRUE(dom[i][i]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (dom[i][j] && dom[j][k]) EXPECT_TRUE(dom[i][k]) << i << j << k;
}

TEST(LogConcave, Examples) {
    EXPECT_TRUE(is_log_concave(exponential_symmetric()).holds());
    EXPECT_TRUE(is_log_concave(gaussian()).holds());
    EXPECT_TRUE(is_log_concave(exp_power(3.0)).holds());
    EXPECT_TRUE(is_log_concave(cauchy()).fails());
}

// log-concave built-ins: mu_x^+ is dominated by mu_m^+
TEST(LogConcave, NbuDomination) {
    const std::vector<double> h = linear_grid(0.0, 10.0, 201);
    for (const Measure1D& mu : {gaussian(), exp_power(1.0), exp_power(1.5), exp_power(2.0), exp_power(3.0)}) {
        ASSERT_TRUE(is_log_concave(mu).holds());
        const double m = mu.median();
        const ResidualDistribution at_m = residual(mu, m, Side::plus);
        const double top = mu.quantile(1 - 1e-8);
        for (int i = 0; i < 64; ++i) {
            const ResidualDistribution rx = residual(mu, m + (top - m) * i / 63, Side::plus);
            const Verdict v = stochastically_dominated([&](double t) { return rx.tail(t); },
                                                       [&](double t) { return at_m.tail(t); }, h);
            ASSERT_TRUE(v.holds()) << mu.name() << " " << v.diagnostics;
        }
    }
}

TEST(Discrete, Invariants) {
    const DiscreteMeasure d = discretize(gaussian(), 64);
    ASSERT_EQ(d.size(), 64u);
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        s += d.weight(i);
        if (i > 0) EXPECT_GT(d.location(i), d.location(i - 1));
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NEAR(d.location(32), -d.location(31), 1e-9);
    EXPECT_THROW(DiscreteMeasure({1.0, 0.0}, {0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(DiscreteMeasure({0.0, 1.0}, {0.5, 0.6}), std::invalid_argument);
    EXPECT_THROW(discretize(gaussian(), 0), std::invalid_argument);
}

TEST(Sampling, DeterministicAndKolmogorov) {
    const Measure1D mu = exponential_symmetric();
    const std::vector<double> a = sample(mu, 1000000, 5);
    const std::vector<double> b = sample(mu, 1000000, 5);
    EXPECT_EQ(a, b);
    std::vector<double> s = a;
    std::sort(s.begin(), s.end());
    double ks = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double F = mu.cdf(s[i]);
        ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
    }
    EXPECT_LT(ks, 0.002);
    EXPECT_THROW(sample(mu, 0, 1), std::invalid_argument);
}

TEST(Grids, Shapes) {
    const auto g = geometric_grid(1e-3, 10.0, 5);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_NEAR(g.front(), 1e-3, 1e-15);
    EXPECT_NEAR(g.back(), 10.0, 1e-12);
    EXPECT_NEAR(g[2] / g[1], g[1] / g[0], 1e-12);
    const auto l = linear_grid(-1.0, 1.0, 3);
    EXPECT_EQ(l, (std::vector<double>{-1.0, 0.0, 1.0}));
}
