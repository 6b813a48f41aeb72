#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tcilab/criteria.hpp"

using namespace tcilab;

namespace {

// int_0^2 e^{u^2/4 - u} du + 2/e
constexpr double kKplusHalf = 1.8119178961684215;
// sup_{x >= 0} Fbar(x) int_0^x sqrt(2 pi) e^{t^2/2} dt
constexpr double kGaussianDplus = 0.47881289503772421;

std::vector<Measure1D> uniformly_continuous() {
    return {exponential_symmetric(), gaussian(), gaussian(1.0, 0.4), exp_power(1.5), exp_power(3.0),
            one_sided_exp(2.0)};
}

}  // namespace

TEST(Rearrangement, ExponentialIsIdentity) {
    const RearrangementMap rm = rearrangement(exponential_symmetric());
    for (int i = 0; i <= 600; ++i) {
        const double x = -30.0 + 0.1 * i;
        ASSERT_NEAR(rm.forward(x), x, 1e-9);
        ASSERT_NEAR(rm.inverse(x), x, 1e-9);
    }
}

TEST(Rearrangement, ZeroGoesToMedian) {
    for (const Measure1D& mu : {gaussian(0.3, 2.0), exp_power(1.5), cauchy(), one_sided_exp(0.5)}) {
        EXPECT_NEAR(rearrangement(mu).forward(0.0), mu.median(), 1e-9) << mu.name();
    }
}

TEST(Rearrangement, GaussianTails) {
    const RearrangementMap rm = rearrangement(gaussian());
    EXPECT_NEAR(rm.forward(30.0) / std::sqrt(60.0), 1.0, 0.05);
    EXPECT_NEAR(rm.forward(-30.0) / -std::sqrt(60.0), 1.0, 0.05);
}

TEST(Rearrangement, InverseRoundTrip) {
    for (const Measure1D& mu : {gaussian(), exp_power(3.0), cauchy(), one_sided_exp(2.0)}) {
        const RearrangementMap rm = rearrangement(mu);
        for (int i = 0; i <= 200; ++i) {
            const double s = -20.0 + 0.2 * i;
            ASSERT_NEAR(rm.inverse(rm.forward(s)), s, 1e-8) << mu.name();
        }
    }
}

// T pushes mu_1 onto mu
TEST(Rearrangement, PushForward) {
    const std::vector<double> xs = sample(exponential_symmetric(), 100000, 17);
    for (const Measure1D& mu : {exponential_symmetric(), exp_power(1.5), exp_power(2.0), exp_power(3.0),
                                gaussian(), cauchy(), one_sided_exp(2.0)}) {
        const RearrangementMap rm = rearrangement(mu, {1.0});
        std::vector<double> ys(xs.size());
        std::transform(xs.begin(), xs.end(), ys.begin(), [&](double x) { return rm.forward(x); });
        std::sort(ys.begin(), ys.end());
        double ks = 0.0;
        const double n = static_cast<double>(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double F = mu.cdf(ys[i]);
            ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
        }
        EXPECT_LT(ks, 0.01) << mu.name();
    }
}

TEST(Rearrangement, OmegaDeltaDuality) {
    for (const Measure1D& mu : uniformly_continuous()) {
        const RearrangementMap rm = rearrangement(mu);
        for (std::size_t i = 0; i < rm.h_grid.size(); i += 3) {
            const double h = rm.h_grid[i];
            const double d = rm.modulus(h);
            ASSERT_LE(rm.inverse_modulus(d), h + 1e-7) << mu.name() << " h=" << h;
            ASSERT_LE(h, rm.modulus(rm.inverse_modulus(h)) + 1e-7) << mu.name() << " h=" << h;
        }
    }
}

TEST(Rearrangement, TablesMatchModuli) {
    const RearrangementMap rm = rearrangement(gaussian());
    ASSERT_EQ(rm.h_grid.size(), 64u);
    EXPECT_EQ(rm.h_grid.front(), 0.0);
    EXPECT_EQ(rm.h_grid.back(), 16.0);
    for (std::size_t i = 1; i < rm.h_grid.size(); ++i) {
        EXPECT_DOUBLE_EQ(rm.delta[i], rm.modulus(rm.h_grid[i]));
        EXPECT_GE(rm.omega[i], rm.omega[i - 1]);
    }
}

TEST(Omega, ExponentialIsIdentity) {
    const std::vector<double> h = linear_grid(0.0, 12.0, 49);
    const OmegaBounds b = omega_bounds(rearrangement(exponential_symmetric()), h);
    EXPECT_EQ(b.plus[0], 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) {
        EXPECT_NEAR(b.plus[i], h[i], 1e-9);
        EXPECT_NEAR(b.minus[i], h[i], 1e-9);
        EXPECT_NEAR(b.lower[i], h[i] / 2, 1e-9);
    }
}

TEST(Omega, GaussianAttainedAtMedian) {
    const Measure1D g = gaussian();
    const std::vector<double> h = linear_grid(0.0, 6.0, 25);
    const OmegaBounds b = omega_bounds(rearrangement(g), h);
    for (std::size_t i = 0; i < h.size(); ++i) {
        EXPECT_NEAR(b.plus[i], -std::log(2.0 * g.sf(h[i])), 1e-9);
        if (i > 0) EXPECT_GE(b.plus[i], b.plus[i - 1]);
        if (i > 0) EXPECT_GE(b.lower[i], b.lower[i - 1]);
    }
}

TEST(Lipschitz, Exponential) {
    const Verdict v = lipschitz_check(exponential_symmetric());
    ASSERT_TRUE(v.holds());
    EXPECT_NEAR(v.at("A+"), 1.0, 1e-6);
    EXPECT_NEAR(v.at("A-"), 1.0, 1e-6);
    EXPECT_NEAR(v.at("a"), 1.0, 1e-6);
}

TEST(Lipschitz, Gaussian) {
    const Verdict v = lipschitz_check(gaussian());
    ASSERT_TRUE(v.holds());
    EXPECT_NEAR(v.at("A+"), std::sqrt(M_PI / 2), 1e-8);
    EXPECT_NEAR(v.at("A-"), std::sqrt(M_PI / 2), 1e-8);
    EXPECT_NEAR(decode_real(v.details["argmax+"]), 0.0, 1e-6);
}

TEST(Lipschitz, CauchyDiverges) {
    const Verdict v = lipschitz_check(cauchy());
    EXPECT_TRUE(v.fails());
    EXPECT_EQ(v.diagnostics, "A diverges");
}

// holds with a  =>  residual tails are below e^{-a h}
TEST(Lipschitz, ExponentialDomination) {
    for (const Measure1D& mu : {exponential_symmetric(), gaussian(0.5, 2.0), exp_power(1.5), exp_power(3.0)}) {
        const Verdict v = lipschitz_check(mu);
        ASSERT_TRUE(v.holds()) << mu.name();
        const double a = v.at("a");
        const double m = mu.median();
        const double top = mu.quantile(1 - 1e-9), bottom = mu.quantile(1e-9);
        for (int i = 0; i < 40; ++i) {
            const ResidualDistribution rp = residual(mu, m + (top - m) * i / 40, Side::plus);
            const ResidualDistribution rm = residual(mu, m - (m - bottom) * i / 40, Side::minus);
            for (int j = 0; j < 40; ++j) {
                const double h = 0.25 * j;
                ASSERT_LE(rp.tail(h), std::exp(-a * h) + 1e-9) << mu.name();
                ASSERT_LE(rm.tail(h), std::exp(-a * h) + 1e-9) << mu.name();
            }
        }
    }
}

TEST(Muckenhoupt, Values) {
    const MuckenhouptResult e = muckenhoupt(exponential_symmetric());
    EXPECT_NEAR(e.d_plus, 1.0, 1e-4);
    EXPECT_NEAR(e.d_minus, 1.0, 1e-4);
    const MuckenhouptResult g = muckenhoupt(gaussian());
    EXPECT_NEAR(g.d_plus, kGaussianDplus, 1e-7);
    EXPECT_NEAR(g.argmax_plus, 0.8993923729, 1e-3);
    const MuckenhouptResult c = muckenhoupt(cauchy());
    EXPECT_TRUE(std::isinf(c.d_plus));
    EXPECT_TRUE(std::isinf(c.d_minus));
}

TEST(Moments, ExponentialK) {
    const Measure1D mu = exponential_symmetric();
    EXPECT_NEAR(K_moment(mu, alpha1(), 0.5, Side::plus), kKplusHalf, 1e-8);
    EXPECT_NEAR(K_moment(mu, alpha1(), 0.5, Side::minus), kKplusHalf, 1e-8);
    // memoryless: the same at every anchor
    for (double x : {0.0, 1.0, 7.5}) EXPECT_NEAR(residual_moment(mu, alpha1(), 0.5, x, Side::plus), kKplusHalf, 1e-8);
    EXPECT_NEAR(K_moment(mu, alpha1(), std::ldexp(1.0, -20), Side::plus), 1.0, 1e-6);
    EXPECT_TRUE(std::isinf(K_moment(mu, alpha1(), 1.0, Side::plus)));
}

TEST(Moments, GaussianQuadratic) {
    const Measure1D g = gaussian();
    EXPECT_TRUE(std::isinf(K_moment(g, quadratic(), 1.0, Side::plus)));
    EXPECT_NEAR(moment_integral(g, quadratic(), 0.5), std::sqrt(2.0), 1e-8);
    EXPECT_TRUE(std::isinf(moment_integral(g, quadratic(), 1.0)));
}

TEST(TechLemma, Cases) {
    EXPECT_EQ(tech_lemma_scale(1.0, 2.0, std::exp(1.0), alpha1()), 1.0);
    // log K = log 1.8119 < 1 so alpha1^-1 is a square root: 1/(4 sqrt(0.5944)) = 0.324 > 1/4
    EXPECT_DOUBLE_EQ(tech_lemma_scale(1.0, 0.5, kKplusHalf, alpha1()), 0.25);
    // log 3 > 1, linear branch of alpha1^-1
    EXPECT_NEAR(tech_lemma_scale(1.0, 0.5, 3.0, alpha1()), 1.0 / (4.0 * std::log(3.0)), 1e-15);
    EXPECT_NEAR(tech_lemma_scale(1.0, 2.0, 20.0, alpha1()), 1.0 / std::log(20.0), 1e-12);
    EXPECT_EQ(tech_lemma_scale(0.3, 2.0, 0.9, alpha1()), 0.3);
}

TEST(CharLip, Exponential) {
    const Verdict v = decide_strong_tci_lip(exponential_symmetric(), alpha1());
    ASSERT_TRUE(v.holds()) << v.diagnostics;
    EXPECT_EQ(v.at("b"), 0.5);
    EXPECT_NEAR(v.at("K+"), kKplusHalf, 1e-8);
    EXPECT_NEAR(v.at("a0"), 1.0, 1e-6);
    EXPECT_DOUBLE_EQ(v.at("a"), 0.25);
    EXPECT_DOUBLE_EQ(v.at("scale"), 0.25 / 72.0);
}

TEST(CharLip, CauchyFails) {
    const Verdict v = decide_strong_tci_lip(cauchy(), alpha1());
    EXPECT_TRUE(v.fails());
    for (const auto& row : v.details["b_scan"]) {
        EXPECT_EQ(row["K+"], "inf");
    }
    EXPECT_EQ(v.details["b_scan"].size(), 21u);
}

TEST(CharLip, SuperExponentialCostFails) {
    const CostFunction c = spliced("exp_square", [](double t) { return std::exp(t * t) - 1.0; });
    ASSERT_TRUE(c.in_class_A());
    EXPECT_TRUE(decide_strong_tci_lip(gaussian(), c).fails());
}

TEST(CharLip, RejectsCostOutsideClassA) {
    EXPECT_EQ(decide_strong_tci_lip(gaussian(), absolute()).status, Status::inconclusive);
}

TEST(CharLogConcave, Gaussian) {
    const Verdict v = decide_strong_tci_logconcave(gaussian(), quadratic());
    ASSERT_TRUE(v.holds()) << v.diagnostics;
    EXPECT_EQ(v.at("b"), 0.5);
    EXPECT_NEAR(v.at("moment"), std::sqrt(2.0), 1e-8);
    EXPECT_DOUBLE_EQ(v.at("a"), 0.25);
    const Verdict w = decide_strong_tci_lip(gaussian(), quadratic());
    EXPECT_EQ(v.status, w.status);
}

TEST(CharLogConcave, ExpPowerMatched) {
    const double moments[] = {1.1977780876388457, 1.2882731077805308, 1.1547005383792515};
    int i = 0;
    for (double p : {1.0, 1.5, 2.0}) {
        const Verdict v = decide_strong_tci_logconcave(exp_power(p), theta_p(p));
        ASSERT_TRUE(v.holds()) << p << " " << v.diagnostics;
        EXPECT_NEAR(v.at("moment"), moments[i++], 1e-8) << p;
    }
}

TEST(CharLogConcave, CauchyIsNotLogConcave) {
    EXPECT_EQ(decide_strong_tci_logconcave(cauchy(), alpha1()).status, Status::inconclusive);
}

// a scale that the criteria certify must pass the integrability bounds
TEST(CharProperties, NecessityAtReturnedScale) {
    struct Case {
        Measure1D mu;
        CostFunction alpha;
    };
    const std::vector<Case> cases = {{exponential_symmetric(), alpha1()},
                                     {gaussian(), quadratic()},
                                     {exp_power(1.5), theta_p(1.5)},
                                     {gaussian(0.0, 3.0), alpha1()}};
    for (const Case& c : cases) {
        for (const Verdict& v : {decide_strong_tci_lip(c.mu, c.alpha), decide_strong_tci_logconcave(c.mu, c.alpha)}) {
            ASSERT_TRUE(v.holds()) << c.mu.name() << " " << v.diagnostics;
            const double s = v.at("scale");
            const double m = c.mu.median();
            const double top = c.mu.quantile(1 - 1e-8);
            for (int i = 0; i < 32; ++i) {
                const double x = m + (top - m) * i / 31;
                ASSERT_LE(residual_moment(c.mu, c.alpha, s, x, Side::plus), 1.0 / c.mu.cdf(x) + 1.0);
            }
            const double sym = 1.0 / (c.mu.sf(0.0) * c.mu.cdf(0.0)) - 1.0;
            ASSERT_LE(moment_integral(c.mu, c.alpha, s), sym);
        }
    }
}

TEST(SuffCondition, Examples) {
    const Verdict g = suff_condition(exp_power(2.0), quadratic());
    EXPECT_TRUE(g.holds()) << g.diagnostics;
    const Verdict p = suff_condition(exp_power(1.5), theta_p(1.5));
    EXPECT_TRUE(p.holds()) << p.diagnostics;
    const CostFunction quartic = spliced("x^4", [](double t) { return t * t * t * t; },
                                         [](double t) { return 4 * t * t * t; });
    const Verdict q = suff_condition(exp_power(2.0), quartic);
    EXPECT_TRUE(q.fails()) << q.diagnostics;
    EXPECT_TRUE(suff_condition(cauchy(), alpha1()).fails());
}

TEST(SuffCondition, KinkIsInconclusive) {
    const Verdict v = suff_condition(exponential_symmetric(), alpha1());
    EXPECT_EQ(v.status, Status::inconclusive);
    EXPECT_NEAR(v.details["kink_at_1"].get<double>(), 0.5, 1e-6);
}

TEST(IntEquiv, Ratios) {
    const std::vector<double> probes = {0.5, 1.0, 2.0, 5.0, 10.0, 50.0};
    for (double r : int_equiv_ratio([](double x) { return x; }, [](double) { return 1.0; }, probes)) {
        EXPECT_NEAR(r, 1.0, 1e-10);
    }
    const auto sq = int_equiv_ratio([](double x) { return x * x; }, [](double x) { return 2 * x; }, {1.0, 10.0});
    EXPECT_NEAR(sq[0], 0.75787215614131211, 1e-9);
    EXPECT_NEAR(sq[1], 0.99507318782446975, 1e-9);
    // below 0.99 at x = 10: the asymptotics are slow for x^1.5
    const auto p15 = int_equiv_ratio([](double x) { return std::pow(x, 1.5); },
                                     [](double x) { return 1.5 * std::sqrt(x); }, {10.0});
    EXPECT_NEAR(p15[0], 0.98987377486060144, 1e-9);
    const auto div =
        int_equiv_ratio([](double x) { return 0.5 * std::log(x); }, [](double x) { return 0.5 / x; }, {2.0});
    EXPECT_TRUE(std::isnan(div[0]));
}

TEST(TildeV, Quadratic) {
    const TildePotential t = lsi_tilde_potential([](double x) { return x * x; }, [](double x) { return 2 * x; });
    ASSERT_TRUE(t.verdict.holds());
    EXPECT_NEAR(t.a0, 1.0, 1e-12);
    for (double x = 0.0; x < 10.0; x += 0.3) EXPECT_NEAR((*t.tilde_v)(x), x * x, 1e-9 * std::max(1.0, x * x));
}

TEST(TildeV, Absolute) {
    const TildePotential t = lsi_tilde_potential([](double x) { return std::abs(x); }, [](double) { return 1.0; });
    ASSERT_TRUE(t.verdict.holds());
    EXPECT_NEAR(t.a0, 2.0, 1e-12);
    EXPECT_NEAR((*t.tilde_v)(1.0), 1.0, 1e-12);
    for (double x = 1.0; x < 10.0; x += 0.7) EXPECT_NEAR((*t.tilde_v)(x), 2 * x - 1, 1e-9);
}

TEST(TildeV, FromMeasureAndUnbracketed) {
    const TildePotential t = lsi_tilde_potential(exp_power(3.0));
    ASSERT_TRUE(t.verdict.holds());
    EXPECT_NEAR(t.a0, std::pow(2.0 / 3.0, 1.0 / 3.0), 1e-9);
    EXPECT_NEAR((*t.tilde_v)(1.0), 1.0, 1e-12);
    const TildePotential u = lsi_tilde_potential([](double x) { return std::log1p(x * x); },
                                                 [](double x) { return 2 * x / (1 + x * x); });
    EXPECT_EQ(u.verdict.status, Status::inconclusive);
}

TEST(Skewed, Costs) {
    const CostFunction base = alpha1().scaled(1.0 / 36.0);
    const SkewedCost e = skewed_cost(rearrangement(exponential_symmetric()), base);
    for (double y : {-3.0, 0.0, 2.5}) {
        EXPECT_NEAR(e(y, 1.0), base(y - 1.0), 1e-12);
        EXPECT_EQ(e(y, y), 0.0);
    }
    const Measure1D g = gaussian();
    const SkewedCost s = skewed_cost(rearrangement(g), base);
    // T^-1(x) = -log(2 Fbar(x)) above the median
    const double direct = base(-std::log(2.0 * g.sf(3.0)) - 0.0);
    EXPECT_NEAR(s(0.0, 3.0), direct, 1e-12);
    EXPECT_NEAR(s(3.0, 0.0), direct, 1e-12);
}

TEST(Skewed, LowerBoundByOmega) {
    const CostFunction a1 = alpha1();
    for (const Measure1D& mu : {gaussian(), exp_power(3.0), one_sided_exp(1.0)}) {
        const RearrangementMap rm = rearrangement(mu);
        const SkewedCost s = skewed_cost(rm, a1.scaled(1.0 / 36.0));
        for (std::size_t i = 0; i < rm.s_grid.size(); i += 40) {
            const double y1 = rm.forward(rm.s_grid[i]);
            for (double h : {0.1, 0.5, 1.0, 3.0}) {
                ASSERT_GE(s(y1, y1 + h), a1(rm.inverse_modulus(h)) / 36.0 - 1e-12) << mu.name();
            }
        }
    }
}

TEST(SideGrid, Shape) {
    const std::vector<double> g = side_grid(gaussian(), Side::plus);
    ASSERT_EQ(g.size(), 513u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    EXPECT_NEAR(g.back(), gaussian().quantile_log_upper(std::log(1e-10)), 1e-9);
    const std::vector<double> l = side_grid(gaussian(), Side::minus);
    EXPECT_NEAR(l.back(), -g.back(), 1e-9);
}
