#include <gtest/gtest.h>

#include <cmath>

#include "tcilab/criteria.hpp"
#include "tcilab/verify.hpp"

using namespace tcilab;

namespace {

CostFunction mt_cost() { return alpha1().scaled(1.0 / 36.0); }

DualCheckOptions few(std::size_t trials) {
    DualCheckOptions o;
    o.trials = trials;
    return o;
}

}  // namespace

TEST(Dual, ZeroFunctionGivesOne) {
    const DualCells cells = dual_cells(exponential_symmetric(), mt_cost(), 1.0);
    const std::vector<double> zero(cells.mass.size(), 0.0);
    for (bool weak : {false, true}) {
        const DualProduct p = dual_product(cells, zero, weak);
        EXPECT_NEAR(p.upper, 1.0, 1e-12);
        EXPECT_NEAR(p.lower, 1.0, 1e-12);
    }
}

TEST(Dual, CellsCoverTheLine) {
    const DualCells c = dual_cells(gaussian(), quadratic(), 0.5);
    double total = 0.0;
    for (double m : c.mass) total += m;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_TRUE(std::isinf(c.lo.front()));
    EXPECT_TRUE(std::isinf(c.hi.back()));
    for (std::size_t i = 0; i + 1 < c.lo.size(); ++i) ASSERT_EQ(c.hi[i], c.lo[i + 1]);
    for (std::size_t i = 0; i < c.cost_far.size(); ++i) ASSERT_LE(c.cost_near[i], c.cost_far[i]);
}

TEST(Dual, LowerNeverAboveUpper) {
    const DualCells cells = dual_cells(exponential_symmetric(), alpha1(), 0.3);
    for (int p = 0; p < 8; ++p) {
        std::vector<double> phi(cells.mass.size());
        for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = std::sin(0.05 * k * (p + 1)) * p;
        const DualProduct d = dual_product(cells, phi, false);
        EXPECT_LE(d.lower, d.upper * (1 + 1e-12));
    }
}

TEST(Dual, ExponentialReferenceHolds) {
    const DualTestReport r = dual_check_strong(exponential_symmetric(), mt_cost(), 1.0, few(1500));
    EXPECT_FALSE(r.violation_found()) << r.worst_product << " " << r.worst_kind;
    EXPECT_GE(r.worst_product, 1.0 - 1e-12);
}

TEST(Dual, WeakFormHolds) {
    DualCheckOptions o = few(600);
    o.weak_form = true;
    EXPECT_FALSE(dual_check_strong(exponential_symmetric(), mt_cost(), 1.0, o).violation_found());
}

TEST(Dual, TooStrongCostRefuted) {
    const DualTestReport r =
        dual_check_strong(exponential_symmetric(), alpha1().scaled(10.0), 1.0, few(400));
    EXPECT_TRUE(r.violation_found());
    EXPECT_TRUE(r.certified());
    EXPECT_EQ(r.worst_kind, "staircase");
}

TEST(Dual, SameSeedSameReport) {
    const DualTestReport a = dual_check_strong(gaussian(), quadratic(), 0.2, few(300));
    const DualTestReport b = dual_check_strong(gaussian(), quadratic(), 0.2, few(300));
    EXPECT_EQ(a.worst_product, b.worst_product);
    EXPECT_EQ(a.worst_kind, b.worst_kind);
}

TEST(Integrability, SmallScaleHolds) {
    const Verdict v = integrability_check(exponential_symmetric(), alpha1(), 0.01);
    EXPECT_TRUE(v.holds()) << v.diagnostics;
    EXPECT_LT(v.at("worst_lhs"), 1.0);
    // symmetric: global bound 1/(1/2 1/2) - 1
    EXPECT_NEAR(v.details["global_bound"].get<double>(), 3.0, 1e-12);
}

TEST(Integrability, CauchyRefuted) {
    for (double a : {1.0, 0.01, 1e-4}) {
        EXPECT_TRUE(integrability_check(cauchy(), alpha1(), a).fails()) << a;
    }
}

TEST(Integrability, TooStrongRefuted) {
    EXPECT_TRUE(integrability_check(exponential_symmetric(), alpha1().scaled(10.0), 1.0).fails());
}

TEST(Refuters, Agree) {
    struct Case {
        Measure1D mu;
        CostFunction alpha;
        double a;
    };
    const std::vector<Case> cases = {
        {exponential_symmetric(), alpha1().scaled(10.0), 1.0},
        {exponential_symmetric(), alpha1(), 1.0},
        {gaussian(), quadratic(), 2.0},
        {exp_power(1.5), theta_p(1.5), 4.0},
        {cauchy(), alpha1(), 0.05},
    };
    for (const Case& c : cases) {
        const Verdict iv = integrability_check(c.mu, c.alpha, c.a);
        if (!iv.fails()) continue;
        const DualTestReport r = dual_check_strong(c.mu, c.alpha, c.a, few(800));
        EXPECT_TRUE(r.violation_found()) << c.mu.name() << " " << c.alpha.name() << " a=" << c.a;
    }
}

TEST(Marton, EqualSetsHold) {
    const IntervalSet A = {{-1.0, 2.0}};
    EXPECT_TRUE(marton_bound_check(exponential_symmetric(), mt_cost(), 1.0, {{A, A}}).holds());
    EXPECT_EQ(interval_gap(A, A), 0.0);
}

TEST(Marton, OppositeTails) {
    const Measure1D mu = exponential_symmetric();
    for (int t = 1; t <= 10; ++t) {
        const IntervalSet A = {{-kInf, -double(t)}}, B = {{double(t), kInf}};
        EXPECT_NEAR(interval_mass(mu, A), 0.5 * std::exp(-t), 1e-15);
        EXPECT_EQ(interval_gap(A, B), 2.0 * t);
        const Verdict v = marton_bound_check(mu, mt_cost(), 1.0, {{A, B}});
        ASSERT_TRUE(v.holds()) << t;
        const double lhs = 2.0 * t / 36.0, rhs = 2.0 * t + 2.0 * std::log(2.0);
        EXPECT_NEAR(v.details["pairs"][0]["cost"].get<double>(), lhs, 1e-13);
        EXPECT_NEAR(v.details["pairs"][0]["bound"].get<double>(), rhs, 1e-12);
    }
}

TEST(Marton, BrokenScaleFailsFarOut) {
    // 1.2 * 2t against 2t + 2 log 2: crosses near t = 3.47
    const Measure1D mu = exponential_symmetric();
    const CostFunction c = alpha1().scaled(1.2);
    for (int t = 1; t <= 10; ++t) {
        const IntervalSet A = {{-kInf, -double(t)}}, B = {{double(t), kInf}};
        EXPECT_EQ(marton_bound_check(mu, c, 1.0, {{A, B}}).fails(), t >= 4) << t;
    }
}

TEST(Marton, UnionsAndErrors) {
    const Measure1D mu = exponential_symmetric();
    const IntervalSet A = {{-3.0, -1.0}, {-2.0, 0.0}, {5.0, 6.0}};
    EXPECT_NEAR(interval_mass(mu, A), mu.cdf(0.0) - mu.cdf(-3.0) + mu.cdf(6.0) - mu.cdf(5.0), 1e-15);
    EXPECT_EQ(interval_gap(A, {{1.0, 2.0}}), 1.0);
    EXPECT_THROW(marton_bound_check(mu, mt_cost(), 1.0, {{{{1.0, 1.0}}, A}}), std::invalid_argument);
}

TEST(Tensor, ProductAgainstItself) {
    const DiscreteMeasure mu = discretize(exponential_symmetric(), 4);
    const DiscreteMeasure p = product_measure(mu, 2);
    ASSERT_EQ(p.size(), 16u);
    const LpResult lp = cost_lp(p, p, std::vector<double>(256, 1.0));
    EXPECT_NEAR(lp.value, 1.0, 1e-12);
    EXPECT_EQ(relative_entropy(p, p), 0.0);
}

TEST(Tensor, FourAtomsTwoCoordinates) {
    const DiscreteMeasure mu = discretize(exponential_symmetric(), 4);
    TensorOptions o;
    o.n = 2;
    o.trials = 200;
    const Verdict v = tensor_check(mu, mt_cost(), 1.0, o);
    EXPECT_TRUE(v.holds()) << v.diagnostics;
    EXPECT_GE(v.details["worst_slack"].get<double>(), -1e-7);
    o.strong = false;
    EXPECT_TRUE(tensor_check(mu, mt_cost(), 1.0, o).holds());
}

TEST(Tensor, BrokenCostFails) {
    const DiscreteMeasure mu = discretize(exponential_symmetric(), 4);
    TensorOptions o;
    o.trials = 60;
    EXPECT_TRUE(tensor_check(mu, alpha1().scaled(10.0), 1.0, o).fails());
}

TEST(Tensor, StateCap) {
    TensorOptions o;
    o.n = 3;
    EXPECT_THROW(tensor_check(discretize(gaussian(), 12), quadratic(), 1.0, o), std::invalid_argument);
    o.n = 0;
    EXPECT_THROW(tensor_check(discretize(gaussian(), 3), quadratic(), 1.0, o), std::invalid_argument);
}

TEST(Tensor, SingleCoordinatePerturbation) {
    // nu1 x mu against mu x mu: both sides equal the one-dimensional ones
    const DiscreteMeasure mu = discretize(exponential_symmetric(), 5);
    const DiscreteMeasure nu1(mu.locations(), {0.4, 0.1, 0.1, 0.1, 0.3});
    const CostFunction c = mt_cost();
    const std::size_t k = mu.size();
    std::vector<double> loc, wn, wm;
    for (std::size_t s = 0; s < k * k; ++s) {
        loc.push_back(double(s));
        wn.push_back(nu1.weight(s % k) * mu.weight(s / k));
        wm.push_back(mu.weight(s % k) * mu.weight(s / k));
    }
    const DiscreteMeasure N(loc, wn), M(loc, wm);
    std::vector<double> cost(k * k * k * k);
    for (std::size_t s = 0; s < k * k; ++s) {
        for (std::size_t u = 0; u < k * k; ++u) {
            cost[s * k * k + u] = c(mu.location(s % k) - mu.location(u % k)) +
                                  c(mu.location(s / k) - mu.location(u / k));
        }
    }
    EXPECT_NEAR(cost_lp(N, M, cost).value, cost_lp(nu1, mu, c).value, 1e-12);
    EXPECT_NEAR(relative_entropy(N, M), relative_entropy(nu1, mu), 1e-12);
}

TEST(Concentration, Wilson) {
    const auto [l, u] = wilson_interval(50, 100);
    EXPECT_NEAR(l, 0.3762, 1e-3);
    EXPECT_NEAR(u, 0.6238, 1e-3);
    const auto [l0, u0] = wilson_interval(0, 100);
    EXPECT_EQ(l0, 0.0);
    EXPECT_GT(u0, 0.0);
    EXPECT_EQ(wilson_interval(0, 0), std::make_pair(0.0, 1.0));
}

TEST(Concentration, OneDimensionClosedForm) {
    const CostFunction c = mt_cost();
    const std::vector<double> rs = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
    const ConcentrationTable t =
        concentration_mc(exponential_symmetric(), c, 1.0, {0.0, kInf}, 1, rs, 200000, 11);
    EXPECT_TRUE(t.verdict.holds()) << t.verdict.diagnostics;
    EXPECT_DOUBLE_EQ(t.mass_A, 0.5);
    for (const ConcentrationRow& row : t.rows) {
        const double s = alpha1().inverse(36.0 * row.r);
        const double exact = 1.0 - 0.5 * std::exp(-s);
        EXPECT_LE(row.lower_ci, exact) << row.r;
        EXPECT_GE(row.upper_ci, exact) << row.r;
        EXPECT_NEAR(row.bound, 1.0 - 2.0 * std::exp(-row.r), 1e-15);
    }
}

TEST(Concentration, LargeRadiusCoversEverything) {
    const ConcentrationTable t =
        concentration_mc(gaussian(), quadratic(), 1.0, {-1.0, 1.0}, 2, {1e6}, 5000, 3);
    EXPECT_EQ(t.rows[0].empirical, 1.0);
    EXPECT_LE(t.rows[0].bound, 1.0);
}

TEST(Concentration, SmallSetInconclusive) {
    const ConcentrationTable t =
        concentration_mc(exponential_symmetric(), mt_cost(), 1.0, {20.0, 21.0}, 1, {1.0}, 1000, 1);
    EXPECT_EQ(t.verdict.status, Status::inconclusive);
    EXPECT_THROW(concentration_mc(gaussian(), quadratic(), 1.0, {0, 1}, 0, {1.0}, 10, 1),
                 std::invalid_argument);
}

TEST(Concentration, BrokenCostFails) {
    const ConcentrationTable t = concentration_mc(exponential_symmetric(), alpha1().scaled(10.0), 1.0,
                                                  {0.0, kInf}, 1, {2.0, 4.0}, 50000, 5);
    EXPECT_TRUE(t.verdict.fails());
}

TEST(Lsi, ConstantFunction) {
    const LsiReport r = lsi_check(gaussian(), [](double y) { return y * y / 4; }, 1.0, 1.0,
                                  {constant_function(2.0)});
    EXPECT_TRUE(r.verdict.holds());
    EXPECT_NEAR(r.rows[0].lhs, 0.0, 1e-12);
    EXPECT_EQ(r.rows[0].rhs, 0.0);
}

TEST(Lsi, BumpLinearRegime) {
    const Measure1D mu = gaussian(0.0, 1.0 / std::sqrt(2.0));
    auto beta = [](double y) { return y * y / 4; };
    double prev_lhs = kInf;
    // C = 1, t = 2 is the Gaussian constant Ent(f^2) <= int f'^2
    for (double eps : {0.1, 0.01, 0.001}) {
        const LsiReport r = lsi_check(mu, beta, 1.0, 2.0, {bump_function(eps, 0.3, 1.0)});
        const LsiRow& row = r.rows[0];
        EXPECT_LE(row.lhs / row.rhs, 1.0) << eps;
        EXPECT_LT(row.lhs, prev_lhs);
        // both sides O(eps^2)
        EXPECT_LT(row.rhs / (eps * eps), 10.0);
        EXPECT_GT(row.rhs / (eps * eps), 0.01);
        prev_lhs = row.lhs;
    }
}

TEST(Lsi, GaussianConstantsAndBrokenC) {
    const Measure1D mu = gaussian(0.0, 1.0 / std::sqrt(2.0));
    const CostFunction alpha = quadratic();
    const Verdict d = decide_strong_tci_logconcave(mu, alpha);
    ASSERT_TRUE(d.holds()) << d.diagnostics;
    const double lambda = 0.5, C = lambda / (1 - lambda), t = 1.0 / (d.at("a") * lambda);
    auto beta = [&](double y) { return alpha.conjugate(y); };
    const std::vector<TestFunction> fam = lsi_family();
    EXPECT_EQ(fam.size(), 50u);
    EXPECT_TRUE(lsi_check(mu, beta, C, t, fam).verdict.holds());
    const LsiReport bad = lsi_check(mu, beta, C / 100, t, fam);
    EXPECT_TRUE(bad.verdict.fails());
    EXPECT_NE(bad.verdict.details["worst_function"].get<std::string>().find("tilt"), std::string::npos);
}

TEST(Lsi, RejectsNonPositive) {
    EXPECT_THROW(lsi_check(gaussian(), [](double y) { return y * y; }, 1, 1, {constant_function(0.0)}),
                 std::invalid_argument);
}

TEST(StrongCost, FromConvex) {
    const CostFunction q = tci_to_strong_cost(quadratic());
    const CostFunction ab = tci_to_strong_cost(absolute());
    for (double x : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
        EXPECT_NEAR(q(x), x * x / 2, 1e-14);
        EXPECT_NEAR(ab(x), std::abs(x), 1e-14);
    }
    EXPECT_EQ(q(0.0), 0.0);
    for (const CostFunction& th : {theta_p(1.5), theta_p(3.0), talagrand_gamma(0.4)}) {
        const CostFunction s = tci_to_strong_cost(th);
        for (double x = 0.0; x < 20; x += 0.25) ASSERT_LE(s(x), th(x) + 1e-12) << th.name();
    }
    EXPECT_THROW(tci_to_strong_cost(alpha1()), std::invalid_argument);
}
