#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcilab/costs.hpp"
#include "tcilab/measures.hpp"
#include "tcilab/transport.hpp"
#include "tcilab/verdict.hpp"

namespace tcilab {

struct DualCheckOptions {
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    // e^{-int phi dmu} in place of int e^{-phi} dmu
    bool weak_form = false;
    int cells = 512;
    double window_mass = 1e-8;
    // cells per side between the window and the tail_log_mass quantile,
    // equally spaced in log mass
    int tail_cells = 32;
    double tail_log_mass = -700.0;
    int knots = 64;
    double amplitude = 10.0;
    double max_slope = 20.0;
    double slack = 1e-6;
};

struct DualTestReport {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    bool weak_form = false;
    // Largest product over the trials, with Q phi replaced by an upper bound
    // on each cell.
    double worst_product = 0.0;
    // Same test function, Q phi replaced by a lower bound on each cell. Above
    // 1 + slack this is a certified violation.
    double worst_product_lower = 0.0;
    std::string worst_kind;
    GridFunction worst_phi;
    double slack = 1e-6;
    bool violation_found() const { return worst_product > 1.0 + slack; }
    bool certified() const { return worst_product_lower > 1.0 + slack; }
    const char* status() const { return violation_found() ? "violation_found" : "no_violation"; }
};

// Random bounded test functions phi plus staircases phi = p 1_{A^c}
// against int e^{Q phi} dmu * int e^{-phi} dmu <= 1, Q phi(x) =
// inf_y phi(y) + alpha(a (x - y)). phi is constant on cells covering the
// central 1 - window_mass of mu, on tail cells beyond it, and on two
// outer cells reaching to infinity.
DualTestReport dual_check_strong(const Measure1D& mu, const CostFunction& alpha, double a,
                                 const DualCheckOptions& opts = {});

// Product for one step function given by its cell values.
struct DualProduct {
    double upper = 0.0;
    double lower = 0.0;
};
struct DualCells {
    std::vector<double> lo, hi, center;
    std::vector<double> mass;
    std::size_t first_inner = 0, last_inner = 0;
    // row K, column j: alpha(a d) with d the largest (far) or smallest
    // (near) distance from a point of cell K to cell j
    std::vector<double> cost_near;
    std::vector<double> cost_far;
};
DualCells dual_cells(const Measure1D& mu, const CostFunction& alpha, double a,
                     const DualCheckOptions& opts = {});
DualProduct dual_product(const DualCells& cells, const std::vector<double>& phi, bool weak_form);

// A = (-inf, x] and A = [x, +inf) for x on the grid:
//   (mu(A) + int_{A^c} e^{alpha(a d(y, A))} dmu) mu(A) <= 1
// plus the global bound int e^{alpha(a x)} dmu <= 1/(mu(R+) mu(R-)) - 1.
// Empty x_grid selects 64 quantiles.
Verdict integrability_check(const Measure1D& mu, const CostFunction& alpha, double a,
                            std::vector<double> x_grid = {}, double tol = 1e-6);

using IntervalSet = std::vector<std::pair<double, double>>;
// c(A, B) <= -log mu(A) - log mu(B), c(A, B) = alpha(a gap(A, B)).
Verdict marton_bound_check(const Measure1D& mu, const CostFunction& alpha, double a,
                           const std::vector<std::pair<IntervalSet, IntervalSet>>& pairs);
double interval_mass(const Measure1D& mu, const IntervalSet& A);
double interval_gap(const IntervalSet& A, const IntervalSet& B);

struct TensorOptions {
    int n = 2;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    bool strong = true;
    std::size_t max_states = 1296;
};
// Random nu (and beta) on the product of the atoms of mu against
// T_{sum c}(nu, beta) <= H(nu | mu^n) + H(beta | mu^n); with strong = false
// beta = mu^n and the second entropy drops.
Verdict tensor_check(const DiscreteMeasure& mu, const CostFunction& alpha, double a,
                     const TensorOptions& opts = {});
DiscreteMeasure product_measure(const DiscreteMeasure& mu, int n);

struct ConcentrationRow {
    double r = 0.0;
    double empirical = 0.0;
    double lower_ci = 0.0;
    double upper_ci = 0.0;
    double bound = 0.0;
};
struct ConcentrationTable {
    int n = 1;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double mass_A = 0.0;  // mu^n(A), exact
    double empirical_mass_A = 0.0;
    std::vector<ConcentrationRow> rows;
    Verdict verdict;
};
// A = [lo, hi]^n. x is in A_c^r iff sum alpha(a d(x_i, [lo, hi])) <= r.
// Wilson intervals at 99%.
ConcentrationTable concentration_mc(const Measure1D& mu, const CostFunction& alpha, double a,
                                    std::pair<double, double> interval, int n,
                                    const std::vector<double>& r_grid, std::size_t samples,
                                    std::uint64_t seed);
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z = 2.5758293035489004);

struct TestFunction {
    std::string name;
    RealFn f;
    RealFn df;
};
// 20 smoothly truncated tilts, 15 bumps 1 + eps (1 - ((x-c)/w)^2)^2 and
// 15 smooth steps.
std::vector<TestFunction> lsi_family();
TestFunction constant_function(double c = 1.0);
TestFunction bump_function(double eps, double c, double w);

struct LsiRow {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
};
struct LsiReport {
    std::vector<LsiRow> rows;
    Verdict verdict;
};
// Ent(f^2) <= C int beta(t f'/f) f^2 dmu, with tolerance 1e-8.
LsiReport lsi_check(const Measure1D& mu, const RealFn& beta, double C, double t,
                    const std::vector<TestFunction>& family);
double entropy_of_square(const Measure1D& mu, const TestFunction& f);

// x -> 2 theta(x / 2) for convex theta.
CostFunction tci_to_strong_cost(const CostFunction& theta);

}  // namespace tcilab
