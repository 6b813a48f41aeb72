#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tcilab/costs.hpp"
#include "tcilab/measures.hpp"
#include "tcilab/verdict.hpp"

namespace tcilab {

struct CriteriaOptions {
    double kappa = 36.0;
    // sup over x >= m (or x <= m) runs on this many geometric offsets from
    // m out to the tail_mass quantile, then refines around the best point.
    int sup_grid_points = 512;
    double tail_mass = 1e-10;
    // b in {1, 1/2, ..., 2^-b_scan_steps}
    int b_scan_steps = 20;
    double growth_threshold = 0.1;
};

// Monotone map pushing the symmetric exponential law onto mu.
struct RearrangementMap {
    Measure1D mu;
    double median = 0.0;
    std::optional<double> lipschitz_bound;
    // Exponential-side grid used for the moduli. Delta and omega are
    // evaluated by scanning s over this grid.
    std::vector<double> s_grid;
    std::vector<double> h_grid;
    std::vector<double> delta;  // Delta_mu on h_grid
    std::vector<double> omega;  // omega_mu on h_grid

    double forward(double x) const;
    double inverse(double y) const;
    // sup over grid s of T(s + h) - T(s)
    double modulus(double h) const;
    // inf over grid s of T^-1(T(s) + h) - s
    double inverse_modulus(double h) const;
};

// h_grid empty selects 64 points from 0 to 16.
RearrangementMap rearrangement(const Measure1D& mu, std::vector<double> h_grid = {});

struct OmegaBounds {
    std::vector<double> h;
    std::vector<double> plus;
    std::vector<double> minus;
    std::vector<double> lower;  // min(plus(h/2), minus(h/2))
};

OmegaBounds omega_bounds(const RearrangementMap& rm, const std::vector<double>& h_grid,
                         const CriteriaOptions& opts = {});

// Sample grid for sup over one side of the median: m itself followed by
// sup_grid_points geometric offsets.
std::vector<double> side_grid(const Measure1D& mu, Side side, const CriteriaOptions& opts = {});

// A+ = sup_{x>=m} (1-F(x))/f(x), A- = sup_{x<=m} F(x)/f(x). Holds with
// a = 1 / max(A+, A-).
Verdict lipschitz_check(const Measure1D& mu, const CriteriaOptions& opts = {});

// D+ = sup_{x>=m} (1-F(x)) int_m^x 1/f, D- = sup_{x<=m} F(x) int_x^m 1/f.
// Infinite values mark divergence.
struct MuckenhouptResult {
    double d_plus = 0.0;
    double d_minus = 0.0;
    double argmax_plus = 0.0;
    double argmax_minus = 0.0;
};
MuckenhouptResult muckenhoupt(const Measure1D& mu, const CriteriaOptions& opts = {});

// sup over x on the side of int e^{alpha(b z)} d mu_x(z); +inf when some
// inner integral diverges or the sup keeps growing.
double K_moment(const Measure1D& mu, const CostFunction& alpha, double b, Side side,
                const CriteriaOptions& opts = {});

// int e^{alpha(b z)} d mu_x(z) at one anchor.
double residual_moment(const Measure1D& mu, const CostFunction& alpha, double b, double x,
                       Side side);

// int e^{alpha(b x)} d mu(x).
double moment_integral(const Measure1D& mu, const CostFunction& alpha, double b);

// min(a0, b0/2, [2/b0 alpha^-1(log K)]^-1); the last term is dropped when
// log K <= 0.
double tech_lemma_scale(double a0, double b0, double K, const CostFunction& alpha);

Verdict decide_strong_tci_lip(const Measure1D& mu, const CostFunction& alpha,
                              const CriteriaOptions& opts = {});
Verdict decide_strong_tci_logconcave(const Measure1D& mu, const CostFunction& alpha,
                                     const CriteriaOptions& opts = {});

// lambda_grid empty selects {1/4, 1/2, 1, 2, 4}.
Verdict suff_condition(const Measure1D& mu, const CostFunction& alpha,
                       std::vector<double> lambda_grid = {}, const CriteriaOptions& opts = {});

// r(x) = Phi'(x) e^{Phi(x)} int_x^inf e^{-Phi}. NaN when the integral diverges.
std::vector<double> int_equiv_ratio(const RealFn& phi, const RealFn& dphi,
                                    const std::vector<double>& x_probes);

struct TildePotential {
    Verdict verdict;
    double a0 = 0.0;
    std::optional<CostFunction> tilde_v;
};
// Solves a0 V'(a0) = 2 on [1e-6, 1e6] and splices x^2 on [-1,1] with
// V(a0 x) + 1 - V(a0).
TildePotential lsi_tilde_potential(const RealFn& V, const RealFn& dV);
TildePotential lsi_tilde_potential(const Measure1D& mu);

// (y1, y2) -> base(T^-1 y1 - T^-1 y2)
struct SkewedCost {
    RearrangementMap rm;
    CostFunction base;
    double operator()(double y1, double y2) const;
};
SkewedCost skewed_cost(const RearrangementMap& rm, const CostFunction& base);

}  // namespace tcilab
