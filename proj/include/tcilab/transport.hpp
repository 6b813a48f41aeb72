#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tcilab/costs.hpp"
#include "tcilab/measures.hpp"

namespace tcilab {

// Coupling of two discrete measures. mass is rows.size() x cols.size(),
// row-major.
struct TransportPlan {
    DiscreteMeasure rows;
    DiscreteMeasure cols;
    std::vector<double> mass;

    double at(std::size_t i, std::size_t j) const { return mass[i * cols.size() + j]; }
    // Largest deviation of row and column sums from the marginals.
    double marginal_error() const;
    double cost(const std::vector<double>& cost_matrix) const;
};

// Piecewise linear function on a strictly increasing grid, constant beyond.
struct GridFunction {
    std::vector<double> grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(std::vector<double> g, std::vector<double> v);
    double operator()(double x) const;
    static GridFunction constant(std::vector<double> g, double c);
};

inline constexpr std::size_t kMaxLpAtoms = 512;

// c_ij = alpha(a (x_i - y_j)), x from nu (rows), y from mu (columns).
std::vector<double> cost_matrix(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                                const CostFunction& alpha, double a = 1.0);

struct LpResult {
    double value = 0.0;
    TransportPlan plan;
    std::vector<double> u;  // potentials on nu's atoms
    std::vector<double> v;  // potentials on mu's atoms
    long pivots = 0;
};

LpResult cost_lp(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                 const std::vector<double>& cost, std::size_t max_atoms = kMaxLpAtoms);
LpResult cost_lp(const DiscreteMeasure& nu, const DiscreteMeasure& mu, const CostFunction& alpha,
                 double a = 1.0);

// Quantile (north-west corner) coupling of two discrete measures.
TransportPlan northwest_plan(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

struct MonotoneCost {
    double value = 0.0;
    bool exact = false;  // true when alpha is convex
    std::string method = "monotone";
    nlohmann::json diagnostics = nlohmann::json::object();
};

// Integral over t in (0,1) of alpha(a (F_nu^-1(t) - F_mu^-1(t))). Evaluated by
// the substitution t = F_1(x) with the symmetric exponential law, in log
// space. +inf when the integral diverges.
MonotoneCost cost_monotone(const Measure1D& nu, const Measure1D& mu, const CostFunction& alpha,
                           double a = 1.0);
MonotoneCost cost_monotone(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                           const CostFunction& alpha, double a = 1.0);

// H(nu | mu); +inf when nu is not absolutely continuous with respect to mu.
double relative_entropy(const Measure1D& nu, const Measure1D& mu);
double relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

// Q phi(x) = min over grid y of phi(y) + alpha(a (x - y)), by exhaustive scan.
GridFunction inf_convolution(const GridFunction& phi, const CostFunction& alpha, double a,
                             const std::vector<double>& out_grid);

// int Q phi dnu - int phi dmu, where the infimum in Q phi runs over the grid
// of phi together with the atoms of mu. Never exceeds the optimal cost.
double dual_lower_bound(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                        const CostFunction& alpha, double a, const GridFunction& phi);

// Dual potential on mu's atoms found by coordinate ascent with exact line
// search, starting from phi = 0.
GridFunction ascend_dual(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                         const CostFunction& alpha, double a, int sweeps = 200);

}  // namespace tcilab
