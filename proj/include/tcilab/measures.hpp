#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "tcilab/verdict.hpp"

namespace tcilab {

using RealFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Support {
    double lo = -kInf;
    double hi = kInf;
    bool contains(double x) const { return x > lo && x < hi; }
};

// A continuous law with density exp(-V(x) - logZ) on its support.
class MeasureImpl {
public:
    virtual ~MeasureImpl() = default;

    virtual std::string name() const = 0;
    virtual Support support() const { return {}; }
    virtual double potential(double x) const = 0;
    virtual double dpotential(double x) const;
    virtual double log_normalizer() const = 0;

    virtual double log_cdf(double x) const;
    virtual double log_sf(double x) const;
    virtual double cdf(double x) const;
    virtual double sf(double x) const;

    virtual double quantile(double t) const;
    // x with log F(x) = log_t, and x with log(1 - F(x)) = log_s.
    virtual double quantile_log_lower(double log_t) const;
    virtual double quantile_log_upper(double log_s) const;
    virtual double median() const;

protected:
    // Tail masses by direct integration of the density away from x.
    double direct_log_sf(double x) const;
    double direct_log_cdf(double x) const;
};

class Measure1D {
public:
    explicit Measure1D(std::shared_ptr<const MeasureImpl> impl);

    std::string name() const { return impl_->name(); }
    Support support() const { return impl_->support(); }
    double potential(double x) const { return impl_->potential(x); }
    double dpotential(double x) const { return impl_->dpotential(x); }
    double log_normalizer() const { return impl_->log_normalizer(); }
    double log_density(double x) const;
    double density(double x) const;
    double cdf(double x) const { return impl_->cdf(x); }
    double sf(double x) const { return impl_->sf(x); }
    double log_cdf(double x) const { return impl_->log_cdf(x); }
    double log_sf(double x) const { return impl_->log_sf(x); }
    double quantile(double t) const { return impl_->quantile(t); }
    double quantile_log_lower(double log_t) const { return impl_->quantile_log_lower(log_t); }
    double quantile_log_upper(double log_s) const { return impl_->quantile_log_upper(log_s); }
    double median() const { return median_; }

    const MeasureImpl& impl() const { return *impl_; }
    std::shared_ptr<const MeasureImpl> shared() const { return impl_; }

private:
    std::shared_ptr<const MeasureImpl> impl_;
    double median_ = 0.0;
};

enum class Builtin { exponential_symmetric, exp_power, gaussian, cauchy, one_sided_exp };

// exp_power takes p >= 1/2, one_sided_exp takes the rate a > 0, gaussian
// takes sigma > 0; other params are ignored.
Measure1D make_builtin(Builtin kind, double param = 1.0);

Measure1D exponential_symmetric();
Measure1D exp_power(double p);
Measure1D gaussian(double mean = 0.0, double sigma = 1.0);
Measure1D cauchy();
Measure1D one_sided_exp(double a);
// Law of X + shift.
Measure1D shifted(const Measure1D& mu, double shift);

// Density proportional to exp(-V) on the domain. The normalizer is found by
// adaptive quadrature with doubling truncation of infinite ends; a divergent
// normalizer is rejected with "not a finite measure".
Measure1D make_from_potential(RealFn V, Support domain = {}, RealFn dV = nullptr,
                              std::string name = "potential");

// Tabulated potential with monotone cubic interpolation, extended linearly
// past the table. The right slope must be positive and the left negative.
Measure1D make_from_table(std::vector<double> xs, std::vector<double> Vs,
                          std::string name = "table");
// Reads a CSV file with header and columns x,V.
Measure1D load_table(const std::string& path);

class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    // Locations strictly increasing, positive weights summing to 1 (1e-12).
    DiscreteMeasure(std::vector<double> locations, std::vector<double> weights);
    // Sorts, merges equal locations, drops zero weights and normalizes.
    static DiscreteMeasure normalized(std::vector<double> locations, std::vector<double> weights);
    static DiscreteMeasure dirac(double x);

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& locations() const { return x_; }
    const std::vector<double>& weights() const { return w_; }
    double location(std::size_t i) const { return x_[i]; }
    double weight(std::size_t i) const { return w_[i]; }
    // Index of the atom at x, or -1.
    long find(double x) const;

private:
    std::vector<double> x_;
    std::vector<double> w_;
};

// k equal-mass atoms placed at the conditional medians of the quantile cells.
DiscreteMeasure discretize(const Measure1D& mu, int k);

enum class Side { plus, minus };

// Law of X - x given X >= x (plus) or of x - X given X <= x (minus).
struct ResidualDistribution {
    Measure1D base;
    double anchor;
    Side side;
    double log_mass;

    double log_tail(double h) const;
    double tail(double h) const;
};

ResidualDistribution residual(const Measure1D& mu, double x, Side side);

using TailFn = std::function<double(double)>;

// nu1 <=_st nu2: tail1(h) <= tail2(h) + tol on the grid. The worst margin
// max(tail1 - tail2) and its location go into details.
Verdict stochastically_dominated(const TailFn& nu1, const TailFn& nu2,
                                 const std::vector<double>& h_grid, double tol = 1e-12);

// Hazard rate density / (1 - F) nondecreasing on a grid over the central
// 1 - 1e-8 of the mass.
Verdict is_log_concave(const Measure1D& mu, int grid_points = 2048, double tol = 1e-7);

// Inverse-cdf draws; draw i uses counter i of a generator keyed by seed.
std::vector<double> sample(const Measure1D& mu, std::size_t n, std::uint64_t seed);

// Geometric grid lo * ratio^i, i < n.
std::vector<double> geometric_grid(double lo, double hi, int n);
std::vector<double> linear_grid(double lo, double hi, int n);

}  // namespace tcilab
