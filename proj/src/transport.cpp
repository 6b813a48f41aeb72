#include "tcilab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tcilab/network_simplex.hpp"
#include "tcilab/numeric/parallel.hpp"
#include "tcilab/numeric/quadrature.hpp"

namespace tcilab {

namespace nm = numeric;

namespace {
constexpr double kLog2 = 0.69314718055994530942;
}

double TransportPlan::marginal_error() const {
    const std::size_t n = rows.size(), m = cols.size();
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += at(i, j);
        err = std::max(err, std::abs(s - rows.weight(i)));
    }
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += at(i, j);
        err = std::max(err, std::abs(s - cols.weight(j)));
    }
    return err;
}

double TransportPlan::cost(const std::vector<double>& c) const {
    double s = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) {
        if (mass[k] != 0.0) s += mass[k] * c[k];
    }
    return s;
}

GridFunction::GridFunction(std::vector<double> g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (grid.size() != values.size() || grid.empty()) {
        throw std::invalid_argument("grid function needs matching non-empty grid and values");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be strictly increasing");
    }
}

double GridFunction::operator()(double x) const {
    if (x <= grid.front()) return values.front();
    if (x >= grid.back()) return values.back();
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return values[i] + t * (values[i + 1] - values[i]);
}

GridFunction GridFunction::constant(std::vector<double> g, double c) {
    std::vector<double> v(g.size(), c);
    return GridFunction(std::move(g), std::move(v));
}

std::vector<double> cost_matrix(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                                const CostFunction& alpha, double a) {
    std::vector<double> c(nu.size() * mu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) {
        for (std::size_t j = 0; j < mu.size(); ++j) {
            c[i * mu.size() + j] = alpha(a * (nu.location(i) - mu.location(j)));
        }
    }
    return c;
}

LpResult cost_lp(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                 const std::vector<double>& cost, std::size_t max_atoms) {
    if (nu.size() > max_atoms || mu.size() > max_atoms) {
        throw std::invalid_argument("LP instance exceeds " + std::to_string(max_atoms) + " atoms");
    }
    const TransportSolution s = solve_transport(nu.weights(), mu.weights(), cost);
    LpResult out;
    out.plan = {nu, mu, s.flow};
    out.value = out.plan.cost(cost);
    out.u = s.u;
    out.v = s.v;
    out.pivots = s.pivots;
    return out;
}

LpResult cost_lp(const DiscreteMeasure& nu, const DiscreteMeasure& mu, const CostFunction& alpha,
                 double a) {
    return cost_lp(nu, mu, cost_matrix(nu, mu, alpha, a));
}

TransportPlan northwest_plan(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
    // overlap of the quantile cells [R_{i-1}, R_i) and [C_{j-1}, C_j)
    const std::size_t n = nu.size(), m = mu.size();
    std::vector<double> mass(n * m, 0.0);
    double r0 = 0.0, r1 = nu.weight(0), c0 = 0.0, c1 = mu.weight(0);
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        const double hi = (i + 1 == n && j + 1 == m) ? std::max(r1, c1) : std::min(r1, c1);
        mass[i * m + j] = std::max(0.0, hi - std::max(r0, c0));
        if ((r1 <= c1 && i + 1 < n) || j + 1 == m) {
            ++i;
            if (i < n) {
                r0 = r1;
                r1 = i + 1 == n ? 1.0 : r1 + nu.weight(i);
            }
        } else {
            ++j;
            c0 = c1;
            c1 = j + 1 == m ? 1.0 : c1 + mu.weight(j);
        }
    }
    return {nu, mu, std::move(mass)};
}

MonotoneCost cost_monotone(const Measure1D& nu, const Measure1D& mu, const CostFunction& alpha,
                           double a) {
    MonotoneCost out;
    out.exact = alpha.convex();
    auto side = [&](bool right) {
        return [&, right](double s) {
            const double ls = -s - kLog2;
            const double x = right ? nu.quantile_log_upper(ls) : nu.quantile_log_lower(ls);
            const double y = right ? mu.quantile_log_upper(ls) : mu.quantile_log_lower(ls);
            if (std::isinf(x) && std::isinf(y) && (x > 0) == (y > 0)) return -kInf;
            const double c = alpha(a * (x - y));
            return std::log(c) + ls;
        };
    };
    nm::TailOptions opts;
    opts.initial_span = 1.0;
    opts.warmup_doublings = 6;
    opts.max_doublings = 12;
    const nm::LogIntegral r = nm::log_integrate_tail(side(true), opts);
    const nm::LogIntegral l = nm::log_integrate_tail(side(false), opts);
    out.diagnostics["horizon"] = std::max(r.span, l.span);
    out.diagnostics["exact_for_convex_cost"] = out.exact;
    if (r.divergent || l.divergent) {
        out.value = kInf;
        out.diagnostics["divergent"] = true;
        return out;
    }
    out.value = std::exp(nm::log_add(r.log_value, l.log_value));
    return out;
}

MonotoneCost cost_monotone(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                           const CostFunction& alpha, double a) {
    MonotoneCost out;
    out.exact = alpha.convex();
    const TransportPlan p = northwest_plan(nu, mu);
    out.value = p.cost(cost_matrix(nu, mu, alpha, a));
    out.diagnostics["atoms"] = {nu.size(), mu.size()};
    return out;
}

double relative_entropy(const Measure1D& nu, const Measure1D& mu) {
    const Support sn = nu.support(), sm = mu.support();
    if (sn.lo < sm.lo || sn.hi > sm.hi) return kInf;
    const double lo = nu.quantile(1e-15);
    const double hi = nu.quantile(1.0 - 1e-15);
    const double mid = nu.median();
    bool singular = false;
    auto f = [&](double x) {
        const double ln = nu.log_density(x);
        if (ln == -kInf) return 0.0;
        const double lm = mu.log_density(x);
        if (lm == -kInf) {
            singular = true;
            return 0.0;
        }
        return std::exp(ln) * (ln - lm);
    };
    nm::QuadratureOptions q{1e-13, 1e-11, 4000};
    const double v = nm::integrate(f, lo, mid, q).value + nm::integrate(f, mid, hi, q).value;
    if (singular) return kInf;
    return std::max(0.0, v);
}

double relative_entropy(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
    double h = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        const long j = mu.find(nu.location(i));
        if (j < 0) return kInf;
        h += nu.weight(i) * std::log(nu.weight(i) / mu.weight(static_cast<std::size_t>(j)));
    }
    return std::max(0.0, h);
}

GridFunction inf_convolution(const GridFunction& phi, const CostFunction& alpha, double a,
                             const std::vector<double>& out_grid) {
    std::vector<double> q(out_grid.size());
    nm::parallel_for(out_grid.size(), [&](std::size_t k) {
        double best = kInf;
        for (std::size_t j = 0; j < phi.grid.size(); ++j) {
            best = std::min(best, phi.values[j] + alpha(a * (out_grid[k] - phi.grid[j])));
        }
        q[k] = best;
    });
    return GridFunction(out_grid, std::move(q));
}

double dual_lower_bound(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                        const CostFunction& alpha, double a, const GridFunction& phi) {
    std::vector<double> ys = phi.grid;
    ys.insert(ys.end(), mu.locations().begin(), mu.locations().end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    std::vector<double> vals(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) vals[j] = phi(ys[j]);
    double lhs = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        double best = kInf;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            best = std::min(best, vals[j] + alpha(a * (nu.location(i) - ys[j])));
        }
        lhs += nu.weight(i) * best;
    }
    double rhs = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) rhs += mu.weight(j) * phi(mu.location(j));
    return lhs - rhs;
}

GridFunction ascend_dual(const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                         const CostFunction& alpha, double a, int sweeps) {
    const std::size_t n = nu.size(), m = mu.size();
    const std::vector<double> c = cost_matrix(nu, mu, alpha, a);
    std::vector<double> phi(m, 0.0);
    if (m == 1) return GridFunction(mu.locations(), phi);
    std::vector<std::pair<double, double>> brk(n);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double moved = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                double other = kInf;
                for (std::size_t k = 0; k < m; ++k) {
                    if (k != j) other = std::min(other, phi[k] + c[i * m + k]);
                }
                brk[i] = {other - c[i * m + j], nu.weight(i)};
            }
            // slope of the objective in phi_j is sum of nu_i over breakpoints
            // above phi_j minus mu_j
            std::sort(brk.begin(), brk.end(), [](auto& x, auto& y) { return x.first > y.first; });
            double acc = 0.0;
            double t = brk.back().first;
            for (const auto& [b, w] : brk) {
                acc += w;
                if (acc >= mu.weight(j)) {
                    t = b;
                    break;
                }
            }
            moved = std::max(moved, std::abs(t - phi[j]));
            phi[j] = t;
        }
        if (moved < 1e-14) break;
    }
    return GridFunction(mu.locations(), phi);
}

}  // namespace tcilab
