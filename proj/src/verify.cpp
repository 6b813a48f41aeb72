#include "tcilab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tcilab/criteria.hpp"
#include "tcilab/numeric/parallel.hpp"
#include "tcilab/numeric/quadrature.hpp"
#include "tcilab/numeric/rng.hpp"

namespace tcilab {

namespace nm = numeric;

namespace {

double cell_mass(const Measure1D& mu, double lo, double hi) {
    if (lo >= mu.median()) return std::max(0.0, mu.sf(lo) - mu.sf(hi));
    return std::max(0.0, mu.cdf(hi) - mu.cdf(lo));
}

// q[K] = min(phi_K, min_{j != K} phi_j + cost[K n + j])
void bound_q(const std::vector<double>& phi, const std::vector<double>& cost, std::vector<double>& q) {
    const std::size_t n = phi.size();
    q.assign(phi.begin(), phi.end());
    for (std::size_t K = 0; K < n; ++K) {
        const double* c = cost.data() + K * n;
        double m = q[K];
        for (std::size_t j = 0; j < n; ++j) {
            const double v = phi[j] + c[j];
            m = m < v ? m : v;
        }
        q[K] = m;
    }
}

double product_from_q(const DualCells& c, const std::vector<double>& q,
                      const std::vector<double>& phi, bool weak) {
    double i1 = 0.0, i2 = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (c.mass[k] > 0.0) i1 += c.mass[k] * std::exp(q[k]);
        i2 += weak ? c.mass[k] * phi[k] : c.mass[k] * std::exp(-phi[k]);
    }
    return weak ? i1 * std::exp(-i2) : i1 * i2;
}

double smoothstep(double u) {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return 0.5 + 0.75 * u - 0.25 * u * u * u;
}

double dsmoothstep(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return 0.75 * (1.0 - u * u);
}

}  // namespace

DualCells dual_cells(const Measure1D& mu, const CostFunction& alpha, double a,
                     const DualCheckOptions& o) {
    const int tail = std::max(0, o.tail_cells);
    const int inner = o.cells - 2 - 2 * tail;
    if (inner < 2) throw std::invalid_argument("dual check needs at least 2 interior cells");
    const double lw = std::log(o.window_mass / 2);
    const double lo = mu.quantile_log_lower(lw);
    const double hi = mu.quantile_log_upper(lw);
    // edges, left to right
    std::vector<double> left, right;
    for (int i = tail; i >= 1; --i) {
        const double lm = lw + (o.tail_log_mass - lw) * i / tail;
        const double l = mu.quantile_log_lower(lm), r = mu.quantile_log_upper(lm);
        // bounded supports give repeated quantiles
        if (std::isfinite(l) && l < lo && (left.empty() || l > left.back())) left.push_back(l);
        if (std::isfinite(r) && r > hi && (right.empty() || r < right.back())) right.push_back(r);
    }
    std::vector<double> e = left;
    const std::vector<double> mid = linear_grid(lo, hi, inner + 1);
    e.insert(e.end(), mid.begin(), mid.end());
    e.insert(e.end(), right.rbegin(), right.rend());
    for (std::size_t i = 1; i < e.size(); ++i) {
        if (!(e[i] > e[i - 1])) throw std::runtime_error("dual check: tail quantiles collapse");
    }

    DualCells c;
    const std::size_t n = e.size() + 1;
    c.lo.resize(n);
    c.hi.resize(n);
    c.mass.resize(n);
    c.center.resize(n);
    c.first_inner = left.size() + 1;
    c.last_inner = c.first_inner + static_cast<std::size_t>(inner) - 1;
    for (std::size_t k = 0; k < n; ++k) {
        c.lo[k] = k == 0 ? -kInf : e[k - 1];
        c.hi[k] = k + 1 == n ? kInf : e[k];
    }
    c.mass[0] = mu.cdf(e.front());
    c.mass[n - 1] = mu.sf(e.back());
    for (std::size_t k = 1; k + 1 < n; ++k) {
        c.mass[k] = cell_mass(mu, c.lo[k], c.hi[k]);
        c.center[k] = 0.5 * (c.lo[k] + c.hi[k]);
    }
    c.center[0] = c.hi[0] - (c.hi[1] - c.lo[1]) / 2;
    c.center[n - 1] = c.lo[n - 1] + (c.hi[n - 2] - c.lo[n - 2]) / 2;

    auto cost = [&](double d) { return std::isfinite(d) ? alpha(a * std::max(0.0, d)) : kInf; };
    c.cost_far.assign(n * n, 0.0);
    c.cost_near.assign(n * n, 0.0);
    nm::parallel_for(n, [&](std::size_t K) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == K) continue;
            // far: sup over x in K of the distance to cell j; near: inf
            double far, near;
            if (j < K) {
                far = c.hi[K] - c.hi[j];
                near = c.lo[K] - c.hi[j];
            } else {
                far = c.lo[j] - c.lo[K];
                near = c.lo[j] - c.hi[K];
            }
            c.cost_far[K * n + j] = cost(far);
            c.cost_near[K * n + j] = cost(near);
        }
    });
    return c;
}

DualProduct dual_product(const DualCells& c, const std::vector<double>& phi, bool weak) {
    if (phi.size() != c.mass.size()) throw std::invalid_argument("phi must have one value per cell");
    std::vector<double> q;
    DualProduct out;
    bound_q(phi, c.cost_far, q);
    out.upper = product_from_q(c, q, phi, weak);
    bound_q(phi, c.cost_near, q);
    out.lower = product_from_q(c, q, phi, weak);
    return out;
}

DualTestReport dual_check_strong(const Measure1D& mu, const CostFunction& alpha, double a,
                                 const DualCheckOptions& o) {
    if (!(a > 0.0)) throw std::invalid_argument("dual check: scale must be positive");
    const DualCells cells = dual_cells(mu, alpha, a, o);
    const std::size_t n = cells.mass.size();
    const std::vector<double>& centers = cells.center;
    const std::size_t i0 = cells.first_inner, i1 = cells.last_inner;

    // staircases p 1_{A^c} for half lines A, sharp and ramped
    struct Stair {
        double p;
        std::size_t at;
        bool left;
        std::size_t ramp;
    };
    std::vector<Stair> stairs;
    const double ps[] = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
    for (std::size_t ramp : {std::size_t{0}, std::size_t{8}}) {
        for (int i = 0; i < 24; ++i) {
            const std::size_t at = i0 + (i1 - i0) * static_cast<std::size_t>(i) / 23;
            for (double p : ps) {
                stairs.push_back({p, at, true, ramp});
                stairs.push_back({p, at, false, ramp});
            }
        }
    }
    const std::size_t n_stairs = std::min(stairs.size(), o.trials / 4);
    auto stair_phi = [&](std::size_t idx) {
        const Stair& s = stairs[idx * stairs.size() / std::max<std::size_t>(1, n_stairs)];
        std::vector<double> phi(n);
        for (std::size_t k = 0; k < n; ++k) {
            // signed distance into A^c, in cells
            const double d = s.left ? static_cast<double>(k) - static_cast<double>(s.at)
                                    : static_cast<double>(s.at) - static_cast<double>(k);
            double w;
            if (s.ramp == 0) {
                w = d > 0 ? 1.0 : 0.0;
            } else {
                w = std::clamp(d / static_cast<double>(s.ramp), 0.0, 1.0);
            }
            phi[k] = s.p * w;
        }
        return phi;
    };

    const nm::CounterRng rng(o.seed);
    const std::vector<double> knots = linear_grid(cells.lo[i0], cells.hi[i1], std::max(2, o.knots));
    auto random_phi = [&](std::size_t t) {
        nm::RngStream s(rng, t);
        std::vector<double> kv(knots.size());
        kv[0] = s.uniform(-o.amplitude, o.amplitude);
        for (std::size_t k = 1; k < knots.size(); ++k) {
            const double slope = s.uniform(-o.max_slope, o.max_slope);
            kv[k] = std::clamp(kv[k - 1] + slope * (knots[k] - knots[k - 1]), -o.amplitude,
                               o.amplitude);
        }
        const GridFunction g(knots, kv);
        std::vector<double> phi(n);
        for (std::size_t k = 0; k < n; ++k) phi[k] = g(std::clamp(centers[k], knots.front(), knots.back()));
        return phi;
    };
    auto make_phi = [&](std::size_t t) {
        if (t == 0) return std::vector<double>(n, 0.0);
        if (t <= n_stairs) return stair_phi(t - 1);
        return random_phi(t);
    };
    auto kind = [&](std::size_t t) -> std::string {
        if (t == 0) return "zero";
        if (t <= n_stairs) return "staircase";
        return "random";
    };

    const std::size_t trials = std::max<std::size_t>(1, o.trials);
    std::vector<double> products(trials);
    nm::parallel_for(trials, [&](std::size_t t) {
        const std::vector<double> phi = make_phi(t);
        std::vector<double> q;
        bound_q(phi, cells.cost_far, q);
        products[t] = product_from_q(cells, q, phi, o.weak_form);
    });
    std::size_t worst = 0;
    for (std::size_t t = 1; t < trials; ++t) {
        if (products[t] > products[worst]) worst = t;
    }
    DualTestReport r;
    r.trials = trials;
    r.seed = o.seed;
    r.weak_form = o.weak_form;
    r.slack = o.slack;
    const std::vector<double> phi = make_phi(worst);
    const DualProduct wp = dual_product(cells, phi, o.weak_form);
    r.worst_product = wp.upper;
    r.worst_product_lower = wp.lower;
    r.worst_kind = kind(worst);
    r.worst_phi = GridFunction(centers, phi);
    return r;
}

Verdict integrability_check(const Measure1D& mu, const CostFunction& alpha, double a,
                            std::vector<double> x_grid, double tol) {
    if (x_grid.empty()) {
        for (int i = 0; i < 64; ++i) x_grid.push_back(mu.quantile((i + 0.5) / 64.0));
    }
    struct Row {
        double x, lhs_plus, lhs_minus, moment_plus, moment_minus;
    };
    std::vector<Row> rows(x_grid.size());
    nm::parallel_for(x_grid.size(), [&](std::size_t i) {
        const double x = x_grid[i];
        const double F = mu.cdf(x), S = mu.sf(x);
        const double rp = S > 0.0 ? residual_moment(mu, alpha, a, x, Side::plus) : 1.0;
        const double rm = F > 0.0 ? residual_moment(mu, alpha, a, x, Side::minus) : 1.0;
        rows[i] = {x, (F + S * rp) * F, (S + F * rm) * S, rp, rm};
    });
    double worst = 0.0, worst_x = 0.0;
    bool violated = false;
    nlohmann::json table = nlohmann::json::array();
    for (const Row& r : rows) {
        const double l = std::max(r.lhs_plus, r.lhs_minus);
        if (!(l <= worst)) {
            worst = l;
            worst_x = r.x;
        }
        if (!(l <= 1.0 + tol)) violated = true;
        table.push_back({{"x", r.x},
                         {"lhs_plus", encode_real(r.lhs_plus)},
                         {"lhs_minus", encode_real(r.lhs_minus)},
                         {"residual_moment_plus", encode_real(r.moment_plus)},
                         {"residual_moment_minus", encode_real(r.moment_minus)}});
    }
    const double M = moment_integral(mu, alpha, a);
    const double pp = mu.sf(0.0), pm = mu.cdf(0.0);
    const double global_bound = pp > 0.0 && pm > 0.0 ? 1.0 / (pp * pm) - 1.0 : kInf;
    const bool global_ok = M <= global_bound * (1.0 + tol);
    Verdict v;
    if (violated || !global_ok) {
        std::ostringstream os;
        os << "strong TCI refuted at scale " << a;
        if (violated) os << "; integrability bound exceeded at x=" << worst_x;
        if (!global_ok) os << "; global moment " << M << " above " << global_bound;
        v = Verdict::failing(os.str());
        v.witness["worst_lhs"] = worst;
        v.witness["moment"] = M;
    } else {
        v = Verdict::holding({{"worst_lhs", worst}, {"moment", M}, {"scale", a}});
    }
    v.details["rows"] = std::move(table);
    v.details["global_bound"] = encode_real(global_bound);
    v.details["argmax"] = worst_x;
    return v;
}

double interval_mass(const Measure1D& mu, const IntervalSet& A) {
    IntervalSet s = A;
    std::sort(s.begin(), s.end());
    double total = 0.0, reach = -kInf;
    for (auto [lo, hi] : s) {
        if (hi < lo) throw std::invalid_argument("interval with hi < lo");
        lo = std::max(lo, reach);
        if (hi <= lo) continue;
        total += cell_mass(mu, lo, hi);
        reach = hi;
    }
    return total;
}

double interval_gap(const IntervalSet& A, const IntervalSet& B) {
    double g = kInf;
    for (const auto& p : A) {
        for (const auto& q : B) {
            g = std::min(g, std::max({0.0, p.first - q.second, q.first - p.second}));
        }
    }
    return g;
}

Verdict marton_bound_check(const Measure1D& mu, const CostFunction& alpha, double a,
                           const std::vector<std::pair<IntervalSet, IntervalSet>>& pairs) {
    nlohmann::json table = nlohmann::json::array();
    double worst = -kInf;
    std::size_t bad = 0;
    for (const auto& [A, B] : pairs) {
        const double ma = interval_mass(mu, A), mb = interval_mass(mu, B);
        if (!(ma > 0.0) || !(mb > 0.0)) throw std::invalid_argument("set with zero mass");
        const double lhs = alpha(a * interval_gap(A, B));
        const double rhs = -std::log(ma) - std::log(mb);
        worst = std::max(worst, lhs - rhs);
        if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) ++bad;
        table.push_back({{"cost", lhs}, {"bound", rhs}});
    }
    Verdict v = bad ? Verdict::failing(std::to_string(bad) + " pair(s) exceed -log mu(A) - log mu(B)")
                    : Verdict::holding({{"pairs", static_cast<double>(std::max<std::size_t>(1, pairs.size()))}});
    v.details["pairs"] = std::move(table);
    v.details["worst_excess"] = encode_real(worst);
    return v;
}

DiscreteMeasure product_measure(const DiscreteMeasure& mu, int n) {
    std::size_t states = 1;
    for (int i = 0; i < n; ++i) states *= mu.size();
    std::vector<double> loc(states), w(states);
    for (std::size_t s = 0; s < states; ++s) {
        std::size_t r = s;
        double p = 1.0;
        for (int i = 0; i < n; ++i) {
            p *= mu.weight(r % mu.size());
            r /= mu.size();
        }
        loc[s] = static_cast<double>(s);
        w[s] = p;
    }
    return DiscreteMeasure::normalized(loc, w);
}

Verdict tensor_check(const DiscreteMeasure& mu, const CostFunction& alpha, double a,
                     const TensorOptions& o) {
    if (o.n < 1) throw std::invalid_argument("tensor check: n must be positive");
    std::size_t states = 1;
    for (int i = 0; i < o.n; ++i) {
        states *= mu.size();
        if (states > o.max_states) {
            throw std::invalid_argument("product has more than " + std::to_string(o.max_states) +
                                        " states");
        }
    }
    const std::size_t k = mu.size();
    // digits of each state
    std::vector<std::vector<std::size_t>> digit(states, std::vector<std::size_t>(o.n));
    std::vector<double> base(states, 1.0);
    for (std::size_t s = 0; s < states; ++s) {
        std::size_t r = s;
        for (int i = 0; i < o.n; ++i) {
            digit[s][i] = r % k;
            base[s] *= mu.weight(r % k);
            r /= k;
        }
    }
    std::vector<double> c1(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) c1[i * k + j] = alpha(a * (mu.location(i) - mu.location(j)));
    }
    const nm::CounterRng rng(o.seed);
    auto draw = [&](std::size_t t, std::uint64_t stream, std::vector<std::size_t>& idx,
                    std::vector<double>& w) {
        nm::RngStream s(rng, 2 * t + stream);
        idx.clear();
        w.clear();
        const int mode = static_cast<int>((t + stream) % 3);
        if (mode == 2) {
            // exponential tilt of mu^n
            const double theta = s.uniform(-3.0, 3.0);
            for (std::size_t st = 0; st < states; ++st) {
                double sx = 0.0;
                for (int i = 0; i < o.n; ++i) sx += mu.location(digit[st][i]);
                idx.push_back(st);
                w.push_back(base[st] * std::exp(theta * sx / o.n));
            }
        } else {
            const double keep = mode == 0 ? 1.0 : s.uniform(0.05, 0.5);
            for (std::size_t st = 0; st < states; ++st) {
                const double u = s.uniform();
                const double e = -std::log(s.uniform());
                if (u <= keep) {
                    idx.push_back(st);
                    w.push_back(e);
                }
            }
            if (idx.empty()) {
                idx.push_back(s.below(states));
                w.push_back(1.0);
            }
        }
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= total;
    };
    auto entropy = [&](const std::vector<std::size_t>& idx, const std::vector<double>& w) {
        double h = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (w[i] > 0.0) h += w[i] * std::log(w[i] / base[idx[i]]);
        }
        return std::max(0.0, h);
    };
    std::vector<double> slack(o.trials);
    nm::parallel_for(o.trials, [&](std::size_t t) {
        std::vector<std::size_t> ni, bi;
        std::vector<double> nw, bw;
        draw(t, 0, ni, nw);
        if (o.strong) {
            draw(t, 1, bi, bw);
        } else {
            bi.resize(states);
            std::iota(bi.begin(), bi.end(), 0);
            bw = base;
        }
        std::vector<double> cost(ni.size() * bi.size());
        for (std::size_t i = 0; i < ni.size(); ++i) {
            for (std::size_t j = 0; j < bi.size(); ++j) {
                double c = 0.0;
                for (int d = 0; d < o.n; ++d) c += c1[digit[ni[i]][d] * k + digit[bi[j]][d]];
                cost[i * bi.size() + j] = c;
            }
        }
        std::vector<double> nl(ni.begin(), ni.end()), bl(bi.begin(), bi.end());
        const DiscreteMeasure nu(nl, nw), beta(bl, bw);
        const LpResult lp = cost_lp(nu, beta, cost, o.max_states);
        const double rhs = entropy(ni, nw) + (o.strong ? entropy(bi, bw) : 0.0);
        slack[t] = rhs - lp.value;
    });
    const auto it = std::min_element(slack.begin(), slack.end());
    const double worst = it == slack.end() ? kInf : *it;
    Verdict v = worst >= -1e-7
                    ? Verdict::holding({{"states", static_cast<double>(states)},
                                        {"trials", static_cast<double>(std::max<std::size_t>(1, o.trials))}})
                    : Verdict::failing("transport cost above entropy on the product space");
    v.details["worst_slack"] = encode_real(worst);
    v.details["worst_trial"] = it == slack.end() ? 0 : static_cast<long>(it - slack.begin());
    v.details["n"] = o.n;
    v.details["strong"] = o.strong;
    v.details["seed"] = o.seed;
    return v;
}

std::pair<double, double> wilson_interval(std::size_t hits, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ConcentrationTable concentration_mc(const Measure1D& mu, const CostFunction& alpha, double a,
                                    std::pair<double, double> interval, int n,
                                    const std::vector<double>& r_grid, std::size_t samples,
                                    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("dimension must be positive");
    if (samples == 0) throw std::invalid_argument("samples must be positive");
    const auto [lo, hi] = interval;
    ConcentrationTable out;
    out.n = n;
    out.samples = samples;
    out.seed = seed;
    out.mass_A = std::pow(interval_mass(mu, {{lo, hi}}), n);
    const nm::CounterRng rng(seed);
    constexpr std::size_t blocks = 64;
    const std::size_t nr = r_grid.size();
    std::vector<std::vector<std::size_t>> hits(blocks, std::vector<std::size_t>(nr, 0));
    std::vector<std::size_t> in_a(blocks, 0);
    nm::parallel_for(blocks, [&](std::size_t b) {
        const std::size_t s0 = samples * b / blocks, s1 = samples * (b + 1) / blocks;
        for (std::size_t s = s0; s < s1; ++s) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                const double u = rng.uniform(static_cast<std::uint64_t>(i), s);
                const double x = u < 0.5 ? mu.quantile_log_lower(std::log(u))
                                         : mu.quantile_log_upper(std::log1p(-u));
                const double d = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
                if (d > 0.0) total += alpha(a * d);
            }
            if (total == 0.0) ++in_a[b];
            for (std::size_t k = 0; k < nr; ++k) {
                if (total <= r_grid[k]) ++hits[b][k];
            }
        }
    });
    std::size_t ina = 0;
    for (std::size_t c : in_a) ina += c;
    out.empirical_mass_A = static_cast<double>(ina) / static_cast<double>(samples);
    bool broken = false;
    for (std::size_t k = 0; k < nr; ++k) {
        std::size_t h = 0;
        for (std::size_t b = 0; b < blocks; ++b) h += hits[b][k];
        const auto [l, u] = wilson_interval(h, samples);
        ConcentrationRow row;
        row.r = r_grid[k];
        row.empirical = static_cast<double>(h) / static_cast<double>(samples);
        row.lower_ci = l;
        row.upper_ci = u;
        row.bound = 1.0 - std::exp(-row.r) / out.mass_A;
        if (row.bound > row.upper_ci) broken = true;
        out.rows.push_back(row);
    }
    if (out.mass_A < 10.0 / static_cast<double>(samples)) {
        out.verdict = Verdict::unknown("mu^n(A) too small to estimate with this many samples");
    } else if (broken) {
        out.verdict = Verdict::failing("bound exceeds the upper confidence limit");
    } else {
        out.verdict = Verdict::holding({{"samples", static_cast<double>(samples)}, {"mass_A", out.mass_A}});
    }
    out.verdict.details["seed"] = seed;
    out.verdict.details["n"] = n;
    return out;
}

TestFunction constant_function(double c) {
    return {"constant", [c](double) { return c; }, [](double) { return 0.0; }};
}

TestFunction bump_function(double eps, double c, double w) {
    auto f = [eps, c, w](double x) {
        const double u = (x - c) / w;
        if (std::abs(u) >= 1.0) return 1.0;
        const double b = 1.0 - u * u;
        return 1.0 + eps * b * b;
    };
    auto df = [eps, c, w](double x) {
        const double u = (x - c) / w;
        if (std::abs(u) >= 1.0) return 0.0;
        return eps * 2.0 * (1.0 - u * u) * (-2.0 * u) / w;
    };
    std::ostringstream os;
    os << "bump eps=" << eps << " c=" << c << " w=" << w;
    return {os.str(), f, df};
}

std::vector<TestFunction> lsi_family() {
    std::vector<TestFunction> out;
    // g(x) = x on [-L, L], flattened by a smoothstep over [L, L + w]
    const double L = 2.5, W = 1.5;
    auto g = [L, W](double x) {
        const double ax = std::abs(x);
        double v;
        if (ax <= L) {
            v = ax;
        } else if (ax >= L + W) {
            v = L + W / 2;
        } else {
            const double s = (ax - L) / W;
            v = L + W * (s - s * s * s + 0.5 * s * s * s * s);
        }
        return x < 0 ? -v : v;
    };
    auto dg = [L, W](double x) {
        const double ax = std::abs(x);
        if (ax <= L) return 1.0;
        if (ax >= L + W) return 0.0;
        const double s = (ax - L) / W;
        return 1.0 - 3 * s * s + 2 * s * s * s;
    };
    for (double th : {0.1, 0.3, 0.6, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
        for (double sg : {1.0, -1.0}) {
            const double t = sg * th;
            std::ostringstream os;
            os << "tilt theta=" << t;
            out.push_back({os.str(), [t, g](double x) { return std::exp(t * g(x) / 2); },
                           [t, g, dg](double x) { return std::exp(t * g(x) / 2) * t * dg(x) / 2; }});
        }
    }
    const double cs[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const std::pair<double, double> ew[] = {{0.5, 0.5}, {-0.3, 1.0}, {0.8, 2.0}};
    for (double c : cs) {
        for (auto [e, w] : ew) out.push_back(bump_function(e, c, w));
    }
    for (double c : cs) {
        for (double e : {0.5, 2.0, -0.5}) {
            const double w = 0.75;
            std::ostringstream os;
            os << "step eps=" << e << " c=" << c;
            out.push_back({os.str(), [e, c, w](double x) { return 1.0 + e * smoothstep((x - c) / w); },
                           [e, c, w](double x) { return e * dsmoothstep((x - c) / w) / w; }});
        }
    }
    return out;
}

namespace {

nm::QuadratureOptions lsi_quad() { return {1e-15, 1e-12, 4000}; }

double integrate_mu(const Measure1D& mu, const RealFn& g) {
    const double lo = mu.quantile_log_lower(std::log(1e-13));
    const double hi = mu.quantile_log_upper(std::log(1e-13));
    const double m = mu.median();
    auto h = [&](double x) {
        const double d = mu.density(x);
        return d == 0.0 ? 0.0 : g(x) * d;
    };
    return nm::integrate(h, lo, m, lsi_quad()).value + nm::integrate(h, m, hi, lsi_quad()).value;
}

}  // namespace

double entropy_of_square(const Measure1D& mu, const TestFunction& f) {
    const double Z = integrate_mu(mu, [&](double x) {
        const double v = f.f(x);
        return v * v;
    });
    // u log(u/Z) - u + Z >= 0 pointwise and integrates to Ent(f^2)
    const double e = integrate_mu(mu, [&](double x) {
        const double v = f.f(x);
        const double u = v * v;
        return u * std::log(u / Z) - u + Z;
    });
    return std::max(0.0, e);
}

LsiReport lsi_check(const Measure1D& mu, const RealFn& beta, double C, double t,
                    const std::vector<TestFunction>& family) {
    LsiReport out;
    const double lo = mu.quantile_log_lower(std::log(1e-13));
    const double hi = mu.quantile_log_upper(std::log(1e-13));
    std::vector<LsiRow> rows(family.size());
    nm::parallel_for(family.size(), [&](std::size_t i) {
        const TestFunction& f = family[i];
        for (double x : linear_grid(lo, hi, 257)) {
            if (!(f.f(x) > 0.0)) {
                throw std::invalid_argument("test function " + f.name + " not positive at " +
                                            std::to_string(x));
            }
        }
        const double lhs = entropy_of_square(mu, f);
        const double rhs = C * integrate_mu(mu, [&](double x) {
                               const double v = f.f(x);
                               return beta(t * f.df(x) / v) * v * v;
                           });
        rows[i] = {f.name, lhs, rhs};
    });
    double worst = -kInf;
    std::string worst_name;
    nlohmann::json table = nlohmann::json::array();
    for (const LsiRow& r : rows) {
        const double excess = r.lhs - r.rhs;
        if (excess > worst) {
            worst = excess;
            worst_name = r.name;
        }
        table.push_back({{"f", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}});
    }
    out.rows = std::move(rows);
    if (worst > 1e-8) {
        out.verdict = Verdict::failing("violation found by " + worst_name);
    } else {
        out.verdict = Verdict::holding({{"C", C}, {"t", t}, {"functions", static_cast<double>(std::max<std::size_t>(1, family.size()))}});
    }
    out.verdict.details["rows"] = std::move(table);
    out.verdict.details["worst_excess"] = encode_real(worst);
    out.verdict.details["worst_function"] = worst_name;
    return out;
}

CostFunction tci_to_strong_cost(const CostFunction& theta) {
    if (!theta.convex()) throw std::invalid_argument("tci_to_strong_cost needs a convex cost");
    return theta.scaled(2.0, 0.5);
}

}  // namespace tcilab
