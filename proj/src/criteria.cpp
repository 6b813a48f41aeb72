#include "tcilab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tcilab/numeric/parallel.hpp"
#include "tcilab/numeric/quadrature.hpp"
#include "tcilab/numeric/roots.hpp"

namespace tcilab {

namespace nm = numeric;

namespace {

constexpr double kLog2 = 0.69314718055994530942;

double log_tail_side(const Measure1D& mu, double x, Side side) {
    return side == Side::plus ? mu.log_sf(x) : mu.log_cdf(x);
}

double step(double x, double d, Side side) { return side == Side::plus ? x + d : x - d; }

struct LogSup {
    double log_value = -kInf;
    double argmax = 0.0;
    bool divergent = false;
    std::vector<double> grid;
};

// sup over the side grid of exp(log_g), with a divergence probe past the
// last grid point and a Brent refinement around the best grid point.
LogSup log_sup(const Measure1D& mu, Side side, const RealFn& log_g, const CriteriaOptions& o) {
    LogSup out;
    out.grid = side_grid(mu, side, o);
    const auto& xs = out.grid;
    const Support sup = mu.support();
    std::vector<double> vals(xs.size(), -kInf);
    vals[0] = log_g(xs[0]);
    if (vals[0] == kInf) {
        out.log_value = kInf;
        out.argmax = xs[0];
        out.divergent = true;
        return out;
    }
    nm::parallel_for(xs.size() - 1, [&](std::size_t k) {
        const double v = log_g(xs[k + 1]);
        vals[k + 1] = std::isnan(v) ? -kInf : v;
    });
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (vals[i] == kInf) {
            out.log_value = kInf;
            out.argmax = xs[i];
            out.divergent = true;
            return out;
        }
    }
    // growth past the truncation point
    const double m = xs[0];
    const double dmax = std::abs(xs.back() - m);
    const double l1 = vals.back();
    double prev = l1;
    int strikes = 0;
    double ext_best = -kInf, ext_x = xs.back();
    for (double f : {2.0, 4.0}) {
        const double x = step(m, f * dmax, side);
        double v = sup.contains(x) ? log_g(x) : -kInf;
        if (std::isnan(v)) v = -kInf;
        if (v > ext_best) {
            ext_best = v;
            ext_x = x;
        }
        if (v == kInf || (std::isfinite(prev) && v - prev > std::log1p(o.growth_threshold))) {
            ++strikes;
        }
        prev = v;
    }
    if (strikes >= 2) {
        out.log_value = kInf;
        out.argmax = ext_x;
        out.divergent = true;
        return out;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (vals[i] > vals[best]) best = i;
    }
    out.log_value = vals[best];
    out.argmax = xs[best];
    if (ext_best > out.log_value) {
        out.log_value = ext_best;
        out.argmax = ext_x;
        return out;
    }
    if (!std::isfinite(out.log_value)) return out;
    const double lo = xs[best == 0 ? 0 : best - 1];
    const double hi = xs[std::min(best + 1, xs.size() - 1)];
    if (lo != hi) {
        const nm::Extremum e = nm::maximize(
            [&](double x) {
                const double v = log_g(x);
                return std::isnan(v) ? -kInf : v;
            },
            std::min(lo, hi), std::max(lo, hi));
        if (e.value > out.log_value) {
            out.log_value = e.value;
            out.argmax = e.x;
        }
    }
    return out;
}

std::vector<double> default_h_grid() { return linear_grid(0.0, 16.0, 64); }

}  // namespace

double RearrangementMap::forward(double x) const {
    if (x == 0.0) return median;
    if (x > 0.0) return mu.quantile_log_upper(-x - kLog2);
    return mu.quantile_log_lower(x - kLog2);
}

double RearrangementMap::inverse(double y) const {
    if (y >= median) return -kLog2 - mu.log_sf(y);
    return kLog2 + mu.log_cdf(y);
}

double RearrangementMap::modulus(double h) const {
    double best = 0.0;
    for (double s : s_grid) {
        const double d = forward(s + h) - forward(s);
        if (std::isnan(d)) continue;
        best = std::max(best, d);
    }
    return best;
}

double RearrangementMap::inverse_modulus(double h) const {
    double best = kInf;
    for (double s : s_grid) {
        const double d = inverse(forward(s) + h) - s;
        if (std::isnan(d)) continue;
        best = std::min(best, d);
    }
    return std::max(0.0, best);
}

RearrangementMap rearrangement(const Measure1D& mu, std::vector<double> h_grid) {
    RearrangementMap rm{mu, mu.median(), std::nullopt, {}, {}, {}, {}};
    const double S = -std::log(2e-10);
    rm.s_grid = linear_grid(-S, S, 1601);
    rm.h_grid = h_grid.empty() ? default_h_grid() : std::move(h_grid);
    rm.delta.resize(rm.h_grid.size());
    rm.omega.resize(rm.h_grid.size());
    nm::parallel_for(rm.h_grid.size(), [&](std::size_t i) {
        rm.delta[i] = rm.modulus(rm.h_grid[i]);
        rm.omega[i] = rm.inverse_modulus(rm.h_grid[i]);
    });
    return rm;
}

std::vector<double> side_grid(const Measure1D& mu, Side side, const CriteriaOptions& o) {
    const double m = mu.median();
    const double lt = std::log(o.tail_mass);
    const double q = side == Side::plus ? mu.quantile_log_upper(lt) : mu.quantile_log_lower(lt);
    const double dmax = std::abs(q - m);
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(o.sup_grid_points) + 1);
    xs.push_back(m);
    if (!(dmax > 0.0) || !std::isfinite(dmax)) return xs;
    for (double d : geometric_grid(dmax * 1e-6, dmax, o.sup_grid_points)) {
        xs.push_back(step(m, d, side));
    }
    return xs;
}

OmegaBounds omega_bounds(const RearrangementMap& rm, const std::vector<double>& h_grid,
                         const CriteriaOptions& o) {
    OmegaBounds out;
    out.h = h_grid;
    const Measure1D& mu = rm.mu;
    auto side_omega = [&](Side side, double h) {
        if (h <= 0.0) return 0.0;
        double best = kInf;
        for (double x : side_grid(mu, side, o)) {
            const double l0 = log_tail_side(mu, x, side);
            if (l0 == -kInf) continue;
            const double d = l0 - log_tail_side(mu, step(x, h, side), side);
            if (!std::isnan(d)) best = std::min(best, d);
        }
        return std::max(0.0, best);
    };
    const std::size_t n = h_grid.size();
    out.plus.resize(n);
    out.minus.resize(n);
    out.lower.resize(n);
    nm::parallel_for(n, [&](std::size_t i) {
        const double h = h_grid[i];
        out.plus[i] = side_omega(Side::plus, h);
        out.minus[i] = side_omega(Side::minus, h);
        out.lower[i] = std::min(side_omega(Side::plus, h / 2), side_omega(Side::minus, h / 2));
    });
    for (std::size_t i = 1; i < n; ++i) {
        out.plus[i] = std::max(out.plus[i], out.plus[i - 1]);
        out.minus[i] = std::max(out.minus[i], out.minus[i - 1]);
        out.lower[i] = std::max(out.lower[i], out.lower[i - 1]);
    }
    return out;
}

Verdict lipschitz_check(const Measure1D& mu, const CriteriaOptions& o) {
    auto mills = [&](Side side) {
        return [&mu, side](double x) { return log_tail_side(mu, x, side) - mu.log_density(x); };
    };
    const LogSup p = log_sup(mu, Side::plus, mills(Side::plus), o);
    const LogSup q = log_sup(mu, Side::minus, mills(Side::minus), o);
    const double ap = std::exp(p.log_value), am = std::exp(q.log_value);
    Verdict v;
    if (p.divergent || q.divergent || !std::isfinite(ap) || !std::isfinite(am)) {
        v = Verdict::failing("A diverges", {{"A+", ap}, {"A-", am}});
    } else {
        const double a = 1.0 / std::max(ap, am);
        v = Verdict::holding({{"A+", ap}, {"A-", am}, {"a", a}, {"lipschitz_bound", 1.0 / a}});
        // residual tails against e^{-a h} on a coarse spot grid
        double worst = -kInf;
        for (Side side : {Side::plus, Side::minus}) {
            const auto& xs = side == Side::plus ? p.grid : q.grid;
            for (std::size_t i = 0; i < xs.size(); i += 32) {
                const double l0 = log_tail_side(mu, xs[i], side);
                if (l0 == -kInf) continue;
                for (double h : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
                    const double hh = h / a;
                    const double lt = log_tail_side(mu, step(xs[i], hh, side), side) - l0;
                    if (std::isfinite(lt)) worst = std::max(worst, lt + a * hh);
                }
            }
        }
        v.details["domination_worst_log_margin"] = encode_real(worst);
    }
    v.details["argmax+"] = encode_real(p.argmax);
    v.details["argmax-"] = encode_real(q.argmax);
    v.details["grid_points"] = o.sup_grid_points;
    v.details["tail_mass"] = o.tail_mass;
    return v;
}

MuckenhouptResult muckenhoupt(const Measure1D& mu, const CriteriaOptions& o) {
    const double m = mu.median();
    auto inv_density = [&mu](double x) { return -mu.log_density(x); };
    auto g = [&](Side side) {
        return [&, side](double x) {
            if (x == m) return -kInf;
            const double lo = std::min(x, m), hi = std::max(x, m);
            const nm::LogIntegral I = nm::log_integrate(inv_density, lo, hi, {1e-13, 1e-11, 4000});
            if (I.divergent) return kInf;
            return log_tail_side(mu, x, side) + I.log_value;
        };
    };
    const LogSup p = log_sup(mu, Side::plus, g(Side::plus), o);
    const LogSup q = log_sup(mu, Side::minus, g(Side::minus), o);
    return {std::exp(p.log_value), std::exp(q.log_value), p.argmax, q.argmax};
}

double residual_moment(const Measure1D& mu, const CostFunction& alpha, double b, double x,
                       Side side) {
    const double lm = log_tail_side(mu, x, side);
    if (lm == -kInf) return kInf;
    const double ld0 = mu.log_density(x);
    nm::TailOptions t;
    t.initial_span = std::clamp(std::exp(lm - ld0), 1e-8, 1e8);
    if (!std::isfinite(t.initial_span)) t.initial_span = 1.0;
    auto log_f = [&](double z) {
        const double ld = mu.log_density(step(x, z, side));
        if (ld == -kInf) return -kInf;
        return alpha(b * z) + ld - lm;
    };
    const nm::LogIntegral I = nm::log_integrate_tail(log_f, t);
    if (I.divergent) return kInf;
    return std::exp(I.log_value);
}

double moment_integral(const Measure1D& mu, const CostFunction& alpha, double b) {
    double total = -kInf;
    for (double sgn : {1.0, -1.0}) {
        auto log_f = [&](double z) {
            const double ld = mu.log_density(sgn * z);
            if (ld == -kInf) return -kInf;
            return alpha(b * z) + ld;
        };
        const nm::LogIntegral I = nm::log_integrate_tail(log_f);
        if (I.divergent) return kInf;
        total = nm::log_add(total, I.log_value);
    }
    return std::exp(total);
}

double K_moment(const Measure1D& mu, const CostFunction& alpha, double b, Side side,
                const CriteriaOptions& o) {
    if (!(b > 0.0)) throw std::invalid_argument("K_moment: b must be positive");
    auto g = [&](double x) { return std::log(residual_moment(mu, alpha, b, x, side)); };
    const LogSup s = log_sup(mu, side, g, o);
    if (s.divergent) return kInf;
    return std::exp(s.log_value);
}

double tech_lemma_scale(double a0, double b0, double K, const CostFunction& alpha) {
    double a = std::min(a0, b0 / 2.0);
    const double lk = std::log(K);
    if (lk > 0.0) a = std::min(a, 1.0 / (2.0 / b0 * alpha.inverse(lk)));
    return a;
}

Verdict decide_strong_tci_lip(const Measure1D& mu, const CostFunction& alpha,
                              const CriteriaOptions& o) {
    if (!alpha.in_class_A()) {
        Verdict v = Verdict::unknown("cost is not in class A");
        v.details["cost"] = alpha.name();
        return v;
    }
    nlohmann::json scan = nlohmann::json::array();
    double b = 1.0, kp = kInf, km = kInf;
    bool found = false;
    for (int i = 0; i <= o.b_scan_steps; ++i, b /= 2.0) {
        kp = K_moment(mu, alpha, b, Side::plus, o);
        km = std::isfinite(kp) ? K_moment(mu, alpha, b, Side::minus, o) : kInf;
        scan.push_back({{"b", b}, {"K+", encode_real(kp)}, {"K-", encode_real(km)}});
        if (std::isfinite(kp) && std::isfinite(km)) {
            found = true;
            break;
        }
    }
    Verdict v;
    if (!found) {
        v = Verdict::failing("K is infinite for every scanned b");
    } else {
        const Verdict lip = lipschitz_check(mu, o);
        if (!lip.holds()) {
            v = Verdict::unknown("not in Lip#mu1: " + lip.diagnostics, {{"b", b}, {"K+", kp}, {"K-", km}});
            v.details["lipschitz"] = to_json(lip);
        } else {
            const double a0 = lip.at("a");
            const double K = std::max(kp, km);
            const double a = tech_lemma_scale(a0, b, K, alpha);
            v = Verdict::holding({{"a0", a0},
                                  {"A+", lip.at("A+")},
                                  {"A-", lip.at("A-")},
                                  {"b", b},
                                  {"K+", kp},
                                  {"K-", km},
                                  {"a", a},
                                  {"kappa", o.kappa},
                                  {"scale", a / (2.0 * o.kappa)}},
                                 "sufficient, not optimal");
        }
    }
    v.details["b_scan"] = std::move(scan);
    return v;
}

Verdict decide_strong_tci_logconcave(const Measure1D& mu, const CostFunction& alpha,
                                     const CriteriaOptions& o) {
    const Verdict lc = is_log_concave(mu);
    if (!lc.holds()) {
        Verdict v = Verdict::unknown("log-concavity not established: " + lc.diagnostics);
        v.details["log_concave"] = to_json(lc);
        return v;
    }
    if (!alpha.in_class_A()) return Verdict::unknown("cost is not in class A");
    const double m = mu.median();
    // minus the right derivative of log(1-F) at m, and its mirror
    const double a0p = std::exp(mu.log_density(m) - mu.log_sf(m));
    const double a0m = std::exp(mu.log_density(m) - mu.log_cdf(m));
    const double a0 = std::min(a0p, a0m);

    nlohmann::json scan = nlohmann::json::array();
    double b = 1.0, M = kInf;
    int i = 0;
    for (; i <= o.b_scan_steps; ++i, b /= 2.0) {
        M = moment_integral(mu, alpha, b);
        scan.push_back({{"b", b}, {"moment", encode_real(M)}});
        if (std::isfinite(M)) break;
    }
    if (!std::isfinite(M)) {
        Verdict v = Verdict::failing("moment integral is infinite for every scanned b");
        v.details["b_scan"] = std::move(scan);
        return v;
    }
    // moments of the residual laws at the median
    double kp = kInf, km = kInf, b0 = b;
    for (; i <= o.b_scan_steps; ++i, b0 /= 2.0) {
        kp = residual_moment(mu, alpha, b0, m, Side::plus);
        km = residual_moment(mu, alpha, b0, m, Side::minus);
        if (std::isfinite(kp) && std::isfinite(km)) break;
    }
    if (!std::isfinite(kp) || !std::isfinite(km)) {
        Verdict v = Verdict::unknown("residual moments at the median are infinite");
        v.details["b_scan"] = std::move(scan);
        return v;
    }
    const double a = std::min(tech_lemma_scale(a0p, b0, kp, alpha),
                              tech_lemma_scale(a0m, b0, km, alpha));

    // alpha1(-log G0(h)) >= alpha(a h) with G0(h) = 2 max(1-F(m+h), F(m-h))
    const CostFunction a1 = alpha1();
    const std::vector<double> hs = side_grid(mu, Side::plus, o);
    const std::vector<double> hm = side_grid(mu, Side::minus, o);
    std::vector<double> h_grid;
    for (double x : hs) h_grid.push_back(x - m);
    for (double x : hm) h_grid.push_back(m - x);
    std::sort(h_grid.begin(), h_grid.end());
    h_grid.erase(std::unique(h_grid.begin(), h_grid.end()), h_grid.end());
    double worst = -kInf, worst_h = 0.0;
    for (double h : h_grid) {
        const double lg = kLog2 + std::max(mu.log_sf(m + h), mu.log_cdf(m - h));
        const double lhs = a1(std::max(0.0, -lg));
        const double rhs = alpha(a * h);
        const double margin = rhs - lhs - 1e-9 * std::max(1.0, rhs);
        if (margin > worst) {
            worst = margin;
            worst_h = h;
        }
    }
    Verdict v;
    if (worst > 0.0) {
        v = Verdict::unknown("natural-cost certificate fails on the grid",
                             {{"a", a}, {"b", b0}, {"K+", kp}, {"K-", km}});
    } else {
        v = Verdict::holding({{"a0", a0},
                              {"b", b0},
                              {"moment", M},
                              {"K+", kp},
                              {"K-", km},
                              {"a", a},
                              {"kappa", o.kappa},
                              {"scale", a / (2.0 * o.kappa)}},
                             "sufficient, not optimal");
    }
    v.details["b_scan"] = std::move(scan);
    v.details["certificate"] = {{"worst_margin", encode_real(worst)},
                                {"at_h", worst_h},
                                {"h_points", h_grid.size()}};
    return v;
}

Verdict suff_condition(const Measure1D& mu, const CostFunction& alpha,
                       std::vector<double> lambda_grid, const CriteriaOptions& o) {
    if (lambda_grid.empty()) lambda_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
    const Verdict lip = lipschitz_check(mu, o);
    if (!lip.holds()) {
        Verdict v = Verdict::failing("not in Lip#mu1: " + lip.diagnostics);
        v.details["lipschitz"] = to_json(lip);
        return v;
    }
    const double m = mu.median();
    const double probes[] = {10.0, 20.0, 40.0, 80.0};
    nlohmann::json table = nlohmann::json::array();
    double best_lambda = 0.0, best_ratio = kInf;
    bool any_nonmonotone = false;
    for (double lambda : lambda_grid) {
        bool bounded = true;
        double rmax = 0.0;
        nlohmann::json row = {{"lambda", lambda}};
        for (double sgn : {1.0, -1.0}) {
            std::vector<double> r;
            for (double u : probes) {
                const double dv = mu.dpotential(sgn * u + m);
                const double q = sgn * dv > 0.0 ? alpha.derivative(lambda * sgn * u) / dv : kInf;
                r.push_back(q);
            }
            const double earlier = std::max({r[0], r[1], r[2]});
            const bool ok = std::isfinite(r[3]) && r[3] <= 1.2 * earlier;
            const bool up = std::is_sorted(r.begin(), r.end());
            const bool down = std::is_sorted(r.rbegin(), r.rend());
            if (!ok && !up && !down) any_nonmonotone = true;
            bounded = bounded && ok;
            for (double q : r) rmax = std::max(rmax, q);
            nlohmann::json rs = nlohmann::json::array();
            for (double q : r) rs.push_back(encode_real(q));
            row[sgn > 0 ? "plus" : "minus"] = rs;
        }
        row["bounded"] = bounded;
        table.push_back(row);
        if (bounded && best_lambda == 0.0) {
            best_lambda = lambda;
            best_ratio = rmax;
        }
    }
    Verdict v;
    const Verdict vp = validate_class_V([&mu](double x) { return mu.potential(x); },
                                        [&mu](double x) { return mu.dpotential(x); }, 1.0);
    const Verdict vm = validate_class_V([&mu](double x) { return mu.potential(x); },
                                        [&mu](double x) { return mu.dpotential(x); }, -1.0);
    const double kk = kink(alpha, 1.0);
    if (best_lambda == 0.0) {
        v = any_nonmonotone ? Verdict::unknown("ratio trend is not monotone at the largest probes")
                            : Verdict::failing("ratio unbounded for every lambda");
    } else if (!vp.holds() || !vm.holds()) {
        v = Verdict::unknown("potential not in class V: " + (vp.holds() ? vm : vp).diagnostics);
    } else if (!alpha.in_class_V()) {
        v = Verdict::unknown("cost not in class V");
    } else if (kk > 0.1) {
        v = Verdict::unknown("one-sided derivatives of the cost differ at |t| = 1");
    } else {
        v = Verdict::holding({{"lambda", best_lambda},
                              {"ratio_max", best_ratio},
                              {"a", lip.at("a")},
                              {"A+", lip.at("A+")},
                              {"A-", lip.at("A-")}});
    }
    v.details["probes"] = std::move(table);
    v.details["kink_at_1"] = kk;
    return v;
}

std::vector<double> int_equiv_ratio(const RealFn& phi, const RealFn& dphi,
                                    const std::vector<double>& x_probes) {
    std::vector<double> out;
    out.reserve(x_probes.size());
    for (double x : x_probes) {
        const double d = dphi(x);
        const double p0 = phi(x);
        nm::TailOptions t;
        t.initial_span = d > 0.0 ? std::clamp(1.0 / d, 1e-8, 1e8) : 1.0;
        const nm::LogIntegral I = nm::log_integrate_tail([&](double s) { return p0 - phi(x + s); }, t);
        if (I.divergent || !(d > 0.0)) {
            out.push_back(std::nan(""));
            continue;
        }
        out.push_back(std::exp(std::log(d) + I.log_value));
    }
    return out;
}

TildePotential lsi_tilde_potential(const RealFn& V, const RealFn& dV) {
    TildePotential out;
    auto g = [&](double x) { return x * dV(x) - 2.0; };
    const double lo = 1e-6, hi = 1e6;
    const double glo = g(lo), ghi = g(hi);
    if (!(glo < 0.0 && ghi > 0.0)) {
        out.verdict = Verdict::unknown("a0 V'(a0) = 2 not bracketed on [1e-6, 1e6]");
        return out;
    }
    const double a0 = nm::find_root(g, lo, hi);
    out.a0 = a0;
    const double v0 = V(a0);
    CostFunction tilde(
        "tilde_V",
        [V, a0, v0](double t) { return t <= 1.0 ? t * t : V(a0 * t) + 1.0 - v0; },
        [dV, a0](double t) { return t < 1.0 ? 2.0 * t : a0 * dV(a0 * t); });
    out.tilde_v = tilde;
    if (!tilde.convex()) {
        out.verdict = Verdict::failing("tilde V is not convex", {{"a0", a0}});
    } else if (!tilde.in_class_A()) {
        out.verdict = Verdict::failing("tilde V is not in class A", {{"a0", a0}});
    } else {
        out.verdict = Verdict::holding({{"a0", a0}});
    }
    return out;
}

TildePotential lsi_tilde_potential(const Measure1D& mu) {
    return lsi_tilde_potential([mu](double x) { return mu.potential(x); },
                               [mu](double x) { return mu.dpotential(x); });
}

double SkewedCost::operator()(double y1, double y2) const {
    if (y1 == y2) return 0.0;
    return base(rm.inverse(y1) - rm.inverse(y2));
}

SkewedCost skewed_cost(const RearrangementMap& rm, const CostFunction& base) { return {rm, base}; }

}  // namespace tcilab
