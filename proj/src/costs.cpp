#include "tcilab/costs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tcilab/numeric/interp.hpp"
#include "tcilab/numeric/roots.hpp"

namespace tcilab {

namespace nm = numeric;

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double numeric_right_derivative(const RealFn& f, double t) {
    const double h = 1e-5 * std::max(1.0, t);
    return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
}

double numeric_inverse(const RealFn& f, double y) {
    if (!(y > 0.0)) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (!(f(hi) >= y)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return kInfinity;
    }
    auto g = [&f, y](double t) {
        const double v = f(t);
        return std::isfinite(v) ? v - y : 1.0;
    };
    return nm::find_root(g, lo, hi);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

bool convex_on_grid(const CostFunction& a) {
    // second differences on a coarse and a fine uniform grid of [0, 64]
    for (double step : {64.0 / 4095.0, 1.0 / 1024.0}) {
        const double top = step > 0.01 ? 64.0 : 4.0;
        for (double t = step; t + step <= top; t += step) {
            const double l = a(t - step), c = a(t), r = a(t + step);
            if (!std::isfinite(l) || !std::isfinite(c) || !std::isfinite(r)) break;
            if (l + r - 2.0 * c < -1e-10 * std::max(1.0, std::abs(c))) return false;
        }
    }
    return a.derivative(0.0) >= 0.0;
}

}  // namespace

CostFunction::CostFunction(std::string name, RealFn alpha_pos, RealFn dalpha_pos,
                           RealFn inverse_pos) {
    if (!alpha_pos) throw std::invalid_argument("cost function is empty");
    Impl impl;
    impl.name = std::move(name);
    impl.f = std::move(alpha_pos);
    if (dalpha_pos) {
        impl.df = std::move(dalpha_pos);
    } else {
        RealFn f = impl.f;
        impl.df = [f](double t) { return numeric_right_derivative(f, t); };
    }
    if (inverse_pos) {
        impl.inv = std::move(inverse_pos);
    } else {
        RealFn f = impl.f;
        impl.inv = [f](double y) { return numeric_inverse(f, y); };
    }
    impl_ = std::make_shared<const Impl>(impl);
    impl.convex = convex_on_grid(*this);
    impl.class_a = validate_class_A(*this).holds();
    impl.class_v = validate_class_V([this](double t) { return (*this)(t); },
                                    [this](double t) { return derivative(t); })
                       .holds();
    impl_ = std::make_shared<const Impl>(std::move(impl));
}

double CostFunction::operator()(double x) const { return impl_->f(std::abs(x)); }

double CostFunction::derivative(double x) const {
    if (x < 0.0) return -impl_->df(-x);
    return impl_->df(x);
}

double CostFunction::left_derivative(double t) const {
    t = std::abs(t);
    if (t == 0.0) return impl_->df(0.0);
    const double h = 1e-7 * std::max(1.0, t);
    const double s = std::max(0.0, t - h);
    // derivative just left of t, and a one-sided difference as a cross-check
    const double d1 = impl_->df(s);
    const double d2 = (impl_->f(t) - impl_->f(std::max(0.0, t - 2e-5 * std::max(1.0, t)))) /
                      (t - std::max(0.0, t - 2e-5 * std::max(1.0, t)));
    return std::abs(d1 - d2) <= 1e-3 * std::max(1.0, std::abs(d1)) ? d1 : d2;
}

double CostFunction::inverse(double y) const { return impl_->inv(y); }

double CostFunction::conjugate(double y) const {
    const double ay = std::abs(y);
    if (ay == 0.0) return -(*this)(0.0);
    auto g = [this, ay](double x) { return x * ay - (*this)(x); };
    // grow the bracket until the derivative of g turns negative
    double hi = 1.0;
    double limit = g(1.0);
    bool flat = false;
    while (derivative(hi) <= ay) {
        if (hi > 1e60) {
            // slope never exceeds |y|: unbounded unless g has levelled off, in
            // which case the sup is the limit or an interior maximum
            const double a = g(hi / 2), b = g(hi);
            if (!std::isfinite(b) || b - a > 1e-9 * std::max(1.0, std::abs(a))) return kInfinity;
            flat = true;
            hi = 64.0;
            break;
        }
        hi *= 2.0;
        // doubling points beyond 1e12 lose the small difference
        if (hi < 1e12) limit = std::max(limit, g(hi));
    }
    const double levelled = flat ? limit : -kInfinity;
    if (convex()) {
        return std::max({levelled, g(0.0), nm::maximize(g, 0.0, hi, 52).value});
    }
    // nonconvex: global scan then refinement
    constexpr int n = 4096;
    double best = g(0.0);
    int best_i = 0;
    for (int i = 1; i <= n; ++i) {
        const double v = g(hi * i / n);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double a = hi * std::max(0, best_i - 1) / n;
    const double b = hi * std::min(n, best_i + 1) / n;
    return std::max({levelled, best, nm::maximize(g, a, b, 52).value});
}

CostFunction CostFunction::scaled(double prefactor, double arg_scale) const {
    if (!(prefactor > 0.0) || !(arg_scale > 0.0)) throw std::invalid_argument("scales must be positive");
    if (prefactor == 1.0 && arg_scale == 1.0) return *this;
    auto base = impl_;
    const double k = prefactor, s = arg_scale;
    std::string n = fmt(k) + "*" + base->name;
    if (s != 1.0) n += "(" + fmt(s) + "x)";
    return CostFunction(
        n, [base, k, s](double t) { return k * base->f(s * t); },
        [base, k, s](double t) { return k * s * base->df(s * t); },
        [base, k, s](double y) { return base->inv(y / k) / s; });
}

CostFunction alpha1() {
    return CostFunction(
        "alpha1", [](double t) { return t <= 1.0 ? t * t : t; },
        [](double t) { return t < 1.0 ? 2.0 * t : 1.0; },
        [](double y) { return y <= 1.0 ? std::sqrt(std::max(0.0, y)) : y; });
}

CostFunction alpha_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("alpha_p: p must be >= 1");
    const std::string n = "alpha_p p=" + fmt(p);
    if (p >= 2.0) {
        return CostFunction(
            n, [p](double t) { return std::pow(t, p); },
            [p](double t) { return p * std::pow(t, p - 1.0); },
            [p](double y) { return std::pow(std::max(0.0, y), 1.0 / p); });
    }
    return CostFunction(
        n, [p](double t) { return t <= 1.0 ? t * t : std::pow(t, p); },
        [p](double t) { return t < 1.0 ? 2.0 * t : p * std::pow(t, p - 1.0); },
        [p](double y) { return y <= 1.0 ? std::sqrt(std::max(0.0, y)) : std::pow(y, 1.0 / p); });
}

CostFunction theta_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("theta_p: p must be >= 1");
    const double c = 2.0 / p;
    return CostFunction(
        "theta_p p=" + fmt(p),
        [p, c](double t) { return t <= 1.0 ? t * t : c * std::pow(t, p) + 1.0 - c; },
        [p](double t) { return t < 1.0 ? 2.0 * t : 2.0 * std::pow(t, p - 1.0); },
        [p, c](double y) {
            if (y <= 1.0) return std::sqrt(std::max(0.0, y));
            return std::pow((y - 1.0 + c) / c, 1.0 / p);
        });
}

CostFunction maurey_tilde() {
    return CostFunction(
        "maurey", [](double t) { return t <= 4.0 ? t * t / 36.0 : (2.0 / 9.0) * (t - 2.0); },
        [](double t) { return t < 4.0 ? t / 18.0 : 2.0 / 9.0; },
        [](double y) {
            if (y <= 16.0 / 36.0) return 6.0 * std::sqrt(std::max(0.0, y));
            return 4.5 * y + 2.0;
        });
}

CostFunction talagrand_gamma(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("gamma: lambda must be in (0,1)");
    const double k = 1.0 / lambda - 1.0;
    return CostFunction(
        "gamma lambda=" + fmt(lambda),
        [lambda, k](double t) { return k * (std::expm1(-lambda * t) + lambda * t); },
        [lambda, k](double t) { return k * lambda * -std::expm1(-lambda * t); });
}

CostFunction quadratic() {
    return CostFunction(
        "quadratic", [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
        [](double y) { return std::sqrt(std::max(0.0, y)); });
}

CostFunction absolute() {
    return CostFunction(
        "abs", [](double t) { return t; }, [](double) { return 1.0; },
        [](double y) { return std::max(0.0, y); });
}

CostFunction spliced(std::string name, RealFn g, RealFn dg) {
    const double g1 = g(1.0);
    RealFn f = [g, g1](double t) { return t <= 1.0 ? t * t : g(t) - g1 + 1.0; };
    RealFn df = nullptr;
    if (dg) df = [dg](double t) { return t < 1.0 ? 2.0 * t : dg(t); };
    return CostFunction(std::move(name), std::move(f), std::move(df));
}

CostFunction cost_from_table(std::vector<double> t, std::vector<double> alpha, std::string name) {
    if (t.empty() || t.front() != 0.0 || alpha.front() != 0.0) {
        throw std::invalid_argument("cost table must start at t=0 with alpha=0");
    }
    auto table = std::make_shared<nm::MonotoneCubic>(std::move(t), std::move(alpha));
    if (!(table->slope_back() > 0.0)) throw std::invalid_argument("cost table must end increasing");
    return CostFunction(
        std::move(name), [table](double s) { return (*table)(s); },
        [table](double s) { return table->derivative(s); });
}

CostFunction load_cost_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open cost table " + path);
    std::vector<double> ts, as;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double t = 0.0, a = 0.0;
        if (!(row >> t >> a)) {
            if (header) {
                header = false;
                continue;
            }
            throw std::invalid_argument("bad cost table row: " + line);
        }
        header = false;
        ts.push_back(t);
        as.push_back(a);
    }
    return cost_from_table(std::move(ts), std::move(as), "table file=" + path);
}

CostFunction builtin_cost(BuiltinCost kind, double param) {
    switch (kind) {
        case BuiltinCost::alpha1: return alpha1();
        case BuiltinCost::alpha_p: return alpha_p(param);
        case BuiltinCost::theta_p: return theta_p(param);
        case BuiltinCost::maurey_tilde: return maurey_tilde();
        case BuiltinCost::talagrand_gamma: return talagrand_gamma(param);
    }
    throw std::invalid_argument("unknown cost");
}

Verdict validate_class_A(const CostFunction& alpha, const ClassAGrid& grid) {
    const int n = grid.points;
    std::vector<double> t(n), v(n);
    for (int i = 0; i < n; ++i) {
        t[i] = grid.t_max * i / (n - 1);
        v[i] = alpha(t[i]);
    }
    auto fail = [&](const std::string& what, double at) {
        Verdict out = Verdict::failing(what);
        out.details["condition"] = what;
        out.details["at"] = at;
        out.details["grid"] = {{"t_max", grid.t_max}, {"points", n}};
        return out;
    };
    if (alpha(0.0) != 0.0) return fail("alpha(0) = 0", 0.0);
    for (int i = 0; i < n; ++i) {
        if (alpha(-t[i]) != v[i]) return fail("even", t[i]);
        if (i > 0 && v[i] < v[i - 1]) return fail("nondecreasing", t[i]);
    }
    for (int i = 0; i <= 1024; ++i) {
        const double s = static_cast<double>(i) / 1024.0;
        if (std::abs(alpha(s) - s * s) > 1e-12) return fail("quadratic near 0", s);
    }
    const int m = grid.superadditive_points;
    for (int i = 1; i <= m; ++i) {
        const double x = grid.t_max * 0.5 * i / m;
        const double ax = alpha(x);
        for (int j = 1; j <= i; ++j) {
            const double y = grid.t_max * 0.5 * j / m;
            const double lhs = alpha(x + y);
            const double rhs = ax + alpha(y);
            if (std::isfinite(rhs) && lhs < rhs - 1e-12 * std::max(1.0, rhs)) {
                Verdict out = fail("superadditivity", x);
                out.details["y"] = y;
                return out;
            }
        }
    }
    Verdict out;
    out.status = Status::holds;
    out.details["grid"] = {{"t_max", grid.t_max}, {"points", n}};
    return out;
}

Verdict validate_class_V(const RealFn& f, const RealFn& df, double sign, double x_max,
                         double ratio_tol) {
    // largest probe where f and f' are finite
    double top = x_max;
    while (top > 10.0 && !(std::isfinite(f(sign * top)) && std::isfinite(df(sign * top * 1.001)))) {
        top /= 2.0;
    }
    if (!std::isfinite(f(sign * top))) return Verdict::unknown("function not finite on probes");
    double worst = 0.0;
    double worst_x = 0.0;
    nlohmann::json table = nlohmann::json::array();
    for (int i = 0; i <= 16; ++i) {
        const double x = sign * top * std::pow(10.0, -1.0 + i / 16.0);
        const double d1 = df(x);
        if (!(sign * d1 > 0.0)) {
            Verdict v = Verdict::failing("derivative does not have the sign of the direction");
            v.details["x"] = x;
            return v;
        }
        const double h = 1e-4 * std::abs(x);
        const double d2 = (df(x + h) - df(x - h)) / (2.0 * h);
        const double r = d2 / (d1 * d1);
        table.push_back({{"x", x}, {"ratio", encode_real(r)}});
        if (!std::isfinite(r) || std::abs(r) > worst) {
            worst = std::isfinite(r) ? std::abs(r) : kInfinity;
            worst_x = x;
        }
    }
    Verdict v;
    if (worst <= ratio_tol) {
        v.status = Status::holds;
    } else {
        v = Verdict::failing("f''/f'^2 does not vanish");
    }
    v.details["probes"] = table;
    v.details["worst_ratio"] = encode_real(worst);
    v.details["worst_x"] = worst_x;
    return v;
}

double kink(const CostFunction& alpha, double t) {
    const double r = alpha.derivative(t);
    const double l = alpha.left_derivative(t);
    const double scale = std::max(std::abs(l), std::abs(r));
    if (scale == 0.0) return 0.0;
    return std::abs(r - l) / scale;
}

double scaling_equivalence_constant(const CostFunction& theta, double b1, double b2, double a) {
    if (!(b1 > 0.0) || !(b2 > 0.0) || !(a > 0.0)) throw std::invalid_argument("b1, b2, a must be positive");
    for (int k = 2; k <= 8; ++k) {
        for (int i = 1; i <= 512; ++i) {
            const double x = 16.0 * i / 512;
            const double lhs = theta(k * x);
            const double rhs = k * theta(x);
            if (std::isfinite(rhs) && lhs < rhs - 1e-12 * std::max(1.0, rhs)) {
                throw std::invalid_argument("theta(kx) >= k theta(x) fails at k=" + std::to_string(k) +
                                            ", x=" + fmt(x));
            }
        }
    }
    return a / (b2 * std::ceil(b1));
}

}  // namespace tcilab
