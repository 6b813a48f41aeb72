#include "tcilab/numeric/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace tcilab::numeric {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

// QUADPACK-style 15 point Kronrod rule with the 7 point Gauss estimate.
Panel gk15(const RealFn& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        kronrod += kKronrodWeights[j] * (f1[j] + f2[j]);
        abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    const double scale = std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * scale;
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double resabs = abs_sum * scale;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(err, 50.0 * eps * resabs);
    }
    return {a, b, kronrod * half, err};
}

}  // namespace

QuadratureResult integrate(const RealFn& f, double a, double b, const QuadratureOptions& opts) {
    QuadratureResult out;
    if (a == b) return out;
    if (a > b) {
        out = integrate(f, b, a, opts);
        out.value = -out.value;
        return out;
    }
    std::priority_queue<Panel> heap;
    Panel first = gk15(f, a, b);
    out.evaluations = 15;
    double total = first.value;
    double err = first.error;
    heap.push(first);
    int subdivisions = 1;
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (!std::isfinite(total)) break;
        if (subdivisions >= opts.max_subdivisions) {
            out.converged = false;
            break;
        }
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            out.converged = false;
            break;
        }
        heap.pop();
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Re-sum to shed the drift accumulated by incremental updates.
    double sum = 0.0;
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    out.value = sum;
    out.error = esum;
    return out;
}

double LogIntegral::value() const {
    if (divergent) return std::numeric_limits<double>::infinity();
    return std::exp(log_value);
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (std::isinf(a) || std::isinf(b)) return std::numeric_limits<double>::infinity();
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

namespace {

constexpr int kSamples = 17;

// Largest sampled value of log_f on [a, b]; used as the shift so that the
// adaptive rule works on exp(log_f - shift) <= O(1).
double sampled_max(const RealFn& log_f, double a, double b) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSamples; ++i) {
        const double x = a + (b - a) * (static_cast<double>(i) / (kSamples - 1));
        const double v = log_f(x);
        if (std::isnan(v)) continue;
        best = std::max(best, v);
    }
    return best;
}

LogIntegral shifted_integral(const RealFn& log_f, double a, double b, double shift,
                             const QuadratureOptions& opts) {
    LogIntegral out;
    out.span = b - a;
    if (shift == std::numeric_limits<double>::infinity()) {
        out.divergent = true;
        return out;
    }
    if (shift == -std::numeric_limits<double>::infinity()) return out;
    auto g = [&](double x) {
        const double v = log_f(x);
        if (std::isnan(v)) return 0.0;
        return std::exp(v - shift);
    };
    QuadratureOptions local = opts;
    local.abs_tol = std::min(opts.abs_tol, 1e-14 * (b - a));
    const QuadratureResult r = integrate(g, a, b, local);
    if (!std::isfinite(r.value)) {
        out.divergent = true;
        return out;
    }
    out.log_value = r.value > 0.0 ? shift + std::log(r.value)
                                   : -std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace

LogIntegral log_integrate(const RealFn& log_f, double a, double b, const QuadratureOptions& opts) {
    if (a == b) return {};
    if (a > b) return log_integrate(log_f, b, a, opts);
    return shifted_integral(log_f, a, b, sampled_max(log_f, a, b), opts);
}

LogIntegral log_integrate_tail(const RealFn& log_f, const TailOptions& opts) {
    LogIntegral out;
    double lo = 0.0;
    double hi = opts.initial_span;
    int strikes = 0;
    for (int k = 0; k <= opts.max_doublings; ++k) {
        const double shift = sampled_max(log_f, lo, hi);
        if (shift == std::numeric_limits<double>::infinity()) {
            out.divergent = true;
            out.span = hi;
            return out;
        }
        const double before = out.log_value;
        // Segments far below the running total are skipped; they are still
        // sampled so a late blow-up is seen.
        const bool negligible = shift + std::log(hi - lo) < before - 60.0;
        if (!negligible) {
            const LogIntegral seg = shifted_integral(log_f, lo, hi, shift, opts.quad);
            if (seg.divergent) {
                out.divergent = true;
                out.span = hi;
                return out;
            }
            out.log_value = log_add(before, seg.log_value);
        }
        out.span = hi;
        if (k >= opts.warmup_doublings && before > -std::numeric_limits<double>::infinity()) {
            const double growth = std::expm1(out.log_value - before);
            strikes = growth > opts.growth_threshold ? strikes + 1 : 0;
            if (strikes >= 2) {
                out.divergent = true;
                return out;
            }
        }
        lo = hi;
        hi *= 2.0;
    }
    return out;
}

}  // namespace tcilab::numeric
