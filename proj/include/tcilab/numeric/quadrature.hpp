#pragma once

#include <functional>
#include <limits>

namespace tcilab::numeric {

using RealFn = std::function<double(double)>;

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod (7/15) on a finite interval. Intervals with the
// largest error estimate are bisected first.
QuadratureResult integrate(const RealFn& f, double a, double b,
                           const QuadratureOptions& opts = {});

// Result of an integral of exp(log_f) carried in log space so that
// astronomically large or small values survive.
struct LogIntegral {
    double log_value = -std::numeric_limits<double>::infinity();
    bool divergent = false;
    double span = 0.0;  // truncation point reached

    double value() const;
    bool finite() const { return !divergent; }
};

// log of the integral of exp(log_f) over [a, b].
LogIntegral log_integrate(const RealFn& log_f, double a, double b,
                          const QuadratureOptions& opts = {});

struct TailOptions {
    // First truncation point; later ones double it.
    double initial_span = 1.0;
    // Doublings before the divergence rule is armed, and before giving up.
    int warmup_doublings = 20;
    int max_doublings = 50;
    // A truncation doubling that grows the integral by more than this
    // relative amount twice in a row marks the integral as divergent.
    double growth_threshold = 0.1;
    QuadratureOptions quad{1e-13, 1e-11, 4000};
};

// log of the integral of exp(log_f(s)) for s in [0, +inf), by doubling the
// truncation point. Divergence follows the growth rule in TailOptions.
LogIntegral log_integrate_tail(const RealFn& log_f, const TailOptions& opts = {});

// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

}  // namespace tcilab::numeric
