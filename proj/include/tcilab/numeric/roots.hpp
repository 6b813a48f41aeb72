#pragma once

#include <functional>

namespace tcilab::numeric {

using RealFn = std::function<double(double)>;

// Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
// Bracketing TOMS 748 iterations until the bracket is below xtol.
double find_root(const RealFn& f, double lo, double hi, double xtol = 0.0,
                 int max_iter = 300);

// Root of a nondecreasing f, found by growing a bracket outward from x0 by
// doubling steps of initial size step.
double find_root_increasing(const RealFn& f, double x0, double step = 1.0,
                            double lower_limit = -1e300, double upper_limit = 1e300);

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

// Local maximum of f on [lo, hi] by Brent's golden-section/parabolic search.
Extremum maximize(const RealFn& f, double lo, double hi, int bits = 40);

}  // namespace tcilab::numeric
