#include "tcilab/numeric/roots.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace tcilab::numeric {

double find_root(const RealFn& f, double lo, double hi, double xtol, int max_iter) {
    if (lo > hi) std::swap(lo, hi);
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::isnan(flo) || std::isnan(fhi) || (flo > 0) == (fhi > 0)) {
        throw std::domain_error("find_root: no sign change on bracket");
    }
    auto tol = [xtol](double a, double b) {
        const double width = std::abs(b - a);
        return width <= xtol || width <= 4.0 * std::numeric_limits<double>::epsilon() *
                                              std::max(std::abs(a), std::abs(b));
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    // The midpoint of the final bracket; pick the endpoint with smaller residual
    // when the function is steep.
    const double fa = std::abs(f(r.first));
    const double fb = std::abs(f(r.second));
    return fa <= fb ? r.first : r.second;
}

double find_root_increasing(const RealFn& f, double x0, double step, double lower_limit,
                            double upper_limit) {
    const double f0 = f(x0);
    if (f0 == 0.0) return x0;
    double lo = x0;
    double hi = x0;
    double h = step;
    if (f0 < 0.0) {
        for (;;) {
            hi = std::min(x0 + h, upper_limit);
            if (f(hi) >= 0.0) break;
            if (hi >= upper_limit) throw std::domain_error("find_root_increasing: no upper bracket");
            lo = hi;
            h *= 2.0;
        }
    } else {
        for (;;) {
            lo = std::max(x0 - h, lower_limit);
            if (f(lo) <= 0.0) break;
            if (lo <= lower_limit) throw std::domain_error("find_root_increasing: no lower bracket");
            hi = lo;
            h *= 2.0;
        }
    }
    return find_root(f, lo, hi);
}

Extremum maximize(const RealFn& f, double lo, double hi, int bits) {
    auto neg = [&f](double x) { return -f(x); };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, bits, iters);
    return {r.first, -r.second};
}

}  // namespace tcilab::numeric
