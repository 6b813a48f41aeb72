#include "tcilab/numeric/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcilab::numeric {

namespace {

// Fritsch-Carlson end and interior slopes with the Fritsch-Butland harmonic
// mean, as in PCHIP.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        s[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i - 1] * s[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double s0, double s1) {
        double e = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (e * s0 <= 0.0) return 0.0;
        if (s0 * s1 <= 0.0 && std::abs(e) > 3.0 * std::abs(s0)) return 3.0 * s0;
        return e;
    };
    d[0] = end_slope(h[0], h[1], s[0], s[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.size() < 2) {
        throw std::invalid_argument("interpolation table needs at least two matching points");
    }
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("knots must be strictly increasing");
    }
    d_ = pchip_slopes(xs_, ys_);
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, xs_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front() + d_.front() * (x - xs_.front());
    if (x >= xs_.back()) return ys_.back() + d_.back() * (x - xs_.back());
    const std::size_t i = segment(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
           (-2 * t3 + 3 * t2) * ys_[i + 1] + (t3 - t2) * h * d_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    if (x < xs_.front()) return d_.front();
    if (x >= xs_.back()) return d_.back();
    const std::size_t i = segment(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * ys_[i] + (6 * t - 6 * t2) * ys_[i + 1]) / h +
           (3 * t2 - 4 * t + 1) * d_[i] + (3 * t2 - 2 * t) * d_[i + 1];
}

double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
}

}  // namespace tcilab::numeric
