#pragma once

#include <vector>

namespace tcilab::numeric {

// Monotonicity-preserving piecewise cubic Hermite interpolant (PCHIP) on
// strictly increasing knots, extended linearly past both ends with the end
// slopes.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    double derivative(double x) const;

    double front() const { return xs_.front(); }
    double back() const { return xs_.back(); }
    double slope_front() const { return d_.front(); }
    double slope_back() const { return d_.back(); }
    const std::vector<double>& knots() const { return xs_; }
    const std::vector<double>& values() const { return ys_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<double> d_;
};

// Piecewise linear interpolant, clamped to the end values outside the knots.
double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x);

}  // namespace tcilab::numeric
