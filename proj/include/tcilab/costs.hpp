#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tcilab/verdict.hpp"

namespace tcilab {

using RealFn = std::function<double(double)>;

// An even cost alpha, given by its restriction to [0, +inf). The derivative
// is the right derivative on [0, +inf), extended as an odd function.
class CostFunction {
public:
    // alpha_pos: t -> alpha(t) for t >= 0. Missing derivative or inverse are
    // computed numerically.
    CostFunction(std::string name, RealFn alpha_pos, RealFn dalpha_pos = nullptr,
                 RealFn inverse_pos = nullptr);

    const std::string& name() const { return impl_->name; }
    double operator()(double x) const;
    double derivative(double x) const;
    // Left derivative at t > 0 (right derivative at 0).
    double left_derivative(double t) const;
    // Smallest t >= 0 with alpha(t) >= y; +inf when alpha stays below y.
    double inverse(double y) const;
    // alpha*(y) = sup_x {x y - alpha(x)}; +inf when unbounded. For a
    // nonconvex alpha this is the conjugate of its convex hull.
    double conjugate(double y) const;

    bool convex() const { return impl_->convex; }
    bool in_class_A() const { return impl_->class_a; }
    bool in_class_V() const { return impl_->class_v; }

    // x -> prefactor * alpha(arg_scale * x)
    CostFunction scaled(double prefactor, double arg_scale = 1.0) const;

private:
    struct Impl {
        std::string name;
        RealFn f;
        RealFn df;
        RealFn inv;
        bool convex = false;
        bool class_a = false;
        bool class_v = false;
    };
    std::shared_ptr<const Impl> impl_;
};

CostFunction alpha1();
CostFunction alpha_p(double p);
CostFunction theta_p(double p);
CostFunction maurey_tilde();
CostFunction talagrand_gamma(double lambda);
CostFunction quadratic();
CostFunction absolute();
// t^2 on [0,1] and g(t) - g(1) + 1 beyond.
CostFunction spliced(std::string name, RealFn g, RealFn dg = nullptr);
// CSV t,alpha with t >= 0 strictly increasing, monotone cubic in between and
// linear beyond the last row.
CostFunction cost_from_table(std::vector<double> t, std::vector<double> alpha,
                             std::string name = "table");
CostFunction load_cost_table(const std::string& path);

enum class BuiltinCost { alpha1, alpha_p, theta_p, maurey_tilde, talagrand_gamma };
CostFunction builtin_cost(BuiltinCost kind, double param = 0.0);

struct ClassAGrid {
    double t_max = 64.0;
    int points = 4096;
    int superadditive_points = 256;
};

// Even, alpha(0)=0, nondecreasing on R+, t^2 on [-1,1], superadditive.
Verdict validate_class_A(const CostFunction& alpha, const ClassAGrid& grid = {});

// f in class V toward +inf (sign = +1) or -inf (sign = -1): f' has the sign
// of the direction beyond some point and f''/f'^2 is small over the last
// decade before the largest finite probe.
Verdict validate_class_V(const RealFn& f, const RealFn& df, double sign = 1.0,
                         double x_max = 1e4, double ratio_tol = 0.05);

// Relative jump between left and right derivative at t.
double kink(const CostFunction& alpha, double t);

// a / (b2 * ceil(b1)) after checking theta(k x) >= k theta(x) for k <= 8.
double scaling_equivalence_constant(const CostFunction& theta, double b1, double b2,
                                    double a = 1.0);

}  // namespace tcilab
