#include "tcilab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tcilab/numeric/interp.hpp"
#include "tcilab/numeric/quadrature.hpp"
#include "tcilab/numeric/rng.hpp"
#include "tcilab/numeric/roots.hpp"

namespace tcilab {

namespace nm = numeric;

namespace {

constexpr double kLogHalf = -0.69314718055994530942;
constexpr double kLog2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;

double log1mexp(double x) {
    // log(1 - e^x) for x <= 0
    if (x > -kLog2) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

// first truncation span for a tail integral starting at x
double tail_span(double slope, double x) {
    const double s = std::abs(slope);
    const double cap = std::max(1.0, std::abs(x));
    if (!std::isfinite(s) || s == 0.0) return cap;
    return std::clamp(1.0 / s, 1e-12, cap);
}

}  // namespace

// ---------------------------------------------------------------- generic

double MeasureImpl::dpotential(double x) const {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return (potential(x + h) - potential(x - h)) / (2.0 * h);
}

double MeasureImpl::direct_log_sf(double x) const {
    const Support s = support();
    if (x <= s.lo) return 0.0;
    if (x >= s.hi) return -kInf;
    const double vx = potential(x);
    auto g = [this, x, vx](double u) { return vx - potential(x + u); };
    nm::LogIntegral I;
    if (std::isfinite(s.hi)) {
        I = nm::log_integrate(g, 0.0, s.hi - x);
    } else {
        nm::TailOptions opts;
        opts.initial_span = tail_span(dpotential(x), x);
        I = nm::log_integrate_tail(g, opts);
    }
    if (I.divergent) return kInf;
    return I.log_value - vx - log_normalizer();
}

double MeasureImpl::direct_log_cdf(double x) const {
    const Support s = support();
    if (x >= s.hi) return 0.0;
    if (x <= s.lo) return -kInf;
    const double vx = potential(x);
    auto g = [this, x, vx](double u) { return vx - potential(x - u); };
    nm::LogIntegral I;
    if (std::isfinite(s.lo)) {
        I = nm::log_integrate(g, 0.0, x - s.lo);
    } else {
        nm::TailOptions opts;
        opts.initial_span = tail_span(dpotential(x), x);
        I = nm::log_integrate_tail(g, opts);
    }
    if (I.divergent) return kInf;
    return I.log_value - vx - log_normalizer();
}

double MeasureImpl::log_sf(double x) const {
    const double d = direct_log_sf(x);
    if (d <= kLogHalf) return d;
    return log1mexp(std::min(0.0, direct_log_cdf(x)));
}

double MeasureImpl::log_cdf(double x) const {
    const double d = direct_log_cdf(x);
    if (d <= kLogHalf) return d;
    return log1mexp(std::min(0.0, direct_log_sf(x)));
}

double MeasureImpl::cdf(double x) const {
    const double lc = log_cdf(x);
    if (lc <= kLogHalf) return std::exp(lc);
    return -std::expm1(log_sf(x));
}

double MeasureImpl::sf(double x) const {
    const double ls = log_sf(x);
    if (ls <= kLogHalf) return std::exp(ls);
    return -std::expm1(log_cdf(x));
}

double MeasureImpl::quantile(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
    if (t == 0.0) return support().lo;
    if (t == 1.0) return support().hi;
    if (t <= 0.5) return quantile_log_lower(std::log(t));
    return quantile_log_upper(std::log1p(-t));
}

double MeasureImpl::quantile_log_lower(double log_t) const {
    if (log_t == -kInf) return support().lo;
    const Support s = support();
    const double start = std::clamp(0.0, std::nextafter(s.lo, kInf), std::nextafter(s.hi, -kInf));
    auto f = [this, log_t](double x) { return log_cdf(x) - log_t; };
    return nm::find_root_increasing(f, start, 1.0, s.lo, s.hi);
}

double MeasureImpl::quantile_log_upper(double log_s) const {
    if (log_s == -kInf) return support().hi;
    const Support s = support();
    const double start = std::clamp(0.0, std::nextafter(s.lo, kInf), std::nextafter(s.hi, -kInf));
    auto f = [this, log_s](double x) { return log_s - log_sf(x); };
    return nm::find_root_increasing(f, start, 1.0, s.lo, s.hi);
}

double MeasureImpl::median() const { return quantile_log_lower(kLogHalf); }

// ---------------------------------------------------------------- builtins

namespace {

class SymmetricExponential final : public MeasureImpl {
public:
    std::string name() const override { return "exponential"; }
    double potential(double x) const override { return std::abs(x); }
    double dpotential(double x) const override { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
    double log_normalizer() const override { return kLog2; }
    double log_sf(double x) const override {
        return x >= 0 ? kLogHalf - x : std::log1p(-0.5 * std::exp(x));
    }
    double log_cdf(double x) const override { return log_sf(-x); }
    double cdf(double x) const override { return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); }
    double sf(double x) const override { return cdf(-x); }
    double quantile(double t) const override {
        if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
        return t <= 0.5 ? std::log(2.0 * t) : -std::log(2.0 * (1.0 - t));
    }
    double quantile_log_lower(double lt) const override {
        return lt <= kLogHalf ? lt + kLog2 : -std::log(-2.0 * std::expm1(lt));
    }
    double quantile_log_upper(double ls) const override { return -quantile_log_lower(ls); }
    double median() const override { return 0.0; }
};

class Gaussian final : public MeasureImpl {
public:
    Gaussian(double mean, double sigma) : mean_(mean), sigma_(sigma) {
        if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mean)) {
            throw std::invalid_argument("gaussian: sigma must be positive and finite");
        }
    }
    std::string name() const override {
        std::ostringstream os;
        os.precision(17);
        os << "gaussian sigma=" << sigma_;
        if (mean_ != 0.0) os << " mean=" << mean_;
        return os.str();
    }
    double potential(double x) const override {
        const double z = (x - mean_) / sigma_;
        return 0.5 * z * z;
    }
    double dpotential(double x) const override { return (x - mean_) / (sigma_ * sigma_); }
    double log_normalizer() const override {
        return std::log(sigma_) + 0.5 * std::log(2.0 * kPi);
    }
    static double log_upper(double z) {
        if (z < 30.0) return std::log(0.5 * boost::math::erfc(z / std::sqrt(2.0)));
        const double r = 1.0 / (z * z);
        const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
        return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * kPi) + std::log(series);
    }
    double log_sf(double x) const override { return log_upper((x - mean_) / sigma_); }
    double log_cdf(double x) const override { return log_upper((mean_ - x) / sigma_); }
    double cdf(double x) const override {
        return 0.5 * boost::math::erfc((mean_ - x) / (sigma_ * std::sqrt(2.0)));
    }
    double sf(double x) const override {
        return 0.5 * boost::math::erfc((x - mean_) / (sigma_ * std::sqrt(2.0)));
    }
    double quantile(double t) const override {
        if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
        if (t == 0.0) return -kInf;
        if (t == 1.0) return kInf;
        if (t <= 0.5) return mean_ - sigma_ * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * t);
        return mean_ + sigma_ * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * (1.0 - t));
    }
    double quantile_log_upper(double ls) const override {
        if (ls > -700.0) {
            if (ls > kLogHalf) return quantile(-std::expm1(ls));
            return mean_ + sigma_ * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * std::exp(ls));
        }
        auto f = [ls](double z) { return ls - log_upper(z); };
        const double z0 = std::sqrt(-2.0 * ls);
        return mean_ + sigma_ * nm::find_root(f, 0.5 * z0, z0 + 1.0);
    }
    double quantile_log_lower(double lt) const override {
        return 2.0 * mean_ - quantile_log_upper(lt);
    }
    double median() const override { return mean_; }

private:
    double mean_;
    double sigma_;
};

class Cauchy final : public MeasureImpl {
public:
    std::string name() const override { return "cauchy"; }
    double potential(double x) const override { return std::log1p(x * x); }
    double dpotential(double x) const override { return 2.0 * x / (1.0 + x * x); }
    double log_normalizer() const override { return std::log(kPi); }
    double sf(double x) const override { return std::atan2(1.0, x) / kPi; }
    double cdf(double x) const override { return sf(-x); }
    double log_sf(double x) const override { return std::log(sf(x)); }
    double log_cdf(double x) const override { return std::log(cdf(x)); }
    double quantile(double t) const override {
        if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
        if (t == 0.0) return -kInf;
        if (t == 1.0) return kInf;
        if (t <= 0.5) return -1.0 / std::tan(kPi * t);
        return 1.0 / std::tan(kPi * (1.0 - t));
    }
    double quantile_log_upper(double ls) const override {
        if (ls > kLogHalf) return quantile(-std::expm1(ls));
        return 1.0 / std::tan(kPi * std::exp(ls));
    }
    double quantile_log_lower(double lt) const override { return -quantile_log_upper(lt); }
    double median() const override { return 0.0; }
};

class ExpPower final : public MeasureImpl {
public:
    explicit ExpPower(double p) : p_(p) {
        if (!(p >= 0.5) || !std::isfinite(p)) throw std::invalid_argument("exp_power: p must be >= 1/2");
        log_z_ = kLog2 + std::lgamma(1.0 + 1.0 / p);
    }
    std::string name() const override {
        std::ostringstream os;
        os.precision(17);
        os << "exp_power p=" << p_;
        return os.str();
    }
    double potential(double x) const override { return std::pow(std::abs(x), p_); }
    double dpotential(double x) const override {
        if (x == 0.0) return 0.0;
        const double g = p_ * std::pow(std::abs(x), p_ - 1.0);
        return x > 0 ? g : -g;
    }
    double log_normalizer() const override { return log_z_; }
    double log_sf(double x) const override {
        const double a = 1.0 / p_;
        if (x < 0) return std::log1p(boost::math::gamma_p(a, std::pow(-x, p_))) + kLogHalf;
        const double q = boost::math::gamma_q(a, std::pow(x, p_));
        if (q > 1e-280) return std::log(q) + kLogHalf;
        return direct_log_sf(x);
    }
    double log_cdf(double x) const override { return log_sf(-x); }
    double sf(double x) const override {
        const double a = 1.0 / p_;
        if (x < 0) return 0.5 + 0.5 * boost::math::gamma_p(a, std::pow(-x, p_));
        return 0.5 * boost::math::gamma_q(a, std::pow(x, p_));
    }
    double cdf(double x) const override { return sf(-x); }
    double quantile(double t) const override {
        if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
        if (t == 0.0) return -kInf;
        if (t == 1.0) return kInf;
        if (t <= 0.5) return -upper(2.0 * t);
        return upper(2.0 * (1.0 - t));
    }
    double quantile_log_upper(double ls) const override {
        if (ls > kLogHalf) return quantile(-std::expm1(ls));
        if (ls > -640.0) return upper(2.0 * std::exp(ls));
        return MeasureImpl::quantile_log_upper(ls);
    }
    double quantile_log_lower(double lt) const override { return -quantile_log_upper(lt); }
    double median() const override { return 0.0; }

private:
    // |x| with Q(1/p, |x|^p) = q
    double upper(double q) const {
        if (q >= 1.0) return 0.0;
        return std::pow(boost::math::gamma_q_inv(1.0 / p_, q), 1.0 / p_);
    }
    double p_;
    double log_z_;
};

class OneSidedExp final : public MeasureImpl {
public:
    explicit OneSidedExp(double a) : a_(a) {
        if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("one_sided_exp: a must be positive");
    }
    std::string name() const override {
        std::ostringstream os;
        os.precision(17);
        os << "one_sided_exp a=" << a_;
        return os.str();
    }
    Support support() const override { return {0.0, kInf}; }
    double potential(double x) const override { return x < 0 ? kInf : a_ * x; }
    double dpotential(double) const override { return a_; }
    double log_normalizer() const override { return -std::log(a_); }
    double log_sf(double x) const override { return x <= 0 ? 0.0 : -a_ * x; }
    double log_cdf(double x) const override {
        return x <= 0 ? -kInf : std::log(-std::expm1(-a_ * x));
    }
    double sf(double x) const override { return x <= 0 ? 1.0 : std::exp(-a_ * x); }
    double cdf(double x) const override { return x <= 0 ? 0.0 : -std::expm1(-a_ * x); }
    double quantile(double t) const override {
        if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
        return -std::log1p(-t) / a_;
    }
    double quantile_log_upper(double ls) const override { return -ls / a_; }
    double quantile_log_lower(double lt) const override { return -log1mexp(lt) / a_; }
    double median() const override { return kLog2 / a_; }

private:
    double a_;
};

class Shifted final : public MeasureImpl {
public:
    Shifted(std::shared_ptr<const MeasureImpl> base, double shift)
        : base_(std::move(base)), d_(shift) {}
    std::string name() const override {
        std::ostringstream os;
        os.precision(17);
        os << base_->name() << " shift=" << d_;
        return os.str();
    }
    Support support() const override {
        const Support s = base_->support();
        return {s.lo + d_, s.hi + d_};
    }
    double potential(double x) const override { return base_->potential(x - d_); }
    double dpotential(double x) const override { return base_->dpotential(x - d_); }
    double log_normalizer() const override { return base_->log_normalizer(); }
    double log_cdf(double x) const override { return base_->log_cdf(x - d_); }
    double log_sf(double x) const override { return base_->log_sf(x - d_); }
    double cdf(double x) const override { return base_->cdf(x - d_); }
    double sf(double x) const override { return base_->sf(x - d_); }
    double quantile(double t) const override { return base_->quantile(t) + d_; }
    double quantile_log_lower(double lt) const override { return base_->quantile_log_lower(lt) + d_; }
    double quantile_log_upper(double ls) const override { return base_->quantile_log_upper(ls) + d_; }
    double median() const override { return base_->median() + d_; }

private:
    std::shared_ptr<const MeasureImpl> base_;
    double d_;
};

// ------------------------------------------------------- numeric potential

// Density exp(-V) tabulated by panel masses. Panels are uniform in
// asinh((x - c) / w) between the points where V - Vmin first exceeds the
// truncation level; the mass outside is handled by tail integrals.
class NumericPotential final : public MeasureImpl {
public:
    NumericPotential(RealFn V, Support domain, RealFn dV, std::string name)
        : V_(std::move(V)), dV_(std::move(dV)), dom_(domain), name_(std::move(name)) {
        if (!(dom_.lo < dom_.hi)) throw std::invalid_argument("empty domain");
        build();
    }

    std::string name() const override { return name_; }
    Support support() const override { return dom_; }
    double potential(double x) const override {
        if (x < dom_.lo || x > dom_.hi) return kInf;
        return V_(x);
    }
    double dpotential(double x) const override {
        if (dV_) return dV_(x);
        return MeasureImpl::dpotential(x);
    }
    double log_normalizer() const override { return log_z_; }

    double log_cdf(double x) const override {
        if (x <= dom_.lo) return -kInf;
        if (x >= dom_.hi) return 0.0;
        if (x <= knots_.front()) return direct_log_cdf(x);
        if (x >= knots_.back()) return log1mexp(std::min(0.0, direct_log_sf(x)));
        const std::size_t i = panel(x);
        const double part = partial(knots_[i], x);
        const double lower = cum_lo_[i] + part;
        if (lower <= 0.5 * total_) return std::log(lower / total_);
        const double upper = cum_hi_[i + 1] + partial(x, knots_[i + 1]);
        return std::log1p(-upper / total_);
    }

    double log_sf(double x) const override {
        if (x <= dom_.lo) return 0.0;
        if (x >= dom_.hi) return -kInf;
        if (x >= knots_.back()) return direct_log_sf(x);
        if (x <= knots_.front()) return log1mexp(std::min(0.0, direct_log_cdf(x)));
        const std::size_t i = panel(x);
        const double upper = cum_hi_[i + 1] + partial(x, knots_[i + 1]);
        if (upper <= 0.5 * total_) return std::log(upper / total_);
        const double lower = cum_lo_[i] + partial(knots_[i], x);
        return std::log1p(-lower / total_);
    }

    double quantile_log_lower(double lt) const override {
        if (lt == -kInf) return dom_.lo;
        if (lt > kLogHalf) return quantile_log_upper(log1mexp(lt));
        const double target = std::exp(lt) * total_;
        if (target <= cum_lo_.front()) return MeasureImpl::quantile_log_lower(lt);
        auto it = std::upper_bound(cum_lo_.begin(), cum_lo_.end(), target);
        std::size_t i = static_cast<std::size_t>(it - cum_lo_.begin()) - 1;
        i = std::min(i, knots_.size() - 2);
        auto f = [this, lt](double x) { return log_cdf(x) - lt; };
        return solve_in(f, knots_[i], knots_[i + 1]);
    }

    double quantile_log_upper(double ls) const override {
        if (ls == -kInf) return dom_.hi;
        if (ls > kLogHalf) return quantile_log_lower(log1mexp(ls));
        const double target = std::exp(ls) * total_;
        if (target <= cum_hi_.back()) return MeasureImpl::quantile_log_upper(ls);
        // cum_hi_ is decreasing in the index
        std::size_t lo = 0;
        std::size_t hi = cum_hi_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (cum_hi_[mid] >= target) lo = mid; else hi = mid;
        }
        auto f = [this, ls](double x) { return ls - log_sf(x); };
        return solve_in(f, knots_[lo], knots_[hi]);
    }

private:
    static constexpr double kTruncation = 36.841361487904734;  // 16 log 10
    static constexpr int kPanels = 1024;

    double shifted(double x) const { return -(V_(x) - vmin_); }

    double partial(double a, double b) const {
        if (b <= a) return 0.0;
        auto g = [this](double x) { return std::exp(shifted(x)); };
        return nm::integrate(g, a, b, {1e-15 * total_, 1e-13, 200}).value;
    }

    std::size_t panel(double x) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - knots_.begin());
        return std::min(i == 0 ? 0 : i - 1, knots_.size() - 2);
    }

    static double solve_in(const RealFn& f, double a, double b) {
        const double fa = f(a);
        const double fb = f(b);
        if (fa >= 0.0) return a;
        if (fb <= 0.0) return b;
        return nm::find_root(f, a, b);
    }

    // 2^-20 .. 2^40 in half-octave steps
    static const std::vector<double>& offsets() {
        static const std::vector<double> d = [] {
            std::vector<double> out;
            for (int k = -40; k <= 80; ++k) out.push_back(std::pow(2.0, k / 2.0));
            return out;
        }();
        return d;
    }

    void build() {
        // locate the well
        std::vector<double> probes;
        const bool lo_inf = !std::isfinite(dom_.lo);
        const bool hi_inf = !std::isfinite(dom_.hi);
        if (lo_inf && hi_inf) {
            probes.push_back(0.0);
            for (double d : offsets()) {
                probes.push_back(d);
                probes.push_back(-d);
            }
        } else if (lo_inf) {
            for (double d : offsets()) probes.push_back(dom_.hi - d);
        } else if (hi_inf) {
            for (double d : offsets()) probes.push_back(dom_.lo + d);
        } else {
            for (int i = 0; i < 512; ++i) probes.push_back(dom_.lo + (dom_.hi - dom_.lo) * (i + 0.5) / 512);
        }
        vmin_ = kInf;
        double c = 0.0;
        for (double x : probes) {
            const double v = V_(x);
            if (std::isnan(v)) throw std::invalid_argument("potential is NaN at " + std::to_string(x));
            if (v < vmin_) {
                vmin_ = v;
                c = x;
            }
        }
        if (vmin_ == -kInf) throw std::invalid_argument("not a finite measure");
        if (!std::isfinite(vmin_)) throw std::invalid_argument("potential is nowhere finite");
        {
            // polish the minimum between neighbouring probes
            const double span = std::max(1e-6, 0.5 * std::abs(c) + 1e-3);
            const double a = std::max(dom_.lo, c - span);
            const double b = std::min(dom_.hi, c + span);
            const auto e = nm::maximize([this](double x) { return -V_(x); }, a, b, 40);
            if (-e.value < vmin_) {
                vmin_ = -e.value;
                c = e.x;
            }
        }
        // scale and truncation points
        double w = 1.0;
        double right = dom_.hi;
        double left = dom_.lo;
        double w_right = kInf;
        double w_left = kInf;
        for (double d : offsets()) {
            if (c + d >= dom_.hi) break;
            const double dv = V_(c + d) - vmin_;
            if (w_right == kInf && dv >= 1.0) w_right = d;
            if (dv >= kTruncation) {
                right = c + d;
                break;
            }
            if (d == offsets().back()) right = c + d;
        }
        for (double d : offsets()) {
            if (c - d <= dom_.lo) break;
            const double dv = V_(c - d) - vmin_;
            if (w_left == kInf && dv >= 1.0) w_left = d;
            if (dv >= kTruncation) {
                left = c - d;
                break;
            }
            if (d == offsets().back()) left = c - d;
        }
        w = std::min(w_left, w_right);
        if (!std::isfinite(w)) w = 1.0;
        const double ua = std::asinh((left - c) / w);
        const double ub = std::asinh((right - c) / w);
        knots_.resize(kPanels + 1);
        for (int i = 0; i <= kPanels; ++i) {
            knots_[i] = c + w * std::sinh(ua + (ub - ua) * i / kPanels);
        }
        knots_.front() = left;
        knots_.back() = right;

        std::vector<double> mass(kPanels);
        auto g = [this](double x) { return std::exp(shifted(x)); };
        for (int i = 0; i < kPanels; ++i) {
            mass[i] = nm::integrate(g, knots_[i], knots_[i + 1], {1e-300, 1e-13, 400}).value;
        }
        const double left_tail = tail_mass(left, -1.0);
        const double right_tail = tail_mass(right, +1.0);
        cum_lo_.assign(kPanels + 1, 0.0);
        cum_hi_.assign(kPanels + 1, 0.0);
        cum_lo_[0] = left_tail;
        for (int i = 0; i < kPanels; ++i) cum_lo_[i + 1] = cum_lo_[i] + mass[i];
        cum_hi_[kPanels] = right_tail;
        for (int i = kPanels - 1; i >= 0; --i) cum_hi_[i] = cum_hi_[i + 1] + mass[i];
        total_ = cum_lo_[kPanels] + right_tail;
        if (!std::isfinite(total_) || !(total_ > 0.0)) throw std::invalid_argument("not a finite measure");
        log_z_ = vmin_ + std::log(total_);
    }

    // mass of exp(-(V - Vmin)) beyond the truncation point x in direction dir
    double tail_mass(double x, double dir) const {
        const double end = dir > 0 ? dom_.hi : dom_.lo;
        if (x == end) return 0.0;
        auto lg = [this, x, dir](double u) { return shifted(x + dir * u); };
        nm::LogIntegral I;
        if (std::isfinite(end)) {
            I = nm::log_integrate(lg, 0.0, std::abs(end - x));
        } else {
            nm::TailOptions opts;
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            const double slope = (V_(x + h) - V_(x - h)) / (2 * h);
            opts.initial_span = tail_span(slope, x);
            I = nm::log_integrate_tail(lg, opts);
        }
        if (I.divergent || I.log_value == kInf) {
            throw std::invalid_argument("not a finite measure");
        }
        return std::exp(I.log_value);
    }

    RealFn V_;
    RealFn dV_;
    Support dom_;
    std::string name_;
    double vmin_ = 0.0;
    double total_ = 1.0;
    double log_z_ = 0.0;
    std::vector<double> knots_;
    std::vector<double> cum_lo_;
    std::vector<double> cum_hi_;
};

}  // namespace

// ------------------------------------------------------------- Measure1D

Measure1D::Measure1D(std::shared_ptr<const MeasureImpl> impl) : impl_(std::move(impl)) {
    if (!impl_) throw std::invalid_argument("null measure");
    median_ = impl_->median();
}

double Measure1D::log_density(double x) const {
    const Support s = support();
    if (x < s.lo || x > s.hi) return -kInf;
    return -potential(x) - log_normalizer();
}

double Measure1D::density(double x) const { return std::exp(log_density(x)); }

Measure1D exponential_symmetric() { return Measure1D(std::make_shared<SymmetricExponential>()); }
Measure1D exp_power(double p) { return Measure1D(std::make_shared<ExpPower>(p)); }
Measure1D gaussian(double mean, double sigma) {
    return Measure1D(std::make_shared<Gaussian>(mean, sigma));
}
Measure1D cauchy() { return Measure1D(std::make_shared<Cauchy>()); }
Measure1D one_sided_exp(double a) { return Measure1D(std::make_shared<OneSidedExp>(a)); }
Measure1D shifted(const Measure1D& mu, double shift) {
    if (shift == 0.0) return mu;
    return Measure1D(std::make_shared<Shifted>(mu.shared(), shift));
}

Measure1D make_builtin(Builtin kind, double param) {
    switch (kind) {
        case Builtin::exponential_symmetric: return exponential_symmetric();
        case Builtin::exp_power: return exp_power(param);
        case Builtin::gaussian: return gaussian(0.0, param);
        case Builtin::cauchy: return cauchy();
        case Builtin::one_sided_exp: return one_sided_exp(param);
    }
    throw std::invalid_argument("unknown builtin");
}

Measure1D make_from_potential(RealFn V, Support domain, RealFn dV, std::string name) {
    if (!V) throw std::invalid_argument("potential is empty");
    return Measure1D(std::make_shared<NumericPotential>(std::move(V), domain, std::move(dV),
                                                        std::move(name)));
}

Measure1D make_from_table(std::vector<double> xs, std::vector<double> Vs, std::string name) {
    auto table = std::make_shared<nm::MonotoneCubic>(std::move(xs), std::move(Vs));
    if (!(table->slope_back() > 0.0)) {
        throw std::invalid_argument("table potential must increase past the last point");
    }
    if (!(table->slope_front() < 0.0)) {
        throw std::invalid_argument("table potential must decrease before the first point");
    }
    RealFn V = [table](double x) { return (*table)(x); };
    RealFn dV = [table](double x) { return table->derivative(x); };
    return make_from_potential(std::move(V), {}, std::move(dV), std::move(name));
}

Measure1D load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open table " + path);
    std::vector<double> xs, vs;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x = 0.0, v = 0.0;
        if (!(row >> x >> v)) {
            if (header) {
                header = false;
                continue;
            }
            throw std::invalid_argument("bad table row: " + line);
        }
        header = false;
        xs.push_back(x);
        vs.push_back(v);
    }
    return make_from_table(std::move(xs), std::move(vs), "table file=" + path);
}

// ------------------------------------------------------- discrete measures

DiscreteMeasure::DiscreteMeasure(std::vector<double> locations, std::vector<double> weights)
    : x_(std::move(locations)), w_(std::move(weights)) {
    if (x_.size() != w_.size() || x_.empty()) {
        throw std::invalid_argument("discrete measure needs matching non-empty atoms and weights");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!(w_[i] > 0.0)) throw std::invalid_argument("atom weights must be positive");
        if (!std::isfinite(x_[i])) throw std::invalid_argument("atom locations must be finite");
        if (i > 0 && !(x_[i] > x_[i - 1])) {
            throw std::invalid_argument("atom locations must be strictly increasing");
        }
        sum += w_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("atom weights must sum to 1");
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<double> locations,
                                            std::vector<double> weights) {
    if (locations.size() != weights.size()) throw std::invalid_argument("size mismatch");
    std::map<double, double> merged;
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("negative weight");
        if (weights[i] > 0.0) merged[locations[i]] += weights[i];
    }
    double sum = 0.0;
    for (const auto& [x, w] : merged) sum += w;
    if (!(sum > 0.0)) throw std::invalid_argument("discrete measure has no mass");
    std::vector<double> xs, ws;
    for (const auto& [x, w] : merged) {
        xs.push_back(x);
        ws.push_back(w / sum);
    }
    // push the rounding residue onto the heaviest atom
    double s2 = std::accumulate(ws.begin(), ws.end(), 0.0);
    auto heaviest = std::max_element(ws.begin(), ws.end());
    *heaviest += 1.0 - s2;
    return DiscreteMeasure(std::move(xs), std::move(ws));
}

DiscreteMeasure DiscreteMeasure::dirac(double x) { return DiscreteMeasure({x}, {1.0}); }

long DiscreteMeasure::find(double x) const {
    auto it = std::lower_bound(x_.begin(), x_.end(), x);
    if (it == x_.end() || *it != x) return -1;
    return static_cast<long>(it - x_.begin());
}

DiscreteMeasure discretize(const Measure1D& mu, int k) {
    if (k < 1) throw std::invalid_argument("discretize: k must be positive");
    std::vector<double> xs(k);
    std::vector<double> ws(k, 1.0 / k);
    for (int i = 0; i < k; ++i) xs[i] = mu.quantile((i + 0.5) / k);
    return DiscreteMeasure::normalized(std::move(xs), std::move(ws));
}

// ------------------------------------------------------------- residuals

double ResidualDistribution::log_tail(double h) const {
    if (h <= 0.0) return 0.0;
    if (side == Side::plus) return std::min(0.0, base.log_sf(anchor + h) - log_mass);
    return std::min(0.0, base.log_cdf(anchor - h) - log_mass);
}

double ResidualDistribution::tail(double h) const { return std::exp(log_tail(h)); }

ResidualDistribution residual(const Measure1D& mu, double x, Side side) {
    const double lm = side == Side::plus ? mu.log_sf(x) : mu.log_cdf(x);
    if (!(lm > std::log(1e-300))) throw std::invalid_argument("residual: conditioning mass is zero");
    return {mu, x, side, lm};
}

Verdict stochastically_dominated(const TailFn& nu1, const TailFn& nu2,
                                 const std::vector<double>& h_grid, double tol) {
    double worst = -kInf;
    double worst_h = 0.0;
    for (double h : h_grid) {
        const double margin = nu1(h) - nu2(h);
        if (margin > worst) {
            worst = margin;
            worst_h = h;
        }
    }
    Verdict v;
    if (h_grid.empty()) {
        v = Verdict::unknown("empty grid");
    } else if (worst <= tol) {
        v.status = Status::holds;
    } else {
        std::ostringstream os;
        os << "tail of the first law exceeds the second by " << worst << " at h=" << worst_h;
        v = Verdict::failing(os.str());
    }
    if (h_grid.size() < 8) v.diagnostics += (v.diagnostics.empty() ? "" : "; ") + std::string("coarse grid");
    v.details["worst_margin"] = encode_real(worst);
    v.details["argmax_h"] = worst_h;
    v.details["grid_points"] = h_grid.size();
    return v;
}

Verdict is_log_concave(const Measure1D& mu, int grid_points, double tol) {
    const double lo = mu.quantile(0.5e-8);
    const double hi = mu.quantile(1.0 - 0.5e-8);
    const auto grid = linear_grid(lo, hi, grid_points);
    std::vector<double> hazard(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        hazard[i] = std::exp(mu.log_density(grid[i]) - mu.log_sf(grid[i]));
    }
    Verdict v;
    v.status = Status::holds;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double drop = hazard[i - 1] - hazard[i];
        if (drop > tol * std::max(1.0, hazard[i - 1])) {
            std::ostringstream os;
            os << "hazard rate decreases at x=" << grid[i] << " (" << hazard[i - 1] << " -> "
               << hazard[i] << ")";
            v = Verdict::failing(os.str());
            v.details["violation_x"] = grid[i];
            break;
        }
    }
    v.details["grid"] = {{"lo", lo}, {"hi", hi}, {"points", grid_points}, {"tol", tol}};
    return v;
}

std::vector<double> sample(const Measure1D& mu, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
    nm::CounterRng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = mu.quantile(rng.uniform(0, i));
    return out;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("bad geometric grid");
    std::vector<double> g(n);
    const double r = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo * std::exp(r * i);
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("bad linear grid");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    g.back() = hi;
    return g;
}

}  // namespace tcilab
