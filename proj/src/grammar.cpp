#include "tcilab/grammar.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tcilab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double number(const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + t + "'");
    }
    if (used != t.size()) throw std::invalid_argument("not a number: '" + t + "'");
    return v;
}

double arg(const SpecTokens& s, const std::string& key) {
    auto it = s.args.find(key);
    if (it == s.args.end()) throw std::invalid_argument(s.name + " needs " + key + "=");
    return parse_real(it->second);
}

double arg_or(const SpecTokens& s, const std::string& key, double fallback) {
    auto it = s.args.find(key);
    return it == s.args.end() ? fallback : parse_real(it->second);
}

void only(const SpecTokens& s, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : s.args) {
        bool ok = false;
        for (const char* allowed : keys) ok = ok || k == allowed;
        if (!ok) throw std::invalid_argument(s.name + ": unknown argument '" + k + "'");
    }
}

}  // namespace

double parse_real(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty number");
    const auto slash = t.find('/');
    if (slash == std::string::npos) return number(t);
    const double num = number(trim(t.substr(0, slash)));
    const double den = number(trim(t.substr(slash + 1)));
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + t + "'");
    return num / den;
}

SpecTokens tokenize_spec(const std::string& spec) {
    std::string s = spec;
    for (char& c : s) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(s);
    SpecTokens out;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            if (!out.name.empty()) throw std::invalid_argument("unexpected token '" + tok + "'");
            out.name = tok;
        } else {
            out.args[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    if (out.name.empty()) throw std::invalid_argument("empty measure or cost string");
    return out;
}

Measure1D parse_measure(const std::string& spec) {
    const SpecTokens s = tokenize_spec(spec);
    Measure1D mu = [&]() {
        if (s.name == "exponential") {
            only(s, {"shift"});
            return exponential_symmetric();
        }
        if (s.name == "exp_power") {
            only(s, {"p", "shift"});
            return exp_power(arg(s, "p"));
        }
        if (s.name == "gaussian") {
            only(s, {"sigma", "mean", "shift"});
            return gaussian(arg_or(s, "mean", 0.0), arg_or(s, "sigma", 1.0));
        }
        if (s.name == "cauchy") {
            only(s, {"shift"});
            return cauchy();
        }
        if (s.name == "one_sided_exp") {
            only(s, {"a", "shift"});
            return one_sided_exp(arg_or(s, "a", 1.0));
        }
        if (s.name == "table") {
            only(s, {"file", "shift"});
            auto it = s.args.find("file");
            if (it == s.args.end()) throw std::invalid_argument("table needs file=");
            return load_table(it->second);
        }
        throw std::invalid_argument("unknown measure '" + s.name + "'");
    }();
    const double d = arg_or(s, "shift", 0.0);
    return d == 0.0 ? mu : shifted(mu, d);
}

CostFunction parse_cost(const std::string& spec) {
    std::string body = trim(spec);
    double prefactor = 1.0;
    const auto star = body.find('*');
    if (star != std::string::npos) {
        prefactor = parse_real(body.substr(0, star));
        body = body.substr(star + 1);
    }
    const SpecTokens s = tokenize_spec(body);
    CostFunction c = [&]() {
        if (s.name == "alpha1") {
            only(s, {"scale"});
            return alpha1();
        }
        if (s.name == "alpha_p") {
            only(s, {"p", "scale"});
            return alpha_p(arg(s, "p"));
        }
        if (s.name == "theta_p") {
            only(s, {"p", "scale"});
            return theta_p(arg(s, "p"));
        }
        if (s.name == "maurey") {
            only(s, {"scale"});
            return maurey_tilde();
        }
        if (s.name == "gamma") {
            only(s, {"lambda", "scale"});
            return talagrand_gamma(arg(s, "lambda"));
        }
        if (s.name == "quadratic") {
            only(s, {"scale"});
            return quadratic();
        }
        if (s.name == "absolute") {
            only(s, {"scale"});
            return absolute();
        }
        if (s.name == "power") {
            only(s, {"p", "scale"});
            const double p = arg(s, "p");
            if (!(p >= 2.0)) throw std::invalid_argument("power needs p >= 2");
            std::ostringstream n;
            n << "power p=" << p;
            return spliced(
                n.str(), [p](double t) { return std::pow(t, p); },
                [p](double t) { return p * std::pow(t, p - 1.0); });
        }
        if (s.name == "table") {
            only(s, {"file", "scale"});
            auto it = s.args.find("file");
            if (it == s.args.end()) throw std::invalid_argument("table needs file=");
            return load_cost_table(it->second);
        }
        throw std::invalid_argument("unknown cost '" + s.name + "'");
    }();
    const double scale = arg_or(s, "scale", 1.0);
    if (!(prefactor > 0.0) || !(scale > 0.0)) throw std::invalid_argument("cost scales must be positive");
    return c.scaled(prefactor, scale);
}

}  // namespace tcilab
