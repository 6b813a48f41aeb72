#pragma once

#include <map>
#include <string>

#include "tcilab/costs.hpp"
#include "tcilab/measures.hpp"

namespace tcilab {

// Reals accept a plain number or a fraction such as 1/36.
double parse_real(const std::string& text);

// "name key=value ..." split on spaces or commas.
struct SpecTokens {
    std::string name;
    std::map<std::string, std::string> args;
};
SpecTokens tokenize_spec(const std::string& spec);

// exponential | exp_power p=P | gaussian [sigma=S] [mean=M] | cauchy |
// one_sided_exp a=A | table file=PATH, each with an optional shift=D.
Measure1D parse_measure(const std::string& spec);

// [K*]name with name one of alpha1 | alpha_p p=P | theta_p p=P | maurey |
// gamma lambda=L | quadratic | absolute | power p=P (t^2 spliced to t^p) |
// table file=PATH. An optional scale=S multiplies the argument.
CostFunction parse_cost(const std::string& spec);

}  // namespace tcilab
