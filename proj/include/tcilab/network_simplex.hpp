#pragma once

#include <vector>

namespace tcilab {

struct TransportSolution {
    double cost = 0.0;
    std::vector<double> flow;  // supply.size() x demand.size(), row-major
    std::vector<double> u;     // row duals
    std::vector<double> v;     // column duals, u_i + v_j <= c_ij
    long pivots = 0;
};

// Exact primal network simplex for the balanced transportation problem.
// Uses a strongly feasible spanning tree with an artificial root, block
// search pricing and Cunningham's leaving arc rule.
TransportSolution solve_transport(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::vector<double>& cost);

}  // namespace tcilab
