#include "tcilab/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcilab {

namespace {

enum : int { kUp = 1, kDown = -1 };

class NetworkSimplex {
public:
    NetworkSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                   const std::vector<double>& cost)
        : n_(supply.size()), m_(demand.size()) {
        if (cost.size() != n_ * m_) throw std::invalid_argument("cost matrix has the wrong size");
        nodes_ = n_ + m_ + 1;
        root_ = nodes_ - 1;
        real_arcs_ = n_ * m_;
        const std::size_t arcs = real_arcs_ + nodes_ - 1;
        source_.resize(arcs);
        target_.resize(arcs);
        cost_.resize(arcs);
        flow_.assign(arcs, 0.0);
        in_tree_.assign(arcs, 0);
        double cmax = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                const std::size_t a = i * m_ + j;
                if (!std::isfinite(cost[a])) throw std::invalid_argument("cost matrix must be finite");
                source_[a] = i;
                target_[a] = n_ + j;
                cost_[a] = cost[a];
                cmax = std::max(cmax, std::abs(cost[a]));
            }
        }
        scale_ = std::max(cmax, 1e-300);
        const double art = (cmax + 1.0) * static_cast<double>(nodes_);
        parent_.assign(nodes_, -1);
        pred_.assign(nodes_, -1);
        dir_.assign(nodes_, 0);
        depth_.assign(nodes_, 0);
        pi_.assign(nodes_, 0.0);
        children_.assign(nodes_, {});
        for (std::size_t k = 0; k + 1 < nodes_; ++k) {
            const double b = k < n_ ? supply[k] : -demand[k - n_];
            const std::size_t a = real_arcs_ + k;
            cost_[a] = art;
            in_tree_[a] = 1;
            parent_[k] = static_cast<long>(root_);
            pred_[k] = static_cast<long>(a);
            depth_[k] = 1;
            children_[root_].push_back(k);
            if (b >= 0.0) {
                source_[a] = k;
                target_[a] = root_;
                flow_[a] = b;
                dir_[k] = kUp;
                pi_[k] = -art;
            } else {
                source_[a] = root_;
                target_[a] = k;
                flow_[a] = -b;
                dir_[k] = kDown;
                pi_[k] = art;
            }
        }
    }

    long run() {
        const std::size_t arcs = source_.size();
        const std::size_t block = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(arcs)));
        const double eps = 1e-12 * scale_;
        std::size_t next = 0;
        long pivots = 0;
        for (;;) {
            // block search pricing
            long entering = -1;
            double best = -eps;
            std::size_t scanned = 0;
            std::size_t count = 0;
            while (scanned < arcs) {
                const std::size_t a = next;
                next = next + 1 == arcs ? 0 : next + 1;
                ++scanned;
                ++count;
                if (!in_tree_[a]) {
                    const double rc = cost_[a] + pi_[source_[a]] - pi_[target_[a]];
                    if (rc < best) {
                        best = rc;
                        entering = static_cast<long>(a);
                    }
                }
                if (count == block) {
                    if (entering >= 0) break;
                    count = 0;
                }
            }
            if (entering < 0) break;
            pivot(static_cast<std::size_t>(entering));
            ++pivots;
            if (pivots > 50'000'000) throw std::runtime_error("network simplex did not terminate");
        }
        return pivots;
    }

    TransportSolution result() const {
        TransportSolution out;
        out.flow.assign(flow_.begin(), flow_.begin() + static_cast<long>(real_arcs_));
        for (std::size_t a = 0; a < real_arcs_; ++a) out.cost += flow_[a] * cost_[a];
        out.u.resize(n_);
        out.v.resize(m_);
        for (std::size_t i = 0; i < n_; ++i) out.u[i] = -pi_[i];
        for (std::size_t j = 0; j < m_; ++j) out.v[j] = pi_[n_ + j];
        // shift so that min_i u_i = 0
        if (n_ > 0) {
            const double s = *std::min_element(out.u.begin(), out.u.end());
            for (double& x : out.u) x -= s;
            for (double& x : out.v) x += s;
        }
        return out;
    }

private:
    void pivot(std::size_t e) {
        const std::size_t first = source_[e];
        const std::size_t second = target_[e];
        // join node
        std::size_t p = first, q = second;
        while (p != q) {
            if (depth_[p] >= depth_[q]) {
                p = static_cast<std::size_t>(parent_[p]);
            } else {
                q = static_cast<std::size_t>(parent_[q]);
            }
        }
        const std::size_t join = p;
        // leaving arc, Cunningham's rule
        double delta = std::numeric_limits<double>::infinity();
        std::size_t u_out = 0;
        int side = 0;
        for (std::size_t u = first; u != join; u = static_cast<std::size_t>(parent_[u])) {
            if (dir_[u] == kUp && flow_[pred_[u]] < delta) {
                delta = flow_[pred_[u]];
                u_out = u;
                side = 1;
            }
        }
        for (std::size_t u = second; u != join; u = static_cast<std::size_t>(parent_[u])) {
            if (dir_[u] == kDown && flow_[pred_[u]] <= delta) {
                delta = flow_[pred_[u]];
                u_out = u;
                side = 2;
            }
        }
        if (side == 0) throw std::runtime_error("unbounded transport problem");
        // augment
        if (delta > 0.0) {
            flow_[e] += delta;
            for (std::size_t u = first; u != join; u = static_cast<std::size_t>(parent_[u])) {
                flow_[pred_[u]] += dir_[u] == kUp ? -delta : delta;
            }
            for (std::size_t u = second; u != join; u = static_cast<std::size_t>(parent_[u])) {
                flow_[pred_[u]] += dir_[u] == kDown ? -delta : delta;
            }
        }
        // exchange arcs
        const std::size_t leaving = static_cast<std::size_t>(pred_[u_out]);
        in_tree_[leaving] = 0;
        flow_[leaving] = 0.0;
        in_tree_[e] = 1;
        const std::size_t new_root = side == 1 ? first : second;
        const std::size_t anchor = side == 1 ? second : first;
        // path new_root -> ... -> u_out, reverse it
        path_.clear();
        for (std::size_t u = new_root;; u = static_cast<std::size_t>(parent_[u])) {
            path_.push_back(u);
            if (u == u_out) break;
        }
        detach(u_out);
        for (std::size_t k = path_.size() - 1; k >= 1; --k) {
            const std::size_t x = path_[k];
            const std::size_t child = path_[k - 1];
            detach(child);
            parent_[x] = static_cast<long>(child);
            pred_[x] = pred_[child];
            dir_[x] = -dir_[child];
            children_[child].push_back(x);
        }
        parent_[new_root] = static_cast<long>(anchor);
        pred_[new_root] = static_cast<long>(e);
        dir_[new_root] = source_[e] == new_root ? kUp : kDown;
        children_[anchor].push_back(new_root);
        refresh(new_root);
    }

    void detach(std::size_t x) {
        auto& siblings = children_[static_cast<std::size_t>(parent_[x])];
        auto it = std::find(siblings.begin(), siblings.end(), x);
        if (it != siblings.end()) {
            *it = siblings.back();
            siblings.pop_back();
        }
    }

    // depths and potentials below x, from its parent arc
    void refresh(std::size_t x) {
        stack_.clear();
        stack_.push_back(x);
        while (!stack_.empty()) {
            const std::size_t u = stack_.back();
            stack_.pop_back();
            const std::size_t par = static_cast<std::size_t>(parent_[u]);
            const std::size_t a = static_cast<std::size_t>(pred_[u]);
            depth_[u] = depth_[par] + 1;
            pi_[u] = dir_[u] == kUp ? pi_[par] - cost_[a] : pi_[par] + cost_[a];
            for (std::size_t c : children_[u]) stack_.push_back(c);
        }
    }

    std::size_t n_, m_, nodes_ = 0, root_ = 0, real_arcs_ = 0;
    double scale_ = 1.0;
    std::vector<std::size_t> source_, target_;
    std::vector<double> cost_, flow_;
    std::vector<char> in_tree_;
    std::vector<long> parent_, pred_;
    std::vector<int> dir_;
    std::vector<long> depth_;
    std::vector<double> pi_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> path_, stack_;
};

}  // namespace

TransportSolution solve_transport(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::vector<double>& cost) {
    if (supply.empty() || demand.empty()) throw std::invalid_argument("empty transport problem");
    NetworkSimplex ns(supply, demand, cost);
    const long pivots = ns.run();
    TransportSolution out = ns.result();
    out.pivots = pivots;
    return out;
}

}  // namespace tcilab
