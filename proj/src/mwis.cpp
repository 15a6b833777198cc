#include "d2d/mwis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace d2d {

void MwisProblem::validate() const {
    graph.validate();
    if (static_cast<int>(weights.size()) != graph.numNodes())
        throw std::invalid_argument("MwisProblem: weights length does not match graph");
    for (double w : weights)
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("MwisProblem: weights must be finite and >= 0");
}

bool isIndependentSet(const ConflictGraph& g, const std::vector<std::uint8_t>& selected) {
    const int n = g.numNodes();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            if (selected[j] && selected[k] && g.edge(j, k)) return false;
    return true;
}

double selectionWeight(const MwisProblem& p, const std::vector<std::uint8_t>& selected) {
    double s = 0.0;
    for (std::size_t i = 0; i < selected.size(); ++i)
        if (selected[i]) s += p.weights[i];
    return s;
}

namespace {

struct ExactSearch {
    int n;
    const std::vector<double>* w;
    std::vector<std::uint64_t> adj;
    double best_weight = -1.0;
    std::uint64_t best_mask = 0;
    bool have_best = false;

    // excluded: nodes ruled out by an included neighbor (or already decided);
    // avail_weight: total weight of undecided, non-excluded nodes >= i.
    void rec(int i, std::uint64_t excluded, double cur_weight, std::uint64_t cur_mask,
             double avail_weight) {
        if (have_best && cur_weight + avail_weight <= best_weight) return;
        if (i == n) {
            if (!have_best || cur_weight > best_weight) {
                best_weight = cur_weight;
                best_mask = cur_mask;
                have_best = true;
            }
            return;
        }
        const bool available = !((excluded >> i) & 1ULL);
        const double wi = (*w)[i];
        if (available) {
            // include i first: keeps the search in lexicographic order
            std::uint64_t newly = adj[i] & ~excluded & ~((1ULL << (i + 1)) - 1);
            double lost = 0.0;
            for (std::uint64_t m = newly; m; m &= m - 1)
                lost += (*w)[std::countr_zero(m)];
            rec(i + 1, excluded | adj[i] | (1ULL << i), cur_weight + wi, cur_mask | (1ULL << i),
                avail_weight - wi - lost);
            rec(i + 1, excluded, cur_weight, cur_mask, avail_weight - wi);
        } else {
            rec(i + 1, excluded, cur_weight, cur_mask, avail_weight);
        }
    }
};

}  // namespace

MwisSolution solveExact(const MwisProblem& p) {
    p.validate();
    const int n = p.graph.numNodes();
    if (n > 25) throw std::invalid_argument("solveExact: instance too large (> 25 nodes)");

    ExactSearch s;
    s.n = n;
    s.w = &p.weights;
    s.adj.assign(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (p.graph.edge(j, k)) s.adj[j] |= 1ULL << k;

    double total = std::accumulate(p.weights.begin(), p.weights.end(), 0.0);
    s.rec(0, 0, 0.0, 0, total);

    MwisSolution out;
    out.selected.assign(static_cast<std::size_t>(n), 0);
    out.total_weight = 0.0;
    for (int i = 0; i < n; ++i)
        if ((s.best_mask >> i) & 1ULL) {
            out.selected[i] = 1;
            out.total_weight += p.weights[i];
        }
    out.exact = true;
    return out;
}

namespace {

// Descending weight, ties toward the lower index.
std::vector<int> weightOrder(const std::vector<double>& w) {
    std::vector<int> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] > w[b]; });
    return order;
}

}  // namespace

MwisSolution solveMessagePassing(const MwisProblem& p, const MwisParams& params) {
    p.validate();
    if (params.damping < 0.0 || params.damping >= 1.0)
        throw std::invalid_argument("solveMessagePassing: damping must be in [0, 1)");
    const int n = p.graph.numNodes();
    const auto& w = p.weights;

    std::vector<double> msg(static_cast<std::size_t>(n) * n, 0.0);  // msg[i*n+j] = m_{i->j}
    std::vector<double> msg_next(msg.size(), 0.0);
    std::vector<double> in_sum(static_cast<std::size_t>(n), 0.0);   // sum_{k in N(i)} m_{k->i}

    auto refreshInSums = [&]() {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                if (p.graph.edge(k, i)) s += msg[static_cast<std::size_t>(k) * n + i];
            in_sum[i] = s;
        }
    };

    for (int iter = 0; iter < params.max_iters; ++iter) {
        refreshInSums();
        double max_change = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!p.graph.edge(i, j)) continue;
                double others = in_sum[i] - msg[static_cast<std::size_t>(j) * n + i];
                double fresh = std::max(0.0, w[i] - others);
                double old = msg[static_cast<std::size_t>(i) * n + j];
                double next = (1.0 - params.damping) * fresh + params.damping * old;
                msg_next[static_cast<std::size_t>(i) * n + j] = next;
                max_change = std::max(max_change, std::abs(next - old));
            }
        msg.swap(msg_next);
        if (max_change < params.tol) break;
    }
    refreshInSums();

    std::vector<std::uint8_t> estimate(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) estimate[i] = w[i] > in_sum[i] ? 1 : 0;

    // Repair: keep estimated nodes greedily in descending weight, then extend
    // to a maximal set over the remaining positive-weight nodes.
    std::vector<std::uint8_t> kept(static_cast<std::size_t>(n), 0);
    auto conflictsKept = [&](int i) {
        for (int k = 0; k < n; ++k)
            if (kept[k] && p.graph.edge(i, k)) return true;
        return false;
    };
    std::vector<int> order = weightOrder(w);
    for (int i : order)
        if (estimate[i] && !conflictsKept(i)) kept[i] = 1;
    for (int i : order)
        if (!kept[i] && w[i] > 0.0 && !conflictsKept(i)) kept[i] = 1;

    MwisSolution out;
    out.selected = std::move(kept);
    out.total_weight = selectionWeight(p, out.selected);
    out.exact = false;

    // On loopy graphs the messages can settle on a poor estimate; fall back
    // to the greedy baseline whenever it found a heavier set, so this solver
    // never returns less weight than the baseline it is meant to improve on.
    MwisSolution floor = greedyBaseline(p);
    if (floor.total_weight > out.total_weight) return floor;
    return out;
}

MwisSolution greedyBaseline(const MwisProblem& p) {
    p.validate();
    const int n = p.graph.numNodes();

    std::vector<double> ratio(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ratio[i] = p.weights[i] / (1.0 + p.graph.degree(i));
    std::vector<int> order = weightOrder(ratio);

    MwisSolution out;
    out.selected.assign(static_cast<std::size_t>(n), 0);
    for (int i : order) {
        if (!(p.weights[i] > 0.0)) continue;
        bool blocked = false;
        for (int k = 0; k < n; ++k)
            if (out.selected[k] && p.graph.edge(i, k)) {
                blocked = true;
                break;
            }
        if (!blocked) out.selected[i] = 1;
    }
    out.total_weight = selectionWeight(p, out.selected);
    out.exact = false;
    return out;
}

std::string mwisToJson(const MwisProblem& p) {
    p.validate();
    nlohmann::json doc;
    const int n = p.graph.numNodes();
    doc["num_nodes"] = n;
    auto& adj = doc["adjacency"] = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < n; ++k)
            if (p.graph.edge(i, k)) row.push_back(k);
        adj.push_back(std::move(row));
    }
    doc["weights"] = p.weights;
    return doc.dump(2);
}

MwisProblem mwisFromJson(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text);
    const int n = doc.at("num_nodes").get<int>();
    if (n < 0) throw std::invalid_argument("mwisFromJson: num_nodes must be >= 0");

    MwisProblem p;
    p.graph = ConflictGraph(n);
    const auto& adj = doc.at("adjacency");
    if (static_cast<int>(adj.size()) != n)
        throw std::invalid_argument("mwisFromJson: adjacency length does not match num_nodes");
    for (int i = 0; i < n; ++i)
        for (const auto& jk : adj.at(i)) {
            int k = jk.get<int>();
            if (k < 0 || k >= n)
                throw std::invalid_argument("mwisFromJson: neighbor index out of range");
            p.graph.setEdge(i, k);
        }
    p.weights = doc.at("weights").get<std::vector<double>>();
    p.validate();
    return p;
}

}  // namespace d2d
