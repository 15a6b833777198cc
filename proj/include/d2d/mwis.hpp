#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "d2d/topology.hpp"

namespace d2d {

struct MwisProblem {
    ConflictGraph graph;
    std::vector<double> weights;  // one per node, finite, >= 0

    void validate() const;
};

struct MwisSolution {
    std::vector<std::uint8_t> selected;
    double total_weight = 0.0;
    bool exact = false;
};

struct MwisParams {
    int max_iters = 200;
    double damping = 0.5;
    double tol = 1e-8;
};

bool isIndependentSet(const ConflictGraph& g, const std::vector<std::uint8_t>& selected);
double selectionWeight(const MwisProblem& p, const std::vector<std::uint8_t>& selected);

// Branch-and-bound over all independent sets; nodes decided in ascending
// index order with the include branch first, so among equal-weight optima the
// lexicographically smallest index list wins. Guarded to <= 25 nodes.
MwisSolution solveExact(const MwisProblem& p);

// Damped max-product message passing followed by a greedy repair that always
// returns a valid independent set, maximal over positive-weight nodes. Floored
// by greedyBaseline, so its weight never falls below the baseline's.
MwisSolution solveMessagePassing(const MwisProblem& p, const MwisParams& params = {});

// Picks nodes in descending w/(1+deg) order, skipping conflicts.
MwisSolution greedyBaseline(const MwisProblem& p);

// Instance dump format for offline solver debugging.
std::string mwisToJson(const MwisProblem& p);
MwisProblem mwisFromJson(const std::string& json_text);

}  // namespace d2d
