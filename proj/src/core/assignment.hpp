#pragma once

#include <vector>

namespace beeid {

struct AssignmentResult {
    std::vector<int> row_to_col;  // row m matched to column row_to_col[m]
    double total_weight;          // sum of matched weights (original values)
    bool feasible;                // false when the best matching uses a forbidden edge
};

/// Maximum-weight perfect matching on a square matrix. Entries may be -inf
/// (forbidden). O(n^3) shortest-augmenting-path solver with a fixed scan
/// order, so ties resolve deterministically.
AssignmentResult max_weight_assignment(const std::vector<std::vector<double>>& weights);

}  // namespace beeid
