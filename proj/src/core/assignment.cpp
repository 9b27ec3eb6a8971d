#include "core/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beeid {

AssignmentResult max_weight_assignment(const std::vector<std::vector<double>>& weights) {
    const int n = static_cast<int>(weights.size());
    if (n == 0) return {{}, 0.0, true};
    for (const auto& row : weights) {
        if (static_cast<int>(row.size()) != n) {
            throw std::invalid_argument("max_weight_assignment: matrix must be square");
        }
    }
    const double kInf = std::numeric_limits<double>::infinity();
    // forbidden edges become a large finite cost so potentials stay finite
    double scale = 1.0;
    for (const auto& row : weights)
        for (double w : row)
            if (w != -kInf) scale = std::max(scale, std::abs(w));
    const double kForbidden = scale * 1e6 + 1e6;

    auto cost = [&](int r, int c) {
        const double w = weights[r][c];
        return w == -kInf ? kForbidden : -w;
    };

    // Jonker-Volgenant shortest augmenting paths with potentials
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // match[col 1..n] = row
    std::vector<int> way(n + 1, 0);
    for (int r = 1; r <= n; ++r) {
        match[0] = r;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int r0 = match[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(r0 - 1, j - 1) - u[r0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    AssignmentResult res;
    res.row_to_col.assign(n, -1);
    for (int j = 1; j <= n; ++j) res.row_to_col[match[j] - 1] = j - 1;
    res.total_weight = 0.0;
    res.feasible = true;
    for (int r = 0; r < n; ++r) {
        const double w = weights[r][res.row_to_col[r]];
        if (w == -kInf) {
            res.feasible = false;
        } else {
            res.total_weight += w;
        }
    }
    if (!res.feasible) res.total_weight = -kInf;
    return res;
}

}  // namespace beeid
