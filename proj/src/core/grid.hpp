#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "core/distribution.hpp"

namespace beeid {

/// All points of the probability simplex over `parts` symbols whose entries are
/// multiples of 1/resolution_den, in lexicographic order. resolution_den >= 1.
std::vector<std::vector<double>> simplex_grid(int parts, int resolution_den);

/// Number of simplex grid points: C(resolution_den + parts - 1, parts - 1).
long long simplex_grid_size(int parts, int resolution_den);

/// Optional marginal constraint for conditional_grid: weighted row mixture must
/// reproduce target within tolerance (max-abs). Weighting is over input rows.
struct MarginalConstraint {
    Distribution weighting;  // over the rows' index set (e.g. Q_Y over y)
    Distribution target;     // required mixture over the columns (e.g. Q_X)
    double tolerance;
};

/// Deterministic stream of row-stochastic matrices whose entries are multiples
/// of h = 1/resolution_den, lexicographic in (row, entry) order.
class ConditionalGrid {
public:
    ConditionalGrid(int in_size, int out_size, int resolution_den,
                    std::optional<MarginalConstraint> constraint = std::nullopt);

    /// Calls fn for each member; stops early if fn returns false.
    void for_each(const std::function<bool(const ConditionalDistribution&)>& fn) const;
    std::vector<ConditionalDistribution> collect() const;
    long long unconstrained_size() const;

private:
    int in_, out_, den_;
    std::optional<MarginalConstraint> constraint_;
};

/// Piecewise-linear interpolation of node values on a simplex lattice of step
/// 1/den over `parts` symbols (Kuhn triangulation). Nodes are indexed by their
/// integer coordinate vector over the first parts-1 symbols.
class SimplexInterpolator {
public:
    SimplexInterpolator(int parts, int den);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    /// Integer lattice coordinates (first parts-1 entries; last implied).
    const std::vector<std::vector<int>>& nodes() const { return nodes_; }
    Distribution node_point(int node_index) const;

    void set_values(std::vector<double> alpha_like, std::vector<double> beta_like);

    /// Linear interpolation at a simplex point; -inf node values propagate to
    /// any cell that touches them with positive weight.
    std::pair<double, double> interpolate(std::span<const double> point) const;

private:
    std::pair<double, double> interpolate_1d(double p0) const;
    int parts_, den_;
    std::vector<std::vector<int>> nodes_;
    std::vector<int> index_of_;  // dense lookup over mixed-radix keys
    std::vector<double> va_, vb_;
    int key_of(std::span<const int> coord) const;
};

}  // namespace beeid
