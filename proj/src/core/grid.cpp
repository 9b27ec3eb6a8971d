#include "core/grid.hpp"

#include <algorithm>
#include <cmath>

#include "core/info.hpp"

namespace beeid {

namespace {

void enumerate_compositions(int parts, int total, std::vector<int>& current,
                            const std::function<bool(const std::vector<int>&)>& fn, bool& stop) {
    const int level = static_cast<int>(current.size());
    if (level == parts - 1) {
        current.push_back(total);
        if (!fn(current)) stop = true;
        current.pop_back();
        return;
    }
    // descending leading entry gives lexicographically decreasing probability
    // vectors; use ascending count so the stream is lexicographic in entries.
    for (int c = 0; c <= total && !stop; ++c) {
        current.push_back(c);
        enumerate_compositions(parts, total - c, current, fn, stop);
        current.pop_back();
    }
}

}  // namespace

std::vector<std::vector<double>> simplex_grid(int parts, int resolution_den) {
    if (parts < 1 || resolution_den < 1) throw std::invalid_argument("simplex_grid: bad arguments");
    std::vector<std::vector<double>> out;
    std::vector<int> cur;
    bool stop = false;
    enumerate_compositions(parts, resolution_den, cur, [&](const std::vector<int>& c) {
        std::vector<double> p(parts);
        for (int i = 0; i < parts; ++i) p[i] = static_cast<double>(c[i]) / resolution_den;
        out.push_back(std::move(p));
        return true;
    }, stop);
    return out;
}

long long simplex_grid_size(int parts, int resolution_den) {
    // C(resolution_den + parts - 1, parts - 1)
    long long r = 1;
    for (int i = 1; i <= parts - 1; ++i) {
        r = r * (resolution_den + i) / i;
    }
    return r;
}

ConditionalGrid::ConditionalGrid(int in_size, int out_size, int resolution_den,
                                 std::optional<MarginalConstraint> constraint)
    : in_(in_size), out_(out_size), den_(resolution_den), constraint_(std::move(constraint)) {
    if (in_ < 1 || out_ < 1 || den_ < 1) throw std::invalid_argument("ConditionalGrid: bad sizes");
    if (constraint_ && (constraint_->weighting.size() != in_ || constraint_->target.size() != out_)) {
        throw std::invalid_argument("ConditionalGrid: constraint alphabet mismatch");
    }
}

long long ConditionalGrid::unconstrained_size() const {
    long long per_row = simplex_grid_size(out_, den_);
    long long total = 1;
    for (int i = 0; i < in_; ++i) total *= per_row;
    return total;
}

void ConditionalGrid::for_each(const std::function<bool(const ConditionalDistribution&)>& fn) const {
    const auto rows = simplex_grid(out_, den_);
    std::vector<size_t> pick(in_, 0);
    std::vector<double> flat(static_cast<size_t>(in_) * out_);
    const double tol = constraint_ ? constraint_->tolerance : 0.0;
    while (true) {
        for (int x = 0; x < in_; ++x) {
            std::copy(rows[pick[x]].begin(), rows[pick[x]].end(), flat.begin() + static_cast<size_t>(x) * out_);
        }
        bool ok = true;
        if (constraint_) {
            for (int y = 0; y < out_ && ok; ++y) {
                double mix = 0.0;
                for (int x = 0; x < in_; ++x) mix += constraint_->weighting[x] * flat[static_cast<size_t>(x) * out_ + y];
                if (std::abs(mix - constraint_->target[y]) > tol + 1e-12) ok = false;
            }
        }
        if (ok) {
            if (!fn(ConditionalDistribution(in_, out_, flat))) return;
        }
        int level = in_ - 1;
        while (level >= 0 && ++pick[level] == rows.size()) pick[level--] = 0;
        if (level < 0) break;
    }
}

std::vector<ConditionalDistribution> ConditionalGrid::collect() const {
    std::vector<ConditionalDistribution> out;
    for_each([&](const ConditionalDistribution& c) {
        out.push_back(c);
        return true;
    });
    return out;
}

SimplexInterpolator::SimplexInterpolator(int parts, int den) : parts_(parts), den_(den) {
    if (parts < 2 || den < 1) throw std::invalid_argument("SimplexInterpolator: bad arguments");
    std::vector<int> cur;
    bool stop = false;
    enumerate_compositions(parts, den, cur, [&](const std::vector<int>& c) {
        nodes_.emplace_back(c.begin(), c.end() - 1);
        return true;
    }, stop);
    size_t keyspace = 1;
    for (int i = 0; i < parts_ - 1; ++i) keyspace *= static_cast<size_t>(den_ + 1);
    index_of_.assign(keyspace, -1);
    for (size_t i = 0; i < nodes_.size(); ++i) index_of_[key_of(nodes_[i])] = static_cast<int>(i);
}

int SimplexInterpolator::key_of(std::span<const int> coord) const {
    int key = 0;
    for (int i = 0; i < parts_ - 1; ++i) key = key * (den_ + 1) + coord[i];
    return key;
}

Distribution SimplexInterpolator::node_point(int node_index) const {
    const auto& c = nodes_[node_index];
    std::vector<double> p(parts_);
    int rest = den_;
    for (int i = 0; i < parts_ - 1; ++i) {
        p[i] = static_cast<double>(c[i]) / den_;
        rest -= c[i];
    }
    p[parts_ - 1] = static_cast<double>(rest) / den_;
    return Distribution(std::move(p));
}

void SimplexInterpolator::set_values(std::vector<double> alpha_like, std::vector<double> beta_like) {
    if (alpha_like.size() != nodes_.size() || beta_like.size() != nodes_.size()) {
        throw std::invalid_argument("SimplexInterpolator: value count mismatch");
    }
    va_ = std::move(alpha_like);
    vb_ = std::move(beta_like);
}

std::pair<double, double> SimplexInterpolator::interpolate_1d(double p0) const {
    double u = p0 * den_;
    if (u <= 0.0) u = 0.0;
    if (u >= den_) u = den_;
    const int b = std::min(static_cast<int>(u), den_ - 1);
    const double t = u - b;
    const double a0 = va_[b], a1 = va_[b + 1];
    const double b0 = vb_[b], b1 = vb_[b + 1];
    double a, bb;
    if (a0 == -kInf) a = t > 1.0 - 1e-12 ? a1 : -kInf;
    else if (a1 == -kInf) a = t < 1e-12 ? a0 : -kInf;
    else a = a0 + t * (a1 - a0);
    if (b0 == -kInf) bb = t > 1.0 - 1e-12 ? b1 : -kInf;
    else if (b1 == -kInf) bb = t < 1e-12 ? b0 : -kInf;
    else bb = b0 + t * (b1 - b0);
    return {a, bb};
}

std::pair<double, double> SimplexInterpolator::interpolate(std::span<const double> point) const {
    if (parts_ == 2) return interpolate_1d(point[0]);
    if (parts_ == 3) {
        // exact triangular-lattice rule: up or down triangle of the cell
        double u0 = std::clamp(point[0], 0.0, 1.0) * den_;
        double u1 = std::clamp(point[1], 0.0, 1.0) * den_;
        if (u0 + u1 > den_) {  // numeric spill outside the simplex
            const double s = (u0 + u1) - den_;
            u0 = std::max(u0 - 0.5 * s, 0.0);
            u1 = std::max(u1 - 0.5 * s, 0.0);
        }
        int b0 = std::min(static_cast<int>(u0), den_ - 1);
        int b1 = std::min(static_cast<int>(u1), den_ - 1);
        if (b0 + b1 >= den_) {  // keep the base corner inside the lattice
            (b0 > b1 ? b0 : b1) -= (b0 + b1) - (den_ - 1);
        }
        const double f0 = u0 - b0, f1 = u1 - b1;
        int vtx[3][2];
        double wt[3];
        if (f0 + f1 <= 1.0) {
            vtx[0][0] = b0, vtx[0][1] = b1, wt[0] = 1.0 - f0 - f1;
            vtx[1][0] = b0 + 1, vtx[1][1] = b1, wt[1] = f0;
            vtx[2][0] = b0, vtx[2][1] = b1 + 1, wt[2] = f1;
        } else {
            vtx[0][0] = b0 + 1, vtx[0][1] = b1, wt[0] = 1.0 - f1;
            vtx[1][0] = b0, vtx[1][1] = b1 + 1, wt[1] = 1.0 - f0;
            vtx[2][0] = b0 + 1, vtx[2][1] = b1 + 1, wt[2] = f0 + f1 - 1.0;
        }
        double wa = 0.0, wb = 0.0;
        bool a_inf = false, b_inf = false;
        for (int v = 0; v < 3; ++v) {
            if (wt[v] <= 1e-15) continue;
            const int coord[2] = {vtx[v][0], vtx[v][1]};
            const int idx = index_of_[key_of(std::span<const int>(coord, 2))];
            if (idx < 0) continue;
            if (va_[idx] == -kInf) a_inf = true; else wa += wt[v] * va_[idx];
            if (vb_[idx] == -kInf) b_inf = true; else wb += wt[v] * vb_[idx];
        }
        return {a_inf ? -kInf : wa, b_inf ? -kInf : wb};
    }
    // d >= 3: Kuhn-simplex walk with boundary clamping; approximate in the
    // outermost lattice layer, exact elsewhere.
    constexpr int kMaxDim = 7;
    const int d = parts_ - 1;
    if (d > kMaxDim) throw std::invalid_argument("SimplexInterpolator: alphabet too large");
    int vertex[kMaxDim];
    double frac[kMaxDim];
    int order[kMaxDim];
    for (int i = 0; i < d; ++i) {
        double u = point[i] * den_;
        int b = static_cast<int>(std::floor(u + 1e-12));
        b = std::clamp(b, 0, den_);
        vertex[i] = b;
        frac[i] = u - b;
        order[i] = i;
    }
    std::sort(order, order + d, [&](int a, int b) {
        return frac[a] != frac[b] ? frac[a] > frac[b] : a < b;
    });

    double wa = 0.0, wb = 0.0;
    double prev_t = 1.0;
    bool a_neg_inf = false, b_neg_inf = false;
    auto accumulate = [&](double weight) {
        if (weight <= 1e-15) return;
        // clamp the vertex into the lattice (entries in [0,den], sum <= den)
        int v[kMaxDim];
        int sum = 0;
        for (int i = 0; i < d; ++i) {
            v[i] = std::clamp(vertex[i], 0, den_);
            sum += v[i];
        }
        for (int i = d - 1; i >= 0 && sum > den_; --i) {
            const int drop = std::min(v[i], sum - den_);
            v[i] -= drop;
            sum -= drop;
        }
        const int idx = index_of_[key_of(std::span<const int>(v, static_cast<size_t>(d)))];
        if (idx < 0) return;
        if (va_[idx] == -kInf) a_neg_inf = true; else wa += weight * va_[idx];
        if (vb_[idx] == -kInf) b_neg_inf = true; else wb += weight * vb_[idx];
    };
    for (int s = 0; s < d; ++s) {
        const double t = frac[order[s]];
        accumulate(prev_t - t);
        vertex[order[s]] += 1;
        prev_t = t;
    }
    accumulate(prev_t);
    return {a_neg_inf ? -kInf : wa, b_neg_inf ? -kInf : wb};
}

}  // namespace beeid
