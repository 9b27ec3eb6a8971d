#include "core/info.hpp"

#include <algorithm>
#include <cmath>

namespace beeid {

double mutual_information(const JointDistribution& q) {
    if (q.axes() != 2) throw std::invalid_argument("mutual_information: needs a 2-way joint");
    const Distribution px = q.marginal(0);
    const Distribution py = q.marginal(1);
    double s = 0.0;
    for (int x = 0; x < q.dim(0); ++x) {
        for (int y = 0; y < q.dim(1); ++y) {
            const double v = q.at(x, y);
            if (v > 0.0) s += v * std::log(v / (px[x] * py[y]));
        }
    }
    return clip_pos(s);
}

double conditional_mutual_information(const JointDistribution& q, ConditionOn pattern) {
    if (q.axes() != 3) throw std::invalid_argument("conditional_mutual_information: needs 3-way");
    const int cond_axis = pattern == ConditionOn::first ? 0 : pattern == ConditionOn::second ? 1 : 2;
    // I(A;B|C) = sum_c p(c) * I(A;B | C=c) over the two free axes.
    const Distribution pc = q.marginal(cond_axis);
    int free_axis[2], k = 0;
    for (int a = 0; a < 3; ++a)
        if (a != cond_axis) free_axis[k++] = a;
    const int na = q.dim(free_axis[0]), nb = q.dim(free_axis[1]), nc = q.dim(cond_axis);
    double total = 0.0;
    std::vector<double> slice(static_cast<size_t>(na) * nb);
    for (int c = 0; c < nc; ++c) {
        if (pc[c] <= 0.0) continue;
        for (int a = 0; a < na; ++a)
            for (int b = 0; b < nb; ++b) {
                int idx[3];
                idx[cond_axis] = c;
                idx[free_axis[0]] = a;
                idx[free_axis[1]] = b;
                slice[static_cast<size_t>(a) * nb + b] = q.at(idx[0], idx[1], idx[2]) / pc[c];
            }
        total += pc[c] * mutual_information(JointDistribution(na, nb, slice));
    }
    return clip_pos(total);
}

double weighted_divergence(const ConditionalDistribution& q_cond, const ConditionalDistribution& w,
                           const Distribution& q_x) {
    if (q_cond.in_size() != w.in_size() || q_cond.out_size() != w.out_size() ||
        q_x.size() != q_cond.in_size()) {
        throw std::invalid_argument("weighted_divergence: alphabet mismatch");
    }
    double s = 0.0;
    for (int x = 0; x < q_cond.in_size(); ++x) {
        if (q_x[x] <= 0.0) continue;
        for (int y = 0; y < q_cond.out_size(); ++y) {
            const double q = q_cond(x, y);
            if (q <= 0.0) continue;
            if (w(x, y) <= 0.0) return kInf;
            s += q_x[x] * q * std::log(q / w(x, y));
        }
    }
    return clip_pos(s);
}

JointDistribution empirical_joint(std::span<const int> x_seq, std::span<const int> y_seq,
                                  int x_alphabet, int y_alphabet) {
    if (x_seq.size() != y_seq.size() || x_seq.empty()) {
        throw std::invalid_argument("empirical_joint: sequences must have equal positive length");
    }
    std::vector<double> t(static_cast<size_t>(x_alphabet) * y_alphabet, 0.0);
    const double inc = 1.0 / static_cast<double>(x_seq.size());
    for (size_t i = 0; i < x_seq.size(); ++i) {
        const int x = x_seq[i], y = y_seq[i];
        if (x < 0 || x >= x_alphabet || y < 0 || y >= y_alphabet) {
            throw std::invalid_argument("empirical_joint: symbol outside alphabet");
        }
        t[static_cast<size_t>(x) * y_alphabet + y] += inc;
    }
    return JointDistribution(x_alphabet, y_alphabet, std::move(t));
}

namespace {
bool rows_are_permutations(std::vector<std::vector<double>> rows) {
    for (auto& r : rows) std::sort(r.begin(), r.end());
    for (size_t i = 1; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows[i].size(); ++j) {
            if (std::abs(rows[i][j] - rows[0][j]) > 1e-12) return false;
        }
    }
    return true;
}
}  // namespace

bool is_symmetric(const ConditionalDistribution& w) {
    std::vector<std::vector<double>> rows(w.in_size()), cols(w.out_size());
    for (int x = 0; x < w.in_size(); ++x) {
        rows[x].assign(w.row(x).begin(), w.row(x).end());
        for (int y = 0; y < w.out_size(); ++y) cols[y].push_back(w(x, y));
    }
    return rows_are_permutations(std::move(rows)) && rows_are_permutations(std::move(cols));
}

double entropy(const Distribution& p) {
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) s -= p[i] * std::log(p[i]);
    }
    return clip_pos(s);
}

}  // namespace beeid
