#include "core/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace beeid {

namespace {

void check_prob_vector(std::span<const double> v, const char* what) {
    double sum = 0.0;
    for (double p : v) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument(std::string(what) + ": negative or NaN entry");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTol) {
        throw std::invalid_argument(std::string(what) + ": entries sum to " +
                                    std::to_string(sum) + ", expected 1");
    }
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("Distribution: empty alphabet");
    check_prob_vector(probs_, "Distribution");
}

Distribution Distribution::uniform(int alphabet_size) {
    if (alphabet_size < 1) throw std::invalid_argument("Distribution::uniform: size < 1");
    return Distribution(std::vector<double>(alphabet_size, 1.0 / alphabet_size));
}

Distribution Distribution::point_mass(int alphabet_size, int at) {
    std::vector<double> v(alphabet_size, 0.0);
    v.at(at) = 1.0;
    return Distribution(std::move(v));
}

ConditionalDistribution::ConditionalDistribution(int in_size, int out_size,
                                                 std::vector<double> rows)
    : in_(in_size), out_(out_size), rows_(std::move(rows)) {
    if (in_ < 1 || out_ < 1) throw std::invalid_argument("ConditionalDistribution: empty alphabet");
    if (rows_.size() != static_cast<size_t>(in_) * out_) {
        throw std::invalid_argument("ConditionalDistribution: size mismatch");
    }
    for (int x = 0; x < in_; ++x) check_prob_vector(row(x), "ConditionalDistribution row");
}

ConditionalDistribution ConditionalDistribution::bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bsc: p outside [0,1]");
    return ConditionalDistribution(2, 2, {1.0 - p, p, p, 1.0 - p});
}

ConditionalDistribution ConditionalDistribution::identity(int size) {
    std::vector<double> rows(static_cast<size_t>(size) * size, 0.0);
    for (int i = 0; i < size; ++i) rows[static_cast<size_t>(i) * size + i] = 1.0;
    return ConditionalDistribution(size, size, std::move(rows));
}

Distribution ConditionalDistribution::row_distribution(int x) const {
    auto r = row(x);
    return Distribution(std::vector<double>(r.begin(), r.end()));
}

JointDistribution::JointDistribution(int nx, int ny, std::vector<double> table)
    : dims_{nx, ny}, table_(std::move(table)) {
    validate();
}

JointDistribution::JointDistribution(int nx, int nxp, int ny, std::vector<double> table)
    : dims_{nx, nxp, ny}, table_(std::move(table)) {
    validate();
}

void JointDistribution::validate() const {
    size_t expect = 1;
    for (int d : dims_) {
        if (d < 1) throw std::invalid_argument("JointDistribution: empty axis");
        expect *= static_cast<size_t>(d);
    }
    if (table_.size() != expect) throw std::invalid_argument("JointDistribution: size mismatch");
    check_prob_vector(table_, "JointDistribution");
}

Distribution JointDistribution::marginal(int axis) const {
    std::vector<double> m(dims_.at(axis), 0.0);
    size_t stride_after = 1;
    for (size_t a = axis + 1; a < dims_.size(); ++a) stride_after *= dims_[a];
    const size_t dim = dims_[axis];
    for (size_t i = 0; i < table_.size(); ++i) {
        m[(i / stride_after) % dim] += table_[i];
    }
    return Distribution(std::move(m));
}

JointDistribution JointDistribution::pair_marginal(int dropped_axis) const {
    if (axes() != 3) throw std::invalid_argument("pair_marginal: needs a 3-way joint");
    int keep[2], k = 0;
    for (int a = 0; a < 3; ++a)
        if (a != dropped_axis) keep[k++] = a;
    std::vector<double> out(static_cast<size_t>(dims_[keep[0]]) * dims_[keep[1]], 0.0);
    for (int i = 0; i < dims_[0]; ++i)
        for (int j = 0; j < dims_[1]; ++j)
            for (int l = 0; l < dims_[2]; ++l) {
                int idx[3] = {i, j, l};
                out[static_cast<size_t>(idx[keep[0]]) * dims_[keep[1]] + idx[keep[1]]] +=
                    at(i, j, l);
            }
    return JointDistribution(dims_[keep[0]], dims_[keep[1]], std::move(out));
}

JointDistribution JointDistribution::product(const Distribution& px, const Distribution& py) {
    std::vector<double> t(static_cast<size_t>(px.size()) * py.size());
    for (int i = 0; i < px.size(); ++i)
        for (int j = 0; j < py.size(); ++j) t[static_cast<size_t>(i) * py.size() + j] = px[i] * py[j];
    return JointDistribution(px.size(), py.size(), std::move(t));
}

JointDistribution JointDistribution::couple(const Distribution& q_x,
                                            const ConditionalDistribution& cond) {
    if (q_x.size() != cond.in_size()) throw std::invalid_argument("couple: alphabet mismatch");
    std::vector<double> t(static_cast<size_t>(q_x.size()) * cond.out_size());
    for (int x = 0; x < q_x.size(); ++x)
        for (int y = 0; y < cond.out_size(); ++y)
            t[static_cast<size_t>(x) * cond.out_size() + y] = q_x[x] * cond(x, y);
    return JointDistribution(q_x.size(), cond.out_size(), std::move(t));
}

Composition::Composition(std::vector<int> c, int block_length) : counts(std::move(c)), n(block_length) {
    int total = 0;
    for (int v : counts) {
        if (v < 0) throw std::invalid_argument("Composition: negative count");
        total += v;
    }
    if (total != n) throw std::invalid_argument("Composition: counts do not sum to n");
}

Distribution Composition::to_distribution() const {
    std::vector<double> p(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
    return Distribution(std::move(p));
}

Composition quantize_composition(const Distribution& q_x, int n) {
    if (n < 1) throw std::invalid_argument("quantize_composition: n < 1");
    const int k = q_x.size();
    std::vector<int> counts(k);
    std::vector<std::pair<double, int>> rema(k);  // (-remainder, index): sort ascending
    int assigned = 0;
    for (int i = 0; i < k; ++i) {
        double exact = q_x[i] * n;
        counts[i] = static_cast<int>(std::floor(exact + 1e-12));
        assigned += counts[i];
        rema[i] = {-(exact - counts[i]), i};
    }
    std::sort(rema.begin(), rema.end());  // largest remainder first, then lowest index
    for (int j = 0; j < n - assigned; ++j) counts[rema[j % k].second] += 1;
    return Composition(std::move(counts), n);
}

}  // namespace beeid
