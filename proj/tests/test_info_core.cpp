#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "core/distribution.hpp"
#include "core/grid.hpp"
#include "core/info.hpp"
#include "core/rng.hpp"

using namespace beeid;

TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(Distribution({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(Distribution({1.2, -0.2}), std::invalid_argument);
    CHECK_NOTHROW(Distribution({0.25, 0.75}));
    CHECK(Distribution::uniform(4)[2] == doctest::Approx(0.25));
}

TEST_CASE("conditional distribution validation") {
    CHECK_THROWS_AS(ConditionalDistribution(2, 2, {1.0, 0.1, 0.5, 0.5}), std::invalid_argument);
    const auto bsc = ConditionalDistribution::bsc(0.1);
    CHECK(bsc(0, 1) == doctest::Approx(0.1));
    CHECK(bsc(1, 1) == doctest::Approx(0.9));
}

TEST_CASE("mutual information basics") {
    // independent fair coins
    const auto prod = JointDistribution::product(Distribution::uniform(2), Distribution::uniform(2));
    CHECK(mutual_information(prod) == doctest::Approx(0.0).epsilon(1e-12));

    // perfectly correlated uniform binary pair
    JointDistribution diag(2, 2, {0.5, 0.0, 0.0, 0.5});
    CHECK(mutual_information(diag) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    JointDistribution q(2, 2, {0.4, 0.1, 0.1, 0.4});
    CHECK(mutual_information(q) == doctest::Approx(0.192745).epsilon(1e-4));
}

TEST_CASE("conditional mutual information") {
    // X' independent of (X, Y): I(X';Y|X) = 0
    std::vector<double> t(8);
    const double joint_xy[4] = {0.4, 0.1, 0.2, 0.3};
    for (int x = 0; x < 2; ++x)
        for (int xp = 0; xp < 2; ++xp)
            for (int y = 0; y < 2; ++y) t[(x * 2 + xp) * 2 + y] = joint_xy[x * 2 + y] * 0.5;
    JointDistribution q(2, 2, 2, t);
    CHECK(conditional_mutual_information(q, ConditionOn::first) == doctest::Approx(0.0).epsilon(1e-12));

    // product of three marginals: zero under every pattern
    std::vector<double> p3(8);
    const double a[2] = {0.3, 0.7}, b[2] = {0.6, 0.4}, c[2] = {0.2, 0.8};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) p3[(i * 2 + j) * 2 + k] = a[i] * b[j] * c[k];
    JointDistribution qp(2, 2, 2, p3);
    for (auto pat : {ConditionOn::first, ConditionOn::second, ConditionOn::third}) {
        CHECK(conditional_mutual_information(qp, pat) == doctest::Approx(0.0).epsilon(1e-12));
    }

    // chain rule on a dense joint: I(X';Y|X) = I(XX';Y) - I(X;Y)
    CounterRng rng(7, 0);
    std::vector<double> d(8);
    double sum = 0.0;
    for (auto& v : d) {
        v = 0.05 + rng.next_double();
        sum += v;
    }
    for (auto& v : d) v /= sum;
    JointDistribution dense(2, 2, 2, d);
    const double lhs = conditional_mutual_information(dense, ConditionOn::first);
    // merge (X, X') into one 4-letter variable, paired against Y
    std::vector<double> merged(8);
    for (int x = 0; x < 2; ++x)
        for (int xp = 0; xp < 2; ++xp)
            for (int y = 0; y < 2; ++y) merged[(x * 2 + xp) * 2 + y] = dense.at(x, xp, y);
    const double i_all = mutual_information(JointDistribution(4, 2, merged));
    const double i_xy = mutual_information(dense.pair_marginal(1));
    CHECK(lhs == doctest::Approx(i_all - i_xy).epsilon(1e-10));
}

TEST_CASE("weighted divergence") {
    const auto w = ConditionalDistribution::bsc(0.2);
    const auto qx = Distribution::uniform(2);
    CHECK(weighted_divergence(w, w, qx) == doctest::Approx(0.0).epsilon(1e-12));

    // point-mass weighting collapses to the KL of that row
    const ConditionalDistribution q(2, 2, {0.5, 0.5, 0.3, 0.7});
    const auto point = Distribution::point_mass(2, 0);
    const double kl = 0.5 * std::log(0.5 / 0.8) + 0.5 * std::log(0.5 / 0.2);
    CHECK(weighted_divergence(q, w, point) == doctest::Approx(kl).epsilon(1e-12));

    // absolute continuity failure
    const ConditionalDistribution z(2, 2, {0.9, 0.1, 0.0, 1.0});
    const ConditionalDistribution onto_zero(2, 2, {0.9, 0.1, 0.5, 0.5});
    CHECK(weighted_divergence(onto_zero, z, qx) == kInf);
}

TEST_CASE("mutual information equals divergence to the output marginal") {
    CounterRng rng(3, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> t(6);
        double sum = 0.0;
        for (auto& v : t) {
            v = 0.01 + rng.next_double();
            sum += v;
        }
        for (auto& v : t) v /= sum;
        JointDistribution q(2, 3, t);
        const auto qx = q.marginal(0);
        const auto qy = q.marginal(1);
        std::vector<double> cond(6), qy_rows(6);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 3; ++y) {
                cond[x * 3 + y] = q.at(x, y) / qx[x];
                qy_rows[x * 3 + y] = qy[y];
            }
        const double lhs = mutual_information(q);
        const double rhs = weighted_divergence(ConditionalDistribution(2, 3, cond),
                                               ConditionalDistribution(2, 3, qy_rows), qx);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("empirical joint") {
    const std::vector<int> x1{0, 0, 1, 1}, y1{0, 1, 0, 1};
    const auto u = empirical_joint(x1, y1, 2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(u.at(i, j) == doctest::Approx(0.25));

    const auto d = empirical_joint(x1, x1, 2, 2);
    CHECK(d.at(0, 0) == doctest::Approx(0.5));
    CHECK(d.at(0, 1) == doctest::Approx(0.0));

    const std::vector<int> x2{0, 0, 0, 1}, y2{0, 0, 1, 1};
    const auto q = empirical_joint(x2, y2, 2, 2);
    CHECK(q.at(0, 0) == doctest::Approx(0.5));
    CHECK(q.at(0, 1) == doctest::Approx(0.25));
    CHECK(q.at(1, 0) == doctest::Approx(0.0));
    CHECK(q.at(1, 1) == doctest::Approx(0.25));

    const std::vector<int> short_y{0};
    CHECK_THROWS_AS(empirical_joint(x2, short_y, 2, 2), std::invalid_argument);
}

TEST_CASE("symmetry check") {
    CHECK(is_symmetric(ConditionalDistribution::bsc(0.1)));
    CHECK(is_symmetric(ConditionalDistribution::identity(3)));
    CHECK_FALSE(is_symmetric(ConditionalDistribution(2, 2, {0.9, 0.1, 0.0, 1.0})));
    // cyclic 3x3
    CHECK(is_symmetric(ConditionalDistribution(3, 3,
                                               {0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8})));
    // rows permutations but columns not
    CHECK_FALSE(is_symmetric(ConditionalDistribution(2, 3,
                                                     {0.5, 0.3, 0.2, 0.5, 0.3, 0.2})));
}

TEST_CASE("conditional grid") {
    // binary, h = 1/2, unconstrained: 3 rows per input, 9 matrices
    CHECK(ConditionalGrid(2, 2, 2).collect().size() == 9);
    // h = 1: only deterministic rows
    const auto det = ConditionalGrid(2, 2, 1).collect();
    CHECK(det.size() == 4);
    for (const auto& m : det)
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) CHECK((m(x, y) == 0.0 || m(x, y) == 1.0));

    // marginal constraint keeps the equal-off-diagonal family
    MarginalConstraint c{Distribution::uniform(2), Distribution::uniform(2), 1.0 / 4};
    const auto constrained = ConditionalGrid(2, 2, 4, c).collect();
    bool found_symmetric = false;
    for (const auto& m : constrained) {
        if (m(0, 1) == m(1, 0) && m(0, 1) == 0.25) found_symmetric = true;
        double mix = 0.5 * m(0, 0) + 0.5 * m(1, 0);
        CHECK(std::abs(mix - 0.5) <= 0.25 + 1e-12);
    }
    CHECK(found_symmetric);

    // determinism: equal parameters give identical streams
    const auto a = ConditionalGrid(2, 2, 3).collect();
    const auto b = ConditionalGrid(2, 2, 3).collect();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("quantize composition") {
    const auto c1 = quantize_composition(Distribution::uniform(2), 4);
    CHECK(c1.counts == std::vector<int>{2, 2});
    const auto c2 = quantize_composition(Distribution({0.3, 0.7}), 10);
    CHECK(c2.counts == std::vector<int>{3, 7});
    const auto c3 = quantize_composition(Distribution({1.0 / 3, 1.0 / 3, 1.0 / 3}), 4);
    CHECK(c3.counts == std::vector<int>{2, 1, 1});
    // counts always sum to n
    CounterRng rng(11, 0);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> p(3);
        double s = 0.0;
        for (auto& v : p) {
            v = 0.05 + rng.next_double();
            s += v;
        }
        for (auto& v : p) v /= s;
        const int n = 1 + static_cast<int>(rng.next_below(40));
        const auto c = quantize_composition(Distribution(p), n);
        int total = 0;
        for (int v : c.counts) total += v;
        CHECK(total == n);
    }
}

TEST_CASE("simplex interpolation") {
    SimplexInterpolator interp(2, 4);
    REQUIRE(interp.node_count() == 5);
    std::vector<double> va(5), vb(5);
    for (int i = 0; i < 5; ++i) {
        va[i] = i * 0.5;
        vb[i] = 1.0 + i;
    }
    interp.set_values(va, vb);
    const double pt[1] = {0.375};  // halfway between nodes 1 and 2
    auto [a, b] = interp.interpolate(std::span<const double>(pt, 1));
    CHECK(a == doctest::Approx(0.75));
    CHECK(b == doctest::Approx(2.5));

    // -inf propagates inside its cell
    va[2] = -kInf;
    interp.set_values(va, vb);
    auto [a2, b2] = interp.interpolate(std::span<const double>(pt, 1));
    CHECK(a2 == -kInf);
    CHECK(b2 == doctest::Approx(2.5));

    // ternary lattice reproduces node values and stays linear on edges
    SimplexInterpolator t3(3, 5);
    std::vector<double> v3(t3.node_count()), w3(t3.node_count());
    for (int i = 0; i < t3.node_count(); ++i) {
        const auto p = t3.node_point(i);
        v3[i] = 2.0 * p[0] - p[1];
        w3[i] = 0.5 * p[2];
    }
    t3.set_values(v3, w3);
    CounterRng rng(5, 0);
    for (int t = 0; t < 50; ++t) {
        double x = rng.next_double(), y = rng.next_double() * (1.0 - x);
        const double p[2] = {x, y};
        auto [lin, lin2] = t3.interpolate(std::span<const double>(p, 2));
        CHECK(lin == doctest::Approx(2.0 * x - y).epsilon(1e-9));
        CHECK(lin2 == doctest::Approx(0.5 * (1.0 - x - y)).epsilon(1e-9));
    }
}
