#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/assignment.hpp"
#include "core/info.hpp"
#include "core/parallel.hpp"
#include "core/simulator.hpp"

using namespace beeid;

namespace {

const Distribution kU2 = Distribution::uniform(2);

Codebook cc_codebook(int n, int m, uint64_t seed, const Distribution& qx = kU2) {
    return sample_codebook(ConstantComposition{quantize_composition(qx, n)}, n, m, seed);
}

}  // namespace

TEST_CASE("constant composition sampling") {
    // single arrangement
    const auto cb1 = sample_codebook(ConstantComposition{Composition({3, 0}, 3)}, 3, 1, 7);
    CHECK(std::vector<uint8_t>(cb1.word(0).begin(), cb1.word(0).end()) ==
          std::vector<uint8_t>{0, 0, 0});

    // all words share the composition counts
    const auto cb = cc_codebook(10, 20, 42);
    for (int msg = 0; msg < cb.m; ++msg) {
        int ones = 0;
        for (auto s : cb.word(msg)) ones += s;
        CHECK(ones == 5);
    }

    // deterministic in the seed
    const auto cb2 = cc_codebook(10, 20, 42);
    CHECK(cb.words == cb2.words);
    const auto cb3 = cc_codebook(10, 20, 43);
    CHECK(cb.words != cb3.words);
}

TEST_CASE("iid sampling follows the symbol law") {
    const auto cb = sample_codebook(IidGeneration{Distribution({0.3, 0.7})}, 10000, 4, 5);
    for (int msg = 0; msg < cb.m; ++msg) {
        int zeros = 0;
        for (auto s : cb.word(msg)) zeros += s == 0;
        CHECK(std::abs(zeros / 10000.0 - 0.3) < 0.02);
    }
}

TEST_CASE("transmit") {
    const auto cb = cc_codebook(16, 6, 1);
    CounterRng prng(2, 0);
    const auto pi = random_permutation(6, prng);

    const auto id = ConditionalDistribution::identity(2);
    const auto outs = transmit(cb, id, pi, 9, 0);
    for (int slot = 0; slot < 6; ++slot) {
        const auto word = cb.word(pi.map[slot]);
        CHECK(std::equal(word.begin(), word.end(), outs[slot].begin()));
    }

    // crossover frequency matches the channel parameter
    const auto bsc = ConditionalDistribution::bsc(0.1);
    const auto cb_long = cc_codebook(10000, 2, 3);
    const auto noisy = transmit(cb_long, bsc, identity_permutation(2), 4, 0);
    int flips = 0;
    for (int slot = 0; slot < 2; ++slot) {
        const auto word = cb_long.word(slot);
        for (int i = 0; i < cb_long.n; ++i) flips += noisy[slot][i] != word[i];
    }
    CHECK(std::abs(flips / 20000.0 - 0.1) < 0.01);
}

TEST_CASE("random permutations are uniform-ish and bijective") {
    CounterRng rng(13, 0);
    std::vector<int> first_count(4, 0);
    for (int t = 0; t < 4000; ++t) {
        const auto pi = random_permutation(4, rng);
        std::vector<int> seen(4, 0);
        for (int v : pi.map) seen[v] += 1;
        CHECK(*std::min_element(seen.begin(), seen.end()) == 1);
        first_count[pi.map[0]] += 1;
    }
    for (int c : first_count) CHECK(std::abs(c - 1000) < 120);  // ~4 sigma
}

TEST_CASE("gld decoding") {
    const auto bsc = ConditionalDistribution::bsc(0.1);
    const auto ml = DecodingMetric::ml(bsc);

    // M = 1 always returns the only message
    const auto cb1 = cc_codebook(4, 1, 11);
    CounterRng rng(1, 0);
    CHECK(gld_decode(cb1.word(0), cb1, ml, 2, GldMode::stochastic, rng).message == 0);

    // zero-error channel, map mode: recovers the transmitted index
    const auto id = ConditionalDistribution::identity(2);
    const auto ml_id = DecodingMetric::ml(id);
    const auto cb = cc_codebook(8, 4, 17);
    for (int msg = 0; msg < 4; ++msg) {
        bool distinct = true;
        for (int other = 0; other < 4; ++other) {
            if (other != msg && cb.word(other).size() == cb.word(msg).size() &&
                std::equal(cb.word(msg).begin(), cb.word(msg).end(), cb.word(other).begin()))
                distinct = false;
        }
        if (!distinct) continue;
        CounterRng r2(3, msg);
        const auto got = gld_decode(cb.word(msg), cb, ml_id, 2, GldMode::map, r2);
        CHECK(got.message == msg);
    }
}

TEST_CASE("stochastic gld follows the posterior") {
    // n = 1, two codewords 0 and 1, output 0 through BSC(0.2): the posterior
    // weights are exp(g) with g = log W(0|x)
    const auto bsc = ConditionalDistribution::bsc(0.2);
    const auto ml = DecodingMetric::ml(bsc);
    Codebook cb{1, 2, {0, 1}, IidGeneration{kU2}, 0};
    const std::vector<uint8_t> y{0};
    const double w0 = 0.8, w1 = 0.2;
    const double p0 = w0 / (w0 + w1);

    CounterRng rng(77, 0);
    const int kDraws = 100000;
    int hits = 0;
    for (int t = 0; t < kDraws; ++t) {
        hits += gld_decode(y, cb, ml, 2, GldMode::stochastic, rng).message == 0;
    }
    const double se = std::sqrt(p0 * (1 - p0) / kDraws);
    CHECK(std::abs(hits / static_cast<double>(kDraws) - p0) < 3 * se);

    // chi-square goodness of fit on a 4-codeword instance, n = 2
    Codebook cb4{2, 4, {0, 0, 0, 1, 1, 0, 1, 1}, IidGeneration{kU2}, 0};
    const std::vector<uint8_t> y2{0, 1};
    std::vector<double> weights(4);
    double z = 0.0;
    for (int msg = 0; msg < 4; ++msg) {
        const auto word = cb4.word(msg);
        weights[msg] = bsc(word[0], 0) * bsc(word[1], 1);
        z += weights[msg];
    }
    std::vector<int> counts(4, 0);
    for (int t = 0; t < kDraws; ++t) {
        counts[gld_decode(y2, cb4, ml, 2, GldMode::stochastic, rng).message] += 1;
    }
    double chi2 = 0.0;
    for (int msg = 0; msg < 4; ++msg) {
        const double expect = kDraws * weights[msg] / z;
        chi2 += (counts[msg] - expect) * (counts[msg] - expect) / expect;
    }
    CHECK(chi2 < 11.345);  // 1% critical value, 3 degrees of freedom
}

TEST_CASE("naive trials") {
    const auto id = ConditionalDistribution::identity(2);
    const auto cb = cc_codebook(12, 6, 23);
    const auto out = naive_trial(cb, id, DecodingMetric::ml(id), GldMode::map, 5, 0);
    CHECK(out.n_errors == 0);

    // constant-rows channel: decoding is a uniform guess
    const ConditionalDistribution flat(2, 2, {0.5, 0.5, 0.5, 0.5});
    const auto cb_big = cc_codebook(8, 40, 29);
    double total = 0.0;
    const int kTrials = 300;
    for (int t = 0; t < kTrials; ++t) {
        total += naive_trial(cb_big, flat, DecodingMetric::ml(flat), GldMode::stochastic, 31, t)
                     .n_errors;
    }
    const double mean = total / kTrials;
    CHECK(std::abs(mean - 39.0) < 1.0);  // M(1 - 1/M) = 39.025 expected
}

TEST_CASE("assignment solver") {
    // forbidden edges force infeasibility detection
    const double ninf = -kInf;
    auto res = max_weight_assignment({{ninf, ninf}, {ninf, ninf}});
    CHECK_FALSE(res.feasible);

    res = max_weight_assignment({{1.0, 5.0}, {2.0, 1.0}});
    CHECK(res.feasible);
    CHECK(res.total_weight == doctest::Approx(7.0));
    CHECK(res.row_to_col == std::vector<int>{1, 0});
}

TEST_CASE("ml permutation decoding matches brute force") {
    const auto bsc = ConditionalDistribution::bsc(0.25);
    for (int inst = 0; inst < 100; ++inst) {
        const int m = 2 + inst % 5;  // 2..6
        const auto cb = cc_codebook(6, m, 1000 + inst);
        CounterRng prng(2000 + inst, 0);
        const auto pi = random_permutation(m, prng);
        const auto outs = transmit(cb, bsc, pi, 3000 + inst, 0);
        const auto dec = ml_permutation_decode(outs, cb, bsc);
        REQUIRE(dec.feasible);

        // factorial brute force over all permutations
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        double best = -kInf;
        do {
            double s = 0.0;
            for (int slot = 0; slot < m; ++slot) {
                const auto word = cb.word(perm[slot]);
                for (int i = 0; i < cb.n; ++i) s += std::log(bsc(word[i], outs[slot][i]));
            }
            best = std::max(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(dec.log_likelihood == doctest::Approx(best).epsilon(1e-12));
    }

    // zero-error channel recovers the exact permutation when words are distinct
    const auto id = ConditionalDistribution::identity(2);
    const auto cb = cc_codebook(10, 5, 77);
    CounterRng prng(4, 0);
    const auto pi = random_permutation(5, prng);
    const auto outs = transmit(cb, id, pi, 6, 0);
    const auto dec = ml_permutation_decode(outs, cb, id);
    CHECK(dec.permutation == pi);
}

TEST_CASE("estimate determinism and monotonicity in L") {
    const auto bsc = ConditionalDistribution::bsc(0.2);
    EstimateConfig cfg{EstimateConfig::Mode::naive,
                       bsc,
                       ConstantComposition{quantize_composition(kU2, 6)},
                       6,
                       4,
                       1,
                       DecodingMetric::ml(bsc),
                       GldMode::stochastic,
                       true,
                       4000};
    set_max_threads(1);
    const auto r1 = estimate_error(cfg, 99);
    set_max_threads(4);
    const auto r2 = estimate_error(cfg, 99);
    set_max_threads(0);
    CHECK(r1.failures == r2.failures);
    CHECK(r1.p_hat == r2.p_hat);

    double prev = 1.0;
    for (int L = 1; L <= 4; ++L) {
        cfg.threshold_L = L;
        const auto rep = estimate_error(cfg, 99);
        CHECK(rep.p_hat <= prev + 1e-15);
        prev = rep.p_hat;
        CHECK(rep.wilson_lo <= rep.p_hat);
        CHECK(rep.wilson_hi >= rep.p_hat);
    }

    // identity channel with distinct codewords cannot fail; single trial is 0/1.
    // A fixed codebook is pinned because duplicate codewords make likelihood
    // ties that the joint decoder counts as errors.
    const uint64_t cb_seed = 12;
    const auto fixed = sample_codebook(ConstantComposition{quantize_composition(kU2, 8)}, 8, 4,
                                       cb_seed);
    for (int a = 0; a < fixed.m; ++a)
        for (int b = a + 1; b < fixed.m; ++b) {
            REQUIRE_FALSE(std::equal(fixed.word(a).begin(), fixed.word(a).end(),
                                     fixed.word(b).begin()));
        }
    EstimateConfig perfect{EstimateConfig::Mode::joint,
                           ConditionalDistribution::identity(2),
                           ConstantComposition{quantize_composition(kU2, 8)},
                           8,
                           4,
                           1,
                           DecodingMetric::ml(ConditionalDistribution::identity(2)),
                           GldMode::map,
                           false,
                           500,
                           cb_seed};
    CHECK(estimate_error(perfect, 5).p_hat == 0.0);
    perfect.trials = 1;
    const double single = estimate_error(perfect, 5).p_hat;
    CHECK((single == 0.0 || single == 1.0));
}

TEST_CASE("exact per-message error") {
    const auto bsc = ConditionalDistribution::bsc(0.2);
    const auto ml = DecodingMetric::ml(bsc);

    const auto cb1 = cc_codebook(4, 1, 3);
    CHECK(exact_pm(cb1, 0, bsc, ml) == doctest::Approx(0.0));

    // identity channel with distinct codewords: competitors carry zero weight
    const auto id = ConditionalDistribution::identity(2);
    Codebook cb_id{2, 2, {0, 0, 1, 1}, IidGeneration{kU2}, 0};
    CHECK(exact_pm(cb_id, 0, id, DecodingMetric::ml(id)) == doctest::Approx(0.0).epsilon(1e-12));

    // Monte Carlo cross-check of mu and of the tail probability; the codebook
    // seed is pinned separately from the trial randomness
    const auto cb = cc_codebook(4, 3, 51);
    const double mu_exact = mu(cb, bsc, ml);
    EstimateConfig cfg{EstimateConfig::Mode::naive,
                       bsc,
                       cb.generation,
                       4,
                       3,
                       1,
                       ml,
                       GldMode::stochastic,
                       false,
                       200000,
                       cb.seed};
    double sum_ne = 0.0;
    std::vector<TrialLogEntry> log;
    const auto rep = estimate_error(cfg, 101, &log);
    for (const auto& e : log) sum_ne += e.outcome.n_errors;
    const double mc_mu = sum_ne / static_cast<double>(rep.trials);
    // N_e has variance at most M^2/4 per trial; 3 sigma of the mean
    CHECK(std::abs(mc_mu - mu_exact) < 3.0 * 1.5 / std::sqrt(200000.0));

    const double exact_tail = exact_error_naive(cb, bsc, ml, 1);
    CHECK(rep.wilson_lo <= exact_tail);
    CHECK(exact_tail <= rep.wilson_hi);

    CHECK_THROWS_AS(exact_pm(cc_codebook(30, 2, 1), 0, bsc, ml), std::invalid_argument);
}

TEST_CASE("exact tail probability") {
    const auto bsc = ConditionalDistribution::bsc(0.2);
    const auto ml = DecodingMetric::ml(bsc);
    const auto cb = cc_codebook(4, 4, 8);

    std::vector<double> pm(cb.m);
    for (int msg = 0; msg < cb.m; ++msg) pm[msg] = exact_pm(cb, msg, bsc, ml);

    // L = 1: complement of all-correct
    double prod = 1.0;
    for (double p : pm) prod *= 1.0 - p;
    CHECK(exact_error_naive(cb, bsc, ml, 1) == doctest::Approx(1.0 - prod).epsilon(1e-12));

    // L = M + 1: impossible
    CHECK(exact_error_naive(cb, bsc, ml, cb.m + 1) == doctest::Approx(0.0));

    // equal-p instance reduces to the binomial tail
    Codebook cb2{2, 2, {0, 1, 1, 0}, ConstantComposition{Composition({1, 1}, 2)}, 0};
    const double p0 = exact_pm(cb2, 0, bsc, ml);
    const double p1 = exact_pm(cb2, 1, bsc, ml);
    CHECK(p0 == doctest::Approx(p1).epsilon(1e-12));
    const double want_l2 = p0 * p1;
    CHECK(exact_error_naive(cb2, bsc, ml, 2) == doctest::Approx(want_l2).epsilon(1e-12));

    // mu on a symmetric two-word instance
    CHECK(mu(cb2, bsc, ml) == doctest::Approx(2.0 * p0).epsilon(1e-12));
}

TEST_CASE("type enumerator") {
    const auto cb1 = cc_codebook(6, 1, 2);
    const auto diag = JointDistribution(2, 2, {0.5, 0.0, 0.0, 0.5});
    CHECK(type_enumerator(cb1, diag) == 0);

    // identical words: every ordered pair sits on the diagonal type
    Codebook same{4, 3, {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1},
                  ConstantComposition{Composition({2, 2}, 4)}, 0};
    CHECK(type_enumerator(same, diag) == 6);
    const auto off = JointDistribution(2, 2, {0.25, 0.25, 0.25, 0.25});
    CHECK(type_enumerator(same, off) == 0);

    // ensemble mean against the multinomial pair-count ratio
    const int n = 12, m = 8;
    const Composition comp = quantize_composition(kU2, n);
    const auto q = JointDistribution(2, 2, {0.25, 0.25, 0.25, 0.25});
    auto lchoose = [](double a, double b) {
        return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
    };
    // pairs in the joint type class / |T(comp)|^2
    const double log_pairs = std::lgamma(n + 1) - 4 * std::lgamma(n / 4.0 + 1);
    const double log_tsize = lchoose(n, n / 2.0);
    const double p_pair = std::exp(log_pairs - 2 * log_tsize);
    const double expect = m * (m - 1) * p_pair;

    const int kBooks = 10000;
    double total = 0.0, total_sq = 0.0;
    for (int b = 0; b < kBooks; ++b) {
        const auto cb = sample_codebook(ConstantComposition{comp}, n, m, 70000 + b);
        const double v = static_cast<double>(type_enumerator(cb, q));
        total += v;
        total_sq += v * v;
    }
    const double mean = total / kBooks;
    const double var = std::max(total_sq / kBooks - mean * mean, 1e-9);
    CHECK(std::abs(mean - expect) < 3.0 * std::sqrt(var / kBooks));
}

TEST_CASE("wilson interval") {
    const auto [lo, hi] = wilson_interval(10, 100);
    CHECK(lo < 0.1);
    CHECK(hi > 0.1);
    CHECK(lo > 0.04);
    CHECK(hi < 0.19);
    const auto [l0, h0] = wilson_interval(0, 50);
    CHECK(l0 == 0.0);
    CHECK(h0 > 0.0);
    CHECK(wilson_interval(50, 50).second == 1.0);
}
