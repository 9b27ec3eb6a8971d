#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/info.hpp"
#include "core/metric.hpp"
#include "core/naive.hpp"
#include "core/rng.hpp"

using namespace beeid;

namespace {

const Distribution kU2 = Distribution::uniform(2);

double g_ml(const ConditionalDistribution& w, const std::vector<double>& joint) {
    double s = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const double q = joint[x * 2 + y];
            if (q <= 0.0) continue;
            if (w(x, y) <= 0.0) return -kInf;
            s += q * std::log(w(x, y));
        }
    return s;
}

double mi2(const std::vector<double>& joint) {
    double px[2] = {joint[0] + joint[1], joint[2] + joint[3]};
    double py[2] = {joint[0] + joint[2], joint[1] + joint[3]};
    double s = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const double q = joint[x * 2 + y];
            if (q > 0.0) s += q * std::log(q / (px[x] * py[y]));
        }
    return std::max(s, 0.0);
}

// Exact-marginal family scan: alpha and beta at one q_y by a fine 1-parameter
// sweep. Independent of the library's lattice machinery.
AlphaBeta alpha_beta_oracle(double rate, double qy0, const ConditionalDistribution& w, int steps) {
    AlphaBeta best{-kInf, -kInf};
    const double qy[2] = {qy0, 1 - qy0};
    for (int i = 0; i <= steps; ++i) {
        const double a = static_cast<double>(i) / steps;
        double b;
        if (qy[1] > 1e-12) {
            b = (0.5 - qy[0] * a) / qy[1];
            if (b < -1e-12 || b > 1 + 1e-12) continue;
            b = std::clamp(b, 0.0, 1.0);
        } else {
            if (std::abs(qy[0] * a - 0.5) > 1e-9) continue;
            b = 0.5;
        }
        const std::vector<double> joint = {qy[0] * a, qy[1] * b, qy[0] * (1 - a), qy[1] * (1 - b)};
        const double g = g_ml(w, joint);
        if (g == -kInf) continue;
        const double i_xy = mi2(joint);
        best.beta = std::max(best.beta, g + clip_pos(rate - i_xy));
        if (i_xy <= rate + 1e-12) best.alpha = std::max(best.alpha, g + rate - i_xy);
    }
    return best;
}

}  // namespace

TEST_CASE("solver settings") {
    bool warn = true;
    const auto s2 = SolverSettings::defaults_for(2, 2, &warn);
    CHECK_FALSE(warn);
    CHECK(s2.outer_den == 100);
    CHECK(s2.inner_den == 50);
    CHECK(s2.qy_cache_den == 200);
    CHECK(s2.refinement_rounds == 3);

    const auto s3 = SolverSettings::defaults_for(3, 3, &warn);
    CHECK(warn);
    CHECK(s3.inner_den < 50);
    CHECK(s3.outer_den < 100);
    CHECK(s3.combined_tolerance() > s2.combined_tolerance());
}

TEST_CASE("pair couplings") {
    const auto ind = PairCoupling::independent(kU2);
    CHECK(ind.mutual_information_xxp() == doctest::Approx(0.0).epsilon(1e-12));
    const auto diag = PairCoupling::diagonal(kU2);
    CHECK(diag.mutual_information_xxp() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(
        PairCoupling::from_conditional(kU2, ConditionalDistribution(2, 2, {1.0, 0.0, 1.0, 0.0})),
        std::invalid_argument);
    CHECK_NOTHROW(
        PairCoupling::from_conditional(kU2, ConditionalDistribution(2, 2, {0.7, 0.3, 0.3, 0.7})));
}

TEST_CASE("alpha equals the rate under the MMI metric") {
    const auto s = SolverSettings::defaults_for(2, 2);
    const auto mmi = DecodingMetric::mmi();
    for (double r : {0.0, 0.1, 0.35, 0.8}) {
        for (double qy0 : {0.5, 0.25, 0.9}) {
            const auto ab = alpha_beta(r, Distribution({qy0, 1 - qy0}), kU2, mmi, s);
            CHECK(ab.alpha == doctest::Approx(r).epsilon(1e-9));
        }
    }
}

TEST_CASE("alpha at rate zero evaluates the product coupling") {
    const auto w = ConditionalDistribution::bsc(0.1);
    const auto s = SolverSettings::defaults_for(2, 2);
    const auto ml = DecodingMetric::ml(w);
    const Distribution qy({0.3, 0.7});
    const auto ab = alpha_beta(0.0, qy, kU2, ml, s);
    const double g_prod = g_ml(w, {0.5 * 0.3, 0.5 * 0.7, 0.5 * 0.3, 0.5 * 0.7});
    CHECK(ab.alpha == doctest::Approx(g_prod).epsilon(1e-6));
}

TEST_CASE("alpha against the fine brute-force family") {
    const auto w = ConditionalDistribution::bsc(0.1);
    const auto s = SolverSettings::defaults_for(2, 2);
    const auto ml = DecodingMetric::ml(w);
    const auto got = alpha_beta(0.5, Distribution::uniform(2), kU2, ml, s);
    const auto want = alpha_beta_oracle(0.5, 0.5, w, 1000);
    CHECK(got.alpha == doctest::Approx(want.alpha).epsilon(5e-3));
    CHECK(got.beta == doctest::Approx(want.beta).epsilon(5e-3));
}

TEST_CASE("beta dominates alpha and the product point") {
    const auto w = ConditionalDistribution::bsc(0.2);
    const auto s = SolverSettings::defaults_for(2, 2);
    const auto ml = DecodingMetric::ml(w);
    CounterRng rng(21, 0);
    for (int t = 0; t < 40; ++t) {
        const double r = rng.next_double() * 0.8;
        const double qy0 = 0.05 + 0.9 * rng.next_double();
        const Distribution qy({qy0, 1 - qy0});
        const auto ab = alpha_beta(r, qy, kU2, ml, s);
        CHECK(ab.beta >= ab.alpha - 1e-12);
        const double g_prod = g_ml(w, {0.5 * qy0, 0.5 * (1 - qy0), 0.5 * qy0, 0.5 * (1 - qy0)});
        CHECK(ab.beta >= g_prod + r - 1e-9);
    }
}

TEST_CASE("lambda dominates gamma") {
    const auto w = ConditionalDistribution::bsc(0.1);
    NaiveExponentSolver solver(w, kU2, DecodingMetric::ml(w), SolverSettings::defaults_for(2, 2));
    CounterRng rng(5, 0);
    for (int t = 0; t < 8; ++t) {
        const double a = rng.next_double();
        const auto cpl = PairCoupling::from_conditional(
            kU2, ConditionalDistribution(2, 2, {1 - a, a, a, 1 - a}));
        const double r = rng.next_double() * 0.5;
        const auto lg = solver.lambda_gamma(cpl, r);
        CHECK(lg.lambda >= lg.gamma - 1e-12);
        CHECK(lg.gamma >= -1e-12);
    }
}

TEST_CASE("gamma vanishes on the diagonal coupling at rate zero") {
    const auto w = ConditionalDistribution::bsc(0.1);
    NaiveExponentSolver solver(w, kU2, DecodingMetric::ml(w), SolverSettings::defaults_for(2, 2));
    const auto lg = solver.lambda_gamma(PairCoupling::diagonal(kU2), 0.0);
    CHECK(lg.gamma == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("lambda/gamma against the exhaustive grid oracle") {
    const auto w = ConditionalDistribution::bsc(0.1);
    const double rate = 0.1;
    const auto s = SolverSettings::defaults_for(2, 2);
    NaiveExponentSolver solver(w, kU2, DecodingMetric::ml(w), s);
    const auto got = solver.lambda_gamma(PairCoupling::independent(kU2), rate);

    // oracle: alpha/beta tabulated on a fine q_y grid by the 1-parameter exact
    // family, then an exhaustive 1e-2 sweep of the four inner rows
    const int kQy = 1000;
    std::vector<double> oa(kQy + 1), ob(kQy + 1);
    for (int i = 0; i <= kQy; ++i) {
        const auto ab = alpha_beta_oracle(rate, static_cast<double>(i) / kQy, w, 2000);
        oa[i] = ab.alpha;
        ob[i] = ab.beta;
    }
    auto interp = [&](const std::vector<double>& v, double q) {
        const double u = std::clamp(q, 0.0, 1.0) * kQy;
        const int b = std::min(static_cast<int>(u), kQy - 1);
        const double t = u - b;
        if (v[b] == -kInf || v[b + 1] == -kInf) return -kInf;
        return v[b] + t * (v[b + 1] - v[b]);
    };

    const int kInner = 100;
    double best_l = kInf, best_g = kInf;
    const double qx = 0.5, wgt = 0.25;
    for (int i00 = 0; i00 <= kInner; ++i00)
        for (int i01 = 0; i01 <= kInner; ++i01)
            for (int i10 = 0; i10 <= kInner; ++i10)
                for (int i11 = 0; i11 <= kInner; ++i11) {
                    const double a[4] = {static_cast<double>(i00) / kInner,
                                         static_cast<double>(i01) / kInner,
                                         static_cast<double>(i10) / kInner,
                                         static_cast<double>(i11) / kInner};
                    const double qxy0[2] = {wgt * (a[0] + a[1]), wgt * (a[2] + a[3])};
                    const double qpy0[2] = {wgt * (a[0] + a[2]), wgt * (a[1] + a[3])};
                    double d = 0.0, ic = 0.0;
                    for (int x = 0; x < 2; ++x) {
                        const double m0 = qxy0[x] / qx;
                        for (int y = 0; y < 2; ++y) {
                            const double q = y == 0 ? m0 : 1 - m0;
                            if (q > 1e-15) d += qx * q * std::log(q / w(x, y));
                        }
                        for (int xp = 0; xp < 2; ++xp) {
                            const double av = a[x * 2 + xp];
                            for (int y = 0; y < 2; ++y) {
                                const double q = y == 0 ? av : 1 - av;
                                const double m = y == 0 ? m0 : 1 - m0;
                                if (q > 1e-15) ic += wgt * q * std::log(q / m);
                            }
                        }
                    }
                    const std::vector<double> jxy = {qxy0[0], qx - qxy0[0], qxy0[1], qx - qxy0[1]};
                    const std::vector<double> jpy = {qpy0[0], qx - qpy0[0], qpy0[1], qx - qpy0[1]};
                    const double gxy = g_ml(w, jxy), gpy = g_ml(w, jpy);
                    const double qy0 = qxy0[0] + qxy0[1];
                    const double al = interp(oa, qy0);
                    double be = interp(ob, qy0);
                    be = std::max({be, gxy, gpy});
                    const double lam = d + ic + be - gpy;
                    const double mx = std::max(gxy, al);
                    const double gam = d + ic + (mx == -kInf ? 0.0 : clip_pos(mx - gpy));
                    best_l = std::min(best_l, lam);
                    best_g = std::min(best_g, gam);
                }
    CHECK(got.lambda == doctest::Approx(best_l).epsilon(2e-2));
    CHECK(got.gamma == doctest::Approx(best_g).epsilon(2e-2));
}

TEST_CASE("exponent orderings, scaling, and limits on the z-channel") {
    const ConditionalDistribution z(2, 2, {0.9, 0.1, 0.0, 1.0});
    NaiveExponentSolver solver(z, kU2, DecodingMetric::ml(z), SolverSettings::defaults_for(2, 2));
    for (double r : {0.0, 0.05, 0.12, 0.19}) {
        const double ub3 = solver.exponent_rc_upper(r, 3);
        const double lb3 = solver.exponent_rc_lower(r, 3);
        const double trc3 = solver.exponent_trc(r, 3);
        const double ex3 = solver.exponent_ex(r, 3);
        CHECK(ub3 >= 0.0);
        CHECK(ub3 <= lb3 + 1e-12);
        CHECK(trc3 <= ex3 + 1e-12);
        // exact linear-L scaling
        CHECK(solver.exponent_rc_lower(r, 6) == 2.0 * lb3);
        CHECK(solver.exponent_trc(r, 6) == 2.0 * trc3);
        CHECK(solver.exponent_ex(r, 6) == 2.0 * ex3);
        // the large-L limit dominates the upper bound at every finite L
        const double lim = solver.exponent_rc_limit(r);
        for (int L : {1, 3, 9}) CHECK(solver.exponent_rc_upper(r, L) <= lim + 1e-12);
    }
    // rate-zero equality of TRC and expurgated exponents
    CHECK(solver.exponent_trc(0.0, 3) == solver.exponent_ex(0.0, 3));

    // positivity window: positive before the threshold, zero after
    CHECK(solver.exponent_rc_upper(0.19, 3) > 0.0);
    CHECK(solver.exponent_rc_upper(0.215, 3) == 0.0);
    // upper and lower random-coding bounds meet at high rates
    CHECK(std::abs(solver.exponent_rc_upper(0.16, 3) - solver.exponent_rc_lower(0.16, 3)) < 1e-9);
    CHECK(solver.exponent_rc_lower(0.05, 3) - solver.exponent_rc_upper(0.05, 3) > 0.1);
}

TEST_CASE("rate-zero reductions") {
    const ConditionalDistribution z(2, 2, {0.9, 0.1, 0.0, 1.0});
    NaiveExponentSolver solver(z, kU2, DecodingMetric::ml(z), SolverSettings::defaults_for(2, 2));
    const int L = 3;
    const double ub0 = solver.exponent_rc_upper(0.0, L);
    const double lb0 = solver.exponent_rc_lower(0.0, L);
    // min over couplings of L*Gamma + I and L*(Lambda + I): the solver's value
    // can only undercut sampled couplings
    CounterRng rng(9, 0);
    for (int t = 0; t < 6; ++t) {
        const double a = rng.next_double();
        const auto cpl =
            PairCoupling::from_conditional(kU2, ConditionalDistribution(2, 2, {1 - a, a, a, 1 - a}));
        const auto lg = solver.lambda_gamma(cpl, 0.0);
        const double i = cpl.mutual_information_xxp();
        if (lg.gamma < kInf) CHECK(ub0 <= L * lg.gamma + i + 1e-9);
        if (lg.lambda < kInf) CHECK(lb0 <= L * (lg.lambda + i) + 1e-9);
    }
    CHECK(ub0 <= lb0 + 1e-12);
}

TEST_CASE("MMI upper bound dominates the ordinary exponent gap") {
    const ConditionalDistribution z(2, 2, {0.9, 0.1, 0.0, 1.0});
    const auto s = SolverSettings::defaults_for(2, 2);
    NaiveExponentSolver solver(z, kU2, DecodingMetric::mmi(), s);
    for (double r : {0.05, 0.15, 0.3}) {
        const double ub1 = solver.exponent_rc_upper(r, 1);
        const double er = exponent_rc_ordinary(z, kU2, r, s);
        CHECK(ub1 >= clip_pos(er - r) - s.combined_tolerance());
    }
}

TEST_CASE("ordinary random coding exponent") {
    const auto s = SolverSettings::defaults_for(2, 2);
    const auto bsc = ConditionalDistribution::bsc(0.1);
    // vanishes above the channel mutual information
    const double cap = mutual_information(JointDistribution::couple(kU2, bsc));
    CHECK(exponent_rc_ordinary(bsc, kU2, cap + 0.05, s) == doctest::Approx(0.0).epsilon(1e-9));

    // rate-zero value against a fine brute-force scan
    double want = kInf;
    const int k = 1000;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j) {
            const double a = static_cast<double>(i) / k, b = static_cast<double>(j) / k;
            const std::vector<double> joint = {0.5 * a, 0.5 * (1 - a), 0.5 * b, 0.5 * (1 - b)};
            double d = 0.0;
            bool ok = true;
            for (int x = 0; x < 2 && ok; ++x)
                for (int y = 0; y < 2; ++y) {
                    const double q = joint[x * 2 + y] / 0.5;
                    if (q <= 1e-15) continue;
                    if (bsc(x, y) <= 0) {
                        ok = false;
                        break;
                    }
                    d += 0.5 * q * std::log(q / bsc(x, y));
                }
            if (ok) want = std::min(want, d + mi2(joint));
        }
    CHECK(exponent_rc_ordinary(bsc, kU2, 0.0, s) == doctest::Approx(want).epsilon(5e-3));

    // noiseless channel: only Q = W is feasible, value I - R
    const auto id = ConditionalDistribution::identity(2);
    CHECK(exponent_rc_ordinary(id, kU2, 0.2, s) ==
          doctest::Approx(std::log(2.0) - 0.2).epsilon(1e-9));
}

TEST_CASE("rmax lower bound") {
    const auto s = SolverSettings::defaults_for(2, 2);
    const ConditionalDistribution z(2, 2, {0.9, 0.1, 0.0, 1.0});
    CHECK(rmax_lower_bound(z, kU2, s) == doctest::Approx(0.2092).epsilon(5e-2));
    CHECK(std::abs(rmax_lower_bound(z, kU2, s) - 0.2092) < 0.01);

    const auto id = ConditionalDistribution::identity(2);
    CHECK(rmax_lower_bound(id, kU2, s) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));

    // zero-capacity channel
    const ConditionalDistribution flat(2, 2, {0.5, 0.5, 0.5, 0.5});
    CHECK(rmax_lower_bound(flat, kU2, s) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("curves") {
    const ConditionalDistribution z(2, 2, {0.9, 0.1, 0.0, 1.0});
    NaiveExponentSolver solver(z, kU2, DecodingMetric::ml(z), SolverSettings::defaults_for(2, 2));
    const std::vector<NaiveExponent> which = {NaiveExponent::rc_upper, NaiveExponent::trc};

    CHECK(naive_curve(solver, std::vector<double>{}, which, 3).empty());

    const auto single = naive_curve(solver, std::vector<double>{0.1}, which, 3);
    REQUIRE(single.size() == 1);
    CHECK(single[0].values[0] == solver.exponent_rc_upper(0.1, 3));

    const std::vector<double> rates = {0.02, 0.06, 0.1, 0.14, 0.18, 0.22};
    const auto table = naive_curve(solver, rates, which, 3);
    for (size_t i = 1; i < table.size(); ++i) {
        CHECK(table[i].values[0] <= table[i - 1].values[0] + 1e-9);
        CHECK(table[i].values[1] <= table[i - 1].values[1] + 1e-9);
    }
}

TEST_CASE("inner lattice refinement is monotone within tolerance") {
    const auto w = ConditionalDistribution::bsc(0.1);
    SolverSettings coarse = SolverSettings::defaults_for(2, 2);
    coarse.inner_den = 25;
    SolverSettings fine = SolverSettings::defaults_for(2, 2);
    fine.inner_den = 50;
    NaiveExponentSolver sc(w, kU2, DecodingMetric::ml(w), coarse);
    NaiveExponentSolver sf(w, kU2, DecodingMetric::ml(w), fine);
    const auto cpl = PairCoupling::independent(kU2);
    for (double r : {0.05, 0.2}) {
        const auto c = sc.lambda_gamma(cpl, r);
        const auto f = sf.lambda_gamma(cpl, r);
        CHECK(f.gamma <= c.gamma + coarse.combined_tolerance());
        CHECK(f.lambda <= c.lambda + coarse.combined_tolerance());
    }
}
