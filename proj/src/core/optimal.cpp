#include "core/optimal.hpp"

#include <cmath>
#include <stdexcept>

namespace beeid {

BhattacharyyaMatrix bhattacharyya_matrix(const ConditionalDistribution& w) {
    BhattacharyyaMatrix m;
    m.size = w.in_size();
    m.b.resize(static_cast<size_t>(m.size) * m.size);
    for (int x = 0; x < m.size; ++x) {
        for (int xp = 0; xp < m.size; ++xp) {
            double s = 0.0;
            for (int y = 0; y < w.out_size(); ++y) s += std::sqrt(w(x, y) * w(xp, y));
            m.b[static_cast<size_t>(x) * m.size + xp] = std::min(s, 1.0);
        }
        m.b[static_cast<size_t>(x) * m.size + x] = 1.0;
    }
    return m;
}

namespace {

double weighted_power_sum(double expo, const Distribution& p_x, const BhattacharyyaMatrix& b) {
    double s = 0.0;
    for (int x = 0; x < b.size; ++x)
        for (int xp = 0; xp < b.size; ++xp) {
            const double v = b.at(x, xp);
            s += p_x[x] * p_x[xp] * (v > 0.0 ? std::pow(v, expo) : 0.0);
        }
    return s;
}

void check_sigma(double sigma) {
    if (!(sigma >= 1.0)) throw std::invalid_argument("sigma must be >= 1");
}

}  // namespace

double xi(double sigma, const Distribution& p_x, const BhattacharyyaMatrix& b) {
    check_sigma(sigma);
    return weighted_power_sum(2.0 / sigma, p_x, b);
}

double omega(double sigma, const Distribution& p_x, const BhattacharyyaMatrix& b) {
    check_sigma(sigma);
    return weighted_power_sum(1.0 / sigma, p_x, b);
}

double upsilon(double sigma, const Distribution& p_x, const BhattacharyyaMatrix& b) {
    return std::min(-0.5 * std::log(xi(sigma, p_x, b)), -(2.0 / 3.0) * std::log(omega(sigma, p_x, b)));
}

double exponent_opt_rc(double rate_nats, const Distribution& p_x, const BhattacharyyaMatrix& b) {
    if (rate_nats < 0.0) throw std::invalid_argument("rate must be nonnegative");
    const double two_bee = -std::log(xi(1.0, p_x, b)) - 2.0 * rate_nats;
    const double three_bee = -2.0 * std::log(omega(1.0, p_x, b)) - 3.0 * rate_nats;
    return clip_pos(std::min(two_bee, three_bee));
}

OptExResult exponent_opt_ex(double rate_nats, const Distribution& p_x, const BhattacharyyaMatrix& b,
                            const SigmaSearch& search) {
    if (rate_nats < 0.0) throw std::invalid_argument("rate must be nonnegative");
    if (search.sigma_max < 1.0 || search.grid_points < 2) {
        throw std::invalid_argument("sigma search needs sigma_max >= 1 and >= 2 grid points");
    }
    auto objective = [&](double sigma) {
        return sigma * std::min(-std::log(xi(sigma, p_x, b)) - 2.0 * rate_nats,
                                -2.0 * std::log(omega(sigma, p_x, b)) - 3.0 * rate_nats);
    };

    // log-spaced grid over [1, sigma_max]
    const int n = search.grid_points;
    const double lmax = std::log(search.sigma_max);
    double best_v = -kInf, best_sigma = 1.0;
    int best_i = 0;
    for (int i = 0; i < n; ++i) {
        const double sigma = std::exp(lmax * i / (n - 1));
        const double v = objective(sigma);
        if (v > best_v) {
            best_v = v;
            best_sigma = sigma;
            best_i = i;
        }
    }

    // golden-section refinement in log-sigma on the bracketing interval
    double lo = lmax * std::max(best_i - 1, 0) / (n - 1);
    double hi = lmax * std::min(best_i + 1, n - 1) / (n - 1);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = objective(std::exp(x1)), f2 = objective(std::exp(x2));
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = objective(std::exp(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = objective(std::exp(x1));
        }
    }
    const double refined_sigma = std::exp(0.5 * (lo + hi));
    const double refined_v = objective(refined_sigma);
    if (refined_v > best_v) {
        best_v = refined_v;
        best_sigma = refined_sigma;
    }

    OptExResult r;
    r.sigma = best_sigma;
    r.bracket_width = std::exp(hi) - std::exp(lo);
    r.finite_sigma_sup = clip_pos(best_v);
    r.value = r.finite_sigma_sup;
    if (rate_nats == 0.0) {
        // sigma -> inf limit: -2 sum P(x)P(x') log B(x,x'); +inf with a zero of
        // B under positive weight
        double limit = 0.0;
        for (int x = 0; x < b.size && limit != kInf; ++x)
            for (int xp = 0; xp < b.size; ++xp) {
                const double weight = p_x[x] * p_x[xp];
                if (weight <= 0.0) continue;
                const double v = b.at(x, xp);
                if (v <= 0.0) {
                    limit = kInf;
                    break;
                }
                limit += -2.0 * weight * std::log(v);
            }
        if (limit > r.value) r.value = limit;
    }
    return r;
}

double bsc_rate_break(double p) {
    if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("bsc_rate_break: p outside (0, 1/2)");
    const auto b = bhattacharyya_matrix(ConditionalDistribution::bsc(p));
    const Distribution u = Distribution::uniform(2);
    const double om = omega(1.0, u, b);
    return std::log(xi(1.0, u, b) / (om * om));
}

double bsc_critical_p(double tolerance) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("bsc_critical_p: tolerance must be positive");
    const Distribution u = Distribution::uniform(2);
    auto f = [&](double p) {
        const auto b = bhattacharyya_matrix(ConditionalDistribution::bsc(p));
        return 3.0 * std::log(xi(1.0, u, b)) - 4.0 * std::log(omega(1.0, u, b));
    };
    double lo = 1e-9, hi = 0.49;  // f(lo) > 0 > f(hi)
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {
double h2_bits(double d) {
    double s = 0.0;
    if (d > 0.0) s -= d * std::log2(d);
    if (d < 1.0) s -= (1.0 - d) * std::log2(1.0 - d);
    return s;
}
}  // namespace

double gv_distance(double two_r) {
    if (!(two_r >= 0.0 && two_r <= 1.0)) {
        throw std::invalid_argument("gv_distance: 1 - two_r must lie in [0, 1]");
    }
    if (two_r == 0.0) return 0.5;
    if (two_r == 1.0) return 0.0;
    const double target = 1.0 - two_r;
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (h2_bits(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double rtrc(double p) {
    if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("rtrc: p outside (0, 1/2)");
    const double z = std::sqrt(4.0 * p * (1.0 - p));
    return 0.5 * (1.0 - h2_bits(z / (1.0 + z)));
}

TanExponent exponent_tan(double rate_bits, double p) {
    if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("exponent_tan: p outside (0, 1/2)");
    if (rate_bits < 0.0) throw std::invalid_argument("exponent_tan: rate must be nonnegative");
    const double two_r = 2.0 * rate_bits;
    const double delta = two_r >= 1.0 ? 0.0 : gv_distance(two_r);
    return {-delta * std::log2(4.0 * p * (1.0 - p)), rate_bits < rtrc(p)};
}

std::pair<double, double> lemma1_check(const ConditionalDistribution& w, const Distribution& p_x,
                                       int k, double sigma) {
    check_sigma(sigma);
    if (k < 2) throw std::invalid_argument("lemma1_check: k must be >= 2");
    const auto b = bhattacharyya_matrix(w);
    const int n = b.size;
    double total = 1.0;
    for (int i = 0; i < k; ++i) {
        total *= n;
        if (total > 1e7) throw std::invalid_argument("lemma1_check: |X|^k exceeds the enumeration guard");
    }
    // full enumeration over X^k with an odometer
    std::vector<int> seq(k, 0);
    double lhs = 0.0;
    while (true) {
        double prob = 1.0, chain = 1.0;
        for (int i = 0; i < k; ++i) prob *= p_x[seq[i]];
        for (int i = 0; i + 1 < k; ++i) chain *= b.at(seq[i], seq[i + 1]);
        lhs += prob * (chain > 0.0 ? std::pow(chain, 1.0 / sigma) : 0.0);
        int lvl = k - 1;
        while (lvl >= 0 && ++seq[lvl] == n) seq[lvl--] = 0;
        if (lvl < 0) break;
    }
    const double rhs = std::pow(omega(sigma, p_x, b), k - 1);
    return {lhs, rhs};
}

}  // namespace beeid
