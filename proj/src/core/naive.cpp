#include "core/naive.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <stdexcept>

#include "core/parallel.hpp"

namespace beeid {

namespace {

constexpr long long kInnerEnumBudget = 8'000'000;  // base-lattice points per Lambda/Gamma solve
constexpr long long kOuterEnumBudget = 1'500;      // base-lattice couplings per rate
constexpr long long kQyNodeBudget = 700;           // alpha/beta memo nodes

long long ipow_sat(long long b, int e) {
    long long r = 1;
    while (e-- > 0) {
        if (r > kInnerEnumBudget * 4) return r;  // saturating; only compared against budgets
        r *= b;
    }
    return r;
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

}  // namespace

SolverSettings SolverSettings::defaults_for(int x_size, int y_size, bool* coarsened) {
    SolverSettings s;
    if (coarsened) *coarsened = false;
    if (x_size <= 2 && y_size <= 2) return s;
    if (coarsened) *coarsened = true;

    const int outer_rows = x_size - 1;
    s.outer_den = 2;
    for (int k = 2; k <= 100; ++k) {
        if (ipow_sat(simplex_grid_size(x_size, k), outer_rows) <= kOuterEnumBudget) s.outer_den = k;
    }
    const int inner_slots = x_size * x_size;
    s.inner_den = 1;
    for (int k = 1; k <= 50; ++k) {
        if (ipow_sat(simplex_grid_size(y_size, k), inner_slots) <= kInnerEnumBudget) s.inner_den = k;
    }
    s.qy_cache_den = 2;
    for (int k = 2; k <= 200; ++k) {
        if (simplex_grid_size(y_size, k) <= kQyNodeBudget) s.qy_cache_den = k;
    }
    return s;
}

double PairCoupling::mutual_information_xxp() const {
    return mutual_information(JointDistribution(x_size, x_size, w));
}

PairCoupling PairCoupling::diagonal(const Distribution& qx) {
    PairCoupling c;
    c.x_size = qx.size();
    c.w.assign(static_cast<size_t>(c.x_size) * c.x_size, 0.0);
    for (int x = 0; x < c.x_size; ++x) c.w[static_cast<size_t>(x) * c.x_size + x] = qx[x];
    return c;
}

PairCoupling PairCoupling::independent(const Distribution& qx) {
    PairCoupling c;
    c.x_size = qx.size();
    c.w.resize(static_cast<size_t>(c.x_size) * c.x_size);
    for (int x = 0; x < c.x_size; ++x)
        for (int xp = 0; xp < c.x_size; ++xp)
            c.w[static_cast<size_t>(x) * c.x_size + xp] = qx[x] * qx[xp];
    return c;
}

PairCoupling PairCoupling::from_conditional(const Distribution& qx,
                                            const ConditionalDistribution& rows, double tol) {
    if (rows.in_size() != qx.size() || rows.out_size() != qx.size()) {
        throw std::invalid_argument("PairCoupling: conditional must be square over X");
    }
    PairCoupling c;
    c.x_size = qx.size();
    c.w.resize(static_cast<size_t>(c.x_size) * c.x_size);
    for (int x = 0; x < c.x_size; ++x)
        for (int xp = 0; xp < c.x_size; ++xp)
            c.w[static_cast<size_t>(x) * c.x_size + xp] = qx[x] * rows(x, xp);
    for (int xp = 0; xp < c.x_size; ++xp) {
        double m = 0.0;
        for (int x = 0; x < c.x_size; ++x) m += c.at(x, xp);
        if (std::abs(m - qx[xp]) > tol) {
            throw std::invalid_argument("PairCoupling: X' marginal does not match the composition");
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// alpha / beta. The Xt-marginal constraint is enforced exactly by solving the
// heaviest-Q_Y row for the others; free rows live on a simplex lattice with
// coordinate-wise refinement. The product coupling is always a candidate.
// ---------------------------------------------------------------------------

namespace {

struct FamilyProblem {
    double rate;
    const Distribution* qy;
    const Distribution* qx;
    const DecodingMetric* metric;
    int x_size, y_size;
    int solved_y;                // alphabet index of the solved row
    std::vector<int> free_rows;  // alphabet indices of the free rows

    // free_vals: one distribution over Xt per free row. Returns {g, I} of the
    // induced joint, nullopt when the solved row leaves the simplex.
    std::optional<std::pair<double, double>> evaluate(
        const std::vector<std::vector<double>>& free_vals) const {
        const Distribution& y_dist = *qy;
        std::vector<double> solved(qx->probs());
        for (size_t f = 0; f < free_rows.size(); ++f) {
            const int y = free_rows[f];
            for (int xt = 0; xt < x_size; ++xt) solved[xt] -= y_dist[y] * free_vals[f][xt];
        }
        const double ws = y_dist[solved_y];
        for (int xt = 0; xt < x_size; ++xt) {
            solved[xt] /= ws;
            if (solved[xt] < -1e-9) return std::nullopt;
            solved[xt] = std::max(solved[xt], 0.0);
        }
        std::vector<double> joint(static_cast<size_t>(x_size) * y_size, 0.0);
        for (size_t f = 0; f < free_rows.size(); ++f) {
            const int y = free_rows[f];
            for (int xt = 0; xt < x_size; ++xt)
                joint[static_cast<size_t>(xt) * y_size + y] = y_dist[y] * free_vals[f][xt];
        }
        double total = 0.0;
        for (int xt = 0; xt < x_size; ++xt) {
            joint[static_cast<size_t>(xt) * y_size + solved_y] = ws * solved[xt];
            for (int y = 0; y < y_size; ++y) total += joint[static_cast<size_t>(xt) * y_size + y];
        }
        for (auto& v : joint) v /= total;  // absorb clamp residue
        JointDistribution q(x_size, y_size, std::move(joint));
        const double g = (*metric)(q);
        if (g == -kInf) return std::make_pair(-kInf, 0.0);
        return std::make_pair(g, mutual_information(q));
    }

    double alpha_value(const std::pair<double, double>& gi) const {
        return gi.second <= rate + 1e-12 ? gi.first + rate - gi.second : -kInf;
    }
    double beta_value(const std::pair<double, double>& gi) const {
        return gi.first == -kInf ? -kInf : gi.first + clip_pos(rate - gi.second);
    }
};

FamilyProblem make_family(double rate, const Distribution& qy, const Distribution& qx,
                          const DecodingMetric& metric) {
    FamilyProblem p;
    p.rate = rate;
    p.qy = &qy;
    p.qx = &qx;
    p.metric = &metric;
    p.x_size = qx.size();
    p.y_size = qy.size();
    p.solved_y = 0;
    for (int y = 1; y < qy.size(); ++y)
        if (qy[y] > qy[p.solved_y]) p.solved_y = y;
    for (int y = 0; y < qy.size(); ++y)
        if (y != p.solved_y && qy[y] > 0.0) p.free_rows.push_back(y);
    return p;
}

AlphaBeta solve_family(const FamilyProblem& p, int base_den, int refinement_rounds) {
    AlphaBeta best{-kInf, -kInf};
    auto consider = [&](const std::pair<double, double>& gi) {
        best.alpha = std::max(best.alpha, p.alpha_value(gi));
        best.beta = std::max(best.beta, p.beta_value(gi));
    };

    // product coupling: every row equals Q_X, marginal exact, I = 0
    std::vector<std::vector<double>> product(p.free_rows.size(), p.qx->probs());
    if (auto gi = p.evaluate(product)) consider(*gi);
    const int nfree = static_cast<int>(p.free_rows.size());
    if (nfree == 0) return best;

    const auto cands = simplex_grid(p.x_size, base_den);
    std::vector<size_t> pick(nfree, 0);
    std::vector<std::vector<double>> rows(nfree);
    double inc_a_val = -kInf, inc_b_val = -kInf;
    std::vector<std::vector<double>> inc_a, inc_b;
    while (true) {
        for (int f = 0; f < nfree; ++f) rows[f] = cands[pick[f]];
        if (auto gi = p.evaluate(rows)) {
            consider(*gi);
            const double av = p.alpha_value(*gi), bv = p.beta_value(*gi);
            if (av > inc_a_val) { inc_a_val = av; inc_a = rows; }
            if (bv > inc_b_val) { inc_b_val = bv; inc_b = rows; }
        }
        int lvl = nfree - 1;
        while (lvl >= 0 && ++pick[lvl] == cands.size()) pick[lvl--] = 0;
        if (lvl < 0) break;
    }

    // coordinate-wise refinement, halving the step each round; every visited
    // point feeds both maxima, so beta >= alpha stays exact on the output.
    for (int which = 0; which < 2; ++which) {
        const bool drive_alpha = which == 0;
        std::vector<std::vector<double>> cur = drive_alpha ? inc_a : inc_b;
        if (cur.empty()) continue;
        double cur_val = drive_alpha ? inc_a_val : inc_b_val;
        int den = base_den;
        for (int round = 0; round < refinement_rounds; ++round) {
            den *= 2;
            for (int f = 0; f < nfree; ++f) {
                std::vector<int> center(p.x_size);
                for (int xt = 0; xt < p.x_size; ++xt)
                    center[xt] = static_cast<int>(std::lround(cur[f][xt] * den));
                std::vector<double> best_row = cur[f];
                std::function<void(int, int, std::vector<int>&)> walk =
                    [&](int xt, int rest, std::vector<int>& acc) {
                        if (xt == p.x_size - 1) {
                            if (std::abs(rest - center[xt]) > 2) return;
                            acc[xt] = rest;
                            std::vector<double> row(p.x_size);
                            for (int t = 0; t < p.x_size; ++t)
                                row[t] = static_cast<double>(acc[t]) / den;
                            std::swap(cur[f], row);
                            if (auto gi = p.evaluate(cur)) {
                                consider(*gi);
                                const double score = drive_alpha ? p.alpha_value(*gi) : p.beta_value(*gi);
                                if (score > cur_val) {
                                    cur_val = score;
                                    best_row = cur[f];
                                }
                            }
                            std::swap(cur[f], row);
                            return;
                        }
                        const int lo = std::max(0, center[xt] - 2);
                        const int hi = std::min(den, center[xt] + 2);
                        for (int c = lo; c <= hi && c <= rest; ++c) {
                            acc[xt] = c;
                            walk(xt + 1, rest - c, acc);
                        }
                    };
                std::vector<int> acc(p.x_size);
                walk(0, den, acc);
                cur[f] = best_row;
            }
        }
    }
    return best;
}

}  // namespace

AlphaBeta alpha_beta(double rate, const Distribution& q_y, const Distribution& q_x,
                     const DecodingMetric& g, const SolverSettings& s) {
    if (rate < 0.0) throw std::invalid_argument("alpha_beta: rate must be nonnegative");
    return solve_family(make_family(rate, q_y, q_x, g), s.inner_den, s.refinement_rounds);
}

// ---------------------------------------------------------------------------
// Lambda / Gamma inner engine. One sweep over a shared candidate set yields
// both minima, so Lambda >= Gamma holds exactly on the output. Per-slot rows
// are support-filtered: mass where W(.|x) = 0 makes the weighted divergence
// infinite, and under the ML metric mass where W(.|x') = 0 sends
// g(Q_{X'Y}) to -inf, which maps the integrand to +inf.
// ---------------------------------------------------------------------------

namespace {

class InnerEngine {
public:
    InnerEngine(const ConditionalDistribution& channel, const Distribution& qx,
                const DecodingMetric& metric, const SimplexInterpolator& ab,
                const SolverSettings& settings)
        : w_(channel), qx_(qx), metric_(metric), ab_(ab), s_(settings),
          x_(channel.in_size()), y_(channel.out_size()) {
        log_w_.resize(w_.flat().size());
        for (size_t i = 0; i < log_w_.size(); ++i)
            log_w_[i] = w_.flat()[i] > 0.0 ? std::log(w_.flat()[i]) : -kInf;
        pool_ = simplex_grid(y_, s_.inner_den);
        pool_slog_.reserve(pool_.size());
        for (const auto& row : pool_) {
            double sr = 0.0;
            for (double v : row) sr += xlogx(v);
            pool_slog_.push_back(sr);
        }
        qx_logterm_ = 0.0;
        for (int x = 0; x < x_; ++x) qx_logterm_ += xlogx(qx_[x]);
    }

    LambdaGamma solve(const PairCoupling& coupling) {
        build_slots(coupling);
        best_ = {kInf, kInf};
        arg_l_.clear();
        arg_g_.clear();
        if (slots_.empty()) return best_;
        for (const auto& sl : slots_) {
            if (sl.cands.empty()) return best_;  // every inner point is infinite
        }
        std::vector<int> digits(slots_.size(), 0);
        if (metric_.kind() == DecodingMetric::Kind::ml) {
            double qy[5] = {0};
            descend_ml(0, 0.0, 0.0, 0.0, qy, digits);
        } else {
            std::vector<double> qxy(static_cast<size_t>(x_) * y_, 0.0);
            std::vector<double> qpy(static_cast<size_t>(x_) * y_, 0.0);
            descend(0, 0.0, qxy.data(), qpy.data(), digits);
        }
        refine();
        return best_;
    }

private:
    struct Slot {
        int x, xp;
        double weight;
        std::vector<int> cands;            // indices into pool_
        std::vector<double> base_contrib;  // weight * (S(row) - sum_y row*logW(x,.))
        std::vector<double> gx_contrib;    // weight * sum_y row*logW(x,.)   (ML)
        std::vector<double> gp_contrib;    // weight * sum_y row*logW(x',.)  (ML)
        std::vector<double> qy_contrib;    // weight * row, flattened (ML)
    };

    void build_slots(const PairCoupling& coupling) {
        slots_.clear();
        qpx_logterm_ = 0.0;
        for (int xp = 0; xp < x_; ++xp) {
            double m = 0.0;
            for (int x = 0; x < x_; ++x) m += coupling.at(x, xp);
            qpx_logterm_ += xlogx(m);
        }
        const bool ml = metric_.kind() == DecodingMetric::Kind::ml;
        for (int x = 0; x < x_; ++x) {
            for (int xp = 0; xp < x_; ++xp) {
                const double weight = coupling.at(x, xp);
                if (weight <= 0.0) continue;
                Slot sl;
                sl.x = x;
                sl.xp = xp;
                sl.weight = weight;
                for (size_t c = 0; c < pool_.size(); ++c) {
                    if (!row_allowed(pool_[c], x, xp)) continue;
                    double tw = 0.0, tp = 0.0;
                    for (int yv = 0; yv < y_; ++yv) {
                        if (pool_[c][yv] > 0.0) {
                            tw += pool_[c][yv] * log_w_[static_cast<size_t>(x) * y_ + yv];
                            if (ml) tp += pool_[c][yv] * log_w_[static_cast<size_t>(xp) * y_ + yv];
                        }
                    }
                    sl.cands.push_back(static_cast<int>(c));
                    sl.base_contrib.push_back(weight * (pool_slog_[c] - tw));
                    if (ml) {
                        sl.gx_contrib.push_back(weight * tw);
                        sl.gp_contrib.push_back(weight * tp);
                        for (int yv = 0; yv < y_; ++yv) sl.qy_contrib.push_back(weight * pool_[c][yv]);
                    }
                }
                slots_.push_back(std::move(sl));
            }
        }
    }

    // ML fast path: the base term, both metric values, and Q_Y are all linear
    // in per-slot contributions, so the whole state is a handful of scalars.
    void descend_ml(size_t level, double base, double gx, double gp, double* qy,
                    std::vector<int>& digits) {
        const Slot& sl = slots_[level];
        if (level > 0 && sl.x != slots_[level - 1].x && base >= best_.lambda && base >= best_.gamma) {
            return;
        }
        const bool leaf = level + 1 == slots_.size();
        const size_t ncand = sl.cands.size();
        if (leaf) {
            for (size_t ci = 0; ci < ncand; ++ci) {
                const double b = base + sl.base_contrib[ci];
                const double g_xy = gx + sl.gx_contrib[ci];
                const double g_xpy = gp + sl.gp_contrib[ci];
                const double* qc = sl.qy_contrib.data() + ci * y_;
                double qy_leaf[4];
                for (int yv = 0; yv + 1 < y_; ++yv) qy_leaf[yv] = qy[yv] + qc[yv];
                auto [al, be] = ab_.interpolate(std::span<const double>(qy_leaf, static_cast<size_t>(y_ - 1)));
                if (be < g_xy) be = g_xy;
                if (be < g_xpy) be = g_xpy;
                const double lam = b + be - g_xpy;
                const double mx = g_xy > al ? g_xy : al;
                const double gam = b + clip_pos(mx - g_xpy);
                if (lam < best_.lambda) {
                    best_.lambda = lam;
                    digits[level] = sl.cands[ci];
                    arg_l_ = digits;
                }
                if (gam < best_.gamma) {
                    best_.gamma = gam;
                    digits[level] = sl.cands[ci];
                    arg_g_ = digits;
                }
            }
            return;
        }
        for (size_t ci = 0; ci < ncand; ++ci) {
            const double* qc = sl.qy_contrib.data() + ci * y_;
            for (int yv = 0; yv + 1 < y_; ++yv) qy[yv] += qc[yv];
            digits[level] = sl.cands[ci];
            descend_ml(level + 1, base + sl.base_contrib[ci], gx + sl.gx_contrib[ci],
                       gp + sl.gp_contrib[ci], qy, digits);
            for (int yv = 0; yv + 1 < y_; ++yv) qy[yv] -= qc[yv];
        }
    }

    bool row_allowed(const std::vector<double>& row, int x, int xp) const {
        for (int yv = 0; yv < y_; ++yv) {
            if (row[yv] <= 0.0) continue;
            if (w_(x, yv) <= 0.0) return false;
            if (metric_.kind() == DecodingMetric::Kind::ml && w_(xp, yv) <= 0.0) return false;
        }
        return true;
    }

    // base accumulates sum_slots w*(S(row) - sum_y row*logW(x,.)); per completed
    // x-block this equals D_x + I_x >= 0 because the log(q/qx) parts of D and
    // I(X';Y|X) cancel, so partial sums at block boundaries lower-bound the
    // final objective and support exact pruning.
    void descend(size_t level, double base, double* qxy, double* qpy, std::vector<int>& digits) {
        const Slot& sl = slots_[level];
        if (level > 0 && sl.x != slots_[level - 1].x && base >= best_.lambda && base >= best_.gamma) {
            return;
        }
        const bool leaf = level + 1 == slots_.size();
        double* qxy_row = qxy + static_cast<size_t>(sl.x) * y_;
        double* qpy_row = qpy + static_cast<size_t>(sl.xp) * y_;
        for (size_t ci = 0; ci < sl.cands.size(); ++ci) {
            const auto& row = pool_[sl.cands[ci]];
            const double acc = base + sl.base_contrib[ci];
            if (leaf) {
                double lxy[25], lpy[25];
                std::memcpy(lxy, qxy, sizeof(double) * static_cast<size_t>(x_) * y_);
                std::memcpy(lpy, qpy, sizeof(double) * static_cast<size_t>(x_) * y_);
                for (int yv = 0; yv < y_; ++yv) {
                    lxy[sl.x * y_ + yv] += sl.weight * row[yv];
                    lpy[sl.xp * y_ + yv] += sl.weight * row[yv];
                }
                digits[level] = sl.cands[ci];
                const LambdaGamma v = point_value(acc, lxy, lpy);
                if (v.lambda < best_.lambda) {
                    best_.lambda = v.lambda;
                    arg_l_ = digits;
                }
                if (v.gamma < best_.gamma) {
                    best_.gamma = v.gamma;
                    arg_g_ = digits;
                }
            } else {
                for (int yv = 0; yv < y_; ++yv) {
                    qxy_row[yv] += sl.weight * row[yv];
                    qpy_row[yv] += sl.weight * row[yv];
                }
                digits[level] = sl.cands[ci];
                descend(level + 1, acc, qxy, qpy, digits);
                for (int yv = 0; yv < y_; ++yv) {
                    qxy_row[yv] -= sl.weight * row[yv];
                    qpy_row[yv] -= sl.weight * row[yv];
                }
            }
        }
    }

    LambdaGamma point_value(double base, const double* qxy, const double* qpy) const {
        double qy[5];
        for (int yv = 0; yv < y_; ++yv) {
            double m = 0.0;
            for (int x = 0; x < x_; ++x) m += qxy[x * y_ + yv];
            qy[yv] = m;
        }
        double g_xy, g_xpy;
        if (metric_.kind() == DecodingMetric::Kind::ml) {
            double t = 0.0, tp = 0.0;
            for (int i = 0; i < x_ * y_; ++i) {
                if (qxy[i] > 0.0) t += qxy[i] * log_w_[i];
                if (qpy[i] > 0.0) tp += qpy[i] * log_w_[i];
            }
            g_xy = t;
            g_xpy = tp;
        } else if (metric_.kind() == DecodingMetric::Kind::mmi) {
            double hy = 0.0;
            for (int yv = 0; yv < y_; ++yv) hy += xlogx(qy[yv]);
            double cx = 0.0, cp = 0.0;
            for (int i = 0; i < x_ * y_; ++i) {
                cx += xlogx(qxy[i]);
                cp += xlogx(qpy[i]);
            }
            g_xy = clip_pos(cx - qx_logterm_ - hy);
            g_xpy = clip_pos(cp - qpx_logterm_ - hy);
        } else {
            std::vector<double> j1(qxy, qxy + x_ * y_), j2(qpy, qpy + x_ * y_);
            g_xy = metric_(JointDistribution(x_, y_, std::move(j1)));
            g_xpy = metric_(JointDistribution(x_, y_, std::move(j2)));
            if (g_xpy == -kInf) return {kInf, kInf};
            if (g_xy == -kInf) g_xy = -kInf;  // allowed inside the clipped max
        }
        auto [al, be] = ab_.interpolate(std::span<const double>(qy, static_cast<size_t>(y_ - 1)));
        be = std::max({be, g_xy, g_xpy});
        const double mx = std::max(g_xy, al);
        return {base + be - g_xpy, base + (mx == -kInf ? 0.0 : clip_pos(mx - g_xpy))};
    }

    // Off-lattice evaluation used by refinement; nullopt when infinite.
    std::optional<LambdaGamma> eval_rows(const std::vector<std::vector<double>>& rows) const {
        double base = 0.0;
        double qxy[25] = {0}, qpy[25] = {0};
        for (size_t k = 0; k < slots_.size(); ++k) {
            const Slot& sl = slots_[k];
            double sr = 0.0, tw = 0.0;
            for (int yv = 0; yv < y_; ++yv) {
                const double v = rows[k][yv];
                if (v > 0.0) {
                    if (w_(sl.x, yv) <= 0.0) return std::nullopt;
                    if (metric_.kind() == DecodingMetric::Kind::ml && w_(sl.xp, yv) <= 0.0)
                        return std::nullopt;
                    sr += v * std::log(v);
                    tw += v * log_w_[static_cast<size_t>(sl.x) * y_ + yv];
                }
                qxy[sl.x * y_ + yv] += sl.weight * v;
                qpy[sl.xp * y_ + yv] += sl.weight * v;
            }
            base += sl.weight * (sr - tw);
        }
        return point_value(base, qxy, qpy);
    }

    void refine() {
        for (int which = 0; which < 2; ++which) {
            const bool drive_lambda = which == 0;
            const std::vector<int>& seed = drive_lambda ? arg_l_ : arg_g_;
            if (seed.empty()) continue;
            std::vector<std::vector<double>> cur(slots_.size());
            for (size_t k = 0; k < slots_.size(); ++k) cur[k] = pool_[seed[k]];
            double cur_val = drive_lambda ? best_.lambda : best_.gamma;
            int den = s_.inner_den;
            for (int round = 0; round < s_.refinement_rounds; ++round) {
                den *= 2;
                for (size_t k = 0; k < slots_.size(); ++k) {
                    std::vector<int> center(y_);
                    for (int yv = 0; yv < y_; ++yv)
                        center[yv] = static_cast<int>(std::lround(cur[k][yv] * den));
                    std::vector<double> best_row = cur[k];
                    std::function<void(int, int, std::vector<int>&)> walk =
                        [&](int yv, int rest, std::vector<int>& acc) {
                            if (yv == y_ - 1) {
                                if (std::abs(rest - center[yv]) > 2) return;
                                acc[yv] = rest;
                                std::vector<double> row(y_);
                                for (int t = 0; t < y_; ++t)
                                    row[t] = static_cast<double>(acc[t]) / den;
                                std::swap(cur[k], row);
                                if (auto v = eval_rows(cur)) {
                                    best_.lambda = std::min(best_.lambda, v->lambda);
                                    best_.gamma = std::min(best_.gamma, v->gamma);
                                    const double score = drive_lambda ? v->lambda : v->gamma;
                                    if (score < cur_val) {
                                        cur_val = score;
                                        best_row = cur[k];
                                    }
                                }
                                std::swap(cur[k], row);
                                return;
                            }
                            const int lo = std::max(0, center[yv] - 2);
                            const int hi = std::min(den, center[yv] + 2);
                            for (int c = lo; c <= hi && c <= rest; ++c) {
                                acc[yv] = c;
                                walk(yv + 1, rest - c, acc);
                            }
                        };
                    std::vector<int> acc(y_);
                    walk(0, den, acc);
                    cur[k] = best_row;
                }
            }
        }
    }

    const ConditionalDistribution& w_;
    const Distribution& qx_;
    const DecodingMetric& metric_;
    const SimplexInterpolator& ab_;
    SolverSettings s_;
    int x_, y_;
    std::vector<double> log_w_;
    std::vector<std::vector<double>> pool_;
    std::vector<double> pool_slog_;
    std::vector<Slot> slots_;
    double qx_logterm_ = 0.0, qpx_logterm_ = 0.0;
    LambdaGamma best_{kInf, kInf};
    std::vector<int> arg_l_, arg_g_;
};

std::shared_ptr<SimplexInterpolator> build_alpha_beta_cache(double rate,
                                                            const ConditionalDistribution& channel,
                                                            const Distribution& qx,
                                                            const DecodingMetric& metric,
                                                            const SolverSettings& s) {
    auto interp = std::make_shared<SimplexInterpolator>(channel.out_size(), s.qy_cache_den);
    const int n = interp->node_count();
    std::vector<double> av(n), bv(n);
    parallel_for(n, [&](int64_t i) {
        const Distribution qy = interp->node_point(static_cast<int>(i));
        const AlphaBeta ab = alpha_beta(rate, qy, qx, metric, s);
        av[i] = ab.alpha;
        bv[i] = ab.beta;
    });
    interp->set_values(std::move(av), std::move(bv));
    return interp;
}

}  // namespace

// ---------------------------------------------------------------------------
// Outer layer: couplings Q_XX' with both marginals equal to Q_X, enumerated
// exactly (free rows on a lattice, last row solved), then refined along the
// L-independent driver objectives. All exponents and all L values at one rate
// read the same visited set, which makes the ordering and scaling invariants
// exact by construction.
// ---------------------------------------------------------------------------

namespace {

struct OuterEnumeration {
    std::vector<std::vector<double>> couplings;  // flat X x X' tables
};

std::optional<std::vector<double>> coupling_from_rows(const Distribution& qx, int solved_x,
                                                      const std::vector<std::vector<double>>& free_vals,
                                                      const std::vector<int>& free_xs) {
    const int n = qx.size();
    std::vector<double> solved(qx.probs());
    for (size_t f = 0; f < free_xs.size(); ++f) {
        for (int xp = 0; xp < n; ++xp) solved[xp] -= qx[free_xs[f]] * free_vals[f][xp];
    }
    std::vector<double> w(static_cast<size_t>(n) * n, 0.0);
    for (int xp = 0; xp < n; ++xp) {
        solved[xp] /= qx[solved_x];
        if (solved[xp] < -1e-9) return std::nullopt;
        solved[xp] = std::max(solved[xp], 0.0);
        w[static_cast<size_t>(solved_x) * n + xp] = qx[solved_x] * solved[xp];
    }
    for (size_t f = 0; f < free_xs.size(); ++f)
        for (int xp = 0; xp < n; ++xp)
            w[static_cast<size_t>(free_xs[f]) * n + xp] = qx[free_xs[f]] * free_vals[f][xp];
    double total = 0.0;
    for (double v : w) total += v;
    for (auto& v : w) v /= total;
    return w;
}

struct CouplingKey {
    std::vector<uint64_t> bits;
    bool operator<(const CouplingKey& o) const { return bits < o.bits; }
};

CouplingKey key_of(const std::vector<double>& w) {
    CouplingKey k;
    k.bits.resize(w.size());
    std::memcpy(k.bits.data(), w.data(), w.size() * sizeof(double));
    return k;
}

}  // namespace

NaiveExponentSolver::NaiveExponentSolver(ConditionalDistribution channel, Distribution q_x,
                                         DecodingMetric metric, SolverSettings settings)
    : channel_(std::move(channel)), q_x_(std::move(q_x)), metric_(std::move(metric)),
      settings_(settings) {
    if (q_x_.size() != channel_.in_size()) {
        throw std::invalid_argument("NaiveExponentSolver: composition/channel mismatch");
    }
    for (int x = 0; x < q_x_.size(); ++x) {
        if (q_x_[x] <= 0.0) {
            throw std::invalid_argument("NaiveExponentSolver: composition must be strictly positive");
        }
    }
}

NaiveExponentSolver::RateCache& NaiveExponentSolver::rate_cache(double rate) {
    if (rate < 0.0) throw std::invalid_argument("rate must be nonnegative");
    auto it = cache_.find(rate);
    if (it != cache_.end()) return it->second;

    RateCache rc;
    rc.ab = build_alpha_beta_cache(rate, channel_, q_x_, metric_, settings_);

    // exact-marginal base lattice over the free rows, plus the exact
    // independent and diagonal couplings
    const int n = q_x_.size();
    int solved_x = 0;
    for (int x = 1; x < n; ++x)
        if (q_x_[x] > q_x_[solved_x]) solved_x = x;
    std::vector<int> free_xs;
    for (int x = 0; x < n; ++x)
        if (x != solved_x) free_xs.push_back(x);

    std::map<CouplingKey, size_t> seen;
    std::vector<std::vector<double>> couplings;
    auto add = [&](const std::vector<double>& w) -> std::optional<size_t> {
        const CouplingKey k = key_of(w);
        auto [it2, inserted] = seen.try_emplace(k, couplings.size());
        if (inserted) couplings.push_back(w);
        return it2->second;
    };
    add(PairCoupling::independent(q_x_).w);
    add(PairCoupling::diagonal(q_x_).w);
    {
        const auto rows = simplex_grid(n, settings_.outer_den);
        std::vector<size_t> pick(free_xs.size(), 0);
        std::vector<std::vector<double>> vals(free_xs.size());
        while (true) {
            for (size_t f = 0; f < free_xs.size(); ++f) vals[f] = rows[pick[f]];
            if (auto w = coupling_from_rows(q_x_, solved_x, vals, free_xs)) add(*w);
            int lvl = static_cast<int>(free_xs.size()) - 1;
            while (lvl >= 0 && ++pick[lvl] == rows.size()) pick[lvl--] = 0;
            if (lvl < 0) break;
        }
    }

    InnerEngine engine(channel_, q_x_, metric_, *rc.ab, settings_);
    auto solve_index = [&](const std::vector<double>& flat) -> OuterPoint {
        PairCoupling pc;
        pc.x_size = n;
        pc.w = flat;
        const LambdaGamma lg = engine.solve(pc);
        return {pc.mutual_information_xxp(), lg.lambda, lg.gamma};
    };

    // engine is stateful; evaluate serially in index order (deterministic) but
    // allow a worker pool when enabled by using one engine per worker
    rc.points.resize(couplings.size());
    if (max_threads() > 1) {
        parallel_for(static_cast<int64_t>(couplings.size()), [&](int64_t i) {
            InnerEngine local(channel_, q_x_, metric_, *rc.ab, settings_);
            PairCoupling pc;
            pc.x_size = n;
            pc.w = couplings[i];
            const LambdaGamma lg = local.solve(pc);
            rc.points[i] = {pc.mutual_information_xxp(), lg.lambda, lg.gamma};
        });
    } else {
        for (size_t i = 0; i < couplings.size(); ++i) rc.points[i] = solve_index(couplings[i]);
    }

    // refinement along L-independent drivers; every visited coupling joins the
    // shared point set
    const double R = rate;
    auto drivers = std::vector<std::function<double(const OuterPoint&)>>{
        [R](const OuterPoint& p) {  // rc upper, L = 1 proxy
            return clip_pos(p.gamma - clip_pos(2 * R - p.i_xxp) + clip_pos(p.i_xxp - 2 * R));
        },
        [R](const OuterPoint& p) {  // rc lower, L = 1
            return std::max(clip_pos(p.i_xxp - R), p.lambda + p.i_xxp - 2 * R);
        },
        [R](const OuterPoint& p) {  // trc
            return p.i_xxp <= 2 * R + 1e-12 ? clip_pos(p.gamma + p.i_xxp - 2 * R) : kInf;
        },
        [R](const OuterPoint& p) {  // expurgated
            return p.i_xxp <= R + 1e-12 ? clip_pos(p.gamma + p.i_xxp - 2 * R) : kInf;
        },
        [R](const OuterPoint& p) {  // large-L limit
            return clip_pos(2 * R - p.i_xxp) >= p.gamma ? clip_pos(p.i_xxp - 2 * R) : kInf;
        },
    };

    for (const auto& driver : drivers) {
        size_t best_i = 0;
        double best_v = kInf;
        for (size_t i = 0; i < rc.points.size(); ++i) {
            const double v = driver(rc.points[i]);
            if (v < best_v) {
                best_v = v;
                best_i = i;
            }
        }
        if (best_v == kInf) continue;
        std::vector<double> cur = couplings[best_i];
        int den = settings_.outer_den;
        for (int round = 0; round < settings_.refinement_rounds; ++round) {
            den *= 2;
            for (size_t f = 0; f < free_xs.size(); ++f) {
                std::vector<int> center(n);
                const int fx = free_xs[f];
                for (int xp = 0; xp < n; ++xp) {
                    const double row_v = cur[static_cast<size_t>(fx) * n + xp] / q_x_[fx];
                    center[xp] = static_cast<int>(std::lround(row_v * den));
                }
                std::vector<double> best_cpl = cur;
                std::function<void(int, int, std::vector<int>&)> walk =
                    [&](int xp, int rest, std::vector<int>& acc) {
                        if (xp == n - 1) {
                            if (std::abs(rest - center[xp]) > 2) return;
                            acc[xp] = rest;
                            std::vector<std::vector<double>> vals(free_xs.size());
                            for (size_t f2 = 0; f2 < free_xs.size(); ++f2) {
                                vals[f2].resize(n);
                                for (int t = 0; t < n; ++t)
                                    vals[f2][t] =
                                        cur[static_cast<size_t>(free_xs[f2]) * n + t] / q_x_[free_xs[f2]];
                            }
                            for (int t = 0; t < n; ++t) vals[f][t] = static_cast<double>(acc[t]) / den;
                            auto w = coupling_from_rows(q_x_, solved_x, vals, free_xs);
                            if (!w) return;
                            const CouplingKey k = key_of(*w);
                            size_t idx;
                            auto found = seen.find(k);
                            if (found == seen.end()) {
                                idx = couplings.size();
                                seen.emplace(k, idx);
                                couplings.push_back(*w);
                                rc.points.push_back(solve_index(*w));
                            } else {
                                idx = found->second;
                            }
                            if (driver(rc.points[idx]) < best_v) {
                                best_v = driver(rc.points[idx]);
                                best_cpl = couplings[idx];
                            }
                        } else {
                            const int lo = std::max(0, center[xp] - 2);
                            const int hi = std::min(den, center[xp] + 2);
                            for (int c = lo; c <= hi && c <= rest; ++c) {
                                acc[xp] = c;
                                walk(xp + 1, rest - c, acc);
                            }
                        }
                    };
                std::vector<int> acc(n);
                walk(0, den, acc);
                cur = best_cpl;
            }
        }
    }

    return cache_.emplace(rate, std::move(rc)).first->second;
}

LambdaGamma NaiveExponentSolver::lambda_gamma(const PairCoupling& coupling, double rate) {
    RateCache& rc = rate_cache(rate);
    InnerEngine engine(channel_, q_x_, metric_, *rc.ab, settings_);
    return engine.solve(coupling);
}

double NaiveExponentSolver::exponent_rc_upper(double rate, int threshold_L) {
    if (threshold_L < 1) throw std::invalid_argument("threshold L must be >= 1");
    const RateCache& rc = rate_cache(rate);
    const double L = threshold_L;
    double best = kInf;
    for (const auto& p : rc.points) {
        best = std::min(best, clip_pos(L * p.gamma - L * clip_pos(2 * rate - p.i_xxp) +
                                       clip_pos(p.i_xxp - 2 * rate)));
    }
    return best;
}

double NaiveExponentSolver::exponent_rc_lower(double rate, int threshold_L) {
    if (threshold_L < 1) throw std::invalid_argument("threshold L must be >= 1");
    const RateCache& rc = rate_cache(rate);
    const double L = threshold_L;
    double best = kInf;
    for (const auto& p : rc.points) {
        best = std::min(best,
                        L * std::max(clip_pos(p.i_xxp - rate), p.lambda + p.i_xxp - 2 * rate));
    }
    return clip_pos(best);
}

double NaiveExponentSolver::exponent_trc(double rate, int threshold_L) {
    if (threshold_L < 1) throw std::invalid_argument("threshold L must be >= 1");
    const RateCache& rc = rate_cache(rate);
    const double L = threshold_L;
    double best = kInf;
    for (const auto& p : rc.points) {
        if (p.i_xxp > 2 * rate + 1e-12) continue;
        best = std::min(best, L * clip_pos(p.gamma + p.i_xxp - 2 * rate));
    }
    return best;
}

double NaiveExponentSolver::exponent_ex(double rate, int threshold_L) {
    if (threshold_L < 1) throw std::invalid_argument("threshold L must be >= 1");
    const RateCache& rc = rate_cache(rate);
    const double L = threshold_L;
    double best = kInf;
    for (const auto& p : rc.points) {
        if (p.i_xxp > rate + 1e-12) continue;
        best = std::min(best, L * clip_pos(p.gamma + p.i_xxp - 2 * rate));
    }
    return best;
}

double NaiveExponentSolver::exponent_rc_limit(double rate) {
    const RateCache& rc = rate_cache(rate);
    double best = kInf;
    for (const auto& p : rc.points) {
        if (clip_pos(2 * rate - p.i_xxp) < p.gamma) continue;
        best = std::min(best, clip_pos(p.i_xxp - 2 * rate));
    }
    return best;  // +inf reports an empty feasible set
}

double NaiveExponentSolver::eval(NaiveExponent which, double rate, int threshold_L) {
    switch (which) {
        case NaiveExponent::rc_upper: return exponent_rc_upper(rate, threshold_L);
        case NaiveExponent::rc_lower: return exponent_rc_lower(rate, threshold_L);
        case NaiveExponent::trc: return exponent_trc(rate, threshold_L);
        case NaiveExponent::expurgated: return exponent_ex(rate, threshold_L);
        case NaiveExponent::rc_limit: return exponent_rc_limit(rate);
    }
    throw std::invalid_argument("unknown exponent selector");
}

// ---------------------------------------------------------------------------
// Ordinary random coding exponent and the R_max lower bound: plain grid +
// refinement over Q_{Y|X} rows.
// ---------------------------------------------------------------------------

namespace {

double minimize_over_output_conditional(const ConditionalDistribution& channel,
                                        const Distribution& q_x, const SolverSettings& s,
                                        const std::function<double(double, double)>& objective) {
    // objective(D, I) -> value; minimized over Q_{Y|X}
    const int nx = channel.in_size(), ny = channel.out_size();
    std::vector<double> log_w(channel.flat().size());
    for (size_t i = 0; i < log_w.size(); ++i)
        log_w[i] = channel.flat()[i] > 0.0 ? std::log(channel.flat()[i]) : -kInf;

    auto eval_rows = [&](const std::vector<std::vector<double>>& rows) -> std::optional<double> {
        double d = 0.0;
        std::vector<double> qy(ny, 0.0);
        for (int x = 0; x < nx; ++x) {
            for (int yv = 0; yv < ny; ++yv) {
                const double v = rows[x][yv];
                if (v > 0.0) {
                    if (channel(x, yv) <= 0.0) return std::nullopt;
                    d += q_x[x] * v * (std::log(v) - log_w[static_cast<size_t>(x) * ny + yv]);
                }
                qy[yv] += q_x[x] * v;
            }
        }
        double i_xy = 0.0;
        for (int x = 0; x < nx; ++x)
            for (int yv = 0; yv < ny; ++yv) {
                const double v = rows[x][yv];
                if (v > 0.0) i_xy += q_x[x] * v * (std::log(v) - std::log(qy[yv]));
            }
        return objective(clip_pos(d), clip_pos(i_xy));
    };

    double best = kInf;
    std::vector<std::vector<double>> incumbent;
    // the channel itself: D = 0
    {
        std::vector<std::vector<double>> rows(nx);
        for (int x = 0; x < nx; ++x) rows[x].assign(channel.row(x).begin(), channel.row(x).end());
        if (auto v = eval_rows(rows)) {
            best = *v;
            incumbent = rows;
        }
    }
    const auto cands = simplex_grid(ny, s.inner_den);
    std::vector<size_t> pick(nx, 0);
    std::vector<std::vector<double>> rows(nx);
    while (true) {
        for (int x = 0; x < nx; ++x) rows[x] = cands[pick[x]];
        if (auto v = eval_rows(rows)) {
            if (*v < best) {
                best = *v;
                incumbent = rows;
            }
        }
        int lvl = nx - 1;
        while (lvl >= 0 && ++pick[lvl] == cands.size()) pick[lvl--] = 0;
        if (lvl < 0) break;
    }
    if (incumbent.empty()) return kInf;

    int den = s.inner_den;
    for (int round = 0; round < s.refinement_rounds; ++round) {
        den *= 2;
        for (int x = 0; x < nx; ++x) {
            std::vector<int> center(ny);
            for (int yv = 0; yv < ny; ++yv)
                center[yv] = static_cast<int>(std::lround(incumbent[x][yv] * den));
            std::vector<double> best_row = incumbent[x];
            std::function<void(int, int, std::vector<int>&)> walk = [&](int yv, int rest,
                                                                        std::vector<int>& acc) {
                if (yv == ny - 1) {
                    if (std::abs(rest - center[yv]) > 2) return;
                    acc[yv] = rest;
                    std::vector<double> row(ny);
                    for (int t = 0; t < ny; ++t) row[t] = static_cast<double>(acc[t]) / den;
                    std::swap(incumbent[x], row);
                    if (auto v = eval_rows(incumbent)) {
                        if (*v < best) {
                            best = *v;
                            best_row = incumbent[x];
                        }
                    }
                    std::swap(incumbent[x], row);
                    return;
                }
                const int lo = std::max(0, center[yv] - 2);
                const int hi = std::min(den, center[yv] + 2);
                for (int c = lo; c <= hi && c <= rest; ++c) {
                    acc[yv] = c;
                    walk(yv + 1, rest - c, acc);
                }
            };
            std::vector<int> acc(ny);
            walk(0, den, acc);
            incumbent[x] = best_row;
        }
    }
    return best;
}

}  // namespace

double exponent_rc_ordinary(const ConditionalDistribution& channel, const Distribution& q_x,
                            double rate, const SolverSettings& s) {
    if (rate < 0.0) throw std::invalid_argument("rate must be nonnegative");
    return minimize_over_output_conditional(
        channel, q_x, s, [rate](double d, double i) { return d + clip_pos(i - rate); });
}

double rmax_lower_bound(const ConditionalDistribution& channel, const Distribution& q_x,
                        const SolverSettings& s) {
    return minimize_over_output_conditional(
        channel, q_x, s, [](double d, double i) { return d + 0.5 * clip_pos(i - d); });
}

std::vector<CurveRow> naive_curve(NaiveExponentSolver& solver, std::span<const double> rates,
                                  std::span<const NaiveExponent> which, int threshold_L) {
    std::vector<CurveRow> out;
    out.reserve(rates.size());
    for (double r : rates) {
        CurveRow row;
        row.rate = r;
        row.values.reserve(which.size());
        for (NaiveExponent e : which) row.values.push_back(solver.eval(e, r, threshold_L));
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace beeid
