#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "core/distribution.hpp"
#include "core/grid.hpp"
#include "core/info.hpp"
#include "core/metric.hpp"

namespace beeid {

/// Grid resolutions for the nested optimizations. All objectives contain clips
/// and nested max/min, so the solver is exhaustive enumeration on simplex
/// lattices plus coordinate-wise local refinement around the incumbent,
/// halving the step each round.
struct SolverSettings {
    int outer_den = 100;      // lattice denominator for Q_{X'|X} rows
    int inner_den = 50;       // lattice denominator for Q_{Y|XX'} and Q_{Xt|Y} rows
    int qy_cache_den = 200;   // lattice denominator for the memoized alpha/beta nodes
    int refinement_rounds = 3;

    /// Spec defaults for binary alphabets; enumeration-budget-limited lattices
    /// for anything larger (sets *warning when the budget forces coarsening).
    static SolverSettings defaults_for(int x_size, int y_size, bool* coarsened = nullptr);

    /// Documented accuracy scale of grid outputs (nats): values returned by the
    /// exponent functions are exact minima over the visited lattice, which can
    /// deviate from the continuum optimum by roughly the lattice pitch times
    /// the objective's modulus of continuity. Used as the default comparison
    /// tolerance in tests and reports.
    double combined_tolerance() const {
        return 2.0 / outer_den + 2.0 / inner_den + 1.0 / qy_cache_den;
    }
};

/// Joint coupling Q_XX' whose two marginals both equal the code composition.
struct PairCoupling {
    int x_size = 0;
    std::vector<double> w;  // row-major X x X'
    double at(int x, int xp) const { return w[static_cast<size_t>(x) * x_size + xp]; }
    double mutual_information_xxp() const;

    static PairCoupling diagonal(const Distribution& qx);
    static PairCoupling independent(const Distribution& qx);
    /// q_xx'(x,x') = qx(x) * rows(x'|x); throws if the X' marginal deviates
    /// from qx by more than tol.
    static PairCoupling from_conditional(const Distribution& qx, const ConditionalDistribution& rows,
                                         double tol = 1e-9);
};

/// alpha(R, Q_Y) and beta(R, Q_Y) of the GLD analysis: maxima of
/// g(Q_{XtY}) + R - I(Xt;Y) (with the constraint I <= R) and of
/// g(Q_{XtY}) + [R - I(Xt;Y)]_+, over conditionals Q_{Xt|Y} whose Xt-marginal
/// equals Q_X. The marginal is enforced exactly by solving one dependent row;
/// the product coupling Q_X x Q_Y is always a candidate. Values may be -inf
/// under the ML metric when every candidate touches a zero of W.
struct AlphaBeta {
    double alpha;
    double beta;
};
AlphaBeta alpha_beta(double rate, const Distribution& q_y, const Distribution& q_x,
                     const DecodingMetric& g, const SolverSettings& s);

struct LambdaGamma {
    double lambda;  // min of D + I(X';Y|X) + beta(R,Q_Y) - g(Q_{X'Y})
    double gamma;   // min of D + I(X';Y|X) + [max{g(Q_XY), alpha(R,Q_Y)} - g(Q_{X'Y})]_+
};

/// Exponent selector for curve generation and the C API.
enum class NaiveExponent { rc_upper, rc_lower, trc, expurgated, rc_limit };

/// Evaluates every Section-4.1-style exponent for one (channel, composition,
/// metric) triple. Per-rate work (alpha/beta memo, per-coupling Lambda/Gamma)
/// is cached, so all exponents and all L values at one rate share one pass
/// over a single visited coupling set; the ordering and L-scaling invariants
/// then hold exactly on that set.
class NaiveExponentSolver {
public:
    NaiveExponentSolver(ConditionalDistribution channel, Distribution q_x, DecodingMetric metric,
                        SolverSettings settings);

    LambdaGamma lambda_gamma(const PairCoupling& coupling, double rate);
    double big_lambda(const PairCoupling& coupling, double rate) { return lambda_gamma(coupling, rate).lambda; }
    double big_gamma(const PairCoupling& coupling, double rate) { return lambda_gamma(coupling, rate).gamma; }

    double exponent_rc_upper(double rate, int threshold_L);
    double exponent_rc_lower(double rate, int threshold_L);
    double exponent_trc(double rate, int threshold_L);
    double exponent_ex(double rate, int threshold_L);
    /// Large-L limit of the upper bound; +inf when the feasible set is empty.
    double exponent_rc_limit(double rate);

    double eval(NaiveExponent which, double rate, int threshold_L);

    const SolverSettings& settings() const { return settings_; }
    const ConditionalDistribution& channel() const { return channel_; }
    const Distribution& composition() const { return q_x_; }
    const DecodingMetric& metric() const { return metric_; }

private:
    struct OuterPoint {
        double i_xxp;
        double lambda;
        double gamma;
    };
    struct RateCache {
        std::shared_ptr<SimplexInterpolator> ab;
        std::vector<OuterPoint> points;
    };
    RateCache& rate_cache(double rate);

    ConditionalDistribution channel_;
    Distribution q_x_;
    DecodingMetric metric_;
    SolverSettings settings_;
    std::map<double, RateCache> cache_;
};

/// E_r(R): ordinary random coding error exponent, min over Q_{Y|X} of
/// D(Q_{Y|X}||W|Q_X) + [I(X;Y) - R]_+.
double exponent_rc_ordinary(const ConditionalDistribution& channel, const Distribution& q_x,
                            double rate, const SolverSettings& s);

/// Lower bound on the maximal rate with positive exponent:
/// min over Q_{Y|X} of D + [I - D]_+ / 2.
double rmax_lower_bound(const ConditionalDistribution& channel, const Distribution& q_x,
                        const SolverSettings& s);

struct CurveRow {
    double rate;
    std::vector<double> values;
};

/// Rate-sweep of a set of exponents; deterministic, one solver pass per rate.
std::vector<CurveRow> naive_curve(NaiveExponentSolver& solver, std::span<const double> rates,
                                  std::span<const NaiveExponent> which, int threshold_L);

}  // namespace beeid
