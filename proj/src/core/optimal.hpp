#pragma once

#include <utility>
#include <vector>

#include "core/distribution.hpp"
#include "core/info.hpp"

namespace beeid {

/// Pairwise input confusability B(x,x') = sum_y sqrt(W(y|x) W(y|x')).
/// Symmetric, unit diagonal, entries in [0,1].
struct BhattacharyyaMatrix {
    int size = 0;
    std::vector<double> b;  // row-major, size x size
    double at(int x, int xp) const { return b[static_cast<size_t>(x) * size + xp]; }
};

BhattacharyyaMatrix bhattacharyya_matrix(const ConditionalDistribution& w);

/// Xi(sigma)   = sum_{x,x'} P(x) P(x') B(x,x')^(2/sigma)
/// Omega(sigma) = sum_{x,x'} P(x) P(x') B(x,x')^(1/sigma)
double xi(double sigma, const Distribution& p_x, const BhattacharyyaMatrix& b);
double omega(double sigma, const Distribution& p_x, const BhattacharyyaMatrix& b);

/// Upsilon(sigma) = min{ -log Xi(sigma) / 2, -2 log Omega(sigma) / 3 }, nats.
double upsilon(double sigma, const Distribution& p_x, const BhattacharyyaMatrix& b);

/// Random coding exponent under optimal decoding, nats:
/// [ min{ -log Xi(1) - 2R, -2 log Omega(1) - 3R } ]_+.
double exponent_opt_rc(double rate_nats, const Distribution& p_x, const BhattacharyyaMatrix& b);

struct SigmaSearch {
    double sigma_max = 1e4;
    int grid_points = 200;
};

struct OptExResult {
    double value;             // nats, clipped at zero; +inf when the rate-zero
                              // limit diverges (a zero of B with positive weight)
    double sigma;             // arg of the best finite-sigma candidate
    double bracket_width;     // width of the final refinement interval
    double finite_sigma_sup;  // best value over the finite-sigma candidates only
};

/// Expurgated exponent under optimal decoding: sup over sigma >= 1 of
/// sigma * min{ -log Xi(sigma) - 2R, -2 log Omega(sigma) - 3R }, searched on a
/// log-spaced grid with golden-section refinement. At R = 0 the analytic
/// sigma -> inf limit -2 sum P P log B joins the candidate set.
OptExResult exponent_opt_ex(double rate_nats, const Distribution& p_x,
                            const BhattacharyyaMatrix& b, const SigmaSearch& search = {});

/// BSC rate where the E_r^opt slope changes from -2 to -3: log(Xi(1)/Omega(1)^2), nats.
double bsc_rate_break(double p);

/// Root of [1/2 + 2p(1-p)]^3 = [1/2 + sqrt(p(1-p))]^4 on (0, 1/2), by bisection.
double bsc_critical_p(double tolerance);

/// Inverse of the base-2 binary entropy on [0, 1/2]: h2(delta) = 1 - two_r.
double gv_distance(double two_r);

struct TanExponent {
    double value_bits;
    bool in_range;  // rate below R_TRC(p)
};

/// Typical-random-binary-code bound for the BSC under joint decoding, bits:
/// -delta_GV(2R) * log2(4p(1-p)) for R < R_TRC(p). Bits in, bits out.
TanExponent exponent_tan(double rate_bits, double p);

/// R_TRC(p) = (1 - h2(z / (1 + z))) / 2 with z = sqrt(4p(1-p)), bits.
double rtrc(double p);

/// Exhaustive check of the chain identity E[(B(X1,X2)...B(X_{k-1},X_k))^(1/sigma)]
/// = Omega(sigma)^(k-1) for i.i.d. inputs. Returns (lhs, rhs); requires
/// |X|^k <= 1e7.
std::pair<double, double> lemma1_check(const ConditionalDistribution& w, const Distribution& p_x,
                                       int k, double sigma);

}  // namespace beeid
