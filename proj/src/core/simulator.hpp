#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/distribution.hpp"
#include "core/metric.hpp"
#include "core/rng.hpp"

namespace beeid {

/// Codebook generation: every word an independent uniform draw from the type
/// class of a composition, or i.i.d. symbols from a distribution.
struct ConstantComposition {
    Composition composition;
};
struct IidGeneration {
    Distribution symbol_law;
};
using CodebookSpec = std::variant<ConstantComposition, IidGeneration>;

struct Codebook {
    int n = 0;
    int m = 0;
    std::vector<uint8_t> words;  // row-major m x n
    CodebookSpec generation;
    uint64_t seed = 0;

    std::span<const uint8_t> word(int msg) const {
        return {words.data() + static_cast<size_t>(msg) * n, static_cast<size_t>(n)};
    }
};

Codebook sample_codebook(const CodebookSpec& spec, int n, int m, uint64_t seed);

struct Permutation {
    std::vector<int> map;  // message slot i carries codeword map[i]
    bool operator==(const Permutation&) const = default;
};

Permutation random_permutation(int m, CounterRng& rng);
Permutation identity_permutation(int m);

/// Memoryless transmission of every permuted codeword: output slot i is a
/// sample from W given word pi.map[i]. Deterministic given the rng stream.
std::vector<std::vector<uint8_t>> transmit(const Codebook& codebook,
                                           const ConditionalDistribution& w, const Permutation& pi,
                                           uint64_t master_seed, uint64_t trial);

enum class GldMode { stochastic, map };

struct GldOutcome {
    int message;         // decoded codeword index (0-based)
    bool degenerate;     // every metric value was -inf; fallback applied
};

/// Generalized likelihood decoder against a full codebook: stochastic mode
/// samples message m with probability proportional to exp{n g(P_hat)}; map
/// mode takes the argmax with lowest-index ties.
GldOutcome gld_decode(std::span<const uint8_t> y, const Codebook& codebook,
                      const DecodingMetric& g, int y_alphabet, GldMode mode, CounterRng& rng);

struct TrialOutcome {
    int n_errors = 0;              // naive mode: the error enumerator N_e
    bool permutation_correct = true;  // joint mode
    bool assignment_feasible = true;
    std::vector<int> decoded;      // per-slot decoded codeword index
};

TrialOutcome naive_trial(const Codebook& codebook, const ConditionalDistribution& w,
                         const DecodingMetric& g, GldMode mode, uint64_t master_seed,
                         uint64_t trial);

/// Joint ML: maximum-weight perfect matching on per-pair log-likelihoods.
/// Infeasible instances (no finite-weight matching) return the identity with
/// the flag cleared.
struct JointDecodeResult {
    Permutation permutation;
    double log_likelihood;
    bool feasible;
};
JointDecodeResult ml_permutation_decode(const std::vector<std::vector<uint8_t>>& outputs,
                                        const Codebook& codebook, const ConditionalDistribution& w);

TrialOutcome joint_trial(const Codebook& codebook, const ConditionalDistribution& w,
                         uint64_t master_seed, uint64_t trial);

struct EstimateConfig {
    enum class Mode { naive, joint } mode = Mode::naive;
    ConditionalDistribution channel;
    CodebookSpec codebook;
    int n = 1;
    int m = 1;
    int threshold_L = 1;        // naive mode: failure iff N_e >= L
    DecodingMetric metric;      // naive mode
    GldMode gld_mode = GldMode::stochastic;
    bool fresh_codebook_per_trial = true;  // ensemble average vs fixed codebook
    uint64_t trials = 1;
    // fixed-codebook mode: sampling seed for the codebook; master_seed when absent
    std::optional<uint64_t> fixed_codebook_seed;
};

struct EstimateReport {
    uint64_t trials = 0;
    uint64_t failures = 0;
    uint64_t successes = 0;
    double p_hat = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    uint64_t master_seed = 0;
};

struct TrialLogEntry {
    uint64_t trial;
    uint64_t seed;
    TrialOutcome outcome;
};

/// Monte Carlo estimate of the failure probability. Per-trial randomness is a
/// counter-mode function of (master_seed, trial), so the report is identical
/// for any execution order or worker count.
EstimateReport estimate_error(const EstimateConfig& config, uint64_t master_seed,
                              std::vector<TrialLogEntry>* trial_log = nullptr);

/// 95% Wilson score interval.
std::pair<double, double> wilson_interval(uint64_t failures, uint64_t trials);

// --- exact small-instance oracles ---------------------------------------

/// Exact error probability of message m under the stochastic GLD: sum over all
/// y in Y^n of W(y|x_m) times the posterior mass of the competitors.
/// Requires |Y|^n <= 1e7.
double exact_pm(const Codebook& codebook, int message, const ConditionalDistribution& w,
                const DecodingMetric& g);

/// Expected number of incorrect decodings: sum of exact_pm over messages.
double mu(const Codebook& codebook, const ConditionalDistribution& w, const DecodingMetric& g);

/// Exact P{N_e >= L}: Poisson-binomial tail of the per-message error
/// probabilities (decodings are independent across outputs given the
/// codebook). Requires M <= 20 and exact_pm feasibility.
double exact_error_naive(const Codebook& codebook, const ConditionalDistribution& w,
                         const DecodingMetric& g, int threshold_L);

/// N(Q_XX'): ordered pairs (m, m'), m' != m, whose joint empirical
/// distribution equals the given joint exactly.
long long type_enumerator(const Codebook& codebook, const JointDistribution& q_xxp);

}  // namespace beeid
