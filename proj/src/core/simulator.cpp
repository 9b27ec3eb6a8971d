#include "core/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/assignment.hpp"
#include "core/info.hpp"
#include "core/parallel.hpp"

namespace beeid {

namespace {

int spec_alphabet(const CodebookSpec& spec) {
    if (const auto* cc = std::get_if<ConstantComposition>(&spec)) return cc->composition.alphabet_size();
    return std::get<IidGeneration>(spec).symbol_law.size();
}

}  // namespace

Codebook sample_codebook(const CodebookSpec& spec, int n, int m, uint64_t seed) {
    if (n < 1 || m < 1) throw std::invalid_argument("sample_codebook: need n >= 1 and M >= 1");
    Codebook cb{n, m, {}, spec, seed};
    cb.words.resize(static_cast<size_t>(m) * n);
    if (const auto* cc = std::get_if<ConstantComposition>(&spec)) {
        if (cc->composition.n != n) {
            throw std::invalid_argument("sample_codebook: composition block length mismatch");
        }
        std::vector<uint8_t> base;
        base.reserve(n);
        for (size_t sym = 0; sym < cc->composition.counts.size(); ++sym) {
            base.insert(base.end(), cc->composition.counts[sym], static_cast<uint8_t>(sym));
        }
        for (int msg = 0; msg < m; ++msg) {
            std::vector<uint8_t> word = base;
            CounterRng rng(seed, msg, static_cast<uint64_t>(RngStream::codebook));
            for (int i = n - 1; i > 0; --i) {
                const int j = static_cast<int>(rng.next_below(i + 1));
                std::swap(word[i], word[j]);
            }
            std::copy(word.begin(), word.end(), cb.words.begin() + static_cast<size_t>(msg) * n);
        }
    } else {
        const auto& law = std::get<IidGeneration>(spec).symbol_law;
        for (int msg = 0; msg < m; ++msg) {
            CounterRng rng(seed, msg, static_cast<uint64_t>(RngStream::codebook));
            for (int i = 0; i < n; ++i) {
                cb.words[static_cast<size_t>(msg) * n + i] =
                    static_cast<uint8_t>(rng.sample(law.probs()));
            }
        }
    }
    return cb;
}

Permutation random_permutation(int m, CounterRng& rng) {
    Permutation pi;
    pi.map.resize(m);
    for (int i = 0; i < m; ++i) pi.map[i] = i;
    for (int i = m - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_below(i + 1));
        std::swap(pi.map[i], pi.map[j]);
    }
    return pi;
}

Permutation identity_permutation(int m) {
    Permutation pi;
    pi.map.resize(m);
    for (int i = 0; i < m; ++i) pi.map[i] = i;
    return pi;
}

std::vector<std::vector<uint8_t>> transmit(const Codebook& codebook,
                                           const ConditionalDistribution& w, const Permutation& pi,
                                           uint64_t master_seed, uint64_t trial) {
    if (static_cast<int>(pi.map.size()) != codebook.m) {
        throw std::invalid_argument("transmit: permutation size mismatch");
    }
    CounterRng rng = trial_rng(master_seed, trial, RngStream::channel);
    std::vector<std::vector<uint8_t>> outputs(codebook.m);
    for (int slot = 0; slot < codebook.m; ++slot) {
        const auto word = codebook.word(pi.map[slot]);
        auto& out = outputs[slot];
        out.resize(codebook.n);
        for (int i = 0; i < codebook.n; ++i) {
            out[i] = static_cast<uint8_t>(rng.sample(w.row(word[i])));
        }
    }
    return outputs;
}

namespace {

/// n * g(empirical joint of (word, y)); -inf allowed.
double gld_score(std::span<const uint8_t> word, std::span<const uint8_t> y, int x_alpha,
                 int y_alpha, const DecodingMetric& g) {
    const int n = static_cast<int>(word.size());
    std::vector<double> counts(static_cast<size_t>(x_alpha) * y_alpha, 0.0);
    const double inc = 1.0 / n;
    for (int i = 0; i < n; ++i) counts[static_cast<size_t>(word[i]) * y_alpha + y[i]] += inc;
    const double v = g(JointDistribution(x_alpha, y_alpha, std::move(counts)));
    return v == -kInf ? -kInf : n * v;
}

}  // namespace

GldOutcome gld_decode(std::span<const uint8_t> y, const Codebook& codebook,
                      const DecodingMetric& g, int y_alphabet, GldMode mode, CounterRng& rng) {
    const int x_alpha = spec_alphabet(codebook.generation);
    std::vector<double> scores(codebook.m);
    double best = -kInf;
    for (int msg = 0; msg < codebook.m; ++msg) {
        scores[msg] = gld_score(codebook.word(msg), y, x_alpha, y_alphabet, g);
        best = std::max(best, scores[msg]);
    }
    if (best == -kInf) {
        // every metric value is -inf: uniform fallback / lowest index
        if (mode == GldMode::map) return {0, true};
        return {static_cast<int>(rng.next_below(codebook.m)), true};
    }
    if (mode == GldMode::map) {
        for (int msg = 0; msg < codebook.m; ++msg) {
            if (scores[msg] == best) return {msg, false};
        }
    }
    // stable softmax in the log domain, then CDF inversion
    double z = 0.0;
    std::vector<double> weights(codebook.m);
    for (int msg = 0; msg < codebook.m; ++msg) {
        weights[msg] = scores[msg] == -kInf ? 0.0 : std::exp(scores[msg] - best);
        z += weights[msg];
    }
    const double u = rng.next_double() * z;
    double acc = 0.0;
    for (int msg = 0; msg + 1 < codebook.m; ++msg) {
        acc += weights[msg];
        if (u < acc) return {msg, false};
    }
    return {codebook.m - 1, false};
}

TrialOutcome naive_trial(const Codebook& codebook, const ConditionalDistribution& w,
                         const DecodingMetric& g, GldMode mode, uint64_t master_seed,
                         uint64_t trial) {
    CounterRng perm_rng = trial_rng(master_seed, trial, RngStream::permutation);
    const Permutation pi = random_permutation(codebook.m, perm_rng);
    const auto outputs = transmit(codebook, w, pi, master_seed, trial);
    CounterRng dec_rng = trial_rng(master_seed, trial, RngStream::decoder);
    TrialOutcome out;
    out.decoded.resize(codebook.m);
    for (int slot = 0; slot < codebook.m; ++slot) {
        const GldOutcome d = gld_decode(outputs[slot], codebook, g, w.out_size(), mode, dec_rng);
        out.decoded[slot] = d.message;
        if (d.message != pi.map[slot]) out.n_errors += 1;
    }
    out.permutation_correct = out.n_errors == 0;
    return out;
}

JointDecodeResult ml_permutation_decode(const std::vector<std::vector<uint8_t>>& outputs,
                                        const Codebook& codebook,
                                        const ConditionalDistribution& w) {
    const int m = codebook.m;
    if (static_cast<int>(outputs.size()) != m) {
        throw std::invalid_argument("ml_permutation_decode: need M outputs");
    }
    std::vector<double> log_w(w.flat().size());
    for (size_t i = 0; i < log_w.size(); ++i)
        log_w[i] = w.flat()[i] > 0.0 ? std::log(w.flat()[i]) : -kInf;

    std::vector<std::vector<double>> weights(m, std::vector<double>(m));
    for (int slot = 0; slot < m; ++slot) {
        for (int msg = 0; msg < m; ++msg) {
            const auto word = codebook.word(msg);
            double s = 0.0;
            for (int i = 0; i < codebook.n; ++i) {
                const double lw = log_w[static_cast<size_t>(word[i]) * w.out_size() + outputs[slot][i]];
                if (lw == -kInf) {
                    s = -kInf;
                    break;
                }
                s += lw;
            }
            weights[slot][msg] = s;
        }
    }
    const AssignmentResult res = max_weight_assignment(weights);
    JointDecodeResult out;
    out.feasible = res.feasible;
    out.log_likelihood = res.total_weight;
    if (!res.feasible) {
        out.permutation = identity_permutation(m);
    } else {
        out.permutation.map = res.row_to_col;
    }
    return out;
}

TrialOutcome joint_trial(const Codebook& codebook, const ConditionalDistribution& w,
                         uint64_t master_seed, uint64_t trial) {
    CounterRng perm_rng = trial_rng(master_seed, trial, RngStream::permutation);
    const Permutation pi = random_permutation(codebook.m, perm_rng);
    const auto outputs = transmit(codebook, w, pi, master_seed, trial);
    const JointDecodeResult dec = ml_permutation_decode(outputs, codebook, w);
    TrialOutcome out;
    out.assignment_feasible = dec.feasible;
    out.decoded = dec.permutation.map;
    out.permutation_correct = dec.permutation == pi;
    int mism = 0;
    for (int slot = 0; slot < codebook.m; ++slot) mism += dec.permutation.map[slot] != pi.map[slot];
    out.n_errors = mism;
    return out;
}

std::pair<double, double> wilson_interval(uint64_t failures, uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(failures) / nt;
    const double denom = 1.0 + z * z / nt;
    const double center = (p + z * z / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nt + z * z / (4.0 * nt * nt)) / denom;
    const double lo = failures == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = failures == trials ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

EstimateReport estimate_error(const EstimateConfig& config, uint64_t master_seed,
                              std::vector<TrialLogEntry>* trial_log) {
    if (config.trials < 1) throw std::invalid_argument("estimate_error: trials must be >= 1");
    std::optional<Codebook> fixed;
    if (!config.fresh_codebook_per_trial) {
        fixed = sample_codebook(config.codebook, config.n, config.m,
                                config.fixed_codebook_seed.value_or(master_seed));
    }
    const uint64_t trials = config.trials;
    std::vector<char> failed(trials, 0);
    if (trial_log) trial_log->resize(trials);

    parallel_for(static_cast<int64_t>(trials), [&](int64_t t) {
        const uint64_t trial = static_cast<uint64_t>(t);
        std::optional<Codebook> local;
        const Codebook* cb = fixed ? &*fixed : nullptr;
        if (!cb) {
            const uint64_t cb_seed = trial_rng(master_seed, trial, RngStream::codebook).next_u64();
            local = sample_codebook(config.codebook, config.n, config.m, cb_seed);
            cb = &*local;
        }
        TrialOutcome out;
        if (config.mode == EstimateConfig::Mode::naive) {
            out = naive_trial(*cb, config.channel, config.metric, config.gld_mode, master_seed, trial);
            failed[t] = out.n_errors >= config.threshold_L;
        } else {
            out = joint_trial(*cb, config.channel, master_seed, trial);
            failed[t] = !out.permutation_correct;
        }
        if (trial_log) (*trial_log)[t] = {trial, master_seed, std::move(out)};
    });

    EstimateReport rep;
    rep.trials = trials;
    for (char f : failed) rep.failures += f;
    rep.successes = trials - rep.failures;
    rep.p_hat = static_cast<double>(rep.failures) / static_cast<double>(trials);
    std::tie(rep.wilson_lo, rep.wilson_hi) = wilson_interval(rep.failures, trials);
    rep.master_seed = master_seed;
    return rep;
}

// --- exact oracles --------------------------------------------------------

double exact_pm(const Codebook& codebook, int message, const ConditionalDistribution& w,
                const DecodingMetric& g) {
    const int n = codebook.n, m = codebook.m, ny = w.out_size();
    double total = 1.0;
    for (int i = 0; i < n; ++i) {
        total *= ny;
        if (total > 1e7) throw std::invalid_argument("exact_pm: |Y|^n exceeds the enumeration guard");
    }
    if (message < 0 || message >= m) throw std::invalid_argument("exact_pm: bad message index");
    if (m == 1) return 0.0;

    std::vector<double> log_w(w.flat().size());
    for (size_t i = 0; i < log_w.size(); ++i)
        log_w[i] = w.flat()[i] > 0.0 ? std::log(w.flat()[i]) : -kInf;
    const int x_alpha = spec_alphabet(codebook.generation);
    const auto xm = codebook.word(message);

    std::vector<uint8_t> y(n, 0);
    std::vector<double> scores(m);
    double p_err = 0.0;
    while (true) {
        double log_py = 0.0;
        for (int i = 0; i < n; ++i) {
            const double lw = log_w[static_cast<size_t>(xm[i]) * ny + y[i]];
            if (lw == -kInf) {
                log_py = -kInf;
                break;
            }
            log_py += lw;
        }
        if (log_py != -kInf) {
            double best = -kInf;
            for (int msg = 0; msg < m; ++msg) {
                scores[msg] = gld_score(codebook.word(msg), y, x_alpha, ny, g);
                best = std::max(best, scores[msg]);
            }
            double err;
            if (best == -kInf) {
                err = static_cast<double>(m - 1) / m;  // uniform fallback
            } else {
                double z = 0.0;
                for (int msg = 0; msg < m; ++msg)
                    z += scores[msg] == -kInf ? 0.0 : std::exp(scores[msg] - best);
                const double own = scores[message] == -kInf ? 0.0 : std::exp(scores[message] - best);
                err = 1.0 - own / z;
            }
            p_err += std::exp(log_py) * err;
        }
        int lvl = n - 1;
        while (lvl >= 0 && ++y[lvl] == ny) y[lvl--] = 0;
        if (lvl < 0) break;
    }
    return p_err;
}

double mu(const Codebook& codebook, const ConditionalDistribution& w, const DecodingMetric& g) {
    double s = 0.0;
    for (int msg = 0; msg < codebook.m; ++msg) s += exact_pm(codebook, msg, w, g);
    return s;
}

double exact_error_naive(const Codebook& codebook, const ConditionalDistribution& w,
                         const DecodingMetric& g, int threshold_L) {
    if (threshold_L < 1) throw std::invalid_argument("exact_error_naive: L must be >= 1");
    if (codebook.m > 20) throw std::invalid_argument("exact_error_naive: M exceeds the DP guard");
    std::vector<double> pm(codebook.m);
    for (int msg = 0; msg < codebook.m; ++msg) pm[msg] = exact_pm(codebook, msg, w, g);
    // Poisson-binomial distribution of N_e by dynamic programming
    std::vector<double> dp(codebook.m + 1, 0.0);
    dp[0] = 1.0;
    for (int msg = 0; msg < codebook.m; ++msg) {
        for (int j = msg + 1; j >= 1; --j) dp[j] = dp[j] * (1.0 - pm[msg]) + dp[j - 1] * pm[msg];
        dp[0] *= 1.0 - pm[msg];
    }
    double tail = 0.0;
    for (int j = codebook.m; j >= threshold_L; --j) tail += dp[j];
    return std::min(tail, 1.0);
}

long long type_enumerator(const Codebook& codebook, const JointDistribution& q_xxp) {
    if (q_xxp.axes() != 2) throw std::invalid_argument("type_enumerator: needs a 2-way joint");
    const int a = q_xxp.dim(0), b = q_xxp.dim(1);
    const int n = codebook.n;
    std::vector<long long> target(static_cast<size_t>(a) * b);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) {
            const double t = q_xxp.at(i, j) * n;
            const long long r = std::llround(t);
            if (std::abs(t - static_cast<double>(r)) > 1e-6) return 0;  // not an n-type
            target[static_cast<size_t>(i) * b + j] = r;
        }
    long long count = 0;
    std::vector<long long> counts(static_cast<size_t>(a) * b);
    for (int m1 = 0; m1 < codebook.m; ++m1) {
        for (int m2 = 0; m2 < codebook.m; ++m2) {
            if (m1 == m2) continue;
            std::fill(counts.begin(), counts.end(), 0);
            const auto w1 = codebook.word(m1), w2 = codebook.word(m2);
            bool in_range = true;
            for (int i = 0; i < n; ++i) {
                if (w1[i] >= a || w2[i] >= b) {
                    in_range = false;
                    break;
                }
                counts[static_cast<size_t>(w1[i]) * b + w2[i]] += 1;
            }
            if (in_range && counts == target) count += 1;
        }
    }
    return count;
}

}  // namespace beeid
