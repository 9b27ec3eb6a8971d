#include "beeid/beeid.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/channel_io.hpp"
#include "core/distribution.hpp"
#include "core/info.hpp"
#include "core/naive.hpp"
#include "core/optimal.hpp"
#include "core/parallel.hpp"
#include "core/simulator.hpp"

struct beeid_channel {
    beeid::ConditionalDistribution w;
};

struct beeid_naive_solver {
    beeid::ConditionalDistribution channel;
    beeid::Distribution q_x;
    beeid::DecodingMetric metric;
    beeid::SolverSettings settings;
    std::unique_ptr<beeid::NaiveExponentSolver> solver;

    beeid::NaiveExponentSolver& get() {
        if (!solver) {
            solver = std::make_unique<beeid::NaiveExponentSolver>(channel, q_x, metric, settings);
        }
        return *solver;
    }
};

namespace {

thread_local std::string t_last_error;

beeid_status fail(beeid_status s, const std::string& msg) {
    t_last_error = msg;
    return s;
}

template <typename Fn>
beeid_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(BEEID_ERROR_INVALID_ARGUMENT, e.what());
    } catch (const std::runtime_error& e) {
        return fail(BEEID_ERROR_PARSE, e.what());
    } catch (const std::exception& e) {
        return fail(BEEID_ERROR_INTERNAL, e.what());
    }
}

beeid::Distribution composition_or_uniform(const double* q_x, int size) {
    if (!q_x) return beeid::Distribution::uniform(size);
    return beeid::Distribution(std::vector<double>(q_x, q_x + size));
}

bool is_bsc(const beeid::ConditionalDistribution& w, double* p_out) {
    if (w.in_size() != 2 || w.out_size() != 2) return false;
    const double p = w(0, 1);
    if (std::abs(w(1, 0) - p) > 1e-12 || std::abs(w(0, 0) - (1.0 - p)) > 1e-12 ||
        std::abs(w(1, 1) - (1.0 - p)) > 1e-12) {
        return false;
    }
    if (p_out) *p_out = p;
    return true;
}

}  // namespace

extern "C" {

const char* beeid_status_name(beeid_status s) {
    switch (s) {
        case BEEID_OK: return "ok";
        case BEEID_ERROR_INVALID_ARGUMENT: return "invalid argument";
        case BEEID_ERROR_PARSE: return "parse error";
        case BEEID_ERROR_INFEASIBLE: return "infeasible";
        case BEEID_ERROR_TOO_LARGE: return "too large";
        case BEEID_ERROR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* beeid_last_error(void) { return t_last_error.c_str(); }

void beeid_set_max_threads(int n) { beeid::set_max_threads(n); }

beeid_status beeid_channel_create(int in_size, int out_size, const double* rows,
                                  beeid_channel** out) {
    if (!rows || !out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::vector<double> flat(rows, rows + static_cast<size_t>(in_size) * out_size);
        *out = new beeid_channel{beeid::ConditionalDistribution(in_size, out_size, std::move(flat))};
        return BEEID_OK;
    });
}

beeid_status beeid_channel_load_json(const char* path, beeid_channel** out) {
    if (!path || !out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new beeid_channel{beeid::load_channel_json(path)};
        return BEEID_OK;
    });
}

void beeid_channel_free(beeid_channel* c) { delete c; }

int beeid_channel_input_size(const beeid_channel* c) { return c ? c->w.in_size() : 0; }
int beeid_channel_output_size(const beeid_channel* c) { return c ? c->w.out_size() : 0; }

int beeid_channel_is_symmetric(const beeid_channel* c) {
    return c && beeid::is_symmetric(c->w) ? 1 : 0;
}

beeid_status beeid_channel_bsc_parameter(const beeid_channel* c, double* p_out) {
    if (!c || !p_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    if (!is_bsc(c->w, p_out)) return fail(BEEID_ERROR_INFEASIBLE, "channel is not a BSC");
    return BEEID_OK;
}

beeid_status beeid_naive_solver_create(const beeid_channel* channel, const double* q_x,
                                       beeid_metric metric, beeid_naive_solver** out) {
    if (!channel || !out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto qx = composition_or_uniform(q_x, channel->w.in_size());
        auto m = metric == BEEID_METRIC_ML ? beeid::DecodingMetric::ml(channel->w)
                                           : beeid::DecodingMetric::mmi();
        auto s = beeid::SolverSettings::defaults_for(channel->w.in_size(), channel->w.out_size());
        auto* handle = new beeid_naive_solver{channel->w, std::move(qx), std::move(m), s, nullptr};
        *out = handle;
        return BEEID_OK;
    });
}

void beeid_naive_solver_free(beeid_naive_solver* s) { delete s; }

beeid_status beeid_naive_solver_set_resolution(beeid_naive_solver* s, int outer_den, int inner_den,
                                               int qy_cache_den, int refinement_rounds) {
    if (!s) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null solver");
    if (outer_den < 0 || inner_den < 0 || qy_cache_den < 0 || refinement_rounds < 0) {
        return fail(BEEID_ERROR_INVALID_ARGUMENT, "resolutions must be nonnegative");
    }
    if (outer_den) s->settings.outer_den = outer_den;
    if (inner_den) s->settings.inner_den = inner_den;
    if (qy_cache_den) s->settings.qy_cache_den = qy_cache_den;
    if (refinement_rounds) s->settings.refinement_rounds = refinement_rounds;
    s->solver.reset();  // settings changed; drop caches
    return BEEID_OK;
}

double beeid_naive_solver_tolerance(const beeid_naive_solver* s) {
    return s ? s->settings.combined_tolerance() : 0.0;
}

namespace {

beeid::NaiveExponent to_core(beeid_naive_exponent which) {
    switch (which) {
        case BEEID_NAIVE_RC_UPPER: return beeid::NaiveExponent::rc_upper;
        case BEEID_NAIVE_RC_LOWER: return beeid::NaiveExponent::rc_lower;
        case BEEID_NAIVE_TRC: return beeid::NaiveExponent::trc;
        case BEEID_NAIVE_EXPURGATED: return beeid::NaiveExponent::expurgated;
        case BEEID_NAIVE_RC_LIMIT: return beeid::NaiveExponent::rc_limit;
    }
    throw std::invalid_argument("unknown exponent selector");
}

}  // namespace

beeid_status beeid_naive_eval(beeid_naive_solver* s, beeid_naive_exponent which, double rate_nats,
                              int threshold_L, double* value_out) {
    if (!s || !value_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const int L = which == BEEID_NAIVE_RC_LIMIT ? 1 : threshold_L;
        *value_out = s->get().eval(to_core(which), rate_nats, L);
        return BEEID_OK;
    });
}

beeid_status beeid_naive_curve(beeid_naive_solver* s, beeid_naive_exponent which,
                               const double* rates_nats, int n_rates, int threshold_L,
                               double* values_out) {
    if (!s || (!rates_nats && n_rates > 0) || !values_out) {
        return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        for (int i = 0; i < n_rates; ++i) {
            const int L = which == BEEID_NAIVE_RC_LIMIT ? 1 : threshold_L;
            values_out[i] = s->get().eval(to_core(which), rates_nats[i], L);
        }
        return BEEID_OK;
    });
}

beeid_status beeid_rc_ordinary(const beeid_channel* channel, const double* q_x, double rate_nats,
                               double* value_out) {
    if (!channel || !value_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto qx = composition_or_uniform(q_x, channel->w.in_size());
        const auto s = beeid::SolverSettings::defaults_for(channel->w.in_size(), channel->w.out_size());
        *value_out = beeid::exponent_rc_ordinary(channel->w, qx, rate_nats, s);
        return BEEID_OK;
    });
}

beeid_status beeid_rmax_lower_bound(const beeid_channel* channel, const double* q_x,
                                    double* value_out) {
    if (!channel || !value_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto qx = composition_or_uniform(q_x, channel->w.in_size());
        const auto s = beeid::SolverSettings::defaults_for(channel->w.in_size(), channel->w.out_size());
        *value_out = beeid::rmax_lower_bound(channel->w, qx, s);
        return BEEID_OK;
    });
}

beeid_status beeid_opt_rc_exponent(const beeid_channel* channel, double rate_nats,
                                   double* value_out) {
    if (!channel || !value_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    if (!beeid::is_symmetric(channel->w)) {
        return fail(BEEID_ERROR_INFEASIBLE, "channel is not symmetric: rows/columns are not "
                                            "permutations of one another");
    }
    return guarded([&] {
        const auto b = beeid::bhattacharyya_matrix(channel->w);
        const auto u = beeid::Distribution::uniform(channel->w.in_size());
        *value_out = beeid::exponent_opt_rc(rate_nats, u, b);
        return BEEID_OK;
    });
}

beeid_status beeid_opt_ex_exponent(const beeid_channel* channel, double rate_nats,
                                   double sigma_max, int sigma_grid_points, double* value_out) {
    if (!channel || !value_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    if (!beeid::is_symmetric(channel->w)) {
        return fail(BEEID_ERROR_INFEASIBLE, "channel is not symmetric: rows/columns are not "
                                            "permutations of one another");
    }
    return guarded([&] {
        const auto b = beeid::bhattacharyya_matrix(channel->w);
        const auto u = beeid::Distribution::uniform(channel->w.in_size());
        beeid::SigmaSearch search;
        if (sigma_max > 0) search.sigma_max = sigma_max;
        if (sigma_grid_points > 0) search.grid_points = sigma_grid_points;
        *value_out = beeid::exponent_opt_ex(rate_nats, u, b, search).value;
        return BEEID_OK;
    });
}

beeid_status beeid_bsc_critical_p(double tolerance, double* out) {
    if (!out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = beeid::bsc_critical_p(tolerance);
        return BEEID_OK;
    });
}

beeid_status beeid_bsc_rate_break_nats(double p, double* out) {
    if (!out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = beeid::bsc_rate_break(p);
        return BEEID_OK;
    });
}

beeid_status beeid_rtrc_bits(double p, double* out) {
    if (!out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = beeid::rtrc(p);
        return BEEID_OK;
    });
}

beeid_status beeid_tan_exponent_bits(double rate_bits, double p, double* value_out,
                                     int* in_range_out) {
    if (!value_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto t = beeid::exponent_tan(rate_bits, p);
        *value_out = t.value_bits;
        if (in_range_out) *in_range_out = t.in_range ? 1 : 0;
        return BEEID_OK;
    });
}

beeid_status beeid_gv_distance(double two_r_bits, double* out) {
    if (!out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = beeid::gv_distance(two_r_bits);
        return BEEID_OK;
    });
}

void beeid_sim_options_init(beeid_sim_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof(*opts));
    opts->joint_decoding = 0;
    opts->block_length = 8;
    opts->num_codewords = 4;
    opts->threshold_L = 1;
    opts->metric = BEEID_METRIC_ML;
    opts->map_decoder = 0;
    opts->iid_codebook = 0;
    opts->fresh_codebook = 1;
    opts->exact = 0;
    opts->trials = 10000;
}

namespace {

beeid::CodebookSpec make_codebook_spec(const beeid::Distribution& qx, int n, bool iid) {
    if (iid) return beeid::IidGeneration{qx};
    return beeid::ConstantComposition{beeid::quantize_composition(qx, n)};
}

void write_trial_log(const std::string& path, const std::vector<beeid::TrialLogEntry>& log,
                     bool joint) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trial log " + path);
    for (const auto& e : log) {
        nlohmann::json j;
        j["trial"] = e.trial;
        j["seed"] = e.seed;
        if (joint) {
            j["permutation_correct"] = e.outcome.permutation_correct;
        } else {
            j["n_errors"] = e.outcome.n_errors;
        }
        out << j.dump() << "\n";
    }
}

}  // namespace

beeid_status beeid_simulate(const beeid_channel* channel, const double* q_x,
                            const beeid_sim_options* opts, unsigned long long master_seed,
                            const char* trial_log_path, beeid_sim_report* report) {
    if (!channel || !opts || !report) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() -> beeid_status {
        const auto qx = composition_or_uniform(q_x, channel->w.in_size());
        std::memset(report, 0, sizeof(*report));
        report->master_seed = master_seed;
        if (opts->exact) {
            if (opts->joint_decoding) {
                return fail(BEEID_ERROR_INVALID_ARGUMENT, "exact oracle covers naive decoding only");
            }
            double total = 1.0;
            for (int i = 0; i < opts->block_length; ++i) total *= channel->w.out_size();
            if (total > 1e7 || opts->num_codewords > 20) {
                return fail(BEEID_ERROR_TOO_LARGE,
                            "exact oracle guard: need |Y|^n <= 1e7 (got " + std::to_string(total) +
                                ") and M <= 20 (got " + std::to_string(opts->num_codewords) + ")");
            }
            const auto cb = beeid::sample_codebook(
                make_codebook_spec(qx, opts->block_length, opts->iid_codebook), opts->block_length,
                opts->num_codewords, master_seed);
            const auto metric = opts->metric == BEEID_METRIC_ML
                                    ? beeid::DecodingMetric::ml(channel->w)
                                    : beeid::DecodingMetric::mmi();
            report->p_hat = beeid::exact_error_naive(cb, channel->w, metric, opts->threshold_L);
            report->wilson_lo = report->wilson_hi = report->p_hat;
            report->exact = 1;
            return BEEID_OK;
        }

        beeid::EstimateConfig cfg{
            opts->joint_decoding ? beeid::EstimateConfig::Mode::joint
                                 : beeid::EstimateConfig::Mode::naive,
            channel->w,
            make_codebook_spec(qx, opts->block_length, opts->iid_codebook),
            opts->block_length,
            opts->num_codewords,
            opts->threshold_L,
            opts->metric == BEEID_METRIC_ML ? beeid::DecodingMetric::ml(channel->w)
                                            : beeid::DecodingMetric::mmi(),
            opts->map_decoder ? beeid::GldMode::map : beeid::GldMode::stochastic,
            opts->fresh_codebook != 0,
            opts->trials,
        };
        std::vector<beeid::TrialLogEntry> log;
        const auto rep =
            beeid::estimate_error(cfg, master_seed, trial_log_path ? &log : nullptr);
        if (trial_log_path) write_trial_log(trial_log_path, log, opts->joint_decoding != 0);
        report->trials = rep.trials;
        report->failures = rep.failures;
        report->successes = rep.successes;
        report->p_hat = rep.p_hat;
        report->wilson_lo = rep.wilson_lo;
        report->wilson_hi = rep.wilson_hi;
        report->exact = 0;
        return BEEID_OK;
    });
}

beeid_status beeid_exact_error_naive(const beeid_channel* channel, const double* q_x, int n, int m,
                                     int threshold_L, beeid_metric metric, int iid_codebook,
                                     unsigned long long codebook_seed, double* value_out) {
    if (!channel || !value_out) return fail(BEEID_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&]() -> beeid_status {
        double total = 1.0;
        for (int i = 0; i < n; ++i) total *= channel->w.out_size();
        if (total > 1e7 || m > 20) {
            return fail(BEEID_ERROR_TOO_LARGE, "exact oracle guard: need |Y|^n <= 1e7 and M <= 20");
        }
        const auto qx = composition_or_uniform(q_x, channel->w.in_size());
        const auto cb = beeid::sample_codebook(make_codebook_spec(qx, n, iid_codebook != 0), n, m,
                                               codebook_seed);
        const auto g = metric == BEEID_METRIC_ML ? beeid::DecodingMetric::ml(channel->w)
                                                 : beeid::DecodingMetric::mmi();
        *value_out = beeid::exact_error_naive(cb, channel->w, g, threshold_L);
        return BEEID_OK;
    });
}

}  // extern "C"
