// beeid command line front end. Talks to the library exclusively through the
// C API in beeid/beeid.h; owns all file formats.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beeid/beeid.h"

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;
constexpr const char* kSchemaCurve = "beeid-curve/1";
constexpr const char* kSchemaReport = "beeid-report/1";

int exit_code_for(beeid_status s) {
    switch (s) {
        case BEEID_OK: return 0;
        case BEEID_ERROR_INFEASIBLE:
        case BEEID_ERROR_TOO_LARGE: return 3;
        default: return 2;
    }
}

[[noreturn]] void die(beeid_status s, const std::string& context) {
    std::cerr << "error (" << beeid_status_name(s) << "): " << context;
    const std::string detail = beeid_last_error();
    if (!detail.empty()) std::cerr << ": " << detail;
    std::cerr << "\n";
    std::exit(exit_code_for(s));
}

void check(beeid_status s, const std::string& context) {
    if (s != BEEID_OK) die(s, context);
}

struct ChannelHandle {
    beeid_channel* ptr = nullptr;
    ~ChannelHandle() { beeid_channel_free(ptr); }
};

struct RateGrid {
    double start = 0.0, stop = 0.0, step = 0.0;
    std::vector<double> values() const {
        std::vector<double> out;
        if (step <= 0.0) return out;
        for (double r = start; r <= stop + 1e-12; r += step) out.push_back(r);
        return out;
    }
};

RateGrid parse_rate_grid(const std::string& text) {
    RateGrid g;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &g.start, &g.stop, &g.step) != 3 || g.step <= 0.0 ||
        g.start < 0.0) {
        std::cerr << "error: --rate-grid expects start:stop:step with step > 0\n";
        std::exit(2);
    }
    return g;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file " << out_path << "\n";
        std::exit(2);
    }
    f << text;
}

std::string render_curve(const nlohmann::json& config, const std::string& units,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows, const std::string& format) {
    if (format == "json") {
        nlohmann::json j;
        j["schema"] = kSchemaCurve;
        j["config"] = config;
        j["units"] = units;
        j["columns"] = columns;
        j["rows"] = rows;
        return j.dump(2) + "\n";
    }
    std::string out;
    out += "# schema: ";
    out += kSchemaCurve;
    out += "\n# config: " + config.dump() + "\n# units: " + units + "\n";
    for (size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_double(row[c]);
        out += "\n";
    }
    return out;
}

struct CommonFlags {
    std::string channel_path;
    std::string rate_grid = "0:0.2:0.01";
    std::string units;
    std::string format = "csv";
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonFlags* flags, const std::string& default_units) {
    flags->units = default_units;
    cmd->add_option("--channel", flags->channel_path, "channel spec JSON file")->required();
    cmd->add_option("--rate-grid", flags->rate_grid, "rate grid start:stop:step (display units)");
    cmd->add_option("--units", flags->units, "output units")
        ->check(CLI::IsMember({"nats", "bits"}));
    cmd->add_option("--format", flags->format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", flags->out_path, "output file (stdout when absent)");
}

ChannelHandle load_channel(const std::string& path) {
    ChannelHandle h;
    check(beeid_channel_load_json(path.c_str(), &h.ptr), "loading channel " + path);
    return h;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bee identification error exponents and simulation"};
    app.require_subcommand(1);

    // exponents-naive ------------------------------------------------------
    CommonFlags nf;
    int naive_L = 1;
    std::string metric = "ml";
    int outer_den = 0, inner_den = 0, qy_den = 0, refine = 0;
    auto* naive_cmd =
        app.add_subcommand("exponents-naive", "random coding / TRC / expurgated exponents under "
                                              "naive GLD decoding");
    add_common(naive_cmd, &nf, "nats");
    naive_cmd->add_option("--L", naive_L, "error-count threshold")->check(CLI::PositiveNumber);
    naive_cmd->add_option("--metric", metric, "decoding metric")
        ->check(CLI::IsMember({"ml", "mmi"}));
    naive_cmd->add_option("--outer-den", outer_den, "lattice denominator for Q_{X'|X}");
    naive_cmd->add_option("--inner-den", inner_den, "lattice denominator for Q_{Y|XX'}");
    naive_cmd->add_option("--qy-den", qy_den, "alpha/beta cache lattice denominator");
    naive_cmd->add_option("--refine", refine, "refinement rounds");

    // exponents-optimal ----------------------------------------------------
    CommonFlags of;
    double sigma_max = 0.0;
    int sigma_points = 0;
    auto* opt_cmd = app.add_subcommand(
        "exponents-optimal", "random coding and expurgated exponents under joint ML decoding");
    add_common(opt_cmd, &of, "bits");
    opt_cmd->add_option("--sigma-max", sigma_max, "upper end of the sigma search");
    opt_cmd->add_option("--sigma-points", sigma_points, "sigma grid points");

    // simulate ---------------------------------------------------------------
    std::string sim_channel, sim_mode = "naive", sim_metric = "ml", sim_gld = "stochastic";
    std::string sim_codebook = "constant-composition", sim_format = "json", sim_out, trial_log;
    int sim_n = 8, sim_m = 4, sim_L = 1;
    bool fixed_codebook = false, sim_exact = false;
    uint64_t sim_trials = 10000, sim_seed = 1;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo system simulation");
    sim_cmd->add_option("--channel", sim_channel, "channel spec JSON file")->required();
    sim_cmd->add_option("--mode", sim_mode, "decoder")->check(CLI::IsMember({"naive", "joint"}));
    sim_cmd->add_option("--n", sim_n, "block length")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--M", sim_m, "number of codewords")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--L", sim_L, "error-count threshold (naive)")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--metric", sim_metric, "decoding metric (naive)")
        ->check(CLI::IsMember({"ml", "mmi"}));
    sim_cmd->add_option("--gld", sim_gld, "GLD mode (naive)")
        ->check(CLI::IsMember({"stochastic", "map"}));
    sim_cmd->add_option("--codebook", sim_codebook, "codebook ensemble")
        ->check(CLI::IsMember({"constant-composition", "iid"}));
    sim_cmd->add_flag("--fixed-codebook", fixed_codebook,
                      "keep one codebook across trials (default: fresh per trial)");
    sim_cmd->add_flag("--exact", sim_exact, "exact P{N_e >= L} oracle instead of Monte Carlo");
    sim_cmd->add_option("--trials", sim_trials, "Monte Carlo trials");
    sim_cmd->add_option("--seed", sim_seed, "master seed");
    sim_cmd->add_option("--trial-log", trial_log, "JSON-lines per-trial log file");
    sim_cmd->add_option("--format", sim_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sim_cmd->add_option("--out", sim_out, "output file (stdout when absent)");

    // constants ----------------------------------------------------------------
    std::string const_channel, const_units = "bits", const_format = "json", const_out;
    auto* const_cmd =
        app.add_subcommand("constants", "critical parameters: p*, R*(p), R_TRC(p), R_max bound");
    const_cmd->add_option("--channel", const_channel, "channel spec JSON file")->required();
    const_cmd->add_option("--units", const_units, "output units")
        ->check(CLI::IsMember({"nats", "bits"}));
    const_cmd->add_option("--format", const_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    const_cmd->add_option("--out", const_out, "output file (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const auto to_display = [](const std::string& u) { return u == "bits" ? 1.0 / kLn2 : 1.0; };

    if (naive_cmd->parsed()) {
        ChannelHandle ch = load_channel(nf.channel_path);
        beeid_naive_solver* solver = nullptr;
        check(beeid_naive_solver_create(ch.ptr, nullptr,
                                        metric == "ml" ? BEEID_METRIC_ML : BEEID_METRIC_MMI,
                                        &solver),
              "creating solver");
        check(beeid_naive_solver_set_resolution(solver, outer_den, inner_den, qy_den, refine),
              "applying resolutions");
        const RateGrid grid = parse_rate_grid(nf.rate_grid);
        const auto rates_disp = grid.values();
        const double unit = nf.units == "bits" ? kLn2 : 1.0;  // display -> nats
        std::vector<double> rates_nats(rates_disp.size());
        for (size_t i = 0; i < rates_disp.size(); ++i) rates_nats[i] = rates_disp[i] * unit;

        const std::vector<std::pair<std::string, beeid_naive_exponent>> cols = {
            {"rc_upper", BEEID_NAIVE_RC_UPPER},
            {"rc_lower", BEEID_NAIVE_RC_LOWER},
            {"trc", BEEID_NAIVE_TRC},
            {"expurgated", BEEID_NAIVE_EXPURGATED},
        };
        std::vector<std::vector<double>> rows(rates_disp.size());
        for (size_t i = 0; i < rates_disp.size(); ++i) rows[i].push_back(rates_disp[i]);
        for (const auto& [name, which] : cols) {
            std::vector<double> vals(rates_nats.size());
            check(beeid_naive_curve(solver, which, rates_nats.data(),
                                    static_cast<int>(rates_nats.size()), naive_L, vals.data()),
                  "evaluating " + name);
            for (size_t i = 0; i < vals.size(); ++i) rows[i].push_back(vals[i] / unit);
        }
        beeid_naive_solver_free(solver);

        nlohmann::json config{{"command", "exponents-naive"},
                              {"channel", nf.channel_path},
                              {"rate_grid", nf.rate_grid},
                              {"L", naive_L},
                              {"metric", metric},
                              {"units", nf.units},
                              {"outer_den", outer_den},
                              {"inner_den", inner_den},
                              {"qy_den", qy_den},
                              {"refine", refine},
                              {"format", nf.format}};
        std::vector<std::string> names = {"rate"};
        for (const auto& [name, _] : cols) names.push_back(name);
        write_output(nf.out_path, render_curve(config, nf.units, names, rows, nf.format));
        return 0;
    }

    if (opt_cmd->parsed()) {
        ChannelHandle ch = load_channel(of.channel_path);
        if (!beeid_channel_is_symmetric(ch.ptr)) {
            std::cerr << "error (infeasible): optimal-decoding exponents need a symmetric channel: "
                         "rows and columns must be permutations of one another\n";
            return 3;
        }
        const RateGrid grid = parse_rate_grid(of.rate_grid);
        const auto rates_disp = grid.values();
        const double unit = of.units == "bits" ? kLn2 : 1.0;  // display -> nats

        double p_bsc = -1.0;
        const bool have_p = beeid_channel_bsc_parameter(ch.ptr, &p_bsc) == BEEID_OK;
        std::vector<std::string> names = {"rate", "opt_rc", "opt_ex"};
        if (have_p) {
            names.push_back("tan");
            names.push_back("tan_in_range");
        }
        std::vector<std::vector<double>> rows;
        for (double rd : rates_disp) {
            const double r_nats = rd * unit;
            double rc = 0.0, ex = 0.0;
            check(beeid_opt_rc_exponent(ch.ptr, r_nats, &rc), "opt_rc");
            check(beeid_opt_ex_exponent(ch.ptr, r_nats, sigma_max, sigma_points, &ex), "opt_ex");
            std::vector<double> row = {rd, rc / unit, ex / unit};
            if (have_p) {
                const double r_bits = r_nats / kLn2;
                double tan_bits = 0.0;
                int in_range = 0;
                check(beeid_tan_exponent_bits(r_bits, p_bsc, &tan_bits, &in_range), "tan");
                const double tan_nats = tan_bits * kLn2;
                row.push_back(tan_nats / unit);
                row.push_back(in_range);
            }
            rows.push_back(std::move(row));
        }
        nlohmann::json config{{"command", "exponents-optimal"}, {"channel", of.channel_path},
                              {"rate_grid", of.rate_grid},      {"units", of.units},
                              {"sigma_max", sigma_max},         {"sigma_points", sigma_points},
                              {"format", of.format}};
        write_output(of.out_path, render_curve(config, of.units, names, rows, of.format));
        return 0;
    }

    if (sim_cmd->parsed()) {
        ChannelHandle ch = load_channel(sim_channel);
        beeid_sim_options opts;
        beeid_sim_options_init(&opts);
        opts.joint_decoding = sim_mode == "joint";
        opts.block_length = sim_n;
        opts.num_codewords = sim_m;
        opts.threshold_L = sim_L;
        opts.metric = sim_metric == "ml" ? BEEID_METRIC_ML : BEEID_METRIC_MMI;
        opts.map_decoder = sim_gld == "map";
        opts.iid_codebook = sim_codebook == "iid";
        opts.fresh_codebook = !fixed_codebook;
        opts.exact = sim_exact;
        opts.trials = sim_trials;
        beeid_sim_report report;
        check(beeid_simulate(ch.ptr, nullptr, &opts, sim_seed,
                             trial_log.empty() ? nullptr : trial_log.c_str(), &report),
              "simulate");

        nlohmann::json config{{"command", "simulate"},
                              {"channel", sim_channel},
                              {"mode", sim_mode},
                              {"n", sim_n},
                              {"M", sim_m},
                              {"L", sim_L},
                              {"metric", sim_metric},
                              {"gld", sim_gld},
                              {"codebook", sim_codebook},
                              {"fixed_codebook", fixed_codebook},
                              {"exact", sim_exact},
                              {"trials", sim_trials},
                              {"seed", sim_seed},
                              {"trial_log", trial_log},
                              {"format", sim_format}};
        if (sim_format == "json") {
            nlohmann::json j{{"schema", kSchemaReport},
                             {"config", config},
                             {"trials", report.trials},
                             {"failures", report.failures},
                             {"successes", report.successes},
                             {"p_hat", report.p_hat},
                             {"wilson_ci_95", {report.wilson_lo, report.wilson_hi}},
                             {"seed", report.master_seed},
                             {"exact", report.exact != 0}};
            write_output(sim_out, j.dump(2) + "\n");
        } else {
            std::string out = "# schema: ";
            out += kSchemaReport;
            out += "\n# config: " + config.dump() + "\n";
            out += "trials,failures,successes,p_hat,wilson_lo,wilson_hi,seed,exact\n";
            out += std::to_string(report.trials) + "," + std::to_string(report.failures) + "," +
                   std::to_string(report.successes) + "," + format_double(report.p_hat) + "," +
                   format_double(report.wilson_lo) + "," + format_double(report.wilson_hi) + "," +
                   std::to_string(report.master_seed) + "," + std::to_string(report.exact) + "\n";
            write_output(sim_out, out);
        }
        return 0;
    }

    if (const_cmd->parsed()) {
        ChannelHandle ch = load_channel(const_channel);
        const double disp = to_display(const_units);
        nlohmann::json config{{"command", "constants"},
                              {"channel", const_channel},
                              {"units", const_units},
                              {"format", const_format}};
        nlohmann::json values;
        double p_star = 0.0;
        check(beeid_bsc_critical_p(1e-9, &p_star), "p*");
        values["p_star"] = p_star;
        double p_bsc = -1.0;
        if (beeid_channel_bsc_parameter(ch.ptr, &p_bsc) == BEEID_OK) {
            double rb_nats = 0.0, rt_bits = 0.0;
            check(beeid_bsc_rate_break_nats(p_bsc, &rb_nats), "R*(p)");
            check(beeid_rtrc_bits(p_bsc, &rt_bits), "R_TRC(p)");
            values["p"] = p_bsc;
            values["rate_break_" + const_units] = rb_nats * disp;
            values["rtrc_" + const_units] = (rt_bits * kLn2) * disp;
        }
        double rmax = 0.0;
        check(beeid_rmax_lower_bound(ch.ptr, nullptr, &rmax), "rmax lower bound");
        values["rmax_lower_bound_" + const_units] = rmax * disp;

        if (const_format == "json") {
            nlohmann::json j{{"schema", "beeid-constants/1"}, {"config", config}, {"values", values}};
            write_output(const_out, j.dump(2) + "\n");
        } else {
            std::string out = "# schema: beeid-constants/1\n# config: " + config.dump() + "\n";
            out += "name,value\n";
            for (auto it = values.begin(); it != values.end(); ++it) {
                out += it.key() + "," + format_double(it.value().get<double>()) + "\n";
            }
            write_output(const_out, out);
        }
        return 0;
    }
    return 2;
}
