// SPDX-License-Identifier: Apache-2.0
//
// cellfree_sim: command-line front end for the experiment harness.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime or numerical error.

#include <cellfree/cellfree.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

using namespace cellfree;
using namespace cellfree::harness;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> drops;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string format = "both";
    bool quiet = false;
};

ExperimentConfig load_base(const CommonOptions &o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (o.seed) c.base_seed = *o.seed;
    if (o.drops) c.num_drops = *o.drops;
    c.validate();
    return c;
}

void print_summary(const std::vector<ExperimentResult> &results) {
    for (const auto &r : results) {
        const auto &s = r.summary;
        std::printf("%-60s mean %.4f  [%.4f, %.4f]  p05 %.4f  p50 %.4f  p95 %.4f  (%zu drops)\n",
                    r.sweep_key.empty() ? "(single point)" : r.sweep_key.dump().c_str(), s.mean, s.ci95_low,
                    s.ci95_high, s.p05, s.p50, s.p95, s.count);
    }
}

void run_and_emit(const ExperimentConfig &config, const fs::path &dir, const CommonOptions &o) {
    const auto results = run_experiment(config, o.jobs);
    const auto written = emit_results(config, results, dir, parse_output_format(o.format));
    if (!o.quiet) {
        print_summary(results);
        for (const auto &p : written) std::printf("wrote %s\n", p.string().c_str());
    }
}

int cmd_run(const CommonOptions &o) {
    ExperimentConfig c = load_base(o);
    if (!c.sweep.empty()) throw ConfigError("config defines a sweep; use the 'sweep' subcommand");
    run_and_emit(c, o.out_dir, o);
    return 0;
}

int cmd_sweep(const CommonOptions &o) {
    ExperimentConfig c = load_base(o);
    if (c.sweep.empty()) throw ConfigError("config defines no sweep axes");
    run_and_emit(c, o.out_dir, o);
    return 0;
}

int cmd_fig1(const CommonOptions &o) {
    run_and_emit(preset_mode_cdf(load_base(o)), o.out_dir, o);
    return 0;
}

int cmd_fig2(const CommonOptions &o) {
    run_and_emit(preset_cluster_size(load_base(o)), o.out_dir, o);
    return 0;
}

int cmd_fig3_6(const CommonOptions &o) {
    const auto studies = preset_algorithm_studies(load_base(o));
    std::ostringstream best;
    best << "algorithm,transmission_mode,num_aps,n_cpu,parameter,value,mean_sum_rate\n";
    for (const auto &study : studies) {
        if (!o.quiet) std::printf("== %s\n", study.name.c_str());
        const auto results = run_experiment(study.config, o.jobs);
        emit_results(study.config, results, fs::path(o.out_dir) / study.name, parse_output_format(o.format));
        if (!o.quiet) print_summary(results);
        for (const auto &b : best_per_mode(study, results)) {
            best << b.algorithm << ',' << b.mode << ',' << b.num_aps.dump() << ',' << b.n_cpu.dump() << ','
                 << b.param << ',' << csv_cell(b.param_value) << ',' << format_number(b.mean_sum_rate) << '\n';
        }
    }
    write_file(fs::path(o.out_dir) / "best.csv", best.str());
    if (!o.quiet) std::printf("wrote %s\n", (fs::path(o.out_dir) / "best.csv").string().c_str());
    return 0;
}

// Closed form against the Monte Carlo oracle on the first `drops` drops of the config.
int cmd_validate(const CommonOptions &o, double rel_tol, double sigmas) {
    ExperimentConfig c = load_base(o);
    if (!o.drops) c.num_drops = 3;
    const std::size_t samples = c.oracle.num_samples;

    struct Row {
        std::size_t drop, user, group;
        std::string term;
        double closed, oracle, se;
        bool ok;
    };
    std::vector<std::vector<Row>> rows(c.num_drops);
    parallel_for(c.num_drops, o.jobs, [&](std::size_t d) {
        const auto state = prepare_drop(c, d);
        const auto ev = evaluate_mode(c, state, c.transmission_mode, d);
        const EstimationModel model(state.stats, state.pilots, ev.powers.pilot);
        Rng rng = make_rng(state.seed, Stream::oracle);
        const auto est = mc_oracle(ev.serving, model, ev.powers, ev.terms.decode_order, OracleOptions{samples, true}, rng);
        auto add = [&](std::size_t k, std::size_t g, const char *term, double closed, double oracle, double se) {
            const bool ok = std::abs(closed - oracle) <= std::max(rel_tol * std::abs(closed), sigmas * se);
            rows[d].push_back({d, k, g, term, closed, oracle, se, ok});
        };
        for (std::size_t k = 0; k < ev.terms.num_users(); ++k) {
            add(k, 0, "E", ev.terms.total_power[k], est.total_power[k], est.total_power_se[k]);
            add(k, 0, "F", ev.terms.contamination[k], est.contamination[k], est.contamination_se[k]);
            for (std::size_t g = 0; g < ev.terms.desired[k].size(); ++g) {
                add(k, g, "D", ev.terms.desired[k][g], est.desired[k][g], est.desired_se[k][g]);
                add(k, g, "sinr", ev.rates.sinr[k][g], est.sinr[k][g], est.sinr_se[k][g]);
            }
        }
    });

    std::ostringstream csv;
    csv << "drop,user,group,term,closed_form,oracle,oracle_se,within_tolerance\n";
    std::size_t total = 0, bad = 0;
    for (const auto &drop : rows) {
        for (const auto &r : drop) {
            csv << r.drop << ',' << r.user << ',' << r.group << ',' << r.term << ',' << format_number(r.closed) << ','
                << format_number(r.oracle) << ',' << format_number(r.se) << ',' << (r.ok ? 1 : 0) << '\n';
            ++total;
            if (!r.ok) ++bad;
        }
    }
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) throw OutputError("cannot create output directory '" + o.out_dir + "': " + ec.message());
    write_file(fs::path(o.out_dir) / "validate.csv", csv.str());
    std::printf("%zu of %zu terms within max(%.3g relative, %.3g SE) over %zu drops x %zu samples\n", total - bad,
                total, rel_tol, sigmas, c.num_drops, samples);
    return bad == 0 ? 0 : 2;
}

int cmd_print_config(const CommonOptions &o) {
    std::cout << to_json(load_base(o)).dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Cell-free massive MIMO downlink simulator with multi-CPU clustering"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonOptions o;
    double rel_tol = 0.02;
    double sigmas = 3.0;

    auto add_common = [&](CLI::App *sub, bool with_out = true) {
        sub->add_option("--config", o.config_path, "JSON config file (defaults used when omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "base seed override");
        sub->add_option("--drops", o.drops, "number of drops override")->check(CLI::PositiveNumber);
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        if (with_out) {
            sub->add_option("--out", o.out_dir, "output directory");
            sub->add_option("--format", o.format, "csv, json or both")
                ->check(CLI::IsMember({"csv", "json", "both"}));
            sub->add_flag("-q,--quiet", o.quiet, "suppress the summary table");
        }
    };

    auto *run = app.add_subcommand("run", "single experiment");
    auto *sweep = app.add_subcommand("sweep", "parameter grid from the config's sweep section");
    auto *validate = app.add_subcommand("validate", "closed-form terms against the Monte Carlo oracle");
    auto *fig1 = app.add_subcommand("fig1", "sum-rate CDF for the three transmission modes");
    auto *fig2 = app.add_subcommand("fig2", "sum rate against the legacy cluster size");
    auto *fig36 = app.add_subcommand("fig3-6", "multi-CPU clustering algorithms against the number of APs");
    auto *print = app.add_subcommand("print-config", "print the effective config as JSON");
    for (auto *s : {run, sweep, validate, fig1, fig2, fig36}) add_common(s);
    add_common(print, false);
    validate->add_option("--rel-tol", rel_tol, "relative tolerance")->check(CLI::PositiveNumber);
    validate->add_option("--sigmas", sigmas, "tolerance in oracle standard errors")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(o);
        if (*sweep) return cmd_sweep(o);
        if (*validate) return cmd_validate(o, rel_tol, sigmas);
        if (*fig1) return cmd_fig1(o);
        if (*fig2) return cmd_fig2(o);
        if (*fig36) return cmd_fig3_6(o);
        if (*print) return cmd_print_config(o);
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
