// SPDX-License-Identifier: Apache-2.0
//
// cellfree: multi-CPU cell-free massive MIMO downlink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef CELLFREE_HARNESS_EXPERIMENT_HPP
#define CELLFREE_HARNESS_EXPERIMENT_HPP

#include "cellfree/harness/config.hpp"
#include "cellfree/oracle.hpp"
#include "cellfree/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

namespace cellfree::harness {

struct DropResult {
    std::size_t drop_index = 0;
    std::uint64_t seed = 0;
    std::vector<double> user_rates;
    double sum_rate = 0.0;
    std::vector<std::size_t> cluster_sizes;
    std::vector<std::size_t> group_counts;
    std::optional<double> oracle_sum_rate;

    friend bool operator==(const DropResult &, const DropResult &) = default;
};

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double p05 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
    double ci95_low = 0.0; // bootstrap percentile interval of the mean
    double ci95_high = 0.0;

    friend bool operator==(const Summary &, const Summary &) = default;
};

struct CdfPoint {
    double value = 0.0;
    double probability = 0.0;
};

struct ExperimentResult {
    Json sweep_key = Json::object();
    ExperimentConfig config;
    std::vector<DropResult> drops;
    Summary summary;
    std::vector<CdfPoint> cdf;
};

// Everything a drop produces before the transmission mode is applied. Modes
// share this stage, so comparisons across modes are paired on identical channels.
struct DropState {
    std::uint64_t seed = 0;
    Deployment deployment;
    ChannelStatistics stats;
    PilotAssignment pilots;
    std::vector<IndexSet> clusters;
};

inline std::uint64_t drop_seed(std::uint64_t base_seed, std::size_t drop_index) {
    return derive_seed(base_seed, drop_index);
}

namespace detail {

template <typename F>
auto stage(std::size_t drop, const char *name, F &&f) -> decltype(f()) {
    const auto context = [&](const std::exception &e) {
        return "drop " + std::to_string(drop) + ", stage " + name + ": " + e.what();
    };
    try {
        return f();
    } catch (const DegenerateLinkError &e) {
        throw DegenerateLinkError(context(e));
    } catch (const NumericalError &e) {
        throw NumericalError(context(e));
    } catch (const ConfigError &e) {
        throw ConfigError(context(e));
    }
}

} // namespace detail

inline DropState prepare_drop(const ExperimentConfig &config, std::size_t drop_index) {
    DropState s;
    s.seed = drop_seed(config.base_seed, drop_index);
    ScenarioConfig scenario = config.scenario;
    scenario.seed = s.seed;
    s.deployment = detail::stage(drop_index, "deployment", [&] { return generate_deployment(scenario); });
    s.stats = detail::stage(drop_index, "channel", [&] {
        Rng rng = make_rng(s.seed, Stream::shadowing);
        return channel_stats(s.deployment, config.large_scale, rng);
    });
    s.pilots = detail::stage(drop_index, "pilot", [&] {
        Rng rng = make_rng(s.seed, Stream::pilots);
        return assign_pilots(scenario.num_users, config.frame.tau_p, rng);
    });
    s.clusters = detail::stage(drop_index, "clustering", [&] {
        return form_clusters(s.stats.beta, s.deployment.cpu_map, config.clustering, s.stats.noise_power);
    });
    return s;
}

struct ModeEvaluation {
    ServingStructure serving;
    LinkPowers powers;
    SETerms terms;
    RateResult rates;
};

inline ModeEvaluation evaluate_mode(const ExperimentConfig &config, const DropState &state, TransmissionMode mode,
                                    std::size_t drop_index = 0) {
    ModeEvaluation ev;
    ev.serving = build_serving(state.clusters, state.deployment.ap_cpu, mode);
    ev.powers = LinkPowers::uniform(state.stats.num_aps, state.stats.num_users, config.powers);
    detail::stage(drop_index, "power", [&] {
        apply_power_budget(ev.powers, ev.serving, config.powers.ap_power_budget, config.power_budget_mode);
        return 0;
    });
    const EstimationModel model(state.stats, state.pilots, ev.powers.pilot);
    ev.terms = detail::stage(drop_index, "terms", [&] { return compute_terms(ev.serving, model, ev.powers, config.sic_order); });
    ev.rates = detail::stage(drop_index, "rates",
                             [&] { return user_rates(ev.terms, config.frame, state.stats.noise_power); });
    return ev;
}

inline DropResult run_drop(const ExperimentConfig &config, std::size_t drop_index) {
    const DropState state = prepare_drop(config, drop_index);
    const ModeEvaluation ev = evaluate_mode(config, state, config.transmission_mode, drop_index);
    DropResult r;
    r.drop_index = drop_index;
    r.seed = state.seed;
    r.user_rates = ev.rates.user_rate;
    r.sum_rate = ev.rates.sum_rate;
    for (std::size_t k = 0; k < state.clusters.size(); ++k) {
        r.cluster_sizes.push_back(ev.serving.clusters[k].size());
        r.group_counts.push_back(ev.serving.groups[k].size());
    }
    if (config.oracle.enabled) {
        r.oracle_sum_rate = detail::stage(drop_index, "oracle", [&] {
            const EstimationModel model(state.stats, state.pilots, ev.powers.pilot);
            Rng rng = make_rng(state.seed, Stream::oracle);
            const auto est = mc_oracle(ev.serving, model, ev.powers, ev.terms.decode_order,
                                       OracleOptions{config.oracle.num_samples, true}, rng);
            double total = 0.0;
            for (const auto &user : est.sinr) {
                for (double g : user) total += config.frame.prelog() * std::log2(1.0 + std::max(g, 0.0));
            }
            return total;
        });
    }
    return r;
}

// Runs fn(0..n-1) on up to `jobs` threads. Results must be written to
// index-addressed storage; the exception of the lowest failing index is rethrown.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)> &fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<std::exception_ptr> errors(n);
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto &t : workers) t.join();
    }
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// Linear-interpolated percentile of sorted data, q in [0, 1].
inline double percentile(const std::vector<double> &sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline std::pair<double, double> bootstrap_mean_ci(const std::vector<double> &values, std::uint64_t seed,
                                                   std::size_t resamples = 2000, double level = 0.95) {
    if (values.empty()) return {0.0, 0.0};
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> means(resamples);
    for (auto &mean : means) {
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) acc += values[pick(rng)];
        mean = acc / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    const double tail = (1.0 - level) / 2.0;
    return {percentile(means, tail), percentile(means, 1.0 - tail)};
}

inline Summary summarize(const std::vector<double> &values, std::uint64_t bootstrap_seed) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.min = sorted.front();
    s.max = sorted.back();
    s.p05 = percentile(sorted, 0.05);
    s.p50 = percentile(sorted, 0.50);
    s.p95 = percentile(sorted, 0.95);
    std::tie(s.ci95_low, s.ci95_high) = bootstrap_mean_ci(sorted, bootstrap_seed);
    return s;
}

// Right-continuous empirical CDF: one point per sample, probability i / n.
inline std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<CdfPoint> cdf;
    cdf.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        cdf.push_back({values[i], static_cast<double>(i + 1) / static_cast<double>(values.size())});
    }
    return cdf;
}

// Cartesian product of the sweep axes, first axis varying slowest.
inline std::vector<std::pair<Json, ExperimentConfig>> expand_sweep(const ExperimentConfig &config) {
    std::vector<std::pair<Json, ExperimentConfig>> points;
    ExperimentConfig base = config;
    base.sweep.clear();
    if (config.sweep.empty()) {
        points.emplace_back(Json::object(), base);
        return points;
    }
    const Json base_doc = to_json(base);
    std::vector<std::size_t> idx(config.sweep.size(), 0);
    while (true) {
        Json doc = base_doc;
        Json key = Json::object();
        for (std::size_t a = 0; a < config.sweep.size(); ++a) {
            const auto &axis = config.sweep[a];
            set_path(doc, axis.path, axis.values[idx[a]]);
            key[axis.path] = axis.values[idx[a]];
        }
        points.emplace_back(key, config_from_json(doc));
        std::size_t a = config.sweep.size();
        while (a > 0) {
            --a;
            if (++idx[a] < config.sweep[a].values.size()) break;
            idx[a] = 0;
            if (a == 0) return points;
        }
    }
}

// One ExperimentResult per sweep point (a single point when no sweep is set).
inline std::vector<ExperimentResult> run_experiment(const ExperimentConfig &config, std::size_t jobs = 1) {
    config.validate();
    const auto points = expand_sweep(config);
    std::vector<ExperimentResult> results(points.size());
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t p = 0; p < points.size(); ++p) {
        results[p].sweep_key = points[p].first;
        results[p].config = points[p].second;
        results[p].drops.resize(points[p].second.num_drops);
        for (std::size_t d = 0; d < points[p].second.num_drops; ++d) tasks.emplace_back(p, d);
    }
    parallel_for(tasks.size(), jobs, [&](std::size_t t) {
        const auto [p, d] = tasks[t];
        results[p].drops[d] = run_drop(results[p].config, d);
    });
    for (std::size_t p = 0; p < results.size(); ++p) {
        std::vector<double> totals;
        for (const auto &d : results[p].drops) totals.push_back(d.sum_rate);
        results[p].summary = summarize(totals, derive_seed(config.base_seed, 0xB0075742ULL + p));
        results[p].cdf = empirical_cdf(totals);
    }
    return results;
}

} // namespace cellfree::harness

#endif // CELLFREE_HARNESS_EXPERIMENT_HPP
