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

#ifndef CELLFREE_HARNESS_PRESETS_HPP
#define CELLFREE_HARNESS_PRESETS_HPP

#include "cellfree/harness/experiment.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace cellfree::harness {

inline SweepAxis mode_axis() {
    return {"transmission_mode", {Json("coherent"), Json("mixed"), Json("non_coherent")}};
}

// M = 100, K = 20, N = 2, 20 strongest APs per user; all three modes.
inline ExperimentConfig preset_mode_cdf(const ExperimentConfig &base = {}) {
    ExperimentConfig c = base;
    c.scenario.num_aps = 100;
    c.scenario.num_users = 20;
    c.scenario.num_antennas = 2;
    c.clustering.algorithm = ClusteringAlgorithm::legacy_largest_lsf;
    c.clustering.legacy_cluster_size = 20;
    c.sweep = {mode_axis()};
    return c;
}

// Same network, sum rate against the legacy cluster size.
inline ExperimentConfig preset_cluster_size(const ExperimentConfig &base = {}) {
    ExperimentConfig c = preset_mode_cdf(base);
    c.sweep = {{"clustering.legacy_cluster_size",
                {Json(1), Json(2), Json(4), Json(8), Json(12), Json(16), Json(20), Json(30), Json(40), Json(60)}},
               mode_axis()};
    return c;
}

struct AlgorithmStudy {
    std::string name;  // output subdirectory
    std::string param; // dotted path of the algorithm's own parameter
    ExperimentConfig config;
};

// K = 20, N = 2, varying M; one grid over (n_cpu, parameter, mode) per multi-CPU algorithm.
inline std::vector<AlgorithmStudy> preset_algorithm_studies(const ExperimentConfig &base = {}) {
    ExperimentConfig c = base;
    c.scenario.num_users = 20;
    c.scenario.num_antennas = 2;
    const SweepAxis aps{"scenario.num_aps", {Json(40), Json(60), Json(80), Json(100)}};
    const SweepAxis cpus{"clustering.n_cpu", {Json(1), Json(2), Json(4)}};

    std::vector<AlgorithmStudy> out;
    auto add = [&](std::string name, ClusteringAlgorithm algorithm, std::string param, std::vector<Json> values) {
        ExperimentConfig s = c;
        s.clustering.algorithm = algorithm;
        s.clustering.threshold_mode = ThresholdMode::over_noise;
        s.sweep = {aps, cpus, {param, std::move(values)}, mode_axis()};
        out.push_back({std::move(name), std::move(param), std::move(s)});
    };
    add("power", ClusteringAlgorithm::power_fraction, "clustering.power_fraction",
        {Json(0.85), Json(0.90), Json(0.95)});
    add("fixed", ClusteringAlgorithm::fixed_aps, "clustering.n_ap", {Json(5), Json(10), Json(15)});
    add("lsf", ClusteringAlgorithm::lsf_threshold, "clustering.lsf_threshold",
        {Json(23.5), Json(64.36), Json(266.06)});
    return out;
}

struct BestPoint {
    std::string algorithm;
    std::string mode;
    Json num_aps;
    Json n_cpu;
    std::string param;
    Json param_value;
    double mean_sum_rate = 0.0;
};

// For every (num_aps, mode), the (n_cpu, parameter) pair with the highest mean sum rate.
inline std::vector<BestPoint> best_per_mode(const AlgorithmStudy &study, const std::vector<ExperimentResult> &results) {
    std::vector<BestPoint> best;
    for (const auto &r : results) {
        const auto &key = r.sweep_key;
        const std::string mode = key.at("transmission_mode").get<std::string>();
        auto it = std::find_if(best.begin(), best.end(), [&](const BestPoint &b) {
            return b.mode == mode && b.num_aps == key.at("scenario.num_aps");
        });
        if (it == best.end()) {
            best.push_back({study.name, mode, key.at("scenario.num_aps"), key.at("clustering.n_cpu"), study.param,
                            key.at(study.param), r.summary.mean});
        } else if (r.summary.mean > it->mean_sum_rate) {
            it->n_cpu = key.at("clustering.n_cpu");
            it->param_value = key.at(study.param);
            it->mean_sum_rate = r.summary.mean;
        }
    }
    return best;
}

} // namespace cellfree::harness

#endif // CELLFREE_HARNESS_PRESETS_HPP
