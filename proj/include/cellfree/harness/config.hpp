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


#ifndef CELLFREE_HARNESS_CONFIG_HPP
#define CELLFREE_HARNESS_CONFIG_HPP

#include "cellfree/channel.hpp"
#include "cellfree/clustering.hpp"
#include "cellfree/pilot.hpp"
#include "cellfree/scenario.hpp"
#include "cellfree/spectral_efficiency.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace cellfree::harness {

using Json = nlohmann::ordered_json;

struct OracleConfig {
    bool enabled = false;
    std::size_t num_samples = 100000;
};

// One swept parameter: a dotted path into the config document and its values.
struct SweepAxis {
    std::string path;
    std::vector<Json> values;
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    LargeScaleModelConfig large_scale;
    PowerConfig powers;
    PowerBudgetMode power_budget_mode = PowerBudgetMode::ignore;
    ClusteringParams clustering;
    FrameConfig frame;
    TransmissionMode transmission_mode = TransmissionMode::mixed;
    SicOrder sic_order = SicOrder::descending_desired;
    std::size_t num_drops = 200;
    OracleConfig oracle;
    std::vector<SweepAxis> sweep;
    std::uint64_t base_seed = 1;

    void validate() const {
        scenario.validate();
        large_scale.validate();
        powers.validate();
        frame.validate();
        clustering.validate(scenario.cpu_positions.size(), scenario.num_aps);
        if (num_drops < 1) throw ConfigError("num_drops must be >= 1");
        if (oracle.enabled && oracle.num_samples < 1) throw ConfigError("oracle.num_samples must be >= 1");
    }
};

namespace detail {

// Reads fields from a JSON object and rejects keys that were never consumed.
class ObjectReader {
public:
    ObjectReader(const Json &obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    }

    template <typename T>
    void get(const char *key, T &out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception &e) {
            throw ConfigError(where_ + "." + key + ": " + e.what());
        }
    }

    const Json *child(const char *key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
        }
    }

private:
    const Json &obj_;
    std::string where_;
    std::set<std::string> seen_;
};

template <typename Parse>
void get_enum(ObjectReader &r, const char *key, Parse parse, auto &out) {
    if (const Json *j = r.child(key)) {
        if (!j->is_string()) throw ConfigError(std::string(key) + ": expected a string");
        out = parse(j->get<std::string>());
    }
}

} // namespace detail

inline Json to_json(const ExperimentConfig &c) {
    Json cpus = Json::array();
    for (const auto &p : c.scenario.cpu_positions) cpus.push_back({p.x, p.y});
    const auto &pl = c.large_scale.pathloss;
    Json sweep = Json::object();
    for (const auto &axis : c.sweep) sweep[axis.path] = axis.values;
    return Json{
        {"scenario",
         {{"area_side", c.scenario.area_side},
          {"num_aps", c.scenario.num_aps},
          {"num_users", c.scenario.num_users},
          {"num_antennas", c.scenario.num_antennas},
          {"cpu_positions", cpus}}},
        {"large_scale",
         {{"shadow_std_db", c.large_scale.shadow_std_db},
          {"shadow_weight", c.large_scale.shadow_weight},
          {"decorrelation_distance_m", c.large_scale.decorrelation_distance_m},
          {"asd_deg", c.large_scale.asd_deg},
          {"antenna_spacing", c.large_scale.antenna_spacing},
          {"bandwidth_hz", c.large_scale.bandwidth_hz},
          {"noise_figure_db", c.large_scale.noise_figure_db},
          {"pathloss",
           {{"d0_m", pl.d0_m},
            {"d1_m", pl.d1_m},
            {"carrier_mhz", pl.carrier_mhz},
            {"ap_height_m", pl.ap_height_m},
            {"ue_height_m", pl.ue_height_m},
            {"near_exponent", pl.near_exponent},
            {"mid_exponent", pl.mid_exponent},
            {"far_exponent", pl.far_exponent}}}}},
        {"powers",
         {{"pilot_power", c.powers.pilot_power},
          {"data_power", c.powers.data_power},
          {"ap_power_budget", c.powers.ap_power_budget},
          {"power_budget_mode", to_string(c.power_budget_mode)}}},
        {"clustering",
         {{"algorithm", to_string(c.clustering.algorithm)},
          {"n_cpu", c.clustering.n_cpu},
          {"lsf_threshold", c.clustering.lsf_threshold},
          {"threshold_mode", to_string(c.clustering.threshold_mode)},
          {"n_ap", c.clustering.n_ap},
          {"power_fraction", c.clustering.power_fraction},
          {"legacy_cluster_size", c.clustering.legacy_cluster_size}}},
        {"frame", {{"tau_c", c.frame.tau_c}, {"tau_p", c.frame.tau_p}}},
        {"transmission_mode", to_string(c.transmission_mode)},
        {"sic_order", to_string(c.sic_order)},
        {"num_drops", c.num_drops},
        {"oracle", {{"enabled", c.oracle.enabled}, {"num_samples", c.oracle.num_samples}}},
        {"sweep", sweep},
        {"base_seed", c.base_seed},
    };
}

// Sets a dotted path (e.g. "clustering.n_cpu") in a full config document.
// The path must already exist so typos are caught.
inline void set_path(Json &doc, const std::string &path, const Json &value) {
    Json *node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("empty sweep path");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!node->is_object() || !node->contains(parts[i]) || parts[i] == "sweep") {
            throw ConfigError("sweep path '" + path + "' does not name a config field");
        }
        node = &(*node)[parts[i]];
    }
    *node = value;
}

// Missing keys keep their defaults; unknown keys are rejected.
inline ExperimentConfig config_from_json(const Json &doc) {
    using detail::ObjectReader;
    ExperimentConfig c;
    ObjectReader root(doc, "config");
    if (const Json *j = root.child("scenario")) {
        ObjectReader r(*j, "scenario");
        r.get("area_side", c.scenario.area_side);
        r.get("num_aps", c.scenario.num_aps);
        r.get("num_users", c.scenario.num_users);
        r.get("num_antennas", c.scenario.num_antennas);
        if (const Json *cpus = r.child("cpu_positions")) {
            if (!cpus->is_array()) throw ConfigError("scenario.cpu_positions: expected an array");
            c.scenario.cpu_positions.clear();
            for (const auto &p : *cpus) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                    throw ConfigError("scenario.cpu_positions: each entry must be [x, y]");
                }
                c.scenario.cpu_positions.push_back({p[0].get<double>(), p[1].get<double>()});
            }
        }
        r.finish();
    }
    if (const Json *j = root.child("large_scale")) {
        ObjectReader r(*j, "large_scale");
        r.get("shadow_std_db", c.large_scale.shadow_std_db);
        r.get("shadow_weight", c.large_scale.shadow_weight);
        r.get("decorrelation_distance_m", c.large_scale.decorrelation_distance_m);
        r.get("asd_deg", c.large_scale.asd_deg);
        r.get("antenna_spacing", c.large_scale.antenna_spacing);
        r.get("bandwidth_hz", c.large_scale.bandwidth_hz);
        r.get("noise_figure_db", c.large_scale.noise_figure_db);
        if (const Json *p = r.child("pathloss")) {
            auto &pl = c.large_scale.pathloss;
            ObjectReader pr(*p, "large_scale.pathloss");
            pr.get("d0_m", pl.d0_m);
            pr.get("d1_m", pl.d1_m);
            pr.get("carrier_mhz", pl.carrier_mhz);
            pr.get("ap_height_m", pl.ap_height_m);
            pr.get("ue_height_m", pl.ue_height_m);
            pr.get("near_exponent", pl.near_exponent);
            pr.get("mid_exponent", pl.mid_exponent);
            pr.get("far_exponent", pl.far_exponent);
            pr.finish();
        }
        r.finish();
    }
    if (const Json *j = root.child("powers")) {
        ObjectReader r(*j, "powers");
        r.get("pilot_power", c.powers.pilot_power);
        r.get("data_power", c.powers.data_power);
        r.get("ap_power_budget", c.powers.ap_power_budget);
        detail::get_enum(r, "power_budget_mode", parse_power_budget_mode, c.power_budget_mode);
        r.finish();
    }
    if (const Json *j = root.child("clustering")) {
        ObjectReader r(*j, "clustering");
        detail::get_enum(r, "algorithm", parse_clustering_algorithm, c.clustering.algorithm);
        r.get("n_cpu", c.clustering.n_cpu);
        r.get("lsf_threshold", c.clustering.lsf_threshold);
        detail::get_enum(r, "threshold_mode", parse_threshold_mode, c.clustering.threshold_mode);
        r.get("n_ap", c.clustering.n_ap);
        r.get("power_fraction", c.clustering.power_fraction);
        r.get("legacy_cluster_size", c.clustering.legacy_cluster_size);
        r.finish();
    }
    if (const Json *j = root.child("frame")) {
        ObjectReader r(*j, "frame");
        r.get("tau_c", c.frame.tau_c);
        r.get("tau_p", c.frame.tau_p);
        r.finish();
    }
    detail::get_enum(root, "transmission_mode", parse_transmission_mode, c.transmission_mode);
    detail::get_enum(root, "sic_order", parse_sic_order, c.sic_order);
    root.get("num_drops", c.num_drops);
    if (const Json *j = root.child("oracle")) {
        ObjectReader r(*j, "oracle");
        r.get("enabled", c.oracle.enabled);
        r.get("num_samples", c.oracle.num_samples);
        r.finish();
    }
    if (const Json *j = root.child("sweep")) {
        if (!j->is_object()) throw ConfigError("sweep: expected an object of path -> value list");
        for (auto it = j->begin(); it != j->end(); ++it) {
            if (!it.value().is_array() || it.value().empty()) {
                throw ConfigError("sweep." + it.key() + ": expected a nonempty array");
            }
            c.sweep.push_back({it.key(), std::vector<Json>(it.value().begin(), it.value().end())});
        }
    }
    root.get("base_seed", c.base_seed);
    root.finish();
    c.validate();
    const Json full = to_json(c);
    for (const auto &axis : c.sweep) {
        Json probe = full;
        set_path(probe, axis.path, axis.values.front());
    }
    return c;
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return config_from_json(doc);
}


} // namespace cellfree::harness

#endif // CELLFREE_HARNESS_CONFIG_HPP
