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


#ifndef CELLFREE_CLUSTERING_HPP
#define CELLFREE_CLUSTERING_HPP

#include "cellfree/scenario.hpp"
#include "cellfree/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cellfree {

using BetaColumn = std::span<const double>;

enum class ClusteringAlgorithm { legacy_largest_lsf, lsf_threshold, fixed_aps, power_fraction };
enum class ThresholdMode { raw_linear, over_noise };
enum class TransmissionMode { coherent, non_coherent, mixed };

inline std::string to_string(ClusteringAlgorithm a) {
    switch (a) {
    case ClusteringAlgorithm::legacy_largest_lsf: return "legacy_largest_lsf";
    case ClusteringAlgorithm::lsf_threshold: return "lsf_threshold";
    case ClusteringAlgorithm::fixed_aps: return "fixed";
    case ClusteringAlgorithm::power_fraction: return "power";
    }
    return "?";
}

inline ClusteringAlgorithm parse_clustering_algorithm(std::string_view s) {
    if (s == "legacy_largest_lsf" || s == "legacy") return ClusteringAlgorithm::legacy_largest_lsf;
    if (s == "lsf_threshold" || s == "lsf") return ClusteringAlgorithm::lsf_threshold;
    if (s == "fixed" || s == "fixed_aps") return ClusteringAlgorithm::fixed_aps;
    if (s == "power" || s == "power_fraction") return ClusteringAlgorithm::power_fraction;
    throw ConfigError("unknown clustering algorithm '" + std::string(s) + "'");
}

inline std::string to_string(ThresholdMode m) {
    return m == ThresholdMode::raw_linear ? "raw_linear" : "over_noise";
}

inline ThresholdMode parse_threshold_mode(std::string_view s) {
    if (s == "raw_linear") return ThresholdMode::raw_linear;
    if (s == "over_noise") return ThresholdMode::over_noise;
    throw ConfigError("unknown threshold_mode '" + std::string(s) + "'");
}

inline std::string to_string(TransmissionMode m) {
    switch (m) {
    case TransmissionMode::coherent: return "coherent";
    case TransmissionMode::non_coherent: return "non_coherent";
    case TransmissionMode::mixed: return "mixed";
    }
    return "?";
}

inline TransmissionMode parse_transmission_mode(std::string_view s) {
    if (s == "coherent") return TransmissionMode::coherent;
    if (s == "non_coherent" || s == "noncoherent") return TransmissionMode::non_coherent;
    if (s == "mixed") return TransmissionMode::mixed;
    throw ConfigError("unknown transmission_mode '" + std::string(s) + "'");
}

struct ClusteringParams {
    ClusteringAlgorithm algorithm = ClusteringAlgorithm::legacy_largest_lsf;
    std::size_t n_cpu = 1;
    double lsf_threshold = 23.5; // Delta, interpreted per threshold_mode
    ThresholdMode threshold_mode = ThresholdMode::over_noise;
    std::size_t n_ap = 5;
    double power_fraction = 0.95; // delta
    std::size_t legacy_cluster_size = 20;

    void validate(std::size_t num_cpus, std::size_t num_aps) const {
        if (n_cpu < 1 || n_cpu > num_cpus) throw ConfigError("clustering.n_cpu must lie in [1, Q]");
        if (!(power_fraction > 0.0 && power_fraction <= 1.0)) {
            throw ConfigError("clustering.power_fraction must lie in (0, 1]");
        }
        if (n_ap < 1) throw ConfigError("clustering.n_ap must be >= 1");
        if (algorithm == ClusteringAlgorithm::legacy_largest_lsf &&
            (legacy_cluster_size < 1 || legacy_cluster_size > num_aps)) {
            throw ConfigError("clustering.legacy_cluster_size must lie in [1, M]");
        }
        if (!(lsf_threshold >= 0.0)) throw ConfigError("clustering.lsf_threshold must be >= 0");
    }
};

namespace detail {

// Indices sorted by beta descending, ties by lower index.
inline std::vector<std::size_t> rank_by_lsf(BetaColumn beta, IndexSet candidates) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return beta[a] > beta[b]; });
    return candidates;
}

inline IndexSet sorted(IndexSet s) {
    std::sort(s.begin(), s.end());
    return s;
}

inline IndexSet all_indices(std::size_t n) {
    IndexSet s(n);
    std::iota(s.begin(), s.end(), std::size_t{0});
    return s;
}

inline IndexSet best_of(BetaColumn beta, const IndexSet &candidates) {
    return {rank_by_lsf(beta, candidates).front()};
}

inline IndexSet threshold_select(BetaColumn beta, const IndexSet &candidates, double threshold) {
    IndexSet out;
    for (auto m : candidates) {
        if (beta[m] >= threshold) out.push_back(m);
    }
    return out.empty() ? best_of(beta, candidates) : out;
}

inline IndexSet top_n(BetaColumn beta, const IndexSet &candidates, std::size_t n) {
    auto ranked = rank_by_lsf(beta, candidates);
    ranked.resize(std::min(n, ranked.size()));
    return sorted(std::move(ranked));
}

inline IndexSet power_prefix(BetaColumn beta, const IndexSet &candidates, double fraction) {
    const auto ranked = rank_by_lsf(beta, candidates);
    double total = 0.0;
    for (auto m : ranked) total += beta[m];
    const double target = fraction * total;
    IndexSet out;
    double acc = 0.0;
    for (auto m : ranked) {
        out.push_back(m);
        acc += beta[m];
        if (acc >= target) break;
    }
    return sorted(std::move(out));
}

} // namespace detail

// CPUs ordered by the LSF of their best AP for this user, descending; ties by lower CPU index.
// CPUs that happen to control no AP in this drop are left out.
inline std::vector<std::size_t> order_cpus(BetaColumn beta, const std::vector<IndexSet> &cpu_map) {
    std::vector<double> best(cpu_map.size(), -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> order;
    for (std::size_t q = 0; q < cpu_map.size(); ++q) {
        if (cpu_map[q].empty()) continue;
        for (auto m : cpu_map[q]) best[q] = std::max(best[q], beta[m]);
        order.push_back(q);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return best[a] > best[b]; });
    return order;
}

// Union of V_q over the n_cpu best CPUs.
inline IndexSet candidate_aps(BetaColumn beta, const std::vector<IndexSet> &cpu_map, std::size_t n_cpu) {
    const auto order = order_cpus(beta, cpu_map);
    IndexSet out;
    for (std::size_t i = 0; i < std::min(n_cpu, order.size()); ++i) {
        const auto &v = cpu_map[order[i]];
        out.insert(out.end(), v.begin(), v.end());
    }
    return detail::sorted(std::move(out));
}

inline IndexSet cluster_legacy_largest_lsf(BetaColumn beta, std::size_t cluster_size) {
    if (cluster_size < 1 || cluster_size > beta.size()) {
        throw ConfigError("legacy cluster size must lie in [1, M]");
    }
    return detail::top_n(beta, detail::all_indices(beta.size()), cluster_size);
}

// Single-pool threshold scheme: every AP with beta >= threshold, best AP if none qualifies.
inline IndexSet cluster_legacy_threshold(BetaColumn beta, double threshold) {
    IndexSet out;
    for (std::size_t m = 0; m < beta.size(); ++m) {
        if (beta[m] >= threshold) out.push_back(m);
    }
    if (out.empty()) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < beta.size(); ++m) {
            if (beta[m] > beta[best]) best = m;
        }
        out.push_back(best);
    }
    return out;
}

// Single-pool received-power fraction scheme.
inline IndexSet cluster_legacy_power(BetaColumn beta, double fraction) {
    return detail::power_prefix(beta, detail::all_indices(beta.size()), fraction);
}

inline IndexSet cluster_lsf_threshold(BetaColumn beta, const std::vector<IndexSet> &cpu_map, std::size_t n_cpu,
                                      double threshold) {
    return detail::threshold_select(beta, candidate_aps(beta, cpu_map, n_cpu), threshold);
}

inline IndexSet cluster_fixed(BetaColumn beta, const std::vector<IndexSet> &cpu_map, std::size_t n_cpu,
                              std::size_t n_ap) {
    return detail::top_n(beta, candidate_aps(beta, cpu_map, n_cpu), n_ap);
}

inline IndexSet cluster_power(BetaColumn beta, const std::vector<IndexSet> &cpu_map, std::size_t n_cpu,
                              double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("power fraction must lie in (0, 1]");
    return detail::power_prefix(beta, candidate_aps(beta, cpu_map, n_cpu), fraction);
}

// Clusters for all users. In over_noise mode the LSF threshold is compared against beta / sigma^2.
inline std::vector<IndexSet> form_clusters(const RMatrix &beta, const std::vector<IndexSet> &cpu_map,
                                           const ClusteringParams &params, double noise_power) {
    params.validate(cpu_map.size(), static_cast<std::size_t>(beta.rows()));
    const double threshold =
        params.threshold_mode == ThresholdMode::over_noise ? params.lsf_threshold * noise_power : params.lsf_threshold;
    std::vector<IndexSet> clusters(static_cast<std::size_t>(beta.cols()));
    for (Eigen::Index k = 0; k < beta.cols(); ++k) {
        const BetaColumn col(beta.col(k).data(), static_cast<std::size_t>(beta.rows()));
        auto &out = clusters[static_cast<std::size_t>(k)];
        switch (params.algorithm) {
        case ClusteringAlgorithm::legacy_largest_lsf:
            out = cluster_legacy_largest_lsf(col, params.legacy_cluster_size);
            break;
        case ClusteringAlgorithm::lsf_threshold:
            out = cluster_lsf_threshold(col, cpu_map, params.n_cpu, threshold);
            break;
        case ClusteringAlgorithm::fixed_aps:
            out = cluster_fixed(col, cpu_map, params.n_cpu, params.n_ap);
            break;
        case ClusteringAlgorithm::power_fraction:
            out = cluster_power(col, cpu_map, params.n_cpu, params.power_fraction);
            break;
        }
    }
    return clusters;
}

inline constexpr std::size_t kAnyCpu = std::numeric_limits<std::size_t>::max();

struct CoherentGroup {
    std::size_t cpu = kAnyCpu; // kAnyCpu when the group spans CPUs (ideal coherent mode)
    IndexSet aps;

    friend bool operator==(const CoherentGroup &, const CoherentGroup &) = default;
};

// Partition of a cluster into per-CPU groups A_k^c = A_k ∩ V_q, ordered by CPU index.
inline std::vector<CoherentGroup> coherent_groups(const IndexSet &cluster, const std::vector<std::size_t> &ap_cpu) {
    std::vector<CoherentGroup> groups;
    for (auto m : detail::sorted(cluster)) {
        const auto q = ap_cpu.at(m);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const CoherentGroup &g) { return g.cpu == q; });
        if (it == groups.end()) {
            groups.push_back({q, {m}});
        } else {
            it->aps.push_back(m);
        }
    }
    std::sort(groups.begin(), groups.end(), [](const auto &a, const auto &b) { return a.cpu < b.cpu; });
    return groups;
}

inline std::vector<CoherentGroup> groups_for_mode(const IndexSet &cluster, const std::vector<std::size_t> &ap_cpu,
                                                  TransmissionMode mode) {
    switch (mode) {
    case TransmissionMode::coherent:
        return {{kAnyCpu, detail::sorted(cluster)}};
    case TransmissionMode::non_coherent: {
        std::vector<CoherentGroup> groups;
        for (auto m : detail::sorted(cluster)) groups.push_back({ap_cpu.at(m), {m}});
        return groups;
    }
    case TransmissionMode::mixed:
        return coherent_groups(cluster, ap_cpu);
    }
    return {};
}

// U_m = {k : m in A_k}
inline std::vector<IndexSet> served_users(const std::vector<IndexSet> &clusters, std::size_t num_aps) {
    std::vector<IndexSet> served(num_aps);
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        for (auto m : clusters[k]) served.at(m).push_back(k);
    }
    return served;
}

struct ServingStructure {
    std::vector<IndexSet> clusters;                 // A_k
    std::vector<std::vector<CoherentGroup>> groups; // A_k^c, c in C_k
    std::vector<IndexSet> served;                   // U_m

    std::size_t num_users() const { return clusters.size(); }
};

inline ServingStructure make_serving(std::vector<IndexSet> clusters, std::vector<std::vector<CoherentGroup>> groups,
                                     std::size_t num_aps) {
    if (clusters.size() != groups.size()) throw ConfigError("serving structure: user count mismatch");
    ServingStructure s;
    s.served = served_users(clusters, num_aps);
    s.clusters = std::move(clusters);
    s.groups = std::move(groups);
    return s;
}

inline ServingStructure build_serving(const std::vector<IndexSet> &clusters, const std::vector<std::size_t> &ap_cpu,
                                      TransmissionMode mode) {
    std::vector<std::vector<CoherentGroup>> groups;
    groups.reserve(clusters.size());
    for (const auto &c : clusters) {
        if (c.empty()) throw ConfigError("every user needs a nonempty cluster");
        groups.push_back(groups_for_mode(c, ap_cpu, mode));
    }
    return make_serving(clusters, std::move(groups), ap_cpu.size());
}

} // namespace cellfree

#endif // CELLFREE_CLUSTERING_HPP
