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


#ifndef CELLFREE_SCENARIO_HPP
#define CELLFREE_SCENARIO_HPP

#include "cellfree/random.hpp"
#include "cellfree/types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace cellfree {

inline std::vector<Point> default_cpu_positions() {
    return {{250.0, 250.0}, {250.0, -250.0}, {-250.0, -250.0}, {-250.0, 250.0}};
}

struct ScenarioConfig {
    double area_side = 1000.0; // meters, square centered at the origin
    std::size_t num_aps = 100;
    std::size_t num_users = 20;
    std::size_t num_antennas = 2;
    std::vector<Point> cpu_positions = default_cpu_positions();
    std::uint64_t seed = 0;

    void validate() const {
        if (!(area_side > 0.0) || !std::isfinite(area_side)) {
            throw ConfigError("scenario.area_side must be positive");
        }
        if (num_aps < 1) throw ConfigError("scenario.num_aps must be >= 1");
        if (num_users < 1) throw ConfigError("scenario.num_users must be >= 1");
        if (num_antennas < 1) throw ConfigError("scenario.num_antennas must be >= 1");
        if (cpu_positions.empty()) throw ConfigError("scenario.cpu_positions must list at least one CPU");
    }
};

struct Deployment {
    double area_side = 1000.0;
    std::size_t num_antennas = 1;
    std::vector<Point> aps;
    std::vector<Point> ues;
    std::vector<Point> cpus;
    // cpu_map[q] = V_q, the APs controlled by CPU q (sorted). Partition of {0..M-1}.
    std::vector<IndexSet> cpu_map;
    // ap_cpu[m] = q such that m in V_q.
    std::vector<std::size_t> ap_cpu;

    std::size_t num_aps() const { return aps.size(); }
    std::size_t num_users() const { return ues.size(); }
    std::size_t num_cpus() const { return cpus.size(); }

    friend bool operator==(const Deployment &, const Deployment &) = default;
};

// Displacement from `from` to the closest of the 9 translated copies of `to`
// on a torus of side `side`.
inline Point wrap_displacement(Point from, Point to, double side) {
    Point best{to.x - from.x, to.y - from.y};
    double best_sq = best.x * best.x + best.y * best.y;
    for (int ox = -1; ox <= 1; ++ox) {
        for (int oy = -1; oy <= 1; ++oy) {
            const Point d{to.x + ox * side - from.x, to.y + oy * side - from.y};
            const double sq = d.x * d.x + d.y * d.y;
            if (sq < best_sq) {
                best_sq = sq;
                best = d;
            }
        }
    }
    return best;
}

inline double wrap_distance(Point a, Point b, double side) {
    const Point d = wrap_displacement(a, b, side);
    return std::hypot(d.x, d.y);
}

// Closest CPU under wrap-around; ties go to the lowest CPU index.
inline std::vector<IndexSet> assign_aps_to_cpus(const std::vector<Point> &aps,
                                                const std::vector<Point> &cpus, double side,
                                                std::vector<std::size_t> *ap_cpu = nullptr) {
    std::vector<IndexSet> cpu_map(cpus.size());
    if (ap_cpu) ap_cpu->assign(aps.size(), 0);
    for (std::size_t m = 0; m < aps.size(); ++m) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < cpus.size(); ++q) {
            const double d = wrap_distance(aps[m], cpus[q], side);
            if (d < best_d) {
                best_d = d;
                best = q;
            }
        }
        cpu_map[best].push_back(m);
        if (ap_cpu) (*ap_cpu)[m] = best;
    }
    return cpu_map;
}

inline Deployment make_deployment(double side, std::size_t num_antennas, std::vector<Point> aps,
                                  std::vector<Point> ues, std::vector<Point> cpus) {
    Deployment dep;
    dep.area_side = side;
    dep.num_antennas = num_antennas;
    dep.aps = std::move(aps);
    dep.ues = std::move(ues);
    dep.cpus = std::move(cpus);
    dep.cpu_map = assign_aps_to_cpus(dep.aps, dep.cpus, side, &dep.ap_cpu);
    return dep;
}

inline Deployment generate_deployment(const ScenarioConfig &config) {
    config.validate();
    Rng rng = make_rng(config.seed, Stream::deployment);
    const double half = config.area_side / 2.0;
    std::uniform_real_distribution<double> coord(-half, half);
    auto draw = [&](std::size_t count) {
        std::vector<Point> pts(count);
        for (auto &p : pts) {
            p.x = coord(rng);
            p.y = coord(rng);
        }
        return pts;
    };
    auto aps = draw(config.num_aps);
    auto ues = draw(config.num_users);
    return make_deployment(config.area_side, config.num_antennas, std::move(aps), std::move(ues),
                           config.cpu_positions);
}

} // namespace cellfree

#endif // CELLFREE_SCENARIO_HPP
