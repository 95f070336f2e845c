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


#ifndef CELLFREE_ORACLE_HPP
#define CELLFREE_ORACLE_HPP

#include "cellfree/channel.hpp"
#include "cellfree/clustering.hpp"
#include "cellfree/pilot.hpp"
#include "cellfree/spectral_efficiency.hpp"

#include <cmath>
#include <vector>

namespace cellfree {

// Monte Carlo estimate of the expectations behind the closed-form SE terms.
// Every term comes with a standard error; SINRs use delta-method errors.
struct OracleEstimate {
    std::size_t num_samples = 0;
    std::vector<std::vector<double>> desired;
    std::vector<std::vector<double>> desired_se;
    std::vector<double> total_power;
    std::vector<double> total_power_se;
    std::vector<double> contamination;
    std::vector<double> contamination_se;
    std::vector<std::vector<double>> sinr;
    std::vector<std::vector<double>> sinr_se;
};

struct OracleOptions {
    std::size_t num_samples = 100000;
    bool pilot_noise = true; // false: noiseless pilot observations (closed form keeps sigma^2 in Psi)
};

namespace detail {

// Welford accumulator for a complex sample x, tracking both x and |x|^2.
struct ComplexMoments {
    std::size_t n = 0;
    Complex mean{0.0, 0.0};
    double m2 = 0.0; // sum |x - mean|^2
    double power_mean = 0.0;
    double power_m2 = 0.0;

    void add(Complex x) {
        ++n;
        const double dn = static_cast<double>(n);
        const Complex delta = x - mean;
        mean += delta / dn;
        m2 += std::real(std::conj(delta) * (x - mean));
        const double p = std::norm(x);
        const double dp = p - power_mean;
        power_mean += dp / dn;
        power_m2 += dp * (p - power_mean);
    }

    double mean_variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) / static_cast<double>(n) : 0.0; }
    double power_variance() const {
        return n > 1 ? power_m2 / static_cast<double>(n - 1) / static_cast<double>(n) : 0.0;
    }
    // Unbiased estimate of |E{x}|^2.
    double coherent_power() const { return std::norm(mean) - mean_variance(); }
    double coherent_power_se() const {
        const double v = mean_variance();
        return std::sqrt(4.0 * std::norm(mean) * v + v * v);
    }
};

} // namespace detail

template <typename Generator>
OracleEstimate mc_oracle(const ServingStructure &serving, const EstimationModel &model, const LinkPowers &powers,
                         const std::vector<std::vector<std::size_t>> &decode_order, const OracleOptions &options,
                         Generator &gen) {
    if (options.num_samples < 1) throw ConfigError("oracle: num_samples must be >= 1");
    const auto &stats = model.stats();
    const auto &assignment = model.assignment();
    const std::size_t K = stats.num_users;
    const std::size_t M = stats.num_aps;

    // Sources (i, b): each coherent group of each user is one transmitted stream.
    struct Source {
        std::size_t user;
        std::size_t group;
    };
    std::vector<Source> sources;
    std::vector<std::vector<std::size_t>> source_of(K);
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t b = 0; b < serving.groups[i].size(); ++b) {
            source_of[i].push_back(sources.size());
            sources.push_back({i, b});
        }
    }
    const std::size_t S = sources.size();

    std::vector<double> est_energy(M * K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
        for (auto m : serving.clusters[i]) est_energy[m * K + i] = model.estimate_energy(m, i);
    }

    const ChannelSampler sampler(stats);
    ChannelRealization channel;
    std::vector<CVector> precoder(M * K);
    std::vector<detail::ComplexMoments> acc(K * S);
    const double pilot_noise = options.pilot_noise ? stats.noise_power : 0.0;

    for (std::size_t n = 0; n < options.num_samples; ++n) {
        sampler.sample_into(channel, gen);
        const PilotObservation obs =
            simulate_pilot_phase(channel, assignment, model.pilot_powers(), M, pilot_noise, gen);
        for (std::size_t i = 0; i < K; ++i) {
            for (const auto &group : serving.groups[i]) {
                for (auto m : group.aps) {
                    precoder[m * K + i] =
                        mr_precoder(model.estimate(obs, m, i), powers.rho(m, i), est_energy[m * K + i]);
                }
            }
        }
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t s = 0; s < S; ++s) {
                const auto &group = serving.groups[sources[s].user][sources[s].group];
                Complex x{0.0, 0.0};
                for (auto m : group.aps) {
                    x += channel.at(m, k).dot(precoder[m * K + sources[s].user]);
                }
                acc[k * S + s].add(x);
            }
        }
    }

    OracleEstimate out;
    out.num_samples = options.num_samples;
    out.desired.resize(K);
    out.desired_se.resize(K);
    out.total_power.assign(K, 0.0);
    out.total_power_se.assign(K, 0.0);
    out.contamination.assign(K, 0.0);
    out.contamination_se.assign(K, 0.0);
    out.sinr.resize(K);
    out.sinr_se.resize(K);

    for (std::size_t k = 0; k < K; ++k) {
        double received = 0.0;
        double received_var = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            received += acc[k * S + s].power_mean;
            received_var += acc[k * S + s].power_variance();
        }
        double f = 0.0;
        double f_var = 0.0;
        for (auto i : assignment.copilots[k]) {
            for (auto s : source_of[i]) {
                f += acc[k * S + s].coherent_power();
                f_var += std::pow(acc[k * S + s].coherent_power_se(), 2);
            }
        }
        out.contamination[k] = f;
        out.contamination_se[k] = std::sqrt(f_var);
        out.total_power[k] = received - f;
        out.total_power_se[k] = std::sqrt(received_var + f_var);

        for (auto s : source_of[k]) {
            out.desired[k].push_back(acc[k * S + s].coherent_power());
            out.desired_se[k].push_back(acc[k * S + s].coherent_power_se());
        }
        const std::size_t groups = out.desired[k].size();
        out.sinr[k].assign(groups, 0.0);
        out.sinr_se[k].assign(groups, 0.0);
        double decoded = 0.0;
        double decoded_var = 0.0;
        for (auto c : decode_order[k]) {
            decoded += out.desired[k][c];
            decoded_var += std::pow(out.desired_se[k][c], 2);
            const double den = received - decoded + stats.noise_power;
            const double gamma = out.desired[k][c] / den;
            const double rel_d = out.desired[k][c] != 0.0 ? out.desired_se[k][c] / out.desired[k][c] : 0.0;
            const double rel_den = std::sqrt(received_var + decoded_var) / den;
            out.sinr[k][c] = gamma;
            out.sinr_se[k][c] = std::abs(gamma) * std::sqrt(rel_d * rel_d + rel_den * rel_den);
        }
    }
    return out;
}

} // namespace cellfree

#endif // CELLFREE_ORACLE_HPP
