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


#ifndef CELLFREE_SPECTRAL_EFFICIENCY_HPP
#define CELLFREE_SPECTRAL_EFFICIENCY_HPP

#include "cellfree/clustering.hpp"
#include "cellfree/pilot.hpp"
#include "cellfree/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace cellfree {

// Decode order of a user's coherent groups under SIC.
enum class SicOrder { descending_desired, group_index };

inline std::string to_string(SicOrder o) {
    return o == SicOrder::descending_desired ? "descending_desired" : "group_index";
}

inline SicOrder parse_sic_order(std::string_view s) {
    if (s == "descending_desired") return SicOrder::descending_desired;
    if (s == "group_index") return SicOrder::group_index;
    throw ConfigError("unknown sic_order '" + std::string(s) + "'");
}

enum class PowerBudgetMode { error, rescale, ignore };

inline std::string to_string(PowerBudgetMode m) {
    switch (m) {
    case PowerBudgetMode::error: return "error";
    case PowerBudgetMode::rescale: return "rescale";
    case PowerBudgetMode::ignore: return "ignore";
    }
    return "?";
}

inline PowerBudgetMode parse_power_budget_mode(std::string_view s) {
    if (s == "error") return PowerBudgetMode::error;
    if (s == "rescale") return PowerBudgetMode::rescale;
    if (s == "ignore") return PowerBudgetMode::ignore;
    throw ConfigError("unknown power_budget_mode '" + std::string(s) + "'");
}

struct FrameConfig {
    std::size_t tau_c = 200;
    std::size_t tau_p = 10;

    void validate() const {
        if (tau_p < 1 || tau_p >= tau_c) throw ConfigError("frame: require 1 <= tau_p < tau_c");
    }
    double prelog() const { return static_cast<double>(tau_c - tau_p) / static_cast<double>(tau_c); }
};

// Enforces sum_{k in U_m} rho_{m,k} <= budget per AP.
inline void apply_power_budget(LinkPowers &powers, const ServingStructure &serving, double budget,
                               PowerBudgetMode mode) {
    if (mode == PowerBudgetMode::ignore) return;
    for (std::size_t m = 0; m < serving.served.size(); ++m) {
        double total = 0.0;
        for (auto k : serving.served[m]) total += powers.rho(m, k);
        if (total <= budget) continue;
        if (mode == PowerBudgetMode::error) {
            throw ConfigError("AP " + std::to_string(m) + " exceeds its power budget (" + std::to_string(total) +
                              " W > " + std::to_string(budget) + " W)");
        }
        const double scale = budget / total;
        for (auto k : serving.served[m]) {
            powers.data(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) *= scale;
        }
    }
}

// W = sqrt(rho) H_hat / sqrt(E{||H_hat||^2})
inline CVector mr_precoder(const CVector &h_hat, double rho, double est_trace) {
    if (rho == 0.0) return CVector::Zero(h_hat.size());
    if (!(est_trace > 0.0)) {
        throw DegenerateLinkError("MR precoder: zero expected estimate energy on a link with positive power");
    }
    return std::sqrt(rho / est_trace) * h_hat;
}

struct SETerms {
    std::vector<std::vector<double>> desired;   // D_k^c, indexed by group position in ServingStructure
    std::vector<double> total_power;            // E_k
    std::vector<double> contamination;          // F_k
    std::vector<std::vector<std::size_t>> decode_order;

    std::size_t num_users() const { return total_power.size(); }
};

inline std::vector<std::size_t> sic_decode_order(const std::vector<double> &desired, SicOrder order) {
    std::vector<std::size_t> idx(desired.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (order == SicOrder::descending_desired) {
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return desired[a] > desired[b]; });
    }
    return idx;
}

namespace detail {

struct LinkStatistic {
    bool active = false;
    double gain_trace = 0.0; // tr(G_ii), real and > 0 for active links
    CMatrix normalized_gain; // G_ii / tr(G_ii)
};

} // namespace detail

// Closed-form D_k^c, E_k and F_k. G matrices are evaluated per AP, with Psi taken
// at the pilot of the user whose estimate forms the precoder.
inline SETerms compute_terms(const ServingStructure &serving, const EstimationModel &model, const LinkPowers &powers,
                             SicOrder order = SicOrder::descending_desired) {
    const auto &stats = model.stats();
    const auto &assignment = model.assignment();
    const std::size_t K = stats.num_users;
    const std::size_t M = stats.num_aps;
    if (serving.num_users() != K) throw ConfigError("compute_terms: serving structure has wrong user count");
    const double tau = model.tau();

    std::vector<detail::LinkStatistic> links(M * K);
    for (std::size_t i = 0; i < K; ++i) {
        for (const auto &group : serving.groups[i]) {
            for (auto m : group.aps) {
                if (powers.rho(m, i) <= 0.0) continue;
                auto &link = links[m * K + i];
                const CMatrix g = model.gain(m, i, i);
                link.gain_trace = std::real(g.trace());
                if (!(link.gain_trace > 0.0) || !(model.pilot_powers()[i] > 0.0)) {
                    throw DegenerateLinkError("degenerate serving link (AP " + std::to_string(m) + ", UE " +
                                              std::to_string(i) + "): zero estimate energy");
                }
                link.normalized_gain = g / link.gain_trace;
                link.active = true;
            }
        }
    }

    SETerms terms;
    terms.desired.resize(K);
    terms.total_power.assign(K, 0.0);
    terms.contamination.assign(K, 0.0);
    terms.decode_order.resize(K);

    for (std::size_t k = 0; k < K; ++k) {
        const double pk = model.pilot_powers()[k];
        for (const auto &group : serving.groups[k]) {
            double amplitude = 0.0;
            for (auto m : group.aps) {
                const auto &link = links[m * K + k];
                if (!link.active) continue;
                amplitude += std::sqrt(powers.rho(m, k) * pk * tau * link.gain_trace);
            }
            terms.desired[k].push_back(amplitude * amplitude);
        }
        terms.decode_order[k] = sic_decode_order(terms.desired[k], order);

        double e = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            for (const auto &group : serving.groups[i]) {
                for (auto m : group.aps) {
                    const auto &link = links[m * K + i];
                    if (!link.active) continue;
                    e += powers.rho(m, i) * std::real((stats.r(m, k) * link.normalized_gain).trace());
                }
            }
        }
        terms.total_power[k] = e;

        double f = 0.0;
        for (auto i : assignment.copilots[k]) {
            for (const auto &group : serving.groups[i]) {
                Complex coherent{0.0, 0.0};
                for (auto m : group.aps) {
                    const auto &link = links[m * K + i];
                    if (!link.active) continue;
                    const Complex cross = model.gain(m, i, k).trace();
                    coherent += std::sqrt(powers.rho(m, i) * pk * tau) * cross / std::sqrt(link.gain_trace);
                }
                f += std::norm(coherent);
            }
        }
        terms.contamination[k] = f;
    }
    return terms;
}

// E_k + F_k - sum_{b decoded up to and including c} D_k^b + sigma^2
inline double sinr_denominator(const SETerms &terms, std::size_t k, std::size_t c, double noise_power) {
    double decoded = 0.0;
    for (auto b : terms.decode_order[k]) {
        decoded += terms.desired[k][b];
        if (b == c) break;
    }
    return terms.total_power[k] + terms.contamination[k] - decoded + noise_power;
}

// SINR of group c (position in the serving structure) of user k.
inline double sinr_mixed(const SETerms &terms, std::size_t k, std::size_t c, double noise_power) {
    const double den = sinr_denominator(terms, k, c, noise_power);
    if (!(den > 0.0)) {
        throw NumericalError("non-positive SINR denominator for UE " + std::to_string(k) + ", group " +
                             std::to_string(c));
    }
    return terms.desired[k][c] / den;
}

struct RateResult {
    std::vector<std::vector<double>> sinr;       // gamma_k^c
    std::vector<std::vector<double>> group_rate; // r_k^c, bits/s/Hz
    std::vector<double> user_rate;               // r_k
    double sum_rate = 0.0;
    double prelog = 0.0;
};

inline RateResult user_rates(const SETerms &terms, const FrameConfig &frame, double noise_power) {
    frame.validate();
    RateResult out;
    out.prelog = frame.prelog();
    const std::size_t K = terms.num_users();
    out.sinr.resize(K);
    out.group_rate.resize(K);
    out.user_rate.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t c = 0; c < terms.desired[k].size(); ++c) {
            const double gamma = sinr_mixed(terms, k, c, noise_power);
            const double rate = out.prelog * std::log2(1.0 + gamma);
            out.sinr[k].push_back(gamma);
            out.group_rate[k].push_back(rate);
            out.user_rate[k] += rate;
        }
        out.sum_rate += out.user_rate[k];
    }
    return out;
}

} // namespace cellfree

#endif // CELLFREE_SPECTRAL_EFFICIENCY_HPP
