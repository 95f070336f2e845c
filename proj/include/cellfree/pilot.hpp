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


#ifndef CELLFREE_PILOT_HPP
#define CELLFREE_PILOT_HPP

#include "cellfree/channel.hpp"
#include "cellfree/random.hpp"
#include "cellfree/types.hpp"

#include <cmath>
#include <vector>

namespace cellfree {

// Orthogonal pilots are represented by index only: phi_t^H phi_s / tau_p = 1{t == s}.
struct PilotAssignment {
    std::size_t tau_p = 1;
    std::vector<std::size_t> pilot;  // t_k in [0, tau_p)
    std::vector<IndexSet> copilots;  // P_k, includes k

    std::size_t num_users() const { return pilot.size(); }
    bool shares_pilot(std::size_t i, std::size_t k) const { return pilot[i] == pilot[k]; }

    static PilotAssignment from_indices(std::size_t tau_p, std::vector<std::size_t> pilot) {
        if (tau_p < 1) throw ConfigError("tau_p must be >= 1");
        PilotAssignment a;
        a.tau_p = tau_p;
        a.pilot = std::move(pilot);
        std::vector<IndexSet> users_on(tau_p);
        for (std::size_t k = 0; k < a.pilot.size(); ++k) {
            if (a.pilot[k] >= tau_p) throw ConfigError("pilot index out of range");
            users_on[a.pilot[k]].push_back(k);
        }
        a.copilots.resize(a.pilot.size());
        for (std::size_t k = 0; k < a.pilot.size(); ++k) {
            a.copilots[k] = users_on[a.pilot[k]];
        }
        return a;
    }
};

// Each user draws its pilot uniformly and independently; collisions are allowed.
template <typename Generator>
PilotAssignment assign_pilots(std::size_t num_users, std::size_t tau_p, Generator &gen) {
    if (tau_p < 1) throw ConfigError("tau_p must be >= 1");
    std::uniform_int_distribution<std::size_t> pick(0, tau_p - 1);
    std::vector<std::size_t> pilot(num_users);
    for (auto &t : pilot) t = pick(gen);
    return PilotAssignment::from_indices(tau_p, std::move(pilot));
}

struct PowerConfig {
    double pilot_power = 0.2;     // W per user
    double data_power = 0.1;      // W per AP-user link
    double ap_power_budget = 1.0; // W per AP

    void validate() const {
        if (!(pilot_power >= 0.0) || !(data_power >= 0.0) || !(ap_power_budget >= 0.0)) {
            throw ConfigError("powers must be non-negative");
        }
    }
};

// Per-user pilot powers and per-link data powers rho_{m,k}.
struct LinkPowers {
    std::vector<double> pilot; // K
    RMatrix data;              // M x K

    static LinkPowers uniform(std::size_t num_aps, std::size_t num_users, const PowerConfig &config) {
        config.validate();
        LinkPowers p;
        p.pilot.assign(num_users, config.pilot_power);
        p.data = RMatrix::Constant(static_cast<Eigen::Index>(num_aps), static_cast<Eigen::Index>(num_users),
                                   config.data_power);
        return p;
    }

    double rho(std::size_t m, std::size_t k) const {
        return data(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    }
};

// Psi_{m,t} = sum_{i : t_i = t} tau_p p_i R_{m,i} + sigma^2 I
inline CMatrix psi_matrix(std::size_t m, std::size_t t, const ChannelStatistics &stats,
                          const PilotAssignment &assignment, const std::vector<double> &pilot_powers) {
    const auto n = static_cast<Eigen::Index>(stats.num_antennas);
    CMatrix psi = stats.noise_power * CMatrix::Identity(n, n);
    for (std::size_t i = 0; i < assignment.num_users(); ++i) {
        if (assignment.pilot[i] == t) {
            psi += static_cast<double>(assignment.tau_p) * pilot_powers[i] * stats.r(m, i);
        }
    }
    return psi;
}

inline CMatrix hermitian_inverse(const CMatrix &a, const char *what) {
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + ": matrix is singular or not positive definite");
    }
    return llt.solve(CMatrix::Identity(a.rows(), a.cols()));
}

// Projected pilot observations y_{m,t} at m * tau_p + t.
struct PilotObservation {
    std::size_t tau_p = 1;
    std::vector<CVector> y;

    const CVector &at(std::size_t m, std::size_t t) const { return y[m * tau_p + t]; }
};

// Uses pilot orthogonality: the projection onto phi_t / sqrt(tau_p) leaves only the
// co-pilot channels plus CN(0, sigma^2 I) noise.
template <typename Generator>
PilotObservation simulate_pilot_phase(const ChannelRealization &channel, const PilotAssignment &assignment,
                                      const std::vector<double> &pilot_powers, std::size_t num_aps,
                                      double noise_power, Generator &gen) {
    PilotObservation obs;
    obs.tau_p = assignment.tau_p;
    const auto n = channel.h.front().size();
    obs.y.resize(num_aps * assignment.tau_p);
    const double noise_amp = std::sqrt(noise_power);
    const double tau = static_cast<double>(assignment.tau_p);
    for (std::size_t m = 0; m < num_aps; ++m) {
        for (std::size_t t = 0; t < assignment.tau_p; ++t) {
            CVector y = CVector::Zero(n);
            if (noise_power > 0.0) {
                y = noise_amp * complex_normal_vector(n, gen);
            }
            obs.y[m * assignment.tau_p + t] = std::move(y);
        }
        for (std::size_t i = 0; i < assignment.num_users(); ++i) {
            obs.y[m * assignment.tau_p + assignment.pilot[i]] += std::sqrt(pilot_powers[i] * tau) * channel.at(m, i);
        }
    }
    return obs;
}

// Cached per-(m, pilot) Psi inverses plus the estimation statistics derived from them.
// Read-only after construction.
class EstimationModel {
public:
    EstimationModel(const ChannelStatistics &stats, const PilotAssignment &assignment,
                    std::vector<double> pilot_powers)
        : stats_(&stats), assignment_(&assignment), pilot_powers_(std::move(pilot_powers)) {
        if (pilot_powers_.size() != stats.num_users || assignment.num_users() != stats.num_users) {
            throw ConfigError("estimation model: user count mismatch");
        }
        psi_inv_.resize(stats.num_aps * assignment.tau_p);
        for (std::size_t m = 0; m < stats.num_aps; ++m) {
            for (std::size_t t = 0; t < assignment.tau_p; ++t) {
                psi_inv_[m * assignment.tau_p + t] =
                    hermitian_inverse(psi_matrix(m, t, stats, assignment, pilot_powers_), "Psi");
            }
        }
    }

    const ChannelStatistics &stats() const { return *stats_; }
    const PilotAssignment &assignment() const { return *assignment_; }
    const std::vector<double> &pilot_powers() const { return pilot_powers_; }
    double tau() const { return static_cast<double>(assignment_->tau_p); }

    const CMatrix &psi_inverse(std::size_t m, std::size_t t) const { return psi_inv_[m * assignment_->tau_p + t]; }

    // G^{(m)}_{i,k} = R_{m,i} Psi_{m,t_i}^{-1} R_{m,k}
    CMatrix gain(std::size_t m, std::size_t i, std::size_t k) const {
        return stats_->r(m, i) * psi_inverse(m, assignment_->pilot[i]) * stats_->r(m, k);
    }

    // E{H_hat H_hat^H} = p_k tau_p R Psi^{-1} R
    CMatrix estimate_covariance(std::size_t m, std::size_t k) const {
        return pilot_powers_[k] * tau() * gain(m, k, k);
    }

    CMatrix error_covariance(std::size_t m, std::size_t k) const {
        return stats_->r(m, k) - estimate_covariance(m, k);
    }

    // E{||H_hat_{m,k}||^2}
    double estimate_energy(std::size_t m, std::size_t k) const {
        return std::real(estimate_covariance(m, k).trace());
    }

    CVector estimate(const PilotObservation &obs, std::size_t m, std::size_t k) const {
        const std::size_t t = assignment_->pilot[k];
        return std::sqrt(pilot_powers_[k] * tau()) * (stats_->r(m, k) * (psi_inverse(m, t) * obs.at(m, t)));
    }

private:
    const ChannelStatistics *stats_;
    const PilotAssignment *assignment_;
    std::vector<double> pilot_powers_;
    std::vector<CMatrix> psi_inv_;
};

// H_hat_{m,k} = sqrt(p_k tau_p) R_{m,k} Psi_{m,t_k}^{-1} y_{m,t_k}
inline CVector mmse_estimate(const PilotObservation &obs, std::size_t m, std::size_t k,
                             const ChannelStatistics &stats, const PilotAssignment &assignment,
                             const std::vector<double> &pilot_powers) {
    const std::size_t t = assignment.pilot[k];
    const CMatrix psi = psi_matrix(m, t, stats, assignment, pilot_powers);
    Eigen::LLT<CMatrix> llt(psi);
    if (llt.info() != Eigen::Success) throw NumericalError("mmse_estimate: Psi is singular");
    const double tau = static_cast<double>(assignment.tau_p);
    return std::sqrt(pilot_powers[k] * tau) * (stats.r(m, k) * llt.solve(obs.at(m, t)));
}

inline CMatrix error_covariance(std::size_t m, std::size_t k, const ChannelStatistics &stats,
                                const PilotAssignment &assignment, const std::vector<double> &pilot_powers) {
    const CMatrix psi_inv =
        hermitian_inverse(psi_matrix(m, assignment.pilot[k], stats, assignment, pilot_powers), "Psi");
    const CMatrix &r = stats.r(m, k);
    return r - pilot_powers[k] * static_cast<double>(assignment.tau_p) * r * psi_inv * r;
}

} // namespace cellfree

#endif // CELLFREE_PILOT_HPP
