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


#ifndef CELLFREE_CHANNEL_HPP
#define CELLFREE_CHANNEL_HPP

#include "cellfree/random.hpp"
#include "cellfree/scenario.hpp"
#include "cellfree/types.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace cellfree {

inline constexpr double kBoltzmann = 1.381e-23; // J/K
inline constexpr double kNoiseTemperature = 290.0; // K

// Three-slope log-distance law. Gains are returned in dB (negative values).
// Beyond d1 the slope is far_exponent with a COST-Hata fixed term; between d0
// and d1 mid_exponent; below d0 near_exponent. Segments join continuously.
struct PathLossParams {
    double d0_m = 10.0;
    double d1_m = 50.0;
    double carrier_mhz = 1900.0;
    double ap_height_m = 15.0;
    double ue_height_m = 1.65;
    double near_exponent = 0.0;
    double mid_exponent = 2.0;
    double far_exponent = 3.5;

    // COST-231 Hata fixed term L in dB (distances in km).
    double fixed_loss_db() const {
        const double lf = std::log10(carrier_mhz);
        return 46.3 + 33.9 * lf - 13.82 * std::log10(ap_height_m) - (1.1 * lf - 0.7) * ue_height_m +
               (1.56 * lf - 0.8);
    }

    void validate() const {
        if (!(d0_m > 0.0) || !(d0_m < d1_m)) throw ConfigError("pathloss: require 0 < d0 < d1");
        if (!(carrier_mhz > 0.0) || !(ap_height_m > 0.0) || !(ue_height_m > 0.0)) {
            throw ConfigError("pathloss: carrier and heights must be positive");
        }
    }
};

struct LargeScaleModelConfig {
    double shadow_std_db = 8.0;
    double shadow_weight = 0.5;
    double decorrelation_distance_m = 100.0;
    double asd_deg = 15.0;
    double antenna_spacing = 0.5; // wavelengths
    PathLossParams pathloss;
    double bandwidth_hz = 20e6;
    double noise_figure_db = 9.0;

    void validate() const {
        if (!(shadow_std_db >= 0.0)) throw ConfigError("large_scale.shadow_std_db must be >= 0");
        if (!(shadow_weight >= 0.0 && shadow_weight <= 1.0)) {
            throw ConfigError("large_scale.shadow_weight must lie in [0, 1]");
        }
        if (!(decorrelation_distance_m > 0.0)) {
            throw ConfigError("large_scale.decorrelation_distance_m must be positive");
        }
        if (!(asd_deg >= 0.0)) throw ConfigError("large_scale.asd_deg must be >= 0");
        if (!(antenna_spacing > 0.0)) throw ConfigError("large_scale.antenna_spacing must be positive");
        if (!(bandwidth_hz > 0.0)) throw ConfigError("large_scale.bandwidth_hz must be positive");
        pathloss.validate();
    }
};

inline double path_loss_db(double distance_m, const PathLossParams &p) {
    const double d = std::max(distance_m, 1.0);
    const double far_at_d1 = -p.fixed_loss_db() - 10.0 * p.far_exponent * std::log10(p.d1_m / 1000.0);
    if (d > p.d1_m) {
        return -p.fixed_loss_db() - 10.0 * p.far_exponent * std::log10(d / 1000.0);
    }
    if (d > p.d0_m) {
        return far_at_d1 - 10.0 * p.mid_exponent * std::log10(d / p.d1_m);
    }
    const double mid_at_d0 = far_at_d1 - 10.0 * p.mid_exponent * std::log10(p.d0_m / p.d1_m);
    return mid_at_d0 - 10.0 * p.near_exponent * std::log10(d / p.d0_m);
}

inline double noise_power_w(double bandwidth_hz, double noise_figure_db) {
    return bandwidth_hz * kBoltzmann * kNoiseTemperature * db_to_linear(noise_figure_db);
}

// Gaussian local scattering around `nominal_angle` for a ULA, small-angle closed form.
inline CMatrix spatial_correlation(double nominal_angle, double asd_deg, std::size_t num_antennas,
                                   double beta, double spacing = 0.5) {
    const auto n = static_cast<Eigen::Index>(num_antennas);
    const double asd = asd_deg * std::numbers::pi / 180.0;
    CMatrix r(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index m = 0; m < n; ++m) {
            const double dist = 2.0 * std::numbers::pi * spacing * static_cast<double>(l - m);
            const double phase = dist * std::sin(nominal_angle);
            const double spread = dist * std::cos(nominal_angle);
            r(l, m) = beta * std::polar(std::exp(-asd * asd / 2.0 * spread * spread), phase);
        }
    }
    return r;
}

// Two-component correlated shadowing: shadow(m,k) = sigma * (sqrt(w) a_m + sqrt(1-w) b_k),
// a and b unit-variance Gaussian fields with exp(-d / d_corr) correlation under wrap-around.
class ShadowingSampler {
public:
    ShadowingSampler(const Deployment &dep, const LargeScaleModelConfig &config)
        : sigma_(config.shadow_std_db), weight_(config.shadow_weight) {
        ap_root_ = psd_sqrt(correlation(dep.aps, dep.area_side, config.decorrelation_distance_m),
                            "AP shadowing correlation");
        ue_root_ = psd_sqrt(correlation(dep.ues, dep.area_side, config.decorrelation_distance_m),
                            "UE shadowing correlation");
    }

    // M x K shadow values in dB.
    template <typename Generator>
    RMatrix sample(Generator &gen) const {
        std::normal_distribution<double> unit(0.0, 1.0);
        Eigen::VectorXd za(ap_root_.rows());
        Eigen::VectorXd zb(ue_root_.rows());
        for (Eigen::Index i = 0; i < za.size(); ++i) za(i) = unit(gen);
        for (Eigen::Index i = 0; i < zb.size(); ++i) zb(i) = unit(gen);
        const Eigen::VectorXd a = ap_root_ * za;
        const Eigen::VectorXd b = ue_root_ * zb;
        RMatrix out(a.size(), b.size());
        const double wa = std::sqrt(weight_);
        const double wb = std::sqrt(1.0 - weight_);
        for (Eigen::Index m = 0; m < a.size(); ++m) {
            for (Eigen::Index k = 0; k < b.size(); ++k) {
                out(m, k) = sigma_ * (wa * a(m) + wb * b(k));
            }
        }
        return out;
    }

    static RMatrix correlation(const std::vector<Point> &pts, double side, double decorrelation) {
        const auto n = static_cast<Eigen::Index>(pts.size());
        RMatrix c(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                c(i, j) = std::exp(-wrap_distance(pts[i], pts[j], side) / decorrelation);
            }
        }
        return c;
    }

private:
    double sigma_;
    double weight_;
    RMatrix ap_root_;
    RMatrix ue_root_;
};

template <typename Generator>
RMatrix shadowing_field(const Deployment &dep, const LargeScaleModelConfig &config, Generator &gen) {
    return ShadowingSampler(dep, config).sample(gen);
}

struct ChannelStatistics {
    std::size_t num_aps = 0;
    std::size_t num_users = 0;
    std::size_t num_antennas = 0;
    std::vector<CMatrix> correlation; // R_{m,k} at m * K + k
    RMatrix beta;                     // M x K, linear
    double noise_power = 0.0;         // watts

    const CMatrix &r(std::size_t m, std::size_t k) const { return correlation[m * num_users + k]; }
    CMatrix &r(std::size_t m, std::size_t k) { return correlation[m * num_users + k]; }

    // Statistics from explicit matrices; beta is derived as tr(R)/N.
    static ChannelStatistics from_correlations(std::size_t m_count, std::size_t k_count,
                                               std::vector<CMatrix> r, double noise_power) {
        if (r.size() != m_count * k_count || r.empty()) {
            throw ConfigError("channel statistics: expected M*K correlation matrices");
        }
        ChannelStatistics s;
        s.num_aps = m_count;
        s.num_users = k_count;
        s.num_antennas = static_cast<std::size_t>(r.front().rows());
        s.correlation = std::move(r);
        s.noise_power = noise_power;
        s.beta.resize(static_cast<Eigen::Index>(m_count), static_cast<Eigen::Index>(k_count));
        for (std::size_t m = 0; m < m_count; ++m) {
            for (std::size_t k = 0; k < k_count; ++k) {
                s.beta(m, k) = std::real(s.r(m, k).trace()) / static_cast<double>(s.num_antennas);
            }
        }
        return s;
    }
};

template <typename Generator>
ChannelStatistics channel_stats(const Deployment &dep, const LargeScaleModelConfig &config, Generator &gen) {
    config.validate();
    const RMatrix shadow = shadowing_field(dep, config, gen);
    const std::size_t m_count = dep.num_aps();
    const std::size_t k_count = dep.num_users();
    std::vector<CMatrix> r;
    r.reserve(m_count * k_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t k = 0; k < k_count; ++k) {
            const Point d = wrap_displacement(dep.aps[m], dep.ues[k], dep.area_side);
            const double gain_db = path_loss_db(std::hypot(d.x, d.y), config.pathloss) +
                                   shadow(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
            const double angle = std::atan2(d.y, d.x);
            r.push_back(spatial_correlation(angle, config.asd_deg, dep.num_antennas, db_to_linear(gain_db),
                                            config.antenna_spacing));
        }
    }
    return ChannelStatistics::from_correlations(m_count, k_count, std::move(r),
                                                noise_power_w(config.bandwidth_hz, config.noise_figure_db));
}

struct ChannelRealization {
    std::size_t num_users = 0;
    std::vector<CVector> h; // H_{m,k} at m * K + k

    const CVector &at(std::size_t m, std::size_t k) const { return h[m * num_users + k]; }
};

// Holds R^{1/2} for every pair so repeated draws skip the eigendecompositions.
class ChannelSampler {
public:
    explicit ChannelSampler(const ChannelStatistics &stats) : num_users_(stats.num_users) {
        roots_.reserve(stats.correlation.size());
        for (const auto &r : stats.correlation) {
            roots_.push_back(psd_sqrt(r, "channel correlation"));
        }
    }

    template <typename Generator>
    void sample_into(ChannelRealization &out, Generator &gen) const {
        out.num_users = num_users_;
        out.h.resize(roots_.size());
        for (std::size_t i = 0; i < roots_.size(); ++i) {
            out.h[i] = roots_[i] * complex_normal_vector(roots_[i].rows(), gen);
        }
    }

    template <typename Generator>
    ChannelRealization sample(Generator &gen) const {
        ChannelRealization out;
        sample_into(out, gen);
        return out;
    }

private:
    std::size_t num_users_;
    std::vector<CMatrix> roots_;
};

template <typename Generator>
ChannelRealization sample_channel(const ChannelStatistics &stats, Generator &gen) {
    return ChannelSampler(stats).sample(gen);
}

} // namespace cellfree

#endif // CELLFREE_CHANNEL_HPP
