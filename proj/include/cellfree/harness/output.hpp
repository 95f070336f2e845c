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


#ifndef CELLFREE_HARNESS_OUTPUT_HPP
#define CELLFREE_HARNESS_OUTPUT_HPP

#include "cellfree/harness/experiment.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace cellfree::harness {

enum class OutputFormat { csv, json, both };

inline OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    if (s == "both") return OutputFormat::both;
    throw ConfigError("unknown output format '" + std::string(s) + "'");
}

// Runtime I/O failure; carries the offending path.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string csv_cell(const Json &v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_number(v.get<double>());
    return v.dump();
}

inline std::string results_csv(const std::vector<ExperimentResult> &results) {
    std::size_t max_users = 0;
    bool has_oracle = false;
    for (const auto &r : results) {
        for (const auto &d : r.drops) {
            max_users = std::max(max_users, d.user_rates.size());
            has_oracle = has_oracle || d.oracle_sum_rate.has_value();
        }
    }
    std::vector<std::string> keys;
    if (!results.empty()) {
        for (auto it = results.front().sweep_key.begin(); it != results.front().sweep_key.end(); ++it) {
            keys.push_back(it.key());
        }
    }
    std::ostringstream os;
    for (const auto &k : keys) os << k << ',';
    os << "drop,seed";
    for (std::size_t k = 0; k < max_users; ++k) os << ",rate_ue" << k;
    os << ",sum_rate";
    if (has_oracle) os << ",oracle_sum_rate";
    os << '\n';
    for (const auto &r : results) {
        for (const auto &d : r.drops) {
            for (const auto &k : keys) os << csv_cell(r.sweep_key.at(k)) << ',';
            os << d.drop_index << ',' << d.seed;
            for (std::size_t k = 0; k < max_users; ++k) {
                os << ',';
                if (k < d.user_rates.size()) os << format_number(d.user_rates[k]);
            }
            os << ',' << format_number(d.sum_rate);
            if (has_oracle) {
                os << ',';
                if (d.oracle_sum_rate) os << format_number(*d.oracle_sum_rate);
            }
            os << '\n';
        }
    }
    return os.str();
}

inline std::string cdf_csv(const std::vector<ExperimentResult> &results) {
    std::ostringstream os;
    os << "point,sum_rate,cdf\n";
    for (std::size_t p = 0; p < results.size(); ++p) {
        for (const auto &c : results[p].cdf) {
            os << p << ',' << format_number(c.value) << ',' << format_number(c.probability) << '\n';
        }
    }
    return os.str();
}

inline Json to_json(const Summary &s) {
    return Json{{"count", s.count},   {"mean", s.mean}, {"stddev", s.stddev},     {"min", s.min},
                {"p05", s.p05},       {"p50", s.p50},   {"p95", s.p95},           {"max", s.max},
                {"ci95_low", s.ci95_low}, {"ci95_high", s.ci95_high}};
}

inline Summary summary_from_json(const Json &j) {
    Summary s;
    s.count = j.at("count").get<std::size_t>();
    s.mean = j.at("mean").get<double>();
    s.stddev = j.at("stddev").get<double>();
    s.min = j.at("min").get<double>();
    s.p05 = j.at("p05").get<double>();
    s.p50 = j.at("p50").get<double>();
    s.p95 = j.at("p95").get<double>();
    s.max = j.at("max").get<double>();
    s.ci95_low = j.at("ci95_low").get<double>();
    s.ci95_high = j.at("ci95_high").get<double>();
    return s;
}

inline Json results_json(const ExperimentConfig &config, const std::vector<ExperimentResult> &results,
                         bool with_timestamp = true) {
    Json doc;
    doc["version"] = kVersion;
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::ostringstream ts;
        ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
        doc["generated_at"] = ts.str();
    }
    doc["config"] = to_json(config);
    Json points = Json::array();
    for (const auto &r : results) {
        Json cdf = Json::array();
        for (const auto &c : r.cdf) cdf.push_back({c.value, c.probability});
        points.push_back({{"sweep_key", r.sweep_key}, {"summary", to_json(r.summary)}, {"cdf", cdf}});
    }
    doc["points"] = points;
    return doc;
}

inline void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

// Writes results.csv / cdf.csv and the results.json sidecar into `dir`.
inline std::vector<std::filesystem::path> emit_results(const ExperimentConfig &config,
                                                       const std::vector<ExperimentResult> &results,
                                                       const std::filesystem::path &dir,
                                                       OutputFormat format = OutputFormat::both) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create output directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> written;
    if (format != OutputFormat::json) {
        write_file(dir / "results.csv", results_csv(results));
        write_file(dir / "cdf.csv", cdf_csv(results));
        written.push_back(dir / "results.csv");
        written.push_back(dir / "cdf.csv");
    }
    if (format != OutputFormat::csv) {
        write_file(dir / "results.json", results_json(config, results).dump(2) + "\n");
        written.push_back(dir / "results.json");
    }
    return written;
}

inline std::vector<Summary> load_summaries(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw OutputError("cannot open '" + path.string() + "'");
    const Json doc = Json::parse(in);
    std::vector<Summary> out;
    for (const auto &p : doc.at("points")) out.push_back(summary_from_json(p.at("summary")));
    return out;
}

} // namespace cellfree::harness

#endif // CELLFREE_HARNESS_OUTPUT_HPP
