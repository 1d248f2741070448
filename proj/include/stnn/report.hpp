#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stnn/detector.hpp"
#include "stnn/inject.hpp"
#include "stnn/stream.hpp"
#include "stnn/synth.hpp"

namespace stnn {

using json = nlohmann::ordered_json;

inline json to_json(const Anomaly& a, const std::vector<std::string>& channel_ids) {
    json locations = json::array();
    for (const ChannelSpan& span : a.channel_locations) {
        locations.push_back({{"channel", span.channel},
                             {"channel_id", span.channel <= channel_ids.size()
                                                ? channel_ids[span.channel - 1]
                                                : std::string()},
                             {"first_sample", span.first_sample},
                             {"last_sample", span.last_sample}});
    }
    return json{{"flat_start", a.flat_start},
                {"flat_end", a.flat_end},
                {"channel_locations", std::move(locations)},
                {"peak_value", a.peak_value},
                {"peak_index", a.peak_index}};
}

inline json report_to_json(const DetectionReport& report,
                           const std::vector<std::string>& channel_ids) {
    json anomalies = json::array();
    for (const Anomaly& a : report.anomalies) anomalies.push_back(to_json(a, channel_ids));
    json pre_flags = json::array();
    for (const PreFlag& f : report.pre_flags)
        pre_flags.push_back({{"channel", f.channel},
                             {"channel_id", f.channel <= channel_ids.size()
                                                ? channel_ids[f.channel - 1]
                                                : std::string()},
                             {"sample", f.sample}});
    return json{{"window_id", report.window_id},
                {"threshold", report.threshold},
                {"profile_mean", report.profile_mean},
                {"profile_std", report.profile_std},
                {"anomalies", std::move(anomalies)},
                {"pre_flags", std::move(pre_flags)}};
}

inline json scenario_to_json(const BadDataScenario& s) {
    json j{{"kind", to_string(s.kind)},
           {"channel", s.channel},
           {"start_sample", s.start_sample},
           {"span", s.span},
           {"magnitude", s.magnitude},
           {"seed", s.seed}};
    if (!s.source_segment.empty()) j["source_segment"] = s.source_segment;
    return j;
}

inline BadDataScenario scenario_from_json(const json& j) {
    BadDataScenario s;
    s.kind = bad_data_kind_from_string(j.at("kind").get<std::string>());
    s.channel = j.at("channel").get<std::size_t>();
    s.start_sample = j.at("start_sample").get<std::size_t>();
    s.span = j.at("span").get<std::size_t>();
    s.magnitude = j.at("magnitude").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("source_segment")) s.source_segment = j.at("source_segment").get<std::vector<double>>();
    return s;
}

inline json truth_to_json(const std::vector<BadDataScenario>& truth) {
    json arr = json::array();
    for (const BadDataScenario& t : truth)
        arr.push_back({{"kind", to_string(t.kind)},
                       {"channel", t.channel},
                       {"start_sample", t.start_sample},
                       {"span", t.span}});
    return arr;
}

inline json grid_scenario_to_json(const GridScenario& s) {
    json events = json::array();
    for (const GridEvent& e : s.events)
        events.push_back({{"onset_sample", e.onset_sample},
                          {"depth", e.depth},
                          {"duration_samples", e.duration_samples},
                          {"ringdown_freq_hz", e.ringdown_freq_hz},
                          {"ringdown_damping", e.ringdown_damping}});
    return json{{"n_b", s.n_b},
                {"n", s.n},
                {"dt", s.dt},
                {"coupling", s.coupling},
                {"noise_std", s.noise_std},
                {"events", std::move(events)},
                {"seed", s.seed}};
}

inline json alert_to_json(const Alert& a) {
    return json{{"channel", a.channel},
                {"channel_id", a.channel_id},
                {"first_sample", a.first_sample},
                {"last_sample", a.last_sample},
                {"peak_value", a.peak_value},
                {"first_window", a.first_window},
                {"first_seen_time", a.first_seen_time}};
}

} // namespace stnn
