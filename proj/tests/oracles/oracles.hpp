#pragma once
// Independent reference implementations used only by the tests. Nothing here
// calls into the library's geometry, trigger or statistics code.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wandrelay/message.hpp"
#include "wandrelay/trigger_engine.hpp"

namespace oracle {

// Chord length between unit vectors, turned back into an arc.
inline double distance_m(double lat1, double lon1, double lat2, double lon2) {
    constexpr double R = 6371000.0;
    constexpr double rad = 3.14159265358979323846 / 180.0;
    auto unit = [&](double lat, double lon) {
        return std::array<double, 3>{std::cos(lat * rad) * std::cos(lon * rad),
                                     std::cos(lat * rad) * std::sin(lon * rad), std::sin(lat * rad)};
    };
    auto a = unit(lat1, lon1), b = unit(lat2, lon2);
    double c = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                         (a[2] - b[2]) * (a[2] - b[2]));
    return 2.0 * R * std::asin(std::min(1.0, c / 2.0));
}

struct Flags {
    std::optional<bool> geofence, window, marker;
};

inline Flags condition_flags(const wandrelay::TriggerSchedule& s, const wandrelay::ContextSample& x) {
    Flags f;
    if (s.geofence)
        f.geofence = distance_m(s.geofence->center.lat, s.geofence->center.lon, x.position.lat, x.position.lon) <=
                     s.geofence->radius;
    if (s.window) f.window = !(x.t < s.window->start) && !(s.window->end < x.t);
    if (s.marker) f.marker = x.visible_markers.count(s.marker->marker_id) > 0;
    return f;
}

// Does `m` fire on `x`, considered entirely on its own?
inline bool fires(const wandrelay::ArMessage& m, const wandrelay::ContextSample& x) {
    if (!x.wearing) return false;
    if (x.t < m.created_at) return false;
    if (!m.schedule) return true;
    Flags f = condition_flags(*m.schedule, x);
    std::vector<bool> declared;
    for (auto& v : {f.geofence, f.window, f.marker})
        if (v) declared.push_back(*v);
    if (declared.empty()) return false;
    if (m.schedule->specificity == wandrelay::Specificity::Specific)
        return std::find(declared.begin(), declared.end(), false) == declared.end();
    return std::find(declared.begin(), declared.end(), true) != declared.end();
}

// Walks a stream against a fixed message set: delivery time per message id.
inline std::map<std::string, wandrelay::Timestamp> first_deliveries(
    const std::vector<wandrelay::ArMessage>& messages, const std::vector<wandrelay::ContextSample>& stream) {
    std::map<std::string, wandrelay::Timestamp> out;
    for (auto& x : stream)
        for (auto& m : messages)
            if (!out.count(m.message_id) && fires(m, x)) out[m.message_id] = x.t;
    return out;
}

struct Summary {
    double median, mean;
    std::optional<double> sd;
};

inline Summary summarize(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    Summary s{};
    s.median = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / n;
    if (n > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (n - 1));
    }
    return s;
}

inline std::optional<int> rate(int sent, int delivered) {
    if (sent == 0) return std::nullopt;
    return int(std::floor(100.0 * delivered / sent + 0.5));
}

// Per-pair, per-category (sent, delivered) straight off the raw log lines.
// Categories: loc, time, marker, spec, flex, direct.
struct PairCounts {
    std::map<std::string, std::pair<int, int>> by_cat;
};

inline std::string category_of(const nlohmann::json& msg) {
    if (!msg.contains("schedule")) return "direct";
    const auto& s = msg["schedule"];
    int n = int(s.contains("geofence")) + int(s.contains("window")) + int(s.contains("marker"));
    if (n >= 2) return s.value("specificity", "Specific") == "Flexible" ? "flex" : "spec";
    if (s.contains("geofence")) return "loc";
    if (s.contains("window")) return "time";
    return "marker";
}

// Key: "sender/recipient".
inline std::map<std::string, PairCounts> recount(const std::string& log_text) {
    std::map<std::string, nlohmann::json> submitted;  // message id -> message
    std::set<std::string> acked, played;
    std::map<std::string, std::string> final_state;
    std::istringstream in(log_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        std::string kind = j["kind"];
        const auto& p = j["payload"];
        if (kind == "SUBMIT") submitted[p["message"]["message_id"]] = p["message"];
        else if (kind == "ACK" && p.value("ref", "") == "SUBMIT") acked.insert(p["message_id"].get<std::string>());
        else if (kind == "PLAYBACK") played.insert(p["event"]["message_id"].get<std::string>());
        else if (kind == "FINAL_STATE") final_state[p["message_id"]] = p["state"];
    }
    std::map<std::string, PairCounts> out;
    for (auto& [id, msg] : submitted) {
        if (!acked.count(id)) continue;
        auto& c = out[msg["sender_id"].get<std::string>() + "/" + msg["recipient_id"].get<std::string>()]
                      .by_cat[category_of(msg)];
        c.first++;
        auto st = final_state.count(id) ? final_state[id] : "";
        if (played.count(id) && st != "Expired" && st != "Pending" && !st.empty()) c.second++;
    }
    return out;
}

}  // namespace oracle
