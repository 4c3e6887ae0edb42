#include "wandrelay/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wandrelay/codec.hpp"
#include "wandrelay/error.hpp"

namespace wandrelay {

using nlohmann::json;

namespace {

std::string at_index(std::string_view path, std::size_t i) {
    return std::string(path) + "[" + std::to_string(i) + "]";
}

const json& require_array(const json& j, std::string_view key, std::string_view path) {
    const auto& v = codec::require(j, key, path);
    if (!v.is_array()) codec::fail(std::string(path) + "." + std::string(key), "expected array");
    return v;
}

ConsentAnswer parse_answer(const json& j, std::string_view key, std::string_view path) {
    const auto text = codec::require_string(j, key, path);
    if (text == "Yes") return ConsentAnswer::Yes;
    if (text == "No") return ConsentAnswer::No;
    if (text == "None") return ConsentAnswer::None;
    codec::fail(std::string(path) + "." + std::string(key), "expected Yes, No or None");
}

std::vector<ScriptedUtterance> parse_utterances(const json& j, std::string_view path) {
    if (!j.is_array()) codec::fail(path, "expected array");
    std::vector<ScriptedUtterance> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto p = at_index(path, i);
        ScriptedUtterance u{codec::require_number(j[i], "offset", p), codec::require_string(j[i], "transcript", p)};
        if (u.offset < 0.0 || u.offset > millis_to_seconds(kReactionLength)) {
            codec::fail(p + ".offset", "must lie within the 10 s capture");
        }
        out.push_back(std::move(u));
    }
    return out;
}

}  // namespace

const ConsentResponse* ConsentPolicy::find(std::string_view ref) const {
    for (const auto& r : responses) {
        if (r.ref == ref) return &r;
    }
    return nullptr;
}

MarkerSet Scenario::marker_ids() const {
    MarkerSet out;
    for (const auto& m : markers) out.insert(m.marker_id);
    return out;
}

std::vector<std::string> Scenario::senders() const {
    std::vector<std::string> out;
    for (const auto& s : sender_script) {
        if (std::find(out.begin(), out.end(), s.args.sender_id) == out.end()) out.push_back(s.args.sender_id);
    }
    return out;
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ParseError, std::string(origin) + ": " + e.what());
    }

    const std::string root(origin);
    Scenario sc;
    if (codec::require_string(doc, "schema", root) != kScenarioSchema) {
        codec::fail(root + ".schema", "expected " + std::string(kScenarioSchema));
    }
    sc.name = doc.value("name", std::string{});
    const auto& seed = codec::require(doc, "seed", root);
    if (!seed.is_number_integer()) codec::fail(root + ".seed", "expected integer");
    sc.seed = seed.get<std::uint64_t>();
    if (doc.contains("tick")) {
        const double tick = codec::require_number(doc, "tick", root);
        if (tick <= 0.0) codec::fail(root + ".tick", "must be positive");
        sc.tick = seconds_to_millis(tick);
    }
    sc.end = codec::require_time(doc, "end", root);

    const auto& markers = require_array(doc, "markers", root);
    std::set<std::string> marker_names;
    for (std::size_t i = 0; i < markers.size(); ++i) {
        const auto p = at_index(root + ".markers", i);
        MarkerPlacement m{codec::require_string(markers[i], "marker_id", p),
                          codec::decode_latlon(codec::require(markers[i], "position", p), p + ".position")};
        if (!marker_names.insert(m.marker_id).second) codec::fail(p + ".marker_id", "duplicate marker");
        sc.markers.push_back(std::move(m));
    }

    const auto& recipients = require_array(doc, "recipients", root);
    std::set<std::string> recipient_names;
    for (std::size_t i = 0; i < recipients.size(); ++i) {
        const auto p = at_index(root + ".recipients", i);
        RecipientPlan plan;
        plan.principal = codec::require_string(recipients[i], "principal", p);
        if (plan.principal.empty()) codec::fail(p + ".principal", "must not be empty");
        if (!recipient_names.insert(plan.principal).second) codec::fail(p + ".principal", "duplicate recipient");

        const auto& wear = require_array(recipients[i], "wear_sessions", p);
        for (std::size_t k = 0; k < wear.size(); ++k) {
            const auto wp = at_index(p + ".wear_sessions", k);
            auto w = codec::decode_window(wear[k], wp);
            if (!(w.start < w.end)) codec::fail(wp, "end must be after start");
            plan.wear_sessions.push_back(w);
        }
        std::sort(plan.wear_sessions.begin(), plan.wear_sessions.end(),
                  [](const TimeWindow& a, const TimeWindow& b) { return a.start < b.start; });

        const auto& traj = require_array(recipients[i], "trajectory", p);
        if (traj.empty()) codec::fail(p + ".trajectory", "needs at least one waypoint");
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const auto wp = at_index(p + ".trajectory", k);
            Waypoint w{codec::require_time(traj[k], "t", wp),
                       LatLon{codec::require_number(traj[k], "lat", wp), codec::require_number(traj[k], "lon", wp)}};
            if (!is_valid(w.position)) codec::fail(wp, "coordinate out of range");
            if (!plan.trajectory.empty() && !(w.t > plan.trajectory.back().t)) {
                codec::fail(wp + ".t", "waypoints must be strictly increasing in time");
            }
            plan.trajectory.push_back(w);
        }
        const Timestamp first_needed =
            plan.wear_sessions.empty() ? plan.trajectory.front().t : plan.wear_sessions.front().start;
        if (plan.trajectory.front().t > first_needed || plan.trajectory.back().t < sc.end) {
            codec::fail(p + ".trajectory", "must span from the first wear session start to scenario end");
        }
        sc.recipients.push_back(std::move(plan));
    }

    const auto declared = sc.marker_ids();
    const auto& script = require_array(doc, "sender_script", root);
    std::set<std::string> refs;
    for (std::size_t i = 0; i < script.size(); ++i) {
        const auto p = at_index(root + ".sender_script", i);
        const auto& e = script[i];
        ScriptedMessage s;
        s.at = codec::require_time(e, "at", p);
        s.ref = e.contains("ref") ? codec::require_string(e, "ref", p) : "msg-" + std::to_string(i);
        if (!refs.insert(s.ref).second) codec::fail(p + ".ref", "duplicate ref '" + s.ref + "'");
        s.args.sender_id = codec::require_string(e, "sender", p);
        s.args.recipient_id = codec::require_string(e, "recipient", p);
        s.args.content_id = codec::require_string(e, "content_id", p);
        s.args.scale = e.contains("scale") ? codec::require_number(e, "scale", p) : 1.0;
        s.args.voice_note = codec::decode_voice_note(codec::require(e, "voice_note", p), p + ".voice_note");
        if (e.contains("schedule")) s.args.schedule = codec::decode_schedule(e.at("schedule"), p + ".schedule");
        if (!recipient_names.contains(s.args.recipient_id)) {
            codec::fail(p + ".recipient", "'" + s.args.recipient_id + "' is not a scenario recipient");
        }
        if (recipient_names.contains(s.args.sender_id)) {
            codec::fail(p + ".sender", "a principal cannot be both sender and recipient in a scenario");
        }
        if (s.at > sc.end) codec::fail(p + ".at", "after scenario end");
        try {
            ArMessage probe;
            probe.message_id = s.ref;
            probe.sender_id = s.args.sender_id;
            probe.recipient_id = s.args.recipient_id;
            probe.content_id = s.args.content_id;
            probe.scale = s.args.scale;
            probe.voice_note = s.args.voice_note;
            probe.schedule = s.args.schedule;
            validate_message(probe, declared);
        } catch (const Error& err) {
            codec::fail(p, std::string(errc_name(err.code())) + ": " + err.detail());
        }
        sc.sender_script.push_back(std::move(s));
    }

    if (doc.contains("consent_policy")) {
        const auto& cp = doc.at("consent_policy");
        const auto p = root + ".consent_policy";
        if (cp.contains("default")) sc.consent_policy.default_answer = parse_answer(cp, "default", p);
        if (cp.contains("default_utterances")) {
            sc.consent_policy.default_utterances = parse_utterances(cp.at("default_utterances"), p + ".default_utterances");
        }
        if (cp.contains("responses")) {
            const auto& rs = require_array(cp, "responses", p);
            for (std::size_t i = 0; i < rs.size(); ++i) {
                const auto rp = at_index(p + ".responses", i);
                ConsentResponse r;
                r.ref = codec::require_string(rs[i], "ref", rp);
                if (!refs.contains(r.ref)) codec::fail(rp + ".ref", "no sender_script entry '" + r.ref + "'");
                r.answer = parse_answer(rs[i], "answer", rp);
                if (rs[i].contains("utterances")) r.utterances = parse_utterances(rs[i].at("utterances"), rp + ".utterances");
                sc.consent_policy.responses.push_back(std::move(r));
            }
        }
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, path.string() + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.filename().string());
}

bool wearing_at(const RecipientPlan& plan, Timestamp t) noexcept {
    return std::any_of(plan.wear_sessions.begin(), plan.wear_sessions.end(),
                       [&](const TimeWindow& w) { return w.start <= t && t <= w.end; });
}

LatLon position_at(const RecipientPlan& plan, Timestamp t) noexcept {
    const auto& tr = plan.trajectory;
    if (t <= tr.front().t) return tr.front().position;
    if (t >= tr.back().t) return tr.back().position;
    auto hi = std::upper_bound(tr.begin(), tr.end(), t, [](Timestamp x, const Waypoint& w) { return x < w.t; });
    auto lo = hi - 1;
    if (lo->t == t) return lo->position;
    const double span = static_cast<double>((hi->t - lo->t).count());
    const double into = static_cast<double>((t - lo->t).count());
    return interpolate(lo->position, hi->position, into / span);
}

MarkerSet markers_visible_from(const Scenario& scenario, const LatLon& p) {
    MarkerSet out;
    for (const auto& m : scenario.markers) {
        if (haversine_distance(m.position, p) <= kMarkerVisibilityMeters) out.insert(m.marker_id);
    }
    return out;
}

std::vector<ContextSample> sample_stream(const Scenario& scenario, const RecipientPlan& plan) {
    std::vector<ContextSample> out;
    for (Timestamp t = plan.trajectory.front().t; t <= scenario.end; t += scenario.tick) {
        ContextSample s;
        s.recipient_id = plan.principal;
        s.t = t;
        s.position = position_at(plan, t);
        s.wearing = wearing_at(plan, t);
        s.visible_markers = markers_visible_from(scenario, s.position);
        out.push_back(std::move(s));
    }
    return out;
}

std::string_view to_string(ConsentAnswer a) noexcept {
    switch (a) {
        case ConsentAnswer::Yes: return "Yes";
        case ConsentAnswer::No: return "No";
        case ConsentAnswer::None: return "None";
    }
    return "None";
}

}  // namespace wandrelay
