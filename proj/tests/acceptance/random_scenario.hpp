#pragma once
// Seeded random scenarios for the property runs.

#include <random>
#include <string>

#include "wandrelay/scenario.hpp"

namespace gen {

using namespace wandrelay;

inline LatLon offset(LatLon base, double north_m, double east_m) {
    constexpr double per_deg = 111195.0;
    return {base.lat + north_m / per_deg, base.lon + east_m / (per_deg * std::cos(base.lat * 3.14159265358979 / 180))};
}

struct Options {
    int max_recipients = 2;
    int max_messages = 10;
    bool compound_only = false;
};

inline Scenario random_scenario(std::uint64_t seed, Options opt = {}) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto pick = [&](int n) { return int(rng() % std::uint64_t(n)); };

    Scenario sc;
    sc.name = "random-" + std::to_string(seed);
    sc.seed = seed;
    sc.tick = Millis{2000};
    const Timestamp t0 = parse_rfc3339("2022-03-01T12:00:00Z") + Millis{1000 * pick(86400)};
    const int span_s = 300 + 2 * pick(100);
    sc.end = t0 + Millis{1000 * span_s};
    const LatLon center{uni(-60, 60), uni(-170, 170)};

    for (int i = 0; i < 4; ++i)
        sc.markers.push_back({"poster_" + std::to_string(i + 1), offset(center, uni(-80, 80), uni(-80, 80))});

    const int n_rec = 1 + pick(opt.max_recipients);
    std::vector<LatLon> visited;
    for (int r = 0; r < n_rec; ++r) {
        RecipientPlan plan;
        plan.principal = "W" + std::to_string(r + 1);
        auto a = t0 + Millis{1000 * pick(span_s / 3)};
        auto b = a + Millis{1000 * (30 + pick(span_s / 2))};
        plan.wear_sessions.push_back({a, std::min(b, sc.end)});
        if (pick(2) && b + Millis{20000} < sc.end) plan.wear_sessions.push_back({b + Millis{10000}, sc.end});
        LatLon p = offset(center, uni(-60, 60), uni(-60, 60));
        Timestamp t = t0;
        plan.trajectory.push_back({t, p});
        while (t < sc.end) {
            t = std::min(sc.end, t + Millis{1000 * (15 + pick(45))});
            // Sometimes walk straight onto a marker.
            p = pick(3) == 0 ? sc.markers[pick(4)].position : offset(p, uni(-40, 40), uni(-40, 40));
            plan.trajectory.push_back({t, p});
            visited.push_back(p);
        }
        sc.recipients.push_back(std::move(plan));
    }

    const int n_msg = 1 + pick(opt.max_messages);
    const std::string contents[] = {"dog", "bee", "tree", "avatar_wave", "cake", "bird"};
    for (int i = 0; i < n_msg; ++i) {
        ScriptedMessage m;
        m.at = t0 + Millis{1000 * pick(span_s - 30)};
        m.ref = "m" + std::to_string(i);
        m.args.sender_id = "S" + std::to_string(1 + pick(2));
        m.args.recipient_id = sc.recipients[pick(n_rec)].principal;
        m.args.content_id = contents[pick(6)];
        m.args.scale = 0.5 + pick(4) * 0.5;
        m.args.voice_note = {double(1 + pick(10)), "note " + std::to_string(i)};
        int shape = opt.compound_only ? 4 + pick(4) : pick(8);  // 0 direct, 1-3 single, 4-7 compound
        if (shape > 0) {
            TriggerSchedule s;
            auto fence = [&] {
                LatLon c = pick(2) ? visited[pick(int(visited.size()))] : offset(center, uni(-150, 150), uni(-150, 150));
                return Geofence{offset(c, uni(-8, 8), uni(-8, 8)), uni(7, 14)};
            };
            auto window = [&] {
                auto a = t0 + Millis{1000 * pick(span_s)};
                return TimeWindow{a, a + Millis{1000 * (10 + pick(120))}};
            };
            auto marker = [&] { return MarkerCondition{sc.markers[pick(4)].marker_id}; };
            if (shape == 1) s.geofence = fence();
            if (shape == 2) s.window = window();
            if (shape == 3) s.marker = marker();
            if (shape == 4 || shape == 7) s.geofence = fence(), s.window = window();
            if (shape == 5 || shape == 7) s.window = window(), s.marker = marker();
            if (shape == 6) s.geofence = fence(), s.marker = marker();
            s.specificity = s.is_compound() && pick(2) ? Specificity::Flexible : Specificity::Specific;
            m.args.schedule = s;
        }
        sc.sender_script.push_back(std::move(m));
    }
    std::stable_sort(sc.sender_script.begin(), sc.sender_script.end(),
                     [](const ScriptedMessage& a, const ScriptedMessage& b) { return a.at < b.at; });

    const ConsentAnswer answers[] = {ConsentAnswer::Yes, ConsentAnswer::No, ConsentAnswer::None};
    sc.consent_policy.default_answer = answers[pick(3)];
    sc.consent_policy.default_utterances = {{1.0, "ha, nice"}};
    for (auto& m : sc.sender_script) {
        if (pick(2)) continue;
        ConsentResponse r;
        r.ref = m.ref;
        r.answer = answers[pick(3)];
        if (r.answer != ConsentAnswer::Yes)
            r.utterances = {{double(pick(10)), "SENTINEL-" + m.ref + "-" + std::to_string(seed)}};
        else
            r.utterances = {{double(pick(10)), "happy to share " + m.ref}};
        sc.consent_policy.responses.push_back(r);
    }
    return sc;
}

// Same scenario with every compound schedule forced to one specificity.
inline Scenario with_specificity(Scenario sc, Specificity s) {
    for (auto& m : sc.sender_script)
        if (m.args.schedule && m.args.schedule->is_compound()) m.args.schedule->specificity = s;
    return sc;
}

}  // namespace gen
