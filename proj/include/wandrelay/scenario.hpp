#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wandrelay/geo.hpp"
#include "wandrelay/message.hpp"
#include "wandrelay/time.hpp"
#include "wandrelay/reaction.hpp"
#include "wandrelay/trigger_engine.hpp"

namespace wandrelay {

inline constexpr std::string_view kScenarioSchema = "wandrelay.scenario/1";

// A marker counts as seen when the recipient is within this distance of it.
inline constexpr double kMarkerVisibilityMeters = 5.0;

struct MarkerPlacement {
    std::string marker_id;
    LatLon position;
};

struct Waypoint {
    Timestamp t;
    LatLon position;
};

struct RecipientPlan {
    std::string principal;
    std::vector<TimeWindow> wear_sessions;
    std::vector<Waypoint> trajectory;  // strictly increasing t
};

struct ScriptedMessage {
    Timestamp at;
    std::string ref;  // scenario-local label, used by consent responses
    ComposeArgs args;
};

struct ScriptedUtterance {
    double offset = 0.0;  // seconds after capture start, within [0, 10]
    std::string transcript;
};

enum class ConsentAnswer { Yes, No, None };

struct ConsentResponse {
    std::string ref;
    ConsentAnswer answer = ConsentAnswer::Yes;
    std::vector<ScriptedUtterance> utterances;
};

struct ConsentPolicy {
    ConsentAnswer default_answer = ConsentAnswer::Yes;
    std::vector<ScriptedUtterance> default_utterances;
    std::vector<ConsentResponse> responses;

    const ConsentResponse* find(std::string_view ref) const;
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    Millis tick{1000};
    std::vector<MarkerPlacement> markers;
    std::vector<RecipientPlan> recipients;
    std::vector<ScriptedMessage> sender_script;
    ConsentPolicy consent_policy;
    Timestamp end;

    MarkerSet marker_ids() const;
    std::vector<std::string> senders() const;  // in first-appearance order
};

// Throws Error{ParseError} with a field path (or the JSON line/column).
Scenario parse_scenario(std::string_view text, std::string_view origin = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

bool wearing_at(const RecipientPlan& plan, Timestamp t) noexcept;
LatLon position_at(const RecipientPlan& plan, Timestamp t) noexcept;
MarkerSet markers_visible_from(const Scenario& scenario, const LatLon& p);

// One sample per tick from the first waypoint through scenario end.
std::vector<ContextSample> sample_stream(const Scenario& scenario, const RecipientPlan& plan);

std::string_view to_string(ConsentAnswer a) noexcept;

}  // namespace wandrelay
