#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "wandrelay/delivery.hpp"
#include "wandrelay/message.hpp"
#include "wandrelay/reaction.hpp"
#include "wandrelay/trigger_engine.hpp"

namespace wandrelay::codec {

using nlohmann::json;

// Canonical message document version.
inline constexpr int kMessageSchemaVersion = 1;

json encode(const LatLon& p);
json encode(const VoiceNote& v);
json encode(const Geofence& g);
json encode(const TimeWindow& w);
json encode(const TriggerSchedule& s);
json encode(const ArMessage& m);
json encode(const ContentItem& c);
json encode(const ContextSample& s);
json encode(const ConditionResult& r);
json encode(const DeliveryRecord& d);
json encode(const SceneFrame& f);
json encode(const Utterance& u);
json encode(const RenderDescriptor& r);
json encode(const ReactionRecord& r);
json encode(const PlaybackEvent& e);
json encode(const SenderVisibleRecord& r);

// Decoders throw Error{ParseError} naming the offending field path.
LatLon decode_latlon(const json& j, std::string_view path = "position");
VoiceNote decode_voice_note(const json& j, std::string_view path = "voice_note");
Geofence decode_geofence(const json& j, std::string_view path = "geofence");
TimeWindow decode_window(const json& j, std::string_view path = "window");
TriggerSchedule decode_schedule(const json& j, std::string_view path = "schedule");
ArMessage decode_message(const json& j, std::string_view path = "message");
ContentItem decode_content_item(const json& j, std::string_view path = "item");
ContextSample decode_sample(const json& j, std::string_view path = "sample");
ConditionResult decode_condition_result(const json& j, std::string_view path = "satisfied");
DeliveryRecord decode_delivery(const json& j, std::string_view path = "delivery");
SceneFrame decode_scene_frame(const json& j, std::string_view path = "frame");
Utterance decode_utterance(const json& j, std::string_view path = "utterance");
RenderDescriptor decode_render(const json& j, std::string_view path = "render");
ReactionRecord decode_reaction(const json& j, std::string_view path = "reaction");
PlaybackEvent decode_playback(const json& j, std::string_view path = "playback");
SenderVisibleRecord decode_sender_record(const json& j, std::string_view path = "record");

std::string serialize(const ArMessage& m);
ArMessage deserialize_message(std::string_view text);

// Field access helpers shared with the other JSON readers.
const json& require(const json& j, std::string_view key, std::string_view path);
std::string require_string(const json& j, std::string_view key, std::string_view path);
double require_number(const json& j, std::string_view key, std::string_view path);
bool require_bool(const json& j, std::string_view key, std::string_view path);
Timestamp require_time(const json& j, std::string_view key, std::string_view path);
[[noreturn]] void fail(std::string_view path, std::string_view what);

}  // namespace wandrelay::codec
