#include "wandrelay/codec.hpp"

#include <cmath>

#include "wandrelay/error.hpp"

namespace wandrelay::codec {

namespace {

std::string join(std::string_view path, std::string_view key) {
    std::string out(path);
    out += '.';
    out += key;
    return out;
}

template <typename T, typename F>
T parse_enum(const json& j, std::string_view key, std::string_view path, F from_string) {
    const auto text = require_string(j, key, path);
    auto v = from_string(text);
    if (!v) fail(join(path, key), "unknown value '" + text + "'");
    return *v;
}

MarkerSet decode_marker_set(const json& j, std::string_view path) {
    if (!j.is_array()) fail(path, "expected array of marker ids");
    MarkerSet out;
    for (const auto& m : j) {
        if (!m.is_string()) fail(path, "marker ids must be strings");
        out.insert(m.get<std::string>());
    }
    return out;
}

json encode_marker_set(const MarkerSet& s) {
    json arr = json::array();
    for (const auto& m : s) arr.push_back(m);
    return arr;
}

}  // namespace

void fail(std::string_view path, std::string_view what) {
    throw Error(Errc::ParseError, std::string(path) + ": " + std::string(what));
}

const json& require(const json& j, std::string_view key, std::string_view path) {
    if (!j.is_object()) fail(path, "expected object");
    auto it = j.find(key);
    if (it == j.end()) fail(join(path, key), "missing field");
    return *it;
}

std::string require_string(const json& j, std::string_view key, std::string_view path) {
    const auto& v = require(j, key, path);
    if (!v.is_string()) fail(join(path, key), "expected string");
    return v.get<std::string>();
}

double require_number(const json& j, std::string_view key, std::string_view path) {
    const auto& v = require(j, key, path);
    if (!v.is_number()) fail(join(path, key), "expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(join(path, key), "expected finite number");
    return d;
}

bool require_bool(const json& j, std::string_view key, std::string_view path) {
    const auto& v = require(j, key, path);
    if (!v.is_boolean()) fail(join(path, key), "expected boolean");
    return v.get<bool>();
}

Timestamp require_time(const json& j, std::string_view key, std::string_view path) {
    const auto text = require_string(j, key, path);
    try {
        return parse_rfc3339(text);
    } catch (const Error& e) {
        fail(join(path, key), e.detail());
    }
}

json encode(const LatLon& p) { return {{"lat", p.lat}, {"lon", p.lon}}; }

LatLon decode_latlon(const json& j, std::string_view path) {
    LatLon p{require_number(j, "lat", path), require_number(j, "lon", path)};
    if (!is_valid(p)) fail(path, "coordinate out of range");
    return p;
}

json encode(const VoiceNote& v) { return {{"duration", v.duration}, {"transcript", v.transcript}}; }

VoiceNote decode_voice_note(const json& j, std::string_view path) {
    return {require_number(j, "duration", path), require_string(j, "transcript", path)};
}

json encode(const Geofence& g) { return {{"center", encode(g.center)}, {"radius", g.radius}}; }

Geofence decode_geofence(const json& j, std::string_view path) {
    return {decode_latlon(require(j, "center", path), join(path, "center")),
            require_number(j, "radius", path)};
}

json encode(const TimeWindow& w) {
    return {{"start", format_rfc3339(w.start)}, {"end", format_rfc3339(w.end)}};
}

TimeWindow decode_window(const json& j, std::string_view path) {
    return {require_time(j, "start", path), require_time(j, "end", path)};
}

json encode(const TriggerSchedule& s) {
    json j = json::object();
    if (s.geofence) j["geofence"] = encode(*s.geofence);
    if (s.window) j["window"] = encode(*s.window);
    if (s.marker) j["marker"] = {{"marker_id", s.marker->marker_id}};
    j["specificity"] = to_string(s.specificity);
    return j;
}

TriggerSchedule decode_schedule(const json& j, std::string_view path) {
    if (!j.is_object()) fail(path, "expected object");
    TriggerSchedule s;
    if (j.contains("geofence")) s.geofence = decode_geofence(j.at("geofence"), join(path, "geofence"));
    if (j.contains("window")) s.window = decode_window(j.at("window"), join(path, "window"));
    if (j.contains("marker")) {
        s.marker = MarkerCondition{require_string(j.at("marker"), "marker_id", join(path, "marker"))};
    }
    if (j.contains("specificity")) {
        s.specificity = parse_enum<Specificity>(j, "specificity", path, specificity_from_string);
    } else if (s.is_compound()) {
        fail(join(path, "specificity"), "required when two or more conditions are present");
    }
    return s;
}

json encode(const ArMessage& m) {
    json j = {{"v", kMessageSchemaVersion},
              {"message_id", m.message_id},
              {"sender_id", m.sender_id},
              {"recipient_id", m.recipient_id},
              {"content_id", m.content_id},
              {"scale", m.scale},
              {"voice_note", encode(m.voice_note)},
              {"created_at", format_rfc3339(m.created_at)},
              {"state", to_string(m.state)}};
    if (m.schedule) j["schedule"] = encode(*m.schedule);
    return j;
}

ArMessage decode_message(const json& j, std::string_view path) {
    const auto& v = require(j, "v", path);
    if (!v.is_number_integer() || v.get<int>() != kMessageSchemaVersion) {
        fail(join(path, "v"), "unsupported message schema version");
    }
    ArMessage m;
    m.message_id = require_string(j, "message_id", path);
    m.sender_id = require_string(j, "sender_id", path);
    m.recipient_id = require_string(j, "recipient_id", path);
    m.content_id = require_string(j, "content_id", path);
    m.scale = require_number(j, "scale", path);
    m.voice_note = decode_voice_note(require(j, "voice_note", path), join(path, "voice_note"));
    if (j.contains("schedule")) m.schedule = decode_schedule(j.at("schedule"), join(path, "schedule"));
    m.created_at = require_time(j, "created_at", path);
    m.state = parse_enum<MessageState>(j, "state", path, message_state_from_string);
    return m;
}

json encode(const ContentItem& c) {
    return {{"content_id", c.content_id},
            {"kind", to_string(c.kind)},
            {"anchor", to_string(c.anchor)},
            {"has_audio", c.has_audio},
            {"default_scale", c.default_scale}};
}

ContentItem decode_content_item(const json& j, std::string_view path) {
    ContentItem c;
    c.content_id = require_string(j, "content_id", path);
    c.kind = parse_enum<ContentKind>(j, "kind", path, content_kind_from_string);
    c.anchor = parse_enum<Anchor>(j, "anchor", path, anchor_from_string);
    c.has_audio = require_bool(j, "has_audio", path);
    c.default_scale = require_number(j, "default_scale", path);
    return c;
}

json encode(const ContextSample& s) {
    return {{"recipient_id", s.recipient_id},
            {"t", format_rfc3339(s.t)},
            {"position", encode(s.position)},
            {"wearing", s.wearing},
            {"visible_markers", encode_marker_set(s.visible_markers)}};
}

ContextSample decode_sample(const json& j, std::string_view path) {
    ContextSample s;
    s.recipient_id = require_string(j, "recipient_id", path);
    s.t = require_time(j, "t", path);
    s.position = decode_latlon(require(j, "position", path), join(path, "position"));
    s.wearing = require_bool(j, "wearing", path);
    if (j.contains("visible_markers")) {
        s.visible_markers = decode_marker_set(j.at("visible_markers"), join(path, "visible_markers"));
    }
    return s;
}

json encode(const ConditionResult& r) {
    json j = json::object();
    if (r.geofence_hit) j["geofence_hit"] = *r.geofence_hit;
    if (r.window_hit) j["window_hit"] = *r.window_hit;
    if (r.marker_hit) j["marker_hit"] = *r.marker_hit;
    return j;
}

ConditionResult decode_condition_result(const json& j, std::string_view path) {
    if (!j.is_object()) fail(path, "expected object");
    ConditionResult r;
    if (j.contains("geofence_hit")) r.geofence_hit = require_bool(j, "geofence_hit", path);
    if (j.contains("window_hit")) r.window_hit = require_bool(j, "window_hit", path);
    if (j.contains("marker_hit")) r.marker_hit = require_bool(j, "marker_hit", path);
    return r;
}

json encode(const DeliveryRecord& d) {
    return {{"message_id", d.message_id},
            {"delivered_at", format_rfc3339(d.delivered_at)},
            {"triggering_sample", encode(d.triggering_sample)},
            {"satisfied", encode(d.satisfied)}};
}

DeliveryRecord decode_delivery(const json& j, std::string_view path) {
    return {require_string(j, "message_id", path), require_time(j, "delivered_at", path),
            decode_sample(require(j, "triggering_sample", path), join(path, "triggering_sample")),
            decode_condition_result(require(j, "satisfied", path), join(path, "satisfied"))};
}

json encode(const SceneFrame& f) {
    json j = {{"t", format_rfc3339(f.t)}};
    if (f.position) j["position"] = encode(*f.position);
    if (f.visible_markers) j["visible_markers"] = encode_marker_set(*f.visible_markers);
    return j;
}

SceneFrame decode_scene_frame(const json& j, std::string_view path) {
    SceneFrame f;
    f.t = require_time(j, "t", path);
    if (j.contains("position")) f.position = decode_latlon(j.at("position"), join(path, "position"));
    if (j.contains("visible_markers")) {
        f.visible_markers = decode_marker_set(j.at("visible_markers"), join(path, "visible_markers"));
    }
    return f;
}

json encode(const Utterance& u) { return {{"t", format_rfc3339(u.t)}, {"transcript", u.transcript}}; }

Utterance decode_utterance(const json& j, std::string_view path) {
    return {require_time(j, "t", path), require_string(j, "transcript", path)};
}

json encode(const RenderDescriptor& r) {
    return {{"content_id", r.content_id}, {"anchor", to_string(r.anchor)}, {"scale", r.scale}};
}

RenderDescriptor decode_render(const json& j, std::string_view path) {
    return {require_string(j, "content_id", path),
            parse_enum<Anchor>(j, "anchor", path, anchor_from_string), require_number(j, "scale", path)};
}

json encode(const ReactionRecord& r) {
    json scene = json::array();
    for (const auto& f : r.tracks.scene) {
        scene.push_back({{"t", format_rfc3339(f.t)}, {"overlay", encode(f.overlay)}});
    }
    json audio = json::array();
    for (const auto& u : r.tracks.recipient_audio) audio.push_back(encode(u));
    return {{"message_id", r.message_id},
            {"started_at", format_rfc3339(r.started_at)},
            {"tracks",
             {{"scene", scene},
              {"recipient_audio", audio},
              {"sender_voice_note", encode(r.tracks.sender_voice_note)}}},
            {"consent", to_string(r.consent)}};
}

ReactionRecord decode_reaction(const json& j, std::string_view path) {
    ReactionRecord r;
    r.message_id = require_string(j, "message_id", path);
    r.started_at = require_time(j, "started_at", path);
    const auto tracks_path = join(path, "tracks");
    const auto& tracks = require(j, "tracks", path);
    const auto& scene = require(tracks, "scene", tracks_path);
    if (!scene.is_array()) fail(join(tracks_path, "scene"), "expected array");
    for (const auto& f : scene) {
        r.tracks.scene.push_back({require_time(f, "t", join(tracks_path, "scene")),
                                  decode_render(require(f, "overlay", join(tracks_path, "scene")),
                                                join(tracks_path, "scene.overlay"))});
    }
    const auto& audio = require(tracks, "recipient_audio", tracks_path);
    if (!audio.is_array()) fail(join(tracks_path, "recipient_audio"), "expected array");
    for (const auto& u : audio) {
        r.tracks.recipient_audio.push_back(decode_utterance(u, join(tracks_path, "recipient_audio")));
    }
    r.tracks.sender_voice_note = decode_voice_note(require(tracks, "sender_voice_note", tracks_path),
                                                   join(tracks_path, "sender_voice_note"));
    if (parse_enum<Consent>(j, "consent", path, consent_from_string) != Consent::Yes) {
        fail(join(path, "consent"), "a reaction record only exists with consent Yes");
    }
    return r;
}

json encode(const PlaybackEvent& e) {
    return {{"message_id", e.message_id},
            {"flash", {{"at", format_rfc3339(e.flash_at)}, {"duration", millis_to_seconds(e.flash_duration)}}},
            {"render",
             {{"at", format_rfc3339(e.render_at)},
              {"content_id", e.render.content_id},
              {"anchor", to_string(e.render.anchor)},
              {"scale", e.render.scale}}},
            {"voice_note", encode(e.voice_note)}};
}

PlaybackEvent decode_playback(const json& j, std::string_view path) {
    PlaybackEvent e;
    e.message_id = require_string(j, "message_id", path);
    const auto& flash = require(j, "flash", path);
    e.flash_at = require_time(flash, "at", join(path, "flash"));
    e.flash_duration = seconds_to_millis(require_number(flash, "duration", join(path, "flash")));
    const auto& render = require(j, "render", path);
    e.render_at = require_time(render, "at", join(path, "render"));
    e.render = decode_render(render, join(path, "render"));
    e.voice_note = decode_voice_note(require(j, "voice_note", path), join(path, "voice_note"));
    return e;
}

json encode(const SenderVisibleRecord& r) {
    json j = {{"message_id", r.message_id}, {"state", to_string(r.state)}};
    if (r.delivered_at) j["delivered_at"] = format_rfc3339(*r.delivered_at);
    if (r.reaction) j["reaction"] = encode(*r.reaction);
    return j;
}

SenderVisibleRecord decode_sender_record(const json& j, std::string_view path) {
    SenderVisibleRecord r;
    r.message_id = require_string(j, "message_id", path);
    r.state = parse_enum<MessageState>(j, "state", path, message_state_from_string);
    if (j.contains("delivered_at")) r.delivered_at = require_time(j, "delivered_at", path);
    if (j.contains("reaction")) r.reaction = decode_reaction(j.at("reaction"), join(path, "reaction"));
    return r;
}

std::string serialize(const ArMessage& m) { return encode(m).dump(); }

ArMessage deserialize_message(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("message", e.what());
    }
    return decode_message(j);
}

}  // namespace wandrelay::codec
