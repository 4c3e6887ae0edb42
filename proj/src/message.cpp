#include "wandrelay/message.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "catalog_data.hpp"
#include "wandrelay/error.hpp"

namespace wandrelay {

bool is_legal_transition(MessageState from, MessageState to) noexcept {
    switch (from) {
        case MessageState::Pending:
            return to == MessageState::Delivered || to == MessageState::Expired;
        case MessageState::Delivered:
            return to == MessageState::Reacted || to == MessageState::ReactionDeclined;
        default:
            return false;
    }
}

bool is_terminal_for_delivery(MessageState s) noexcept { return s != MessageState::Pending; }

bool delivery_order_less(const ArMessage& a, const ArMessage& b) noexcept {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.message_id < b.message_id;
}

namespace {

std::vector<ContentItem> load_catalog() {
    const auto doc = nlohmann::json::parse(detail::kCatalogJson);
    std::vector<ContentItem> items;
    for (const auto& j : doc.at("items")) {
        ContentItem item;
        item.content_id = j.at("content_id").get<std::string>();
        item.kind = content_kind_from_string(j.at("kind").get<std::string>()).value();
        item.anchor = anchor_from_string(j.at("anchor").get<std::string>()).value();
        item.has_audio = j.at("has_audio").get<bool>();
        item.default_scale = j.at("default_scale").get<double>();
        items.push_back(std::move(item));
    }
    return items;
}

}  // namespace

const std::vector<ContentItem>& catalog() {
    static const std::vector<ContentItem> items = load_catalog();
    return items;
}

const ContentItem* find_content(std::string_view content_id) {
    const auto& items = catalog();
    auto it = std::find_if(items.begin(), items.end(),
                           [&](const ContentItem& c) { return c.content_id == content_id; });
    return it == items.end() ? nullptr : &*it;
}

void validate_voice_note(const VoiceNote& note) {
    if (!std::isfinite(note.duration) || note.duration <= 0.0) {
        throw Error(Errc::VoiceNoteTooLong, "voice note duration must be positive");
    }
    if (note.duration > kMaxVoiceNoteSeconds) {
        throw Error(Errc::VoiceNoteTooLong,
                    "voice note is " + std::to_string(note.duration) + " s, limit is 10 s");
    }
}

void validate_geofence(const Geofence& fence) {
    if (!is_valid(fence.center)) {
        throw Error(Errc::InvalidCoordinate, "geofence center outside lat/lon bounds");
    }
    if (!(fence.radius >= kMinGeofenceRadius && fence.radius <= kMaxGeofenceRadius)) {
        throw Error(Errc::RadiusOutOfRange,
                    "radius " + std::to_string(fence.radius) + " m not in [7, 14]");
    }
}

void validate_window(const TimeWindow& window) {
    if (!(window.start < window.end)) {
        throw Error(Errc::InvalidWindow, "window end " + format_rfc3339(window.end) +
                                             " is not after start " + format_rfc3339(window.start));
    }
}

void validate_schedule(const TriggerSchedule& schedule, const MarkerSet& declared_markers) {
    if (schedule.condition_count() == 0) {
        throw Error(Errc::EmptySchedule, "schedule declares no condition");
    }
    if (schedule.geofence) validate_geofence(*schedule.geofence);
    if (schedule.window) validate_window(*schedule.window);
    if (schedule.marker && !declared_markers.contains(schedule.marker->marker_id)) {
        throw Error(Errc::UnknownMarker, "marker '" + schedule.marker->marker_id + "' is not declared");
    }
}

void validate_message(const ArMessage& message, const MarkerSet& declared_markers) {
    if (message.message_id.empty()) throw Error(Errc::InvalidPrincipal, "empty message_id");
    if (message.sender_id.empty() || message.recipient_id.empty()) {
        throw Error(Errc::InvalidPrincipal, "sender and recipient must be named");
    }
    if (message.sender_id == message.recipient_id) {
        throw Error(Errc::InvalidPrincipal, "sender and recipient must differ");
    }
    if (find_content(message.content_id) == nullptr) {
        throw Error(Errc::UnknownContent, "content '" + message.content_id + "' not in catalog");
    }
    if (!(message.scale >= kMinScale && message.scale <= kMaxScale)) {
        throw Error(Errc::ScaleOutOfRange, "scale " + std::to_string(message.scale) + " not in [0.1, 10]");
    }
    validate_voice_note(message.voice_note);
    if (message.schedule) validate_schedule(*message.schedule, declared_markers);
}

ArMessage compose(const ComposeArgs& args, const MarkerSet& declared_markers,
                  MessageIdGenerator& ids, Timestamp now) {
    ArMessage m;
    m.sender_id = args.sender_id;
    m.recipient_id = args.recipient_id;
    m.content_id = args.content_id;
    m.scale = args.scale;
    m.voice_note = args.voice_note;
    m.schedule = args.schedule;
    m.created_at = now;
    m.state = MessageState::Pending;
    m.message_id = "unassigned";
    validate_message(m, declared_markers);
    m.message_id = ids.next(now);
    return m;
}

std::string_view to_string(ContentKind k) noexcept {
    return k == ContentKind::VirtualObject ? "VirtualObject" : "Avatar";
}

std::string_view to_string(Anchor a) noexcept {
    return a == Anchor::PinnedToGround ? "PinnedToGround" : "Floating";
}

std::string_view to_string(Specificity s) noexcept {
    return s == Specificity::Specific ? "Specific" : "Flexible";
}

std::string_view to_string(MessageState s) noexcept {
    switch (s) {
        case MessageState::Pending: return "Pending";
        case MessageState::Delivered: return "Delivered";
        case MessageState::Reacted: return "Reacted";
        case MessageState::ReactionDeclined: return "ReactionDeclined";
        case MessageState::Expired: return "Expired";
    }
    return "Pending";
}

std::optional<ContentKind> content_kind_from_string(std::string_view s) noexcept {
    if (s == "VirtualObject") return ContentKind::VirtualObject;
    if (s == "Avatar") return ContentKind::Avatar;
    return std::nullopt;
}

std::optional<Anchor> anchor_from_string(std::string_view s) noexcept {
    if (s == "PinnedToGround") return Anchor::PinnedToGround;
    if (s == "Floating") return Anchor::Floating;
    return std::nullopt;
}

std::optional<Specificity> specificity_from_string(std::string_view s) noexcept {
    if (s == "Specific") return Specificity::Specific;
    if (s == "Flexible") return Specificity::Flexible;
    return std::nullopt;
}

std::optional<MessageState> message_state_from_string(std::string_view s) noexcept {
    for (auto st : {MessageState::Pending, MessageState::Delivered, MessageState::Reacted,
                    MessageState::ReactionDeclined, MessageState::Expired}) {
        if (to_string(st) == s) return st;
    }
    return std::nullopt;
}

}  // namespace wandrelay
