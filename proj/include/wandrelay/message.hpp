#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wandrelay/geo.hpp"
#include "wandrelay/ids.hpp"
#include "wandrelay/time.hpp"

namespace wandrelay {

inline constexpr double kMaxVoiceNoteSeconds = 10.0;
inline constexpr double kMinGeofenceRadius = 7.0;
inline constexpr double kMaxGeofenceRadius = 14.0;
inline constexpr double kMinScale = 0.1;
inline constexpr double kMaxScale = 10.0;

enum class ContentKind { VirtualObject, Avatar };
enum class Anchor { PinnedToGround, Floating };

struct ContentItem {
    std::string content_id;
    ContentKind kind = ContentKind::VirtualObject;
    Anchor anchor = Anchor::PinnedToGround;
    bool has_audio = false;
    double default_scale = 1.0;

    friend bool operator==(const ContentItem&, const ContentItem&) = default;
};

// Audio stand-in: the protocol only ever needs the length and the words.
struct VoiceNote {
    double duration = 0.0;  // seconds
    std::string transcript;

    friend bool operator==(const VoiceNote&, const VoiceNote&) = default;
};

struct Geofence {
    LatLon center;
    double radius = kMinGeofenceRadius;  // meters

    friend bool operator==(const Geofence&, const Geofence&) = default;
};

struct TimeWindow {
    Timestamp start;
    Timestamp end;

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct MarkerCondition {
    std::string marker_id;

    friend bool operator==(const MarkerCondition&, const MarkerCondition&) = default;
};

// Specific = every declared condition holds (AND), Flexible = any (OR).
enum class Specificity { Specific, Flexible };

struct TriggerSchedule {
    std::optional<Geofence> geofence;
    std::optional<TimeWindow> window;
    std::optional<MarkerCondition> marker;
    Specificity specificity = Specificity::Specific;

    int condition_count() const noexcept {
        return int(geofence.has_value()) + int(window.has_value()) + int(marker.has_value());
    }
    bool is_compound() const noexcept { return condition_count() >= 2; }

    friend bool operator==(const TriggerSchedule&, const TriggerSchedule&) = default;
};

enum class MessageState { Pending, Delivered, Reacted, ReactionDeclined, Expired };

// Legal lifecycle edges: Pending->{Delivered, Expired}, Delivered->{Reacted, ReactionDeclined}.
bool is_legal_transition(MessageState from, MessageState to) noexcept;
bool is_terminal_for_delivery(MessageState s) noexcept;  // anything but Pending

struct ArMessage {
    std::string message_id;
    std::string sender_id;
    std::string recipient_id;
    std::string content_id;
    double scale = 1.0;
    VoiceNote voice_note;
    std::optional<TriggerSchedule> schedule;  // absent => direct message
    Timestamp created_at;
    MessageState state = MessageState::Pending;

    bool is_direct() const noexcept { return !schedule.has_value(); }

    friend bool operator==(const ArMessage&, const ArMessage&) = default;
};

// Delivery/presentation order: created_at, then message_id.
bool delivery_order_less(const ArMessage& a, const ArMessage& b) noexcept;

using MarkerSet = std::set<std::string, std::less<>>;

// The 21-item content catalog (11 virtual objects, 10 avatars), in file order.
const std::vector<ContentItem>& catalog();
const ContentItem* find_content(std::string_view content_id);

void validate_voice_note(const VoiceNote& note);
void validate_geofence(const Geofence& fence);
void validate_window(const TimeWindow& window);
void validate_schedule(const TriggerSchedule& schedule, const MarkerSet& declared_markers);

// Full structural check of a message as it would arrive over the wire.
void validate_message(const ArMessage& message, const MarkerSet& declared_markers);

struct ComposeArgs {
    std::string sender_id;
    std::string recipient_id;
    std::string content_id;
    double scale = 1.0;
    VoiceNote voice_note;
    std::optional<TriggerSchedule> schedule;
};

// Builds a validated Pending message. Throws Error with the first violated rule.
ArMessage compose(const ComposeArgs& args, const MarkerSet& declared_markers,
                  MessageIdGenerator& ids, Timestamp now);

std::string_view to_string(ContentKind k) noexcept;
std::string_view to_string(Anchor a) noexcept;
std::string_view to_string(Specificity s) noexcept;
std::string_view to_string(MessageState s) noexcept;

std::optional<ContentKind> content_kind_from_string(std::string_view s) noexcept;
std::optional<Anchor> anchor_from_string(std::string_view s) noexcept;
std::optional<Specificity> specificity_from_string(std::string_view s) noexcept;
std::optional<MessageState> message_state_from_string(std::string_view s) noexcept;

}  // namespace wandrelay
