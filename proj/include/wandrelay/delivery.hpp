#pragma once

#include <optional>
#include <string>

#include "wandrelay/message.hpp"
#include "wandrelay/reaction.hpp"
#include "wandrelay/time.hpp"

namespace wandrelay {

inline constexpr Millis kFlashDuration{500};

// Incoming-message flash, then the content and the sender's voice note.
struct PlaybackEvent {
    std::string message_id;
    Timestamp flash_at;
    Millis flash_duration = kFlashDuration;
    Timestamp render_at;  // flash_at + flash_duration
    RenderDescriptor render;
    VoiceNote voice_note;

    friend bool operator==(const PlaybackEvent&, const PlaybackEvent&) = default;
};

// Everything a sender may learn about one of their messages. No positions,
// marker ids or condition detail.
struct SenderVisibleRecord {
    std::string message_id;
    MessageState state = MessageState::Pending;
    std::optional<Timestamp> delivered_at;
    std::optional<ReactionRecord> reaction;

    friend bool operator==(const SenderVisibleRecord&, const SenderVisibleRecord&) = default;
};

}  // namespace wandrelay
