#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wandrelay/geo.hpp"
#include "wandrelay/message.hpp"
#include "wandrelay/time.hpp"
#include "wandrelay/trigger_engine.hpp"

namespace wandrelay {

inline constexpr Millis kReactionLength{10'000};

// What the recipient's headset sees while recording. Position and markers
// stay inside the capture session; they never reach a ReactionRecord.
struct SceneFrame {
    Timestamp t;
    std::optional<LatLon> position;
    std::optional<MarkerSet> visible_markers;

    friend bool operator==(const SceneFrame&, const SceneFrame&) = default;
};

struct Utterance {
    Timestamp t;
    std::string transcript;

    friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct RenderDescriptor {
    std::string content_id;
    Anchor anchor = Anchor::PinnedToGround;
    double scale = 1.0;

    friend bool operator==(const RenderDescriptor&, const RenderDescriptor&) = default;
};

// A scene-track frame as forwarded to the sender: the AR overlay at time t.
struct ComposedFrame {
    Timestamp t;
    RenderDescriptor overlay;

    friend bool operator==(const ComposedFrame&, const ComposedFrame&) = default;
};

enum class Consent { Yes, No };
enum class CaptureState { Recording, AwaitingConsent, Forwarded, Discarded };

struct ReactionTracks {
    std::vector<ComposedFrame> scene;
    std::vector<Utterance> recipient_audio;
    VoiceNote sender_voice_note;  // plays from started_at

    friend bool operator==(const ReactionTracks&, const ReactionTracks&) = default;
};

// Only ever built from a Yes answer.
struct ReactionRecord {
    std::string message_id;
    Timestamp started_at;
    ReactionTracks tracks;
    Consent consent = Consent::Yes;

    friend bool operator==(const ReactionRecord&, const ReactionRecord&) = default;
};

class CaptureSession {
public:
    CaptureSession(std::string message_id, std::string recipient_id, Timestamp started_at,
                   VoiceNote sender_voice_note, RenderDescriptor overlay);

    const std::string& message_id() const noexcept { return message_id_; }
    const std::string& recipient_id() const noexcept { return recipient_id_; }
    Timestamp started_at() const noexcept { return started_at_; }
    Timestamp deadline() const noexcept { return started_at_ + kReactionLength; }
    CaptureState state() const noexcept { return state_; }

    // Time left on the countdown at `now`, floored at zero.
    Millis remaining(Timestamp now) const noexcept;

    // Items must fall within [started_at, deadline]; the deadline itself is
    // accepted. Later items throw PastDeadline.
    void append(SceneFrame frame);
    void append(Utterance utterance);

    // Enters AwaitingConsent once `now` reaches the deadline.
    void advance(Timestamp now) noexcept;

    // Yes composes the three tracks; No erases everything captured.
    // Throws NotAwaitingConsent if the countdown has not run out at `now`.
    std::optional<ReactionRecord> finalize(Consent consent, Timestamp now);

    // Scenario ended without an answer.
    void discard() noexcept;

    const std::vector<SceneFrame>& frames() const noexcept { return frames_; }
    const std::vector<Utterance>& utterances() const noexcept { return utterances_; }

private:
    void check_appendable(Timestamp t) const;
    void erase() noexcept;

    std::string message_id_;
    std::string recipient_id_;
    Timestamp started_at_;
    VoiceNote sender_voice_note_;
    RenderDescriptor overlay_;
    CaptureState state_ = CaptureState::Recording;
    std::vector<SceneFrame> frames_;
    std::vector<Utterance> utterances_;
};

// Owns every capture session for a service. A recipient has at most one live
// session; deliveries that land while one is live queue behind it and start
// when it finalizes.
class ReactionLoop {
public:
    struct PendingCapture {
        DeliveryRecord delivery;
        std::string recipient_id;
        VoiceNote voice_note;
        RenderDescriptor overlay;
    };

    struct FinalizeOutcome {
        std::optional<ReactionRecord> record;     // set iff consent was Yes
        std::optional<std::string> next_started;  // message id of a dequeued capture
    };

    // Returns the session if it started now, nullptr if it was queued.
    // Throws DuplicateSession when the message already had a capture.
    const CaptureSession* begin_capture(const DeliveryRecord& delivery, const std::string& recipient_id,
                                        const VoiceNote& voice_note, const RenderDescriptor& overlay);

    CaptureSession* find(const std::string& message_id);
    const CaptureSession* active_for(const std::string& recipient_id) const;

    void append(const std::string& message_id, SceneFrame frame);
    void append(const std::string& message_id, Utterance utterance);

    FinalizeOutcome finalize(const std::string& message_id, Consent consent, Timestamp now);

    // Discards every live and queued capture. Returns the affected message ids.
    std::vector<std::string> discard_all();

    std::size_t live_count() const noexcept { return active_.size(); }
    std::size_t queued_count() const noexcept;

    const std::map<std::string, CaptureSession>& live_sessions() const noexcept { return active_; }
    const std::map<std::string, std::deque<PendingCapture>>& queued_captures() const noexcept {
        return queued_;
    }

private:
    std::map<std::string, CaptureSession> active_;           // by recipient
    std::map<std::string, std::deque<PendingCapture>> queued_;  // by recipient
    std::set<std::string> seen_;                             // message ids ever captured
};

std::string_view to_string(Consent c) noexcept;
std::string_view to_string(CaptureState s) noexcept;
std::optional<Consent> consent_from_string(std::string_view s) noexcept;

}  // namespace wandrelay
