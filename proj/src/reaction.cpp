#include "wandrelay/reaction.hpp"

#include <algorithm>

#include "wandrelay/error.hpp"

namespace wandrelay {

CaptureSession::CaptureSession(std::string message_id, std::string recipient_id, Timestamp started_at,
                               VoiceNote sender_voice_note, RenderDescriptor overlay)
    : message_id_(std::move(message_id)),
      recipient_id_(std::move(recipient_id)),
      started_at_(started_at),
      sender_voice_note_(std::move(sender_voice_note)),
      overlay_(std::move(overlay)) {}

Millis CaptureSession::remaining(Timestamp now) const noexcept {
    return std::max(Millis{0}, std::chrono::duration_cast<Millis>(deadline() - now));
}

void CaptureSession::check_appendable(Timestamp t) const {
    if (state_ != CaptureState::Recording) {
        throw Error(Errc::SessionClosed, "capture for " + message_id_ + " is " +
                                             std::string(to_string(state_)));
    }
    if (t > deadline()) {
        throw Error(Errc::PastDeadline, "item at " + format_rfc3339(t) + " is after deadline " +
                                            format_rfc3339(deadline()));
    }
    if (t < started_at_) {
        throw Error(Errc::ProtocolError, "item at " + format_rfc3339(t) + " precedes capture start");
    }
}

void CaptureSession::append(SceneFrame frame) {
    check_appendable(frame.t);
    auto pos = std::upper_bound(frames_.begin(), frames_.end(), frame.t,
                                [](Timestamp t, const SceneFrame& f) { return t < f.t; });
    frames_.insert(pos, std::move(frame));
}

void CaptureSession::append(Utterance utterance) {
    check_appendable(utterance.t);
    auto pos = std::upper_bound(utterances_.begin(), utterances_.end(), utterance.t,
                                [](Timestamp t, const Utterance& u) { return t < u.t; });
    utterances_.insert(pos, std::move(utterance));
}

void CaptureSession::advance(Timestamp now) noexcept {
    if (state_ == CaptureState::Recording && now >= deadline()) state_ = CaptureState::AwaitingConsent;
}

std::optional<ReactionRecord> CaptureSession::finalize(Consent consent, Timestamp now) {
    advance(now);
    if (state_ != CaptureState::AwaitingConsent) {
        throw Error(Errc::NotAwaitingConsent, "capture for " + message_id_ + " is " +
                                                  std::string(to_string(state_)));
    }
    if (consent == Consent::No) {
        erase();
        state_ = CaptureState::Discarded;
        return std::nullopt;
    }

    ReactionRecord record;
    record.message_id = message_id_;
    record.started_at = started_at_;
    record.consent = Consent::Yes;
    record.tracks.sender_voice_note = sender_voice_note_;
    record.tracks.recipient_audio = utterances_;
    record.tracks.scene.reserve(frames_.size());
    for (const auto& f : frames_) record.tracks.scene.push_back({f.t, overlay_});
    erase();
    state_ = CaptureState::Forwarded;
    return record;
}

void CaptureSession::discard() noexcept {
    erase();
    state_ = CaptureState::Discarded;
}

void CaptureSession::erase() noexcept {
    // Swap with empties so the storage is actually released.
    std::vector<SceneFrame>().swap(frames_);
    std::vector<Utterance>().swap(utterances_);
}

const CaptureSession* ReactionLoop::begin_capture(const DeliveryRecord& delivery,
                                                  const std::string& recipient_id,
                                                  const VoiceNote& voice_note,
                                                  const RenderDescriptor& overlay) {
    if (seen_.contains(delivery.message_id)) {
        throw Error(Errc::DuplicateSession, "capture already exists for " + delivery.message_id);
    }
    seen_.insert(delivery.message_id);
    if (active_.contains(recipient_id)) {
        queued_[recipient_id].push_back({delivery, recipient_id, voice_note, overlay});
        return nullptr;
    }
    auto [it, _] = active_.emplace(recipient_id, CaptureSession(delivery.message_id, recipient_id,
                                                                 delivery.delivered_at, voice_note, overlay));
    return &it->second;
}

CaptureSession* ReactionLoop::find(const std::string& message_id) {
    for (auto& [_, session] : active_) {
        if (session.message_id() == message_id) return &session;
    }
    return nullptr;
}

const CaptureSession* ReactionLoop::active_for(const std::string& recipient_id) const {
    auto it = active_.find(recipient_id);
    return it == active_.end() ? nullptr : &it->second;
}

void ReactionLoop::append(const std::string& message_id, SceneFrame frame) {
    auto* s = find(message_id);
    if (s == nullptr) throw Error(Errc::SessionClosed, "no live capture for " + message_id);
    s->append(std::move(frame));
}

void ReactionLoop::append(const std::string& message_id, Utterance utterance) {
    auto* s = find(message_id);
    if (s == nullptr) throw Error(Errc::SessionClosed, "no live capture for " + message_id);
    s->append(std::move(utterance));
}

ReactionLoop::FinalizeOutcome ReactionLoop::finalize(const std::string& message_id, Consent consent,
                                                     Timestamp now) {
    auto* s = find(message_id);
    if (s == nullptr) {
        throw Error(seen_.contains(message_id) ? Errc::NotAwaitingConsent : Errc::UnknownMessage,
                    "no live capture for " + message_id);
    }
    FinalizeOutcome out;
    out.record = s->finalize(consent, now);

    const std::string recipient = s->recipient_id();
    active_.erase(recipient);

    auto q = queued_.find(recipient);
    if (q != queued_.end() && !q->second.empty()) {
        PendingCapture next = std::move(q->second.front());
        q->second.pop_front();
        if (q->second.empty()) queued_.erase(q);
        const Timestamp start = std::max(next.delivery.delivered_at, now);
        active_.emplace(recipient, CaptureSession(next.delivery.message_id, recipient, start,
                                                  std::move(next.voice_note), std::move(next.overlay)));
        out.next_started = next.delivery.message_id;
    }
    return out;
}

std::vector<std::string> ReactionLoop::discard_all() {
    std::vector<std::string> ids;
    for (auto& [_, session] : active_) {
        session.discard();
        ids.push_back(session.message_id());
    }
    for (auto& [_, q] : queued_) {
        for (auto& p : q) ids.push_back(p.delivery.message_id);
    }
    active_.clear();
    queued_.clear();
    return ids;
}

std::size_t ReactionLoop::queued_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [_, q] : queued_) n += q.size();
    return n;
}

std::string_view to_string(Consent c) noexcept { return c == Consent::Yes ? "Yes" : "No"; }

std::string_view to_string(CaptureState s) noexcept {
    switch (s) {
        case CaptureState::Recording: return "Recording";
        case CaptureState::AwaitingConsent: return "AwaitingConsent";
        case CaptureState::Forwarded: return "Forwarded";
        case CaptureState::Discarded: return "Discarded";
    }
    return "Recording";
}

std::optional<Consent> consent_from_string(std::string_view s) noexcept {
    if (s == "Yes" || s == "yes") return Consent::Yes;
    if (s == "No" || s == "no") return Consent::No;
    return std::nullopt;
}

}  // namespace wandrelay
