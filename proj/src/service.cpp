#include "wandrelay/service.hpp"

#include <algorithm>

#include "wandrelay/codec.hpp"
#include "wandrelay/error.hpp"

namespace wandrelay {

DeliveryService::DeliveryService(ServiceOptions options)
    : store_(options.data_dir ? QueueStore(*options.data_dir, options.compact_after) : QueueStore()),
      markers_(std::move(options.declared_markers)) {
    auto loaded = store_.load();
    principals_ = std::move(loaded.principals);
    for (auto& [id, m] : loaded.messages) {
        by_recipient_[m.message.recipient_id].insert(id);
        messages_.emplace(id, std::move(m));
    }
}

void DeliveryService::register_principal(const std::string& principal) {
    std::lock_guard lock(mu_);
    if (principal.empty()) throw Error(Errc::InvalidPrincipal, "empty principal id");
    if (principals_.insert(principal).second) store_.record_principal(principal);
}

bool DeliveryService::is_registered(const std::string& principal) const {
    std::lock_guard lock(mu_);
    return principals_.contains(principal);
}

void DeliveryService::declare_markers(const MarkerSet& markers) {
    std::lock_guard lock(mu_);
    markers_.insert(markers.begin(), markers.end());
}

MarkerSet DeliveryService::declared_markers() const {
    std::lock_guard lock(mu_);
    return markers_;
}

std::uint64_t DeliveryService::open_session(const std::string& recipient) {
    std::lock_guard lock(mu_);
    if (!principals_.contains(recipient)) {
        throw Error(Errc::UnknownRecipient, "'" + recipient + "' is not registered");
    }
    const auto token = next_token_++;
    sessions_[recipient] = token;
    return token;
}

bool DeliveryService::session_is_current(const std::string& recipient, std::uint64_t token) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(recipient);
    return it != sessions_.end() && it->second == token;
}

void DeliveryService::close_session(const std::string& recipient, std::uint64_t token) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(recipient);
    if (it != sessions_.end() && it->second == token) sessions_.erase(it);
}

void DeliveryService::submit(const ArMessage& message) {
    std::lock_guard lock(mu_);
    if (!principals_.contains(message.recipient_id)) {
        throw Error(Errc::UnknownRecipient, "'" + message.recipient_id + "' is not registered");
    }
    if (!principals_.contains(message.sender_id)) {
        throw Error(Errc::InvalidPrincipal, "sender '" + message.sender_id + "' is not registered");
    }
    if (messages_.contains(message.message_id)) {
        throw Error(Errc::DuplicateMessageId, message.message_id);
    }
    validate_message(message, markers_);
    if (message.state != MessageState::Pending) {
        throw Error(Errc::IllegalTransition, "submitted messages must be Pending");
    }

    by_recipient_[message.recipient_id].insert(message.message_id);
    auto [it, _] = messages_.emplace(message.message_id, StoredMessage{message, std::nullopt, std::nullopt, false});
    persist(it->second);
}

PushResult DeliveryService::push_context(const ContextSample& sample) {
    std::lock_guard lock(mu_);
    if (!sessions_.contains(sample.recipient_id)) {
        throw Error(Errc::NoSession, "no open session for '" + sample.recipient_id + "'");
    }
    auto last = last_sample_.find(sample.recipient_id);
    if (last != last_sample_.end() && !(sample.t > last->second)) {
        throw Error(Errc::OutOfOrderSample, "sample at " + format_rfc3339(sample.t) + " is not after " +
                                                format_rfc3339(last->second));
    }
    last_sample_[sample.recipient_id] = sample.t;

    std::vector<ArMessage> pending;
    for (const auto& id : by_recipient_[sample.recipient_id]) {
        const auto& m = messages_.at(id);
        if (m.message.state == MessageState::Pending) pending.push_back(m.message);
    }
    std::sort(pending.begin(), pending.end(), delivery_order_less);

    PushResult out;
    auto expiry = expire_messages(sample.t, pending);
    for (const auto& m : expiry.expired) {
        transition(messages_.at(m.message_id), MessageState::Expired, sample.t);
        out.expired.push_back(m.message_id);
    }

    auto evaluation = evaluate_sample(sample, expiry.still_pending);
    for (auto& d : evaluation.deliveries) {
        auto& stored = messages_.at(d.message_id);
        stored.delivered_at = d.delivered_at;
        transition(stored, MessageState::Delivered, d.delivered_at);

        const auto* item = find_content(stored.message.content_id);
        RenderDescriptor render{stored.message.content_id, item ? item->anchor : Anchor::PinnedToGround,
                                stored.message.scale};
        out.playback.push_back({d.message_id, d.delivered_at, kFlashDuration, d.delivered_at + kFlashDuration,
                                render, stored.message.voice_note});

        if (reactions_.begin_capture(d, sample.recipient_id, stored.message.voice_note, render) != nullptr) {
            out.captures_started.push_back(*notice_for(d.message_id));
        }
        out.deliveries.push_back(std::move(d));
    }
    maybe_compact(sample.recipient_id);
    return out;
}

void DeliveryService::reaction_frame(const std::string& message_id, SceneFrame frame) {
    std::lock_guard lock(mu_);
    reactions_.append(message_id, std::move(frame));
}

void DeliveryService::reaction_utterance(const std::string& message_id, Utterance utterance) {
    std::lock_guard lock(mu_);
    reactions_.append(message_id, std::move(utterance));
}

ConsentResult DeliveryService::consent(const std::string& message_id, Consent answer, Timestamp now) {
    std::lock_guard lock(mu_);
    auto& stored = require_message(message_id);
    auto outcome = reactions_.finalize(message_id, answer, now);

    ConsentResult out;
    out.sender_id = stored.message.sender_id;
    if (outcome.record) {
        notify_reaction_locked(*outcome.record);
        out.forwarded = std::move(outcome.record);
    } else {
        transition(stored, MessageState::ReactionDeclined, now);
    }
    if (outcome.next_started) out.next_capture = notice_for(*outcome.next_started);
    return out;
}

void DeliveryService::notify_reaction(const ReactionRecord& reaction) {
    std::lock_guard lock(mu_);
    notify_reaction_locked(reaction);
}

void DeliveryService::notify_reaction_locked(const ReactionRecord& reaction) {
    auto& stored = require_message(reaction.message_id);
    switch (stored.message.state) {
        case MessageState::Pending:
        case MessageState::Expired:
            throw Error(Errc::NotDelivered, reaction.message_id + " is " +
                                                std::string(to_string(stored.message.state)));
        case MessageState::Reacted:
        case MessageState::ReactionDeclined:
            throw Error(Errc::AlreadyReacted, reaction.message_id);
        case MessageState::Delivered:
            break;
    }
    stored.reaction = reaction;
    stored.reaction_unseen = true;
    transition(stored, MessageState::Reacted, reaction.started_at + kReactionLength);
}

std::vector<SenderVisibleRecord> DeliveryService::sender_view(const std::string& sender) {
    std::lock_guard lock(mu_);
    std::vector<const StoredMessage*> mine;
    for (auto& [id, m] : messages_) {
        if (m.message.sender_id != sender) continue;
        if (m.reaction_unseen) {
            m.reaction_unseen = false;
            persist(m);
        }
        mine.push_back(&m);
    }
    std::sort(mine.begin(), mine.end(), [](const StoredMessage* a, const StoredMessage* b) {
        return delivery_order_less(a->message, b->message);
    });

    std::vector<SenderVisibleRecord> out;
    for (const auto* m : mine) {
        SenderVisibleRecord r;
        r.message_id = m->message.message_id;
        r.state = m->message.state;
        r.delivered_at = m->delivered_at;
        if (m->message.state == MessageState::Reacted) r.reaction = m->reaction;
        out.push_back(std::move(r));
    }
    return out;
}

bool DeliveryService::has_unseen_reactions(const std::string& sender) const {
    std::lock_guard lock(mu_);
    return std::any_of(messages_.begin(), messages_.end(), [&](const auto& kv) {
        return kv.second.message.sender_id == sender && kv.second.reaction_unseen;
    });
}

CloseOutResult DeliveryService::close_out(Timestamp end) {
    std::lock_guard lock(mu_);
    CloseOutResult out;
    for (auto& id : reactions_.discard_all()) {
        transition(messages_.at(id), MessageState::ReactionDeclined, end);
        out.discarded_captures.push_back(std::move(id));
    }

    std::vector<ArMessage> pending;
    for (const auto& [id, m] : messages_) {
        if (m.message.state == MessageState::Pending) pending.push_back(m.message);
    }
    std::sort(pending.begin(), pending.end(), delivery_order_less);
    for (const auto& m : pending) {
        transition(messages_.at(m.message_id), MessageState::Expired, end);
        out.expired.push_back(m.message_id);
    }
    return out;
}

std::optional<StoredMessage> DeliveryService::find(const std::string& message_id) const {
    std::lock_guard lock(mu_);
    auto it = messages_.find(message_id);
    if (it == messages_.end()) return std::nullopt;
    return it->second;
}

std::vector<StoredMessage> DeliveryService::messages() const {
    std::lock_guard lock(mu_);
    std::vector<StoredMessage> out;
    for (const auto& [_, m] : messages_) out.push_back(m);
    return out;
}

std::size_t DeliveryService::pending_count(const std::string& recipient) const {
    std::lock_guard lock(mu_);
    auto it = by_recipient_.find(recipient);
    if (it == by_recipient_.end()) return 0;
    return std::count_if(it->second.begin(), it->second.end(), [&](const std::string& id) {
        return messages_.at(id).message.state == MessageState::Pending;
    });
}

std::string DeliveryService::dump_state() const {
    std::lock_guard lock(mu_);
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& [_, m] : messages_) messages.push_back(encode_stored(m));

    nlohmann::json captures = nlohmann::json::array();
    for (const auto& [recipient, s] : reactions_.live_sessions()) {
        nlohmann::json frames = nlohmann::json::array();
        for (const auto& f : s.frames()) frames.push_back(codec::encode(f));
        nlohmann::json utterances = nlohmann::json::array();
        for (const auto& u : s.utterances()) utterances.push_back(codec::encode(u));
        captures.push_back({{"message_id", s.message_id()},
                            {"recipient_id", recipient},
                            {"state", to_string(s.state())},
                            {"frames", frames},
                            {"utterances", utterances}});
    }
    for (const auto& [recipient, q] : reactions_.queued_captures()) {
        for (const auto& p : q) {
            captures.push_back({{"message_id", p.delivery.message_id}, {"recipient_id", recipient},
                                {"state", "Queued"}});
        }
    }
    return nlohmann::json{{"messages", messages}, {"captures", captures}}.dump();
}

void DeliveryService::flush() {
    std::lock_guard lock(mu_);
    for (const auto& [recipient, _] : by_recipient_) compact_locked(recipient);
}

void DeliveryService::set_transition_observer(std::function<void(const TransitionNotice&)> observer) {
    std::lock_guard lock(mu_);
    observer_ = std::move(observer);
}

void DeliveryService::transition(StoredMessage& m, MessageState to, Timestamp at) {
    const auto from = m.message.state;
    if (!is_legal_transition(from, to)) {
        throw Error(Errc::IllegalTransition, m.message.message_id + ": " + std::string(to_string(from)) +
                                                 " -> " + std::string(to_string(to)));
    }
    m.message.state = to;
    persist(m);
    if (observer_) observer_({m.message.message_id, from, to, at});
}

void DeliveryService::persist(const StoredMessage& m) {
    store_.record(m);
    maybe_compact(m.message.recipient_id);
}

void DeliveryService::maybe_compact(const std::string& recipient) {
    if (store_.due_for_compaction(recipient)) compact_locked(recipient);
}

void DeliveryService::compact_locked(const std::string& recipient) {
    if (!store_.durable()) return;
    std::vector<const StoredMessage*> queue;
    auto it = by_recipient_.find(recipient);
    if (it != by_recipient_.end()) {
        for (const auto& id : it->second) {
            auto m = messages_.find(id);
            if (m != messages_.end()) queue.push_back(&m->second);
        }
    }
    store_.compact(recipient, queue);
}

std::optional<CaptureNotice> DeliveryService::notice_for(const std::string& message_id) {
    const auto* s = reactions_.find(message_id);
    if (s == nullptr) return std::nullopt;
    return CaptureNotice{s->message_id(), s->recipient_id(), s->started_at(), s->deadline()};
}

StoredMessage& DeliveryService::require_message(const std::string& message_id) {
    auto it = messages_.find(message_id);
    if (it == messages_.end()) throw Error(Errc::UnknownMessage, message_id);
    return it->second;
}

}  // namespace wandrelay
