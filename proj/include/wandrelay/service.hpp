#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wandrelay/delivery.hpp"
#include "wandrelay/message.hpp"
#include "wandrelay/reaction.hpp"
#include "wandrelay/store.hpp"
#include "wandrelay/trigger_engine.hpp"

namespace wandrelay {

struct ServiceOptions {
    std::optional<std::filesystem::path> data_dir;  // memory-only when absent
    MarkerSet declared_markers;
    std::size_t compact_after = 512;
};

struct CaptureNotice {
    std::string message_id;
    std::string recipient_id;
    Timestamp started_at;
    Timestamp deadline;
};

struct TransitionNotice {
    std::string message_id;
    MessageState from;
    MessageState to;
    Timestamp at;
};

struct PushResult {
    std::vector<DeliveryRecord> deliveries;
    std::vector<PlaybackEvent> playback;  // same order as deliveries
    std::vector<std::string> expired;
    std::vector<CaptureNotice> captures_started;
};

struct ConsentResult {
    std::string sender_id;
    std::optional<ReactionRecord> forwarded;
    std::optional<CaptureNotice> next_capture;
};

struct CloseOutResult {
    std::vector<std::string> discarded_captures;
    std::vector<std::string> expired;
};

// The store-and-forward core. Every public member takes the service lock, so
// mutations for a recipient are applied one at a time.
class DeliveryService {
public:
    explicit DeliveryService(ServiceOptions options = {});

    void register_principal(const std::string& principal);
    bool is_registered(const std::string& principal) const;
    void declare_markers(const MarkerSet& markers);
    MarkerSet declared_markers() const;

    // One live session per recipient; a newer open supersedes the older one.
    std::uint64_t open_session(const std::string& recipient);
    bool session_is_current(const std::string& recipient, std::uint64_t token) const;
    void close_session(const std::string& recipient, std::uint64_t token);

    void submit(const ArMessage& message);

    // Expires dead messages, then fires whatever the sample satisfies.
    PushResult push_context(const ContextSample& sample);

    void reaction_frame(const std::string& message_id, SceneFrame frame);
    void reaction_utterance(const std::string& message_id, Utterance utterance);

    // Yes forwards the composed reaction (notify_reaction); No erases it.
    ConsentResult consent(const std::string& message_id, Consent answer, Timestamp now);

    void notify_reaction(const ReactionRecord& reaction);

    // Clears the sender's unseen-reaction flags.
    std::vector<SenderVisibleRecord> sender_view(const std::string& sender);
    bool has_unseen_reactions(const std::string& sender) const;

    // End of a run: unanswered captures are discarded, and whatever is still
    // Pending expires.
    CloseOutResult close_out(Timestamp end);

    std::optional<StoredMessage> find(const std::string& message_id) const;
    std::vector<StoredMessage> messages() const;
    std::size_t pending_count(const std::string& recipient) const;

    // Everything the service holds, serialized (messages and live captures).
    std::string dump_state() const;

    // Compacts every queue into its snapshot.
    void flush();

    void set_transition_observer(std::function<void(const TransitionNotice&)> observer);

private:
    void transition(StoredMessage& m, MessageState to, Timestamp at);
    void persist(const StoredMessage& m);
    void maybe_compact(const std::string& recipient);
    void compact_locked(const std::string& recipient);
    std::optional<CaptureNotice> notice_for(const std::string& message_id);
    void notify_reaction_locked(const ReactionRecord& reaction);
    StoredMessage& require_message(const std::string& message_id);

    mutable std::mutex mu_;
    QueueStore store_;
    std::set<std::string> principals_;
    MarkerSet markers_;
    std::map<std::string, StoredMessage> messages_;
    std::map<std::string, std::set<std::string>> by_recipient_;
    std::map<std::string, std::uint64_t> sessions_;
    std::map<std::string, Timestamp> last_sample_;
    std::uint64_t next_token_ = 1;
    ReactionLoop reactions_;
    std::function<void(const TransitionNotice&)> observer_;
};

}  // namespace wandrelay
