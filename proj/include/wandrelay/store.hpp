#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wandrelay/message.hpp"
#include "wandrelay/reaction.hpp"

namespace wandrelay {

// One message as the service tracks it.
struct StoredMessage {
    ArMessage message;
    std::optional<Timestamp> delivered_at;
    std::optional<ReactionRecord> reaction;  // only consented reactions are ever stored
    bool reaction_unseen = false;            // sender notification flag

    friend bool operator==(const StoredMessage&, const StoredMessage&) = default;
};

// Durable state under a data directory:
//   principals.log                      one registered principal per line
//   queues/<recipient>.log              append-only JSON lines, one upsert each
//   queues/<recipient>.snapshot.json    compacted queue, replayed before the log
// Without a directory the store is memory-only and every write is a no-op.
class QueueStore {
public:
    QueueStore() = default;  // memory-only
    explicit QueueStore(std::filesystem::path data_dir, std::size_t compact_after = 512);

    bool durable() const noexcept { return dir_.has_value(); }
    const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

    struct Loaded {
        std::set<std::string> principals;
        std::map<std::string, StoredMessage> messages;  // by message id
    };
    // Replays snapshots and logs. Throws Error{ParseError} on a corrupt line
    // other than a torn final line, which is ignored.
    Loaded load() const;

    void record_principal(const std::string& principal);
    // Appends the message's current form; replay is last-write-wins per id.
    void record(const StoredMessage& m);

    // Rewrites the recipient's snapshot from `queue` and truncates its log.
    void compact(const std::string& recipient, const std::vector<const StoredMessage*>& queue);
    std::size_t log_entries(const std::string& recipient) const;
    bool due_for_compaction(const std::string& recipient) const {
        return durable() && log_entries(recipient) >= compact_after_;
    }

private:
    void append(const std::string& recipient, const nlohmann::json& entry);
    std::filesystem::path log_path(const std::string& recipient) const;
    std::filesystem::path snapshot_path(const std::string& recipient) const;

    std::optional<std::filesystem::path> dir_;
    std::size_t compact_after_ = 512;
    std::map<std::string, std::size_t> entries_since_compact_;
};

// Filesystem-safe, reversible encoding of a principal id.
std::string encode_file_stem(const std::string& principal);
std::string decode_file_stem(const std::string& stem);

nlohmann::json encode_stored(const StoredMessage& m);
StoredMessage decode_stored(const nlohmann::json& j, std::string_view path);

}  // namespace wandrelay
