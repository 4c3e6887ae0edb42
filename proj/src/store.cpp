#include "wandrelay/store.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include "wandrelay/codec.hpp"
#include "wandrelay/error.hpp"

namespace wandrelay {

namespace fs = std::filesystem;
using nlohmann::json;

std::string encode_file_stem(const std::string& principal) {
    std::string out;
    for (unsigned char c : principal) {
        if (std::isalnum(c) || c == '-' || c == '_') {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

std::string decode_file_stem(const std::string& stem) {
    std::string out;
    for (std::size_t i = 0; i < stem.size(); ++i) {
        if (stem[i] == '%' && i + 2 < stem.size()) {
            out += static_cast<char>(std::stoi(stem.substr(i + 1, 2), nullptr, 16));
            i += 2;
        } else {
            out += stem[i];
        }
    }
    return out;
}

json encode_stored(const StoredMessage& m) {
    json j = {{"message", codec::encode(m.message)}, {"reaction_unseen", m.reaction_unseen}};
    if (m.delivered_at) j["delivered_at"] = format_rfc3339(*m.delivered_at);
    if (m.reaction) j["reaction"] = codec::encode(*m.reaction);
    return j;
}

StoredMessage decode_stored(const json& j, std::string_view path) {
    StoredMessage m;
    m.message = codec::decode_message(codec::require(j, "message", path), std::string(path) + ".message");
    m.reaction_unseen = codec::require_bool(j, "reaction_unseen", path);
    if (j.contains("delivered_at")) m.delivered_at = codec::require_time(j, "delivered_at", path);
    if (j.contains("reaction")) {
        m.reaction = codec::decode_reaction(j.at("reaction"), std::string(path) + ".reaction");
    }
    return m;
}

QueueStore::QueueStore(fs::path data_dir, std::size_t compact_after)
    : dir_(std::move(data_dir)), compact_after_(compact_after) {
    std::error_code ec;
    fs::create_directories(*dir_ / "queues", ec);
    if (ec) {
        throw Error(Errc::DataDirUnwritable, dir_->string() + ": " + ec.message());
    }
    const auto probe = *dir_ / ".write-probe";
    {
        std::ofstream out(probe, std::ios::trunc);
        if (!(out << "ok" << std::flush)) {
            throw Error(Errc::DataDirUnwritable, dir_->string() + " is not writable");
        }
    }
    fs::remove(probe, ec);
}

fs::path QueueStore::log_path(const std::string& recipient) const {
    return *dir_ / "queues" / (encode_file_stem(recipient) + ".log");
}

fs::path QueueStore::snapshot_path(const std::string& recipient) const {
    return *dir_ / "queues" / (encode_file_stem(recipient) + ".snapshot.json");
}

void QueueStore::append(const std::string& recipient, const json& entry) {
    std::ofstream out(log_path(recipient), std::ios::app);
    out << entry.dump() << '\n' << std::flush;
    if (!out) throw Error(Errc::DataDirUnwritable, "cannot append to " + log_path(recipient).string());
    ++entries_since_compact_[recipient];
}

void QueueStore::record_principal(const std::string& principal) {
    if (!dir_) return;
    std::ofstream out(*dir_ / "principals.log", std::ios::app);
    out << json(principal).dump() << '\n' << std::flush;
    if (!out) throw Error(Errc::DataDirUnwritable, "cannot append to principals.log");
}

void QueueStore::record(const StoredMessage& m) {
    if (!dir_) return;
    append(m.message.recipient_id, {{"op", "upsert"}, {"record", encode_stored(m)}});
}

std::size_t QueueStore::log_entries(const std::string& recipient) const {
    auto it = entries_since_compact_.find(recipient);
    return it == entries_since_compact_.end() ? 0 : it->second;
}

void QueueStore::compact(const std::string& recipient, const std::vector<const StoredMessage*>& queue) {
    if (!dir_) return;
    json records = json::array();
    for (const auto* m : queue) records.push_back(encode_stored(*m));
    const json doc = {{"v", 1}, {"recipient", recipient}, {"messages", records}};

    const auto final_path = snapshot_path(recipient);
    auto tmp = final_path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << doc.dump() << '\n' << std::flush;
        if (!out) throw Error(Errc::DataDirUnwritable, "cannot write " + tmp.string());
    }
    fs::rename(tmp, final_path);
    // The snapshot now covers everything in the log.
    std::ofstream(log_path(recipient), std::ios::trunc);
    entries_since_compact_[recipient] = 0;
}

namespace {

std::vector<std::string> read_lines(const fs::path& p) {
    std::vector<std::string> lines;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

QueueStore::Loaded QueueStore::load() const {
    Loaded out;
    if (!dir_) return out;

    const auto principals = read_lines(*dir_ / "principals.log");
    for (std::size_t i = 0; i < principals.size(); ++i) {
        try {
            out.principals.insert(json::parse(principals[i]).get<std::string>());
        } catch (const json::exception&) {
            if (i + 1 != principals.size()) {
                throw Error(Errc::ParseError, "principals.log line " + std::to_string(i + 1));
            }
        }
    }

    for (const auto& entry : fs::directory_iterator(*dir_ / "queues")) {
        const auto name = entry.path().filename().string();
        const std::string snap_suffix = ".snapshot.json";
        if (name.size() > snap_suffix.size() &&
            name.compare(name.size() - snap_suffix.size(), snap_suffix.size(), snap_suffix) == 0) {
            std::ifstream in(entry.path());
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception& e) {
                throw Error(Errc::ParseError, name + ": " + e.what());
            }
            for (const auto& r : codec::require(doc, "messages", name)) {
                auto m = decode_stored(r, name);
                out.messages[m.message.message_id] = std::move(m);
            }
        }
    }

    for (const auto& entry : fs::directory_iterator(*dir_ / "queues")) {
        if (entry.path().extension() != ".log") continue;
        const auto name = entry.path().filename().string();
        const auto lines = read_lines(entry.path());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            json j;
            try {
                j = json::parse(lines[i]);
            } catch (const json::exception&) {
                // A crash mid-append leaves at most one torn line, at the end.
                if (i + 1 == lines.size()) break;
                throw Error(Errc::ParseError, name + " line " + std::to_string(i + 1));
            }
            auto m = decode_stored(codec::require(j, "record", name), name + ":" + std::to_string(i + 1));
            out.messages[m.message.message_id] = std::move(m);
        }
    }
    return out;
}

}  // namespace wandrelay
