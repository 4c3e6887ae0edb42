#pragma once
#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include "wandrelay/error.hpp"
#include "wandrelay/message.hpp"
#include "wandrelay/time.hpp"
#include "wandrelay/trigger_engine.hpp"

#define CHECK_ERRC(expr, errc)                                                   \
    do {                                                                         \
        try {                                                                    \
            (void)(expr);                                                        \
            FAIL_CHECK("expected " << ::wandrelay::errc_name(errc));             \
        } catch (const ::wandrelay::Error& e_) {                                 \
            CHECK_MESSAGE(e_.code() == (errc), ::wandrelay::errc_name(e_.code()) \
                                                   << ": " << e_.detail());      \
        }                                                                        \
    } while (0)

namespace th {

inline wandrelay::Timestamp at(const char* text) { return wandrelay::parse_rfc3339(text); }

inline wandrelay::MarkerSet posters() {
    wandrelay::MarkerSet s;
    for (int i = 1; i <= 8; ++i) s.insert("poster_" + std::to_string(i));
    return s;
}

inline wandrelay::ArMessage message(std::string id, wandrelay::Timestamp created,
                                    std::optional<wandrelay::TriggerSchedule> schedule = std::nullopt,
                                    std::string sender = "s1", std::string recipient = "r1") {
    wandrelay::ArMessage m;
    m.message_id = std::move(id);
    m.sender_id = std::move(sender);
    m.recipient_id = std::move(recipient);
    m.content_id = "dog";
    m.voice_note = {3.0, "hi"};
    m.schedule = std::move(schedule);
    m.created_at = created;
    return m;
}

inline wandrelay::ContextSample sample(wandrelay::Timestamp t, wandrelay::LatLon p, bool wearing = true,
                                       wandrelay::MarkerSet markers = {}, std::string recipient = "r1") {
    return {std::move(recipient), t, p, wearing, std::move(markers)};
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("wandrelay-test-" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace th
