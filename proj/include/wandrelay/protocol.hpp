#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wandrelay/time.hpp"

namespace wandrelay {

inline constexpr int kProtocolVersion = 1;

enum class FrameKind {
    Hello,
    Submit,
    Ack,
    Error,
    Context,
    Playback,
    ReactionStart,
    ReactionFrame,
    Consent,
    ReactionNotify,
    SenderViewReq,
    SenderViewResp,
    // Run logs only; never sent on a socket.
    Transition,
    FinalState,
};

enum class Role { Sender, Recipient };

std::string_view to_string(FrameKind k) noexcept;
std::optional<FrameKind> frame_kind_from_string(std::string_view s) noexcept;
std::string_view to_string(Role r) noexcept;
std::optional<Role> role_from_string(std::string_view s) noexcept;

// {v, kind, payload}; one JSON object per line on the wire.
struct Frame {
    FrameKind kind = FrameKind::Ack;
    nlohmann::json payload = nlohmann::json::object();
    int v = kProtocolVersion;
};

std::string encode_frame(const Frame& f);  // no trailing newline
Frame decode_frame(std::string_view line);  // throws Error{ProtocolError}

// Where a frame went, as recorded in run logs: client to service, service to
// client, or a log-only record (TRANSITION, FINAL_STATE) with no peer.
enum class Direction { Inbound, Outbound, Internal };

struct Route {
    Direction dir = Direction::Internal;
    std::string peer;
    Role role = Role::Recipient;
    Timestamp at;
};

struct LoggedFrame {
    Route route;
    Frame frame;

    bool sender_bound() const noexcept {
        return route.dir == Direction::Outbound && route.role == Role::Sender;
    }
};

std::string encode_logged(const LoggedFrame& f);
LoggedFrame decode_logged(std::string_view line);

Frame make_error(std::string_view code, std::string_view detail);
Frame make_ack(std::string_view ref, std::string_view message_id = {});

}  // namespace wandrelay
