#include "wandrelay/protocol.hpp"

#include <array>
#include <utility>

#include "wandrelay/error.hpp"

namespace wandrelay {

namespace {

constexpr std::array<std::pair<FrameKind, std::string_view>, 14> kKindNames{{
    {FrameKind::Hello, "HELLO"},
    {FrameKind::Submit, "SUBMIT"},
    {FrameKind::Ack, "ACK"},
    {FrameKind::Error, "ERROR"},
    {FrameKind::Context, "CONTEXT"},
    {FrameKind::Playback, "PLAYBACK"},
    {FrameKind::ReactionStart, "REACTION_START"},
    {FrameKind::ReactionFrame, "REACTION_FRAME"},
    {FrameKind::Consent, "CONSENT"},
    {FrameKind::ReactionNotify, "REACTION_NOTIFY"},
    {FrameKind::SenderViewReq, "SENDER_VIEW_REQ"},
    {FrameKind::SenderViewResp, "SENDER_VIEW_RESP"},
    {FrameKind::Transition, "TRANSITION"},
    {FrameKind::FinalState, "FINAL_STATE"},
}};

}  // namespace

std::string_view to_string(FrameKind k) noexcept {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) return name;
    }
    return "ERROR";
}

std::optional<FrameKind> frame_kind_from_string(std::string_view s) noexcept {
    for (const auto& [kind, name] : kKindNames) {
        if (name == s) return kind;
    }
    return std::nullopt;
}

std::string_view to_string(Role r) noexcept { return r == Role::Sender ? "sender" : "recipient"; }

std::optional<Role> role_from_string(std::string_view s) noexcept {
    if (s == "sender") return Role::Sender;
    if (s == "recipient") return Role::Recipient;
    return std::nullopt;
}

namespace {

nlohmann::json frame_json(const Frame& f) {
    return {{"v", f.v}, {"kind", to_string(f.kind)}, {"payload", f.payload}};
}

Frame frame_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::ProtocolError, "frame is not a JSON object");
    auto v = j.find("v");
    if (v == j.end() || !v->is_number_integer()) throw Error(Errc::ProtocolError, "frame lacks integer v");
    if (v->get<int>() != kProtocolVersion) {
        throw Error(Errc::ProtocolError, "unsupported protocol version " + v->dump());
    }
    auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) throw Error(Errc::ProtocolError, "frame lacks kind");
    auto parsed = frame_kind_from_string(kind->get<std::string>());
    if (!parsed) throw Error(Errc::ProtocolError, "unknown frame kind " + kind->dump());
    auto payload = j.find("payload");
    if (payload == j.end() || !payload->is_object()) {
        throw Error(Errc::ProtocolError, "frame payload must be an object");
    }
    return Frame{*parsed, *payload, kProtocolVersion};
}

nlohmann::json parse_line(std::string_view line) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::ProtocolError, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

std::string encode_frame(const Frame& f) { return frame_json(f).dump(); }

Frame decode_frame(std::string_view line) { return frame_from_json(parse_line(line)); }

std::string encode_logged(const LoggedFrame& f) {
    auto j = frame_json(f.frame);
    if (f.route.dir == Direction::Internal) {
        j["route"] = {{"dir", "log"}, {"at", format_rfc3339(f.route.at)}};
    } else {
        j["route"] = {{"dir", f.route.dir == Direction::Inbound ? "in" : "out"},
                      {"peer", f.route.peer},
                      {"role", to_string(f.route.role)},
                      {"at", format_rfc3339(f.route.at)}};
    }
    return j.dump();
}

LoggedFrame decode_logged(std::string_view line) {
    const auto j = parse_line(line);
    LoggedFrame out;
    out.frame = frame_from_json(j);
    auto route = j.find("route");
    if (route == j.end() || !route->is_object()) throw Error(Errc::ProtocolError, "log line lacks route");
    try {
        const auto dir = route->at("dir").get<std::string>();
        out.route.at = parse_rfc3339(route->at("at").get<std::string>());
        if (dir == "log") {
            out.route.dir = Direction::Internal;
            return out;
        }
        if (dir != "in" && dir != "out") throw Error(Errc::ProtocolError, "bad route.dir " + dir);
        out.route.dir = dir == "in" ? Direction::Inbound : Direction::Outbound;
        out.route.peer = route->at("peer").get<std::string>();
        auto role = role_from_string(route->at("role").get<std::string>());
        if (!role) throw Error(Errc::ProtocolError, "bad route.role");
        out.route.role = *role;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ProtocolError, std::string("bad route: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == Errc::ProtocolError) throw;
        throw Error(Errc::ProtocolError, "bad route: " + e.detail());
    }
    return out;
}

Frame make_error(std::string_view code, std::string_view detail) {
    return Frame{FrameKind::Error, {{"code", code}, {"detail", detail}}};
}

Frame make_ack(std::string_view ref, std::string_view message_id) {
    nlohmann::json p = {{"ref", ref}};
    if (!message_id.empty()) p["message_id"] = message_id;
    return Frame{FrameKind::Ack, std::move(p)};
}

}  // namespace wandrelay
