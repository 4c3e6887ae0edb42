#include "wandrelay/endpoint.hpp"

#include "wandrelay/codec.hpp"
#include "wandrelay/error.hpp"

namespace wandrelay {

using nlohmann::json;

nlohmann::json capture_notice_payload(const CaptureNotice& n) {
    return {{"message_id", n.message_id},
            {"started_at", format_rfc3339(n.started_at)},
            {"deadline", format_rfc3339(n.deadline)},
            {"duration", millis_to_seconds(kReactionLength)}};
}

Outbound Endpoint::reply(const Connection& conn, Frame f) const {
    return Outbound{conn.principal, conn.role.value_or(Role::Recipient), true, std::move(f)};
}

void Endpoint::require_role(const Connection& conn, Role role) const {
    if (!conn.role) throw Error(Errc::ProtocolError, "HELLO required first");
    if (*conn.role != role) {
        throw Error(Errc::ProtocolError, "frame not allowed for role " + std::string(to_string(*conn.role)));
    }
}

std::vector<Outbound> Endpoint::handle(Connection& conn, const Frame& in) {
    try {
        switch (in.kind) {
            case FrameKind::Hello: return on_hello(conn, in);
            case FrameKind::Submit: return on_submit(conn, in);
            case FrameKind::Context: return on_context(conn, in);
            case FrameKind::ReactionFrame: return on_reaction_frame(conn, in);
            case FrameKind::Consent: return on_consent(conn, in);
            case FrameKind::SenderViewReq: return on_sender_view(conn, in);
            default:
                throw Error(Errc::ProtocolError, std::string(to_string(in.kind)) + " is not a client frame");
        }
    } catch (const Error& e) {
        return {reply(conn, make_error(errc_name(e.code()), e.detail()))};
    } catch (const nlohmann::json::exception& e) {
        return {reply(conn, make_error(errc_name(Errc::ProtocolError), e.what()))};
    }
}

void Endpoint::disconnect(Connection& conn) {
    if (conn.role == Role::Recipient) service_.close_session(conn.principal, conn.session_token);
    conn = Connection{};
}

std::vector<Outbound> Endpoint::on_hello(Connection& conn, const Frame& in) {
    const auto role = role_from_string(codec::require_string(in.payload, "role", "HELLO"));
    if (!role) throw Error(Errc::ProtocolError, "HELLO role must be sender or recipient");
    const auto principal = codec::require_string(in.payload, "principal", "HELLO");
    if (conn.role == Role::Recipient) service_.close_session(conn.principal, conn.session_token);

    service_.register_principal(principal);
    conn.role = role;
    conn.principal = principal;
    conn.session_token = *role == Role::Recipient ? service_.open_session(principal) : 0;
    return {reply(conn, make_ack("HELLO"))};
}

std::vector<Outbound> Endpoint::on_submit(Connection& conn, const Frame& in) {
    require_role(conn, Role::Sender);
    auto message = codec::decode_message(codec::require(in.payload, "message", "SUBMIT"), "SUBMIT.message");
    if (message.sender_id != conn.principal) {
        throw Error(Errc::InvalidPrincipal, "sender_id does not match the connection's principal");
    }
    service_.submit(message);
    return {reply(conn, make_ack("SUBMIT", message.message_id))};
}

std::vector<Outbound> Endpoint::on_context(Connection& conn, const Frame& in) {
    require_role(conn, Role::Recipient);
    if (!service_.session_is_current(conn.principal, conn.session_token)) {
        throw Error(Errc::NoSession, "session for '" + conn.principal + "' was superseded or closed");
    }
    auto sample = codec::decode_sample(codec::require(in.payload, "sample", "CONTEXT"), "CONTEXT.sample");
    if (sample.recipient_id != conn.principal) {
        throw Error(Errc::InvalidPrincipal, "sample recipient_id does not match the connection's principal");
    }
    const auto result = service_.push_context(sample);

    std::vector<Outbound> out;
    for (const auto& ev : result.playback) {
        out.push_back(reply(conn, Frame{FrameKind::Playback, {{"event", codec::encode(ev)}}}));
    }
    for (const auto& n : result.captures_started) {
        out.push_back(reply(conn, Frame{FrameKind::ReactionStart, capture_notice_payload(n)}));
    }
    return out;
}

std::vector<Outbound> Endpoint::on_reaction_frame(Connection& conn, const Frame& in) {
    require_role(conn, Role::Recipient);
    const auto message_id = codec::require_string(in.payload, "message_id", "REACTION_FRAME");
    if (in.payload.contains("frame")) {
        service_.reaction_frame(message_id, codec::decode_scene_frame(in.payload.at("frame"), "REACTION_FRAME.frame"));
    } else if (in.payload.contains("utterance")) {
        service_.reaction_utterance(message_id,
                                    codec::decode_utterance(in.payload.at("utterance"), "REACTION_FRAME.utterance"));
    } else {
        throw Error(Errc::ProtocolError, "REACTION_FRAME needs a frame or an utterance");
    }
    return {};
}

std::vector<Outbound> Endpoint::on_consent(Connection& conn, const Frame& in) {
    require_role(conn, Role::Recipient);
    const auto message_id = codec::require_string(in.payload, "message_id", "CONSENT");
    const auto answer = consent_from_string(codec::require_string(in.payload, "answer", "CONSENT"));
    if (!answer) throw Error(Errc::ProtocolError, "CONSENT answer must be Yes or No");
    const auto t = codec::require_time(in.payload, "t", "CONSENT");

    auto result = service_.consent(message_id, *answer, t);
    std::vector<Outbound> out;
    out.push_back(reply(conn, make_ack("CONSENT", message_id)));
    if (result.forwarded) {
        out.push_back(Outbound{result.sender_id, Role::Sender, false,
                               Frame{FrameKind::ReactionNotify, {{"reaction", codec::encode(*result.forwarded)}}}});
    }
    if (result.next_capture) {
        out.push_back(reply(conn, Frame{FrameKind::ReactionStart, capture_notice_payload(*result.next_capture)}));
    }
    return out;
}

std::vector<Outbound> Endpoint::on_sender_view(Connection& conn, const Frame& in) {
    require_role(conn, Role::Sender);
    (void)in;
    json records = json::array();
    for (const auto& r : service_.sender_view(conn.principal)) records.push_back(codec::encode(r));
    return {reply(conn, Frame{FrameKind::SenderViewResp, {{"records", records}}})};
}

}  // namespace wandrelay
