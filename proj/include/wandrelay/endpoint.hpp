#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wandrelay/protocol.hpp"
#include "wandrelay/service.hpp"

namespace wandrelay {

// Per-connection state established by HELLO.
struct Connection {
    std::optional<Role> role;
    std::string principal;
    std::uint64_t session_token = 0;  // recipients only
};

// A frame the service wants to send, and to whom. `reply` frames go back on
// the originating connection; the rest are routed by principal.
struct Outbound {
    std::string peer;
    Role role = Role::Recipient;
    bool reply = true;
    Frame frame;
};

// Translates wire frames into service calls. Service errors never escape:
// they become ERROR frames carrying the error name verbatim.
class Endpoint {
public:
    explicit Endpoint(DeliveryService& service) : service_(service) {}

    std::vector<Outbound> handle(Connection& conn, const Frame& in);
    void disconnect(Connection& conn);

private:
    std::vector<Outbound> on_hello(Connection& conn, const Frame& in);
    std::vector<Outbound> on_submit(Connection& conn, const Frame& in);
    std::vector<Outbound> on_context(Connection& conn, const Frame& in);
    std::vector<Outbound> on_reaction_frame(Connection& conn, const Frame& in);
    std::vector<Outbound> on_consent(Connection& conn, const Frame& in);
    std::vector<Outbound> on_sender_view(Connection& conn, const Frame& in);

    Outbound reply(const Connection& conn, Frame f) const;
    void require_role(const Connection& conn, Role role) const;

    DeliveryService& service_;
};

nlohmann::json capture_notice_payload(const CaptureNotice& n);

}  // namespace wandrelay
