#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wandrelay/endpoint.hpp"
#include "wandrelay/protocol.hpp"
#include "wandrelay/service.hpp"

namespace wandrelay {

struct ListenAddress {
    std::string host = "127.0.0.1";
    std::uint16_t port = 7878;
};

// "host:port" or ":port"; throws Error{ParseError}.
ListenAddress parse_listen_address(const std::string& text);

// Newline-delimited JSON frames over TCP, one thread per connection.
class TcpServer {
public:
    // Binds and listens immediately; throws Error{AddressInUse}.
    TcpServer(DeliveryService& service, const ListenAddress& address);
    ~TcpServer();

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    // Accepts until `stop` becomes true, then closes every connection.
    void serve(const std::atomic<bool>& stop);

private:
    struct Peer {
        int fd = -1;
        std::mutex write_mu;
        void write_line(const std::string& line);
    };

    void handle_connection(std::shared_ptr<Peer> peer, const std::atomic<bool>& stop);
    void route(const Outbound& out, Peer& origin);

    DeliveryService& service_;
    Endpoint endpoint_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;

    std::mutex peers_mu_;
    std::map<std::string, std::weak_ptr<Peer>> by_principal_;
    std::vector<std::shared_ptr<Peer>> peers_;
    std::vector<std::thread> threads_;
};

// Blocking line-oriented client, used by `wandrelay send` and the tests.
class WireClient {
public:
    WireClient(const std::string& host, std::uint16_t port);
    ~WireClient();

    WireClient(const WireClient&) = delete;
    WireClient& operator=(const WireClient&) = delete;

    void send(const Frame& frame);
    // Next frame, or nullopt on timeout or closed connection.
    std::optional<Frame> receive(std::chrono::milliseconds timeout = std::chrono::milliseconds{2000});

private:
    int fd_ = -1;
    std::string buffer_;
};

}  // namespace wandrelay
