#include "wandrelay/tcp_server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "wandrelay/error.hpp"

namespace wandrelay {

namespace {

constexpr int kPollMillis = 100;
constexpr std::size_t kMaxLine = 1 << 20;

void write_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const auto n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return;  // peer went away; fire-and-forget
        }
        sent += static_cast<std::size_t>(n);
    }
}

}  // namespace

ListenAddress parse_listen_address(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw Error(Errc::ParseError, "listen address needs host:port");
    ListenAddress a;
    if (colon > 0) a.host = text.substr(0, colon);
    try {
        const int port = std::stoi(text.substr(colon + 1));
        if (port < 0 || port > 65535) throw std::out_of_range("port");
        a.port = static_cast<std::uint16_t>(port);
    } catch (const std::exception&) {
        throw Error(Errc::ParseError, "bad port in '" + text + "'");
    }
    return a;
}

void TcpServer::Peer::write_line(const std::string& line) {
    std::lock_guard lock(write_mu);
    write_all(fd, line + "\n");
}

TcpServer::TcpServer(DeliveryService& service, const ListenAddress& address)
    : service_(service), endpoint_(service) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(Errc::AddressInUse, std::strerror(errno));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(address.port);
    if (::inet_pton(AF_INET, address.host == "localhost" ? "127.0.0.1" : address.host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw Error(Errc::ParseError, "bad listen host '" + address.host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 64) < 0) {
        const std::string why = std::strerror(errno);
        ::close(listen_fd_);
        throw Error(Errc::AddressInUse, address.host + ":" + std::to_string(address.port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
    for (auto& t : threads_) {
        if (t.joinable()) t.join();
    }
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::serve(const std::atomic<bool>& stop) {
    while (!stop.load()) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, kPollMillis);
        if (ready <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        auto peer = std::make_shared<Peer>();
        peer->fd = fd;
        std::lock_guard lock(peers_mu_);
        peers_.push_back(peer);
        threads_.emplace_back([this, peer, &stop] { handle_connection(peer, stop); });
    }
    for (auto& t : threads_) t.join();
    threads_.clear();
    ::close(listen_fd_);
    listen_fd_ = -1;
}

void TcpServer::route(const Outbound& out, Peer& origin) {
    const auto line = encode_frame(out.frame);
    if (out.reply) {
        origin.write_line(line);
        return;
    }
    std::shared_ptr<Peer> target;
    {
        std::lock_guard lock(peers_mu_);
        auto it = by_principal_.find(out.peer);
        if (it != by_principal_.end()) target = it->second.lock();
    }
    // Offline senders pick the reaction up through SENDER_VIEW_REQ.
    if (target) target->write_line(line);
}

void TcpServer::handle_connection(std::shared_ptr<Peer> peer, const std::atomic<bool>& stop) {
    Connection conn;
    std::string buffer;
    char chunk[4096];
    while (!stop.load()) {
        pollfd pfd{peer->fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, kPollMillis);
        if (ready < 0 && errno != EINTR) break;
        if (ready <= 0) continue;
        const auto n = ::recv(peer->fd, chunk, sizeof chunk, 0);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        if (buffer.size() > kMaxLine && buffer.find('\n') == std::string::npos) {
            peer->write_line(encode_frame(make_error(errc_name(Errc::ProtocolError), "frame too long")));
            break;
        }

        std::size_t nl;
        while ((nl = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;

            std::vector<Outbound> replies;
            try {
                replies = endpoint_.handle(conn, decode_frame(line));
            } catch (const Error& e) {
                replies = {Outbound{conn.principal, conn.role.value_or(Role::Recipient), true,
                                    make_error(errc_name(e.code()), e.detail())}};
            }
            if (conn.role) {
                std::lock_guard lock(peers_mu_);
                by_principal_[conn.principal] = peer;
            }
            for (const auto& out : replies) route(out, *peer);
        }
    }
    endpoint_.disconnect(conn);
    ::close(peer->fd);
}

WireClient::WireClient(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const auto port_text = std::to_string(port);
    if (::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res) != 0 || res == nullptr) {
        throw Error(Errc::ProtocolError, "cannot resolve " + host);
    }
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    const int rc = fd_ < 0 ? -1 : ::connect(fd_, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc < 0) {
        const std::string why = std::strerror(errno);
        if (fd_ >= 0) ::close(fd_);
        throw Error(Errc::ProtocolError, "cannot connect to " + host + ":" + port_text + ": " + why);
    }
}

WireClient::~WireClient() {
    if (fd_ >= 0) ::close(fd_);
}

void WireClient::send(const Frame& frame) { write_all(fd_, encode_frame(frame) + "\n"); }

std::optional<Frame> WireClient::receive(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    char chunk[4096];
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            const auto line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return decode_frame(line);
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        pollfd pfd{fd_, POLLIN, 0};
        if (::poll(&pfd, 1, static_cast<int>(left.count())) <= 0) return std::nullopt;
        const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n <= 0) return std::nullopt;
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace wandrelay
