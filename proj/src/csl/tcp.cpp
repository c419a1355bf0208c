#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <thread>

#include "dmslda/csl/transport.hpp"

namespace dmslda {

namespace {

// 8-byte big-endian body length, then the body.
void write_all(int fd, const uint8_t* data, size_t len) {
    size_t sent = 0;
    while (sent < len) {
        ssize_t n = ::write(fd, data + sent, len - sent);
        if (n <= 0) throw TransportFailure("tcp: write failed");
        sent += static_cast<size_t>(n);
    }
}

void read_all(int fd, uint8_t* data, size_t len) {
    size_t got = 0;
    while (got < len) {
        ssize_t n = ::read(fd, data + got, len - got);
        if (n <= 0) throw TransportFailure("tcp: connection closed mid-message");
        got += static_cast<size_t>(n);
    }
}

void write_frame(int fd, const std::vector<uint8_t>& body) {
    uint8_t header[8];
    uint64_t len = body.size();
    for (int i = 0; i < 8; ++i) header[i] = static_cast<uint8_t>(len >> (8 * (7 - i)));
    write_all(fd, header, 8);
    write_all(fd, body.data(), body.size());
}

std::vector<uint8_t> read_frame(int fd) {
    uint8_t header[8];
    read_all(fd, header, 8);
    uint64_t len = 0;
    for (int i = 0; i < 8; ++i) len = (len << 8) | header[i];
    if (len > (uint64_t(1) << 33)) throw TransportFailure("tcp: implausible frame length");
    std::vector<uint8_t> body(len);
    read_all(fd, body.data(), body.size());
    return body;
}

void send_handshake(int fd) {
    uint8_t hs[5] = {kWireMagic[0], kWireMagic[1], kWireMagic[2], kWireMagic[3], kWireVersion};
    write_all(fd, hs, 5);
}

void expect_handshake(int fd) {
    uint8_t hs[5];
    read_all(fd, hs, 5);
    if (std::memcmp(hs, kWireMagic, 4) != 0 || hs[4] != kWireVersion)
        throw TransportFailure("tcp: handshake mismatch");
}

class Socket {
public:
    explicit Socket(int fd = -1) : fd_(fd) {}
    ~Socket() { close(); }
    Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    void close() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_;
};

int connect_with_retry(const std::string& host, int port, int timeout_ms) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    std::string port_str = std::to_string(port);
    for (;;) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res) == 0) {
            for (addrinfo* ai = res; ai; ai = ai->ai_next) {
                int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
                if (fd < 0) continue;
                if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                    int one = 1;
                    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
                    freeaddrinfo(res);
                    return fd;
                }
                ::close(fd);
            }
            freeaddrinfo(res);
        }
        if (std::chrono::steady_clock::now() >= deadline)
            throw TransportFailure("tcp: cannot connect to " + host + ":" + port_str);
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

class TcpChannel : public WorkerChannel {
public:
    TcpChannel(const std::string& host, int port, int timeout_ms)
        : sock_(connect_with_retry(host, port, timeout_ms)) {
        send_handshake(sock_.fd());
        expect_handshake(sock_.fd());
    }

    std::vector<uint8_t> exchange(const std::vector<uint8_t>& request_body) override {
        write_frame(sock_.fd(), request_body);
        return read_frame(sock_.fd());
    }

    void send(const std::vector<uint8_t>& body) override { write_frame(sock_.fd(), body); }

private:
    Socket sock_;
};

}  // namespace

std::unique_ptr<WorkerChannel> tcp_transport(const std::string& host, int port, int timeout_ms) {
    return std::make_unique<TcpChannel>(host, port, timeout_ms);
}

void serve_worker_tcp(WorkerNode& node, const std::string& host, int port) {
    Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
    if (listener.fd() < 0) throw TransportFailure("tcp: cannot create socket");
    int one = 1;
    setsockopt(listener.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw TransportFailure("tcp: bad listen address " + host);
    if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw TransportFailure("tcp: cannot bind " + host + ":" + std::to_string(port));
    if (::listen(listener.fd(), 1) != 0) throw TransportFailure("tcp: listen failed");

    Socket conn(::accept(listener.fd(), nullptr, nullptr));
    if (conn.fd() < 0) throw TransportFailure("tcp: accept failed");
    int nodelay = 1;
    setsockopt(conn.fd(), IPPROTO_TCP, TCP_NODELAY, &nodelay, sizeof(nodelay));
    expect_handshake(conn.fd());
    send_handshake(conn.fd());

    while (!node.finished()) {
        ProtocolMessage request = parse_message(read_frame(conn.fd()));
        ProtocolMessage reply = node.handle(request);
        if (request.kind != MessageKind::FinalModel)
            write_frame(conn.fd(), serialize_message(reply));
    }
}

}  // namespace dmslda
