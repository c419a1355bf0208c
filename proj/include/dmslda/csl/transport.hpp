#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dmslda/csl/wire.hpp"
#include "dmslda/summaries.hpp"

namespace dmslda {

/// Worker-side protocol handler: owns one shard's summaries and answers
/// master requests. Shared by the in-memory transport and the TCP
/// server.
class WorkerNode {
public:
    explicit WorkerNode(ClassSummaries summ) : summ_(std::move(summ)) {}

    /// Request -> reply; FinalModel returns no reply and marks the
    /// session finished.
    ProtocolMessage handle(const ProtocolMessage& request);

    bool finished() const { return finished_; }
    const ClassSummaries& summaries() const { return summ_; }

private:
    ClassSummaries summ_;
    bool finished_ = false;
};

/// Master-side channel to one worker. Bodies are the serialized wire
/// messages; both transports exchange identical bytes.
class WorkerChannel {
public:
    virtual ~WorkerChannel() = default;
    virtual std::vector<uint8_t> exchange(const std::vector<uint8_t>& request_body) = 0;
    virtual void send(const std::vector<uint8_t>& body) = 0;  // one-way (FinalModel)
};

/// Channel that drives a WorkerNode in-process, still through the
/// serialize/parse round trip so both transports see the same bytes.
class InMemoryChannel : public WorkerChannel {
public:
    explicit InMemoryChannel(std::shared_ptr<WorkerNode> node) : node_(std::move(node)) {}
    std::vector<uint8_t> exchange(const std::vector<uint8_t>& request_body) override;
    void send(const std::vector<uint8_t>& body) override;

private:
    std::shared_ptr<WorkerNode> node_;
};

std::unique_ptr<WorkerChannel> in_memory_transport(std::shared_ptr<WorkerNode> node);

/// Connects to a serve-worker endpoint; performs the magic/version
/// handshake before any protocol message. Retries the connect for up to
/// timeout_ms so freshly spawned workers can bind first.
std::unique_ptr<WorkerChannel> tcp_transport(const std::string& host, int port,
                                             int timeout_ms = 10000);

/// Blocking server: accepts one master connection and services protocol
/// messages until FinalModel arrives. Used by `dmslda serve-worker`.
void serve_worker_tcp(WorkerNode& node, const std::string& host, int port);

}  // namespace dmslda
