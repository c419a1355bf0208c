#include "dmslda/csl/transport.hpp"

namespace dmslda {

ProtocolMessage WorkerNode::handle(const ProtocolMessage& request) {
    switch (request.kind) {
        case MessageKind::BroadcastCandidates: {
            // The trailing matrix is the anchor point; an empty (0x0)
            // anchor means the master wants candidate losses only, so
            // the gradient slot stays empty and no anchor loss is sent.
            const Matrix& chosen = request.matrices.back();
            ProtocolMessage reply;
            reply.kind = MessageKind::GradientAndLossReply;
            reply.round = request.round;
            if (chosen.size() == 0)
                reply.matrices.emplace_back(0, 0);
            else
                reply.matrices.push_back(local_gradient(summ_, chosen));
            for (size_t i = 0; i + 1 < request.matrices.size(); ++i)
                reply.scalars.push_back(local_loss(summ_, request.matrices[i]));
            if (chosen.size() != 0) reply.scalars.push_back(local_loss(summ_, chosen));
            return reply;
        }
        case MessageKind::ProjectedStatsRequest: {
            const Matrix& w = request.matrices.front();
            if (w.rows() != summ_.dim())
                throw ShapeMismatch("WorkerNode: projection dimension mismatch");
            ProtocolMessage reply;
            reply.kind = MessageKind::ProjectedStatsReply;
            reply.round = request.round;
            reply.matrices.push_back(summ_.class_means * w);             // K x (K-1)
            reply.matrices.push_back(w.transpose() * summ_.pooled_cov * w);
            Matrix counts(summ_.num_classes(), 1);
            for (int k = 0; k < summ_.num_classes(); ++k)
                counts(k, 0) = static_cast<double>(summ_.class_counts[k]);
            reply.matrices.push_back(counts);
            return reply;
        }
        case MessageKind::FinalModel:
            finished_ = true;
            return {};
        default:
            throw TransportFailure("WorkerNode: unexpected message kind from master");
    }
}

std::vector<uint8_t> InMemoryChannel::exchange(const std::vector<uint8_t>& request_body) {
    ProtocolMessage request = parse_message(request_body);
    ProtocolMessage reply = node_->handle(request);
    return serialize_message(reply);
}

void InMemoryChannel::send(const std::vector<uint8_t>& body) {
    node_->handle(parse_message(body));
}

std::unique_ptr<WorkerChannel> in_memory_transport(std::shared_ptr<WorkerNode> node) {
    return std::make_unique<InMemoryChannel>(std::move(node));
}

}  // namespace dmslda
