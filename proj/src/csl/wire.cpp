#include "dmslda/csl/wire.hpp"

#include <bit>
#include <cstring>

namespace dmslda {

namespace {

void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_f64le(std::vector<uint8_t>& out, double v) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}

struct Reader {
    std::span<const uint8_t> data;
    size_t pos = 0;

    void require(size_t n) const {
        if (pos + n > data.size()) throw TransportFailure("wire: truncated message");
    }
    uint8_t u8() {
        require(1);
        return data[pos++];
    }
    uint32_t u32be() {
        require(4);
        uint32_t v = (uint32_t(data[pos]) << 24) | (uint32_t(data[pos + 1]) << 16) |
                     (uint32_t(data[pos + 2]) << 8) | uint32_t(data[pos + 3]);
        pos += 4;
        return v;
    }
    double f64le() {
        require(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= uint64_t(data[pos + i]) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(bits);
    }
    size_t remaining() const { return data.size() - pos; }
};

void put_matrix(std::vector<uint8_t>& out, const Matrix& m) {
    put_u32be(out, static_cast<uint32_t>(m.rows()));
    put_u32be(out, static_cast<uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64le(out, m(r, c));
}

Matrix read_matrix(Reader& in) {
    uint32_t rows = in.u32be();
    uint32_t cols = in.u32be();
    if (uint64_t(rows) * cols > (uint64_t(1) << 30))
        throw TransportFailure("wire: implausible matrix dimensions");
    Matrix m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) m(r, c) = in.f64le();
    return m;
}

size_t matrix_wire_size(const Matrix& m) {
    return 8 + 8 * static_cast<size_t>(m.rows()) * static_cast<size_t>(m.cols());
}

}  // namespace

std::vector<uint8_t> serialize_message(const ProtocolMessage& msg) {
    std::vector<uint8_t> out;
    out.reserve(message_wire_size(msg));
    out.insert(out.end(), std::begin(kWireMagic), std::end(kWireMagic));
    out.push_back(kWireVersion);
    out.push_back(static_cast<uint8_t>(msg.kind));
    put_u32be(out, msg.round);

    if (msg.kind == MessageKind::BroadcastCandidates) {
        if (msg.matrices.empty())
            throw TransportFailure("wire: broadcast needs at least the chosen matrix");
        put_u32be(out, static_cast<uint32_t>(msg.matrices.size() - 1));
    }
    for (const auto& m : msg.matrices) put_matrix(out, m);
    for (double s : msg.scalars) put_f64le(out, s);
    return out;
}

ProtocolMessage parse_message(std::span<const uint8_t> body) {
    Reader in{body};
    in.require(4);
    if (std::memcmp(body.data(), kWireMagic, 4) != 0)
        throw TransportFailure("wire: bad magic");
    in.pos = 4;
    if (in.u8() != kWireVersion) throw TransportFailure("wire: unsupported version");
    uint8_t kind = in.u8();
    if (kind < 1 || kind > 5) throw TransportFailure("wire: unknown message kind");

    ProtocolMessage msg;
    msg.kind = static_cast<MessageKind>(kind);
    msg.round = in.u32be();

    switch (msg.kind) {
        case MessageKind::BroadcastCandidates: {
            uint32_t candidates = in.u32be();
            for (uint32_t i = 0; i < candidates + 1; ++i)
                msg.matrices.push_back(read_matrix(in));
            break;
        }
        case MessageKind::GradientAndLossReply: {
            msg.matrices.push_back(read_matrix(in));
            while (in.remaining() >= 8) msg.scalars.push_back(in.f64le());
            break;
        }
        case MessageKind::FinalModel:
            for (int i = 0; i < 4; ++i) msg.matrices.push_back(read_matrix(in));
            break;
        case MessageKind::ProjectedStatsRequest:
            msg.matrices.push_back(read_matrix(in));
            break;
        case MessageKind::ProjectedStatsReply:
            for (int i = 0; i < 3; ++i) msg.matrices.push_back(read_matrix(in));
            break;
    }
    if (in.remaining() != 0) throw TransportFailure("wire: trailing bytes");
    return msg;
}

size_t message_wire_size(const ProtocolMessage& msg) {
    size_t size = 10;  // magic + version + kind + round
    if (msg.kind == MessageKind::BroadcastCandidates) size += 4;
    for (const auto& m : msg.matrices) size += matrix_wire_size(m);
    size += 8 * msg.scalars.size();
    return size;
}

}  // namespace dmslda
