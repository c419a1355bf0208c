#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dmslda/types.hpp"

namespace dmslda {

// Wire format, identical on every transport:
//   body := magic "DMSL" | u8 version=1 | u8 kind | u32be round | payload
//   matrix := u32be rows | u32be cols | rows*cols f64le, row-major
// Payloads:
//   BroadcastCandidates:  u32be G | G candidate matrices | chosen matrix
//   GradientAndLossReply: gradient matrix | trailing f64le loss scalars
//   FinalModel:           W | proj_means | proj_cov | log_priors (Kx1)
//   ProjectedStatsRequest: W
//   ProjectedStatsReply:  proj_means | proj_cov | counts (Kx1)
// Integers big-endian, floats little-endian binary64 (bit-exact).

inline constexpr uint8_t kWireMagic[4] = {0x44, 0x4D, 0x53, 0x4C};
inline constexpr uint8_t kWireVersion = 1;

enum class MessageKind : uint8_t {
    BroadcastCandidates = 1,
    GradientAndLossReply = 2,
    FinalModel = 3,
    ProjectedStatsRequest = 4,
    ProjectedStatsReply = 5,
};

struct ProtocolMessage {
    MessageKind kind = MessageKind::BroadcastCandidates;
    uint32_t round = 0;
    std::vector<Matrix> matrices;
    std::vector<double> scalars;  // GradientAndLossReply only
};

std::vector<uint8_t> serialize_message(const ProtocolMessage& msg);

/// Throws TransportFailure on bad magic, version, kind, or truncation.
ProtocolMessage parse_message(std::span<const uint8_t> body);

/// Serialized body size in bytes, without serializing.
size_t message_wire_size(const ProtocolMessage& msg);

}  // namespace dmslda
