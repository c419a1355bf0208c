#pragma once

#include <stdexcept>
#include <string>

namespace dmslda {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};
struct MissingClass : Error {
    using Error::Error;
};
struct DegenerateNormalization : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};
struct ZeroLinearTerm : Error {
    using Error::Error;
};
struct TransportFailure : Error {
    using Error::Error;
};
struct ZeroProjection : Error {
    using Error::Error;
};
struct SingularProjection : Error {
    using Error::Error;
};
struct SingularCovariance : Error {
    using Error::Error;
};
struct RankDeficientInput : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct DimensionTooSmall : Error {
    using Error::Error;
};

}  // namespace dmslda
