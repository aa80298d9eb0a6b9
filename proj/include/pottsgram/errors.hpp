#pragma once

#include <stdexcept>
#include <string>

namespace pottsgram {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generation stopped because every cell turned terminal before the target
// length was reached (t > 0 run sent through the fixed-length path).
struct EarlyTermination : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A single derivation exceeded the hard length cap.
struct RunawayGrowth : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateMoments : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientOverlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeTooNarrow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pottsgram
