#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pottsgram/engine.hpp"
#include "pottsgram/observables.hpp"

namespace pottsgram {

// Keep configurations whose M lands in the width-0.02 bin starting at
// bin_lo (same binning as the histogram).
struct DumpFilter {
    double bin_lo = 0.98;
    std::size_t max_dumps = 8;
};

struct Dump {
    std::size_t sample = 0;
    double M = 0.0;
    std::string tokens;
};

struct PointResult {
    MomentAccumulator acc;
    std::vector<Dump> dumps;
    std::string error;  // first per-sample failure, empty on success
};

// Measure one parameter point: protocol.samples states, one substream per
// sample index, accumulated in fixed chunk order so the result is
// byte-identical for any thread count. `parallel` distributes chunks over
// OpenMP threads; false is the serial reference path.
PointResult measure_point(const ModelParams& params, const SamplingProtocol& protocol,
                          const std::optional<DumpFilter>& dump_filter, bool parallel);

inline constexpr std::size_t kAccumulatorChunk = 64;

// "A3 a1 ..." rendering used by dump files; uppercase marks non-terminals.
std::string to_token_string(const SentenceState& state);

}  // namespace pottsgram
