#pragma once

#include <cstdint>
#include <vector>

#include "pottsgram/params.hpp"
#include "pottsgram/rng.hpp"
#include "pottsgram/rules.hpp"
#include "pottsgram/sentence.hpp"

namespace pottsgram {

// How an ensemble is sampled: window/stop length, number of independent
// measurements, optional extra context sweeps after growth, base seed.
struct SamplingProtocol {
    std::size_t target_N = 64;
    std::size_t samples = 1000;
    std::size_t post_growth_sweeps = 0;
    std::uint64_t seed = 1;

    // Hard cap on a single derivation, in cells, as a multiple of target_N.
    std::size_t runaway_cap_factor = 64;

    // For 0 < t <= 0.5 the branching process is (super)critical and most
    // derivations never finish; with this flag the stream run measures the
    // window as soon as target_N cells exist, exactly like the t = 0 path.
    bool stream_measure_at_window_fill = false;

    void validate() const {
        if (target_N < 2) throw ConfigError("SamplingProtocol.target_N must be >= 2");
        if (samples < 1) throw ConfigError("SamplingProtocol.samples must be >= 1");
        if (runaway_cap_factor < 1)
            throw ConfigError("SamplingProtocol.runaway_cap_factor must be >= 1");
    }
};

enum class StepKind { Emitted, Branched, FlipAccepted, FlipRejected, NoOp };

struct StepOutcome {
    StepKind kind;
    std::size_t site;
};

// One elementary update: sample a rule, pick a uniform non-terminal site,
// apply. Precondition: at least one non-terminal cell.
StepOutcome step(SentenceState& state, const ModelParams& params, Rng& rng);

// Context-only dynamics: `attempts` single-site flip attempts on the
// current non-terminal cells. Growth is disabled; this is the fixed-length
// sub-dynamics used for equilibrium validation and post-growth sweeps.
void context_sweep(SentenceState& state, const ModelParams& params, Rng& rng,
                   std::size_t attempts);

// Grow from a single uniform-index root until length target_N, then run
// post_growth_sweeps * target_N context attempts. Throws EarlyTermination
// if t > 0 and the derivation finishes short of the target.
SentenceState generate_fixed_length(const ModelParams& params, const SamplingProtocol& protocol,
                                    Rng& rng);

// One full derivation from `root_index` to all-terminal completion.
// Throws RunawayGrowth past `hard_cap` cells.
SentenceState generate_sentence(const ModelParams& params, Rng& rng, int root_index,
                                std::size_t hard_cap);

// Chained-sentence stream for t > 0: each sentence after the first starts
// from the sigma of the previous sentence's last symbol; terminal outputs
// are concatenated until target_N cells and the window is returned.
SentenceState generate_text_stream(const ModelParams& params, const SamplingProtocol& protocol,
                                   Rng& rng);

// protocol.samples independent states, one deterministic substream each,
// routed through the fixed-length (t = 0) or stream (t > 0) path.
std::vector<SentenceState> generate_ensemble(const ModelParams& params,
                                             const SamplingProtocol& protocol);

}  // namespace pottsgram
