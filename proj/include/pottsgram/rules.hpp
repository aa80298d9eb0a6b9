#pragma once

#include <utility>

#include "pottsgram/params.hpp"
#include "pottsgram/rng.hpp"
#include "pottsgram/sentence.hpp"

namespace pottsgram {

enum class RuleKind { Terminal, Branch, Context };

// A context move: flip sigma at `site` from `current` to `proposed`.
// The cell at `site` must be non-terminal and proposed != current.
struct ProposedFlip {
    std::size_t site;
    int current;
    int proposed;
};

// Terminal with probability q*t, Branch with q*(1-t), Context with 1-q.
RuleKind sample_rule(const ModelParams& params, Rng& rng);

// Child index for a branch from parent k: copies k with probability
// 1-(K-1)*eps/K, otherwise uniform over the K-1 other indices.
int sample_branch_child(int k, const ModelParams& params, Rng& rng);

// Y and Z are drawn independently from the same child distribution.
std::pair<int, int> sample_branch_children(int k, const ModelParams& params, Rng& rng);

// Destination for a context flip: uniform over the K-1 indices != k.
int sample_context_target(int k, const ModelParams& params, Rng& rng);

// d(s_i,s_{i-1}) - d(s~_i,s_{i-1}) + d(s_i,s_{i+1}) - d(s~_i,s_{i+1}),
// an integer in [-2, 2]; a missing neighbor at either end contributes
// zero (free boundary).
int alignment_change(const SentenceState& state, std::size_t site, int current, int proposed);

// J * alignment_change.
double delta_energy(const SentenceState& state, const ProposedFlip& flip,
                    const ModelParams& params);

// Accept with probability min(1, exp(-dE/kT)); dE <= 0 accepts without
// consuming randomness.
bool metropolis_accept(double dE, const ModelParams& params, Rng& rng);

}  // namespace pottsgram
