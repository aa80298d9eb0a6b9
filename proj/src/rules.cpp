#include "pottsgram/rules.hpp"

#include <cmath>

namespace pottsgram {

RuleKind sample_rule(const ModelParams& params, Rng& rng) {
    const double u = rng.unit();
    if (u < params.q * params.t) return RuleKind::Terminal;
    if (u < params.q) return RuleKind::Branch;
    return RuleKind::Context;
}

namespace {

// Map r in [0, K-2] onto {1..K} \ {k}.
inline int other_index(std::uint64_t r, int k) {
    const int candidate = static_cast<int>(r) + 1;
    return candidate >= k ? candidate + 1 : candidate;
}

}  // namespace

int sample_branch_child(int k, const ModelParams& params, Rng& rng) {
    if (rng.unit() < params.p_child_same()) return k;
    return other_index(rng.below(static_cast<std::uint64_t>(params.K - 1)), k);
}

std::pair<int, int> sample_branch_children(int k, const ModelParams& params, Rng& rng) {
    const int y = sample_branch_child(k, params, rng);
    const int z = sample_branch_child(k, params, rng);
    return {y, z};
}

int sample_context_target(int k, const ModelParams& params, Rng& rng) {
    return other_index(rng.below(static_cast<std::uint64_t>(params.K - 1)), k);
}

int alignment_change(const SentenceState& state, std::size_t site, int current, int proposed) {
    int d = 0;
    if (site > 0) {
        const int nb = state.cell(site - 1).index;
        d += (current == nb) - (proposed == nb);
    }
    if (site + 1 < state.size()) {
        const int nb = state.cell(site + 1).index;
        d += (current == nb) - (proposed == nb);
    }
    return d;
}

double delta_energy(const SentenceState& state, const ProposedFlip& flip,
                    const ModelParams& params) {
    return params.J * alignment_change(state, flip.site, flip.current, flip.proposed);
}

bool metropolis_accept(double dE, const ModelParams& params, Rng& rng) {
    if (dE <= 0.0) return true;
    return rng.unit() < std::exp(-dE / params.kT);
}

}  // namespace pottsgram
