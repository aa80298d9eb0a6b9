#include "pottsgram/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace pottsgram {

namespace {

constexpr std::size_t kNoSite = static_cast<std::size_t>(-1);

std::size_t pick_nonterminal(const SentenceState& state, Rng& rng) {
    return state.nonterminal_at(rng.below(state.nonterminal_count()));
}

// The alignment change of a context flip is an integer in [-2, 2], so the
// two acceptance probabilities below 1 can be tabulated once per run.
struct AcceptTable {
    double up_one, up_two;

    explicit AcceptTable(const ModelParams& params)
        : up_one(std::exp(-params.J / params.kT)),
          up_two(std::exp(-2.0 * params.J / params.kT)) {}
};

StepOutcome context_attempt(SentenceState& state, const ModelParams& params,
                            const AcceptTable& table, Rng& rng) {
    if (params.K < 2) return {StepKind::NoOp, kNoSite};
    const std::size_t site = pick_nonterminal(state, rng);
    const int current = state.cell(site).index;
    const int proposed = sample_context_target(current, params, rng);
    const int d = alignment_change(state, site, current, proposed);
    bool accepted = true;
    if (d > 0) accepted = rng.unit() < (d == 1 ? table.up_one : table.up_two);
    if (accepted) {
        state.set_index(site, proposed);
        return {StepKind::FlipAccepted, site};
    }
    return {StepKind::FlipRejected, site};
}

StepOutcome step_impl(SentenceState& state, const ModelParams& params, const AcceptTable& table,
                      Rng& rng) {
    if (state.nonterminal_count() == 0)
        throw std::logic_error("step() requires at least one non-terminal cell");
    switch (sample_rule(params, rng)) {
        case RuleKind::Terminal: {
            const std::size_t site = pick_nonterminal(state, rng);
            state.mark_terminal(site);
            return {StepKind::Emitted, site};
        }
        case RuleKind::Branch: {
            const std::size_t site = pick_nonterminal(state, rng);
            const auto [y, z] = sample_branch_children(state.cell(site).index, params, rng);
            state.branch(site, y, z);
            return {StepKind::Branched, site};
        }
        case RuleKind::Context:
            return context_attempt(state, params, table, rng);
    }
    return {StepKind::NoOp, kNoSite};
}

}  // namespace

StepOutcome step(SentenceState& state, const ModelParams& params, Rng& rng) {
    return step_impl(state, params, AcceptTable(params), rng);
}

void context_sweep(SentenceState& state, const ModelParams& params, Rng& rng,
                   std::size_t attempts) {
    if (state.nonterminal_count() == 0 || params.K < 2) return;
    const AcceptTable table(params);
    for (std::size_t i = 0; i < attempts; ++i) context_attempt(state, params, table, rng);
}

SentenceState generate_fixed_length(const ModelParams& params, const SamplingProtocol& protocol,
                                    Rng& rng) {
    const AcceptTable table(params);
    SentenceState state = SentenceState::single(1 + static_cast<int>(rng.below(params.K)));
    while (state.size() < protocol.target_N) {
        if (state.nonterminal_count() == 0)
            throw EarlyTermination("derivation finished before reaching target length");
        step_impl(state, params, table, rng);
    }
    context_sweep(state, params, rng, protocol.post_growth_sweeps * protocol.target_N);
    return state;
}

SentenceState generate_sentence(const ModelParams& params, Rng& rng, int root_index,
                                std::size_t hard_cap) {
    const AcceptTable table(params);
    SentenceState state = SentenceState::single(root_index);
    while (state.nonterminal_count() > 0) {
        if (state.size() > hard_cap)
            throw RunawayGrowth("derivation exceeded the hard length cap");
        step_impl(state, params, table, rng);
    }
    return state;
}

SentenceState generate_text_stream(const ModelParams& params, const SamplingProtocol& protocol,
                                   Rng& rng) {
    if (!(params.t > 0.0))
        throw std::logic_error("generate_text_stream requires t > 0");
    const std::size_t cap = protocol.runaway_cap_factor * protocol.target_N;
    const AcceptTable table(params);
    std::vector<SymbolCell> stream;
    stream.reserve(protocol.target_N);
    int root = 1 + static_cast<int>(rng.below(params.K));

    while (stream.size() < protocol.target_N) {
        if (protocol.stream_measure_at_window_fill) {
            SentenceState sentence = SentenceState::single(root);
            while (sentence.nonterminal_count() > 0 &&
                   stream.size() + sentence.size() < protocol.target_N) {
                if (sentence.size() > cap)
                    throw RunawayGrowth("derivation exceeded the hard length cap");
                step_impl(sentence, params, table, rng);
            }
            stream.insert(stream.end(), sentence.cells().begin(), sentence.cells().end());
            if (sentence.nonterminal_count() > 0) break;  // window full mid-derivation
            root = sentence.cells().back().index;
        } else {
            SentenceState sentence = generate_sentence(params, rng, root, cap);
            stream.insert(stream.end(), sentence.cells().begin(), sentence.cells().end());
            root = sentence.cells().back().index;
        }
    }
    stream.resize(protocol.target_N);
    return SentenceState(std::move(stream));
}

std::vector<SentenceState> generate_ensemble(const ModelParams& params,
                                             const SamplingProtocol& protocol) {
    std::vector<SentenceState> out;
    out.reserve(protocol.samples);
    for (std::size_t i = 0; i < protocol.samples; ++i) {
        Rng rng = Rng::substream(protocol.seed, i);
        out.push_back(params.t == 0.0 ? generate_fixed_length(params, protocol, rng)
                                      : generate_text_stream(params, protocol, rng));
    }
    return out;
}

}  // namespace pottsgram
