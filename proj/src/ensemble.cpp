#include "pottsgram/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace pottsgram {

std::string to_token_string(const SentenceState& state) {
    std::string out;
    out.reserve(state.size() * 3);
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (i) out += ' ';
        const auto& c = state.cell(i);
        out += c.terminal ? 'a' : 'A';
        out += std::to_string(c.index);
    }
    return out;
}

namespace {

std::size_t histogram_bin(double M) {
    return std::min<std::size_t>(static_cast<std::size_t>(M / 0.02), kHistogramBins - 1);
}

struct ChunkOutput {
    MomentAccumulator acc;
    std::vector<Dump> dumps;
    std::size_t error_sample = static_cast<std::size_t>(-1);
    std::string error;

    explicit ChunkOutput(int K) : acc(K) {}
};

void run_chunk(const ModelParams& params, const SamplingProtocol& protocol, std::size_t begin,
               std::size_t end, const std::optional<DumpFilter>& dump_filter, ChunkOutput& out) {
    const bool fixed_length = params.t == 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        Rng rng = Rng::substream(protocol.seed, i);
        try {
            const SentenceState state = fixed_length
                                            ? generate_fixed_length(params, protocol, rng)
                                            : generate_text_stream(params, protocol, rng);
            out.acc.add(state);
            if (dump_filter) {
                const double M = magnetization(state, params.K);
                if (histogram_bin(M) == histogram_bin(dump_filter->bin_lo + 0.01) &&
                    out.dumps.size() < dump_filter->max_dumps)
                    out.dumps.push_back({i, M, to_token_string(state)});
            }
        } catch (const EarlyTermination&) {
            if (out.error.empty()) {
                out.error_sample = i;
                out.error = "EarlyTermination";
            }
            return;
        } catch (const RunawayGrowth&) {
            if (out.error.empty()) {
                out.error_sample = i;
                out.error = "RunawayGrowth";
            }
            return;
        }
    }
}

}  // namespace

PointResult measure_point(const ModelParams& params, const SamplingProtocol& protocol,
                          const std::optional<DumpFilter>& dump_filter, bool parallel) {
    params.validate();
    protocol.validate();

    const std::size_t samples = protocol.samples;
    const std::size_t chunks = (samples + kAccumulatorChunk - 1) / kAccumulatorChunk;
    std::vector<ChunkOutput> outputs(chunks, ChunkOutput(params.K));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = c * kAccumulatorChunk;
        const std::size_t end = std::min(samples, begin + kAccumulatorChunk);
        run_chunk(params, protocol, begin, end, dump_filter, outputs[c]);
    }

    PointResult result{MomentAccumulator(params.K), {}, {}};
    std::size_t first_error = static_cast<std::size_t>(-1);
    for (const auto& chunk : outputs) {
        result.acc.merge(chunk.acc);
        for (const auto& d : chunk.dumps) {
            const std::size_t cap = dump_filter ? dump_filter->max_dumps : 0;
            if (result.dumps.size() < cap) result.dumps.push_back(d);
        }
        if (!chunk.error.empty() && chunk.error_sample < first_error) {
            first_error = chunk.error_sample;
            result.error = chunk.error;
        }
    }
    return result;
}

}  // namespace pottsgram
