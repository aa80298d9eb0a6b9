#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "pottsgram/errors.hpp"
#include "pottsgram/sentence.hpp"
#include "pottsgram/simplex.hpp"

namespace pottsgram {

// Probe sites for two-point statistics: i = floor(N/4), j = floor(3N/4)-1,
// 0-based.
inline std::pair<std::size_t, std::size_t> probe_sites(std::size_t N) {
    return {N / 4, (3 * N) / 4 - 1};
}

inline constexpr std::size_t kHistogramBins = 50;  // width 0.02 over [0,1]

// Streaming per-ensemble statistics: moments of M, joint symbol counts at
// the probe sites, total symbol counts, and the magnetization histogram.
// Single writer; shards combine with merge().
class MomentAccumulator {
public:
    explicit MomentAccumulator(int K);

    int K() const { return K_; }
    std::uint64_t count() const { return n_; }
    double mean_M() const { return n_ ? sum_M_ / static_cast<double>(n_) : 0.0; }
    double mean_M2() const { return n_ ? sum_M2_ / static_cast<double>(n_) : 0.0; }
    double mean_M4() const { return n_ ? sum_M4_ / static_cast<double>(n_) : 0.0; }

    // Standard error of mean_M (0 when fewer than two samples).
    double se_M() const;

    std::uint64_t pair_count(int a, int b) const {
        return pair_counts_[static_cast<std::size_t>(a - 1) * K_ + (b - 1)];
    }
    const std::vector<std::uint64_t>& symbol_counts() const { return symbol_counts_; }
    const std::array<std::uint64_t, kHistogramBins>& histogram() const { return histogram_; }

    // Measure one state: magnetization from symbol counts, probe pair,
    // corpus symbol totals, histogram bin.
    void add(const SentenceState& state);

    // Direct entry for synthetic measurements (tests, Gaussian controls).
    void add_measurement(double M, int probe_a, int probe_b);

    void merge(const MomentAccumulator& other);

private:
    int K_;
    std::uint64_t n_ = 0;
    double sum_M_ = 0.0;
    double sum_M2_ = 0.0;
    double sum_M4_ = 0.0;
    std::vector<std::uint64_t> pair_counts_;
    std::vector<std::uint64_t> symbol_counts_;
    std::array<std::uint64_t, kHistogramBins> histogram_{};
    std::vector<std::uint64_t> scratch_counts_;
};

// M from symbol counts: sqrt(max(0, (K * sum n_k^2 / N^2 - 1)/(K-1))).
double count_magnetization(const std::vector<std::uint64_t>& counts, std::size_t N, int K);

// M of one state (via symbol counts).
double magnetization(const SentenceState& state, int K);

// Reference route: norm of the mean simplex vector, O(N*K).
double vector_magnetization(const SentenceState& state, const SimplexBasis& basis);

// chi = N * (<M^2> - <M>^2). Requires n >= 2.
double susceptibility(const MomentAccumulator& acc, std::size_t N);

// chi~ = N * <M^2>.
double chi_tilde(const MomentAccumulator& acc, std::size_t N);

// U = -(K-1)/2 * (<M^4>/<M^2>^2 - (K+1)/(K-1)). Requires <M^2> > 0.
double binder(const MomentAccumulator& acc, int K);

// G~ = <e_i . e_j> at the probe sites = (K * f_same - 1)/(K - 1).
double correlation(const MomentAccumulator& acc, int K);

// Connected form G = <e_i . e_j> - <e_i> . <e_j>, with the single-site
// means estimated from the pair-count marginals. Derived convenience; the
// plain G~ is what the analyses consume.
double connected_correlation(const MomentAccumulator& acc, int K);

// Plug-in mutual information of the probe pair, in nats.
double mutual_information(const MomentAccumulator& acc);

// Rank/relative-frequency pairs, descending, over aggregated symbol counts.
// Symbols that never occur are omitted.
std::vector<std::pair<std::size_t, double>> zipf_ranks(const std::vector<std::uint64_t>& counts);
std::vector<std::pair<std::size_t, double>> zipf_ranks(const std::vector<SentenceState>& corpus,
                                                       int K);

}  // namespace pottsgram
