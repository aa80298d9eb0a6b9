#include "pottsgram/observables.hpp"

#include <algorithm>
#include <cmath>

namespace pottsgram {

MomentAccumulator::MomentAccumulator(int K)
    : K_(K),
      pair_counts_(static_cast<std::size_t>(K) * K, 0),
      symbol_counts_(static_cast<std::size_t>(K), 0),
      scratch_counts_(static_cast<std::size_t>(K), 0) {}

double MomentAccumulator::se_M() const {
    if (n_ < 2) return 0.0;
    const double var = std::max(0.0, mean_M2() - mean_M() * mean_M());
    return std::sqrt(var / static_cast<double>(n_ - 1));
}

void MomentAccumulator::add(const SentenceState& state) {
    std::fill(scratch_counts_.begin(), scratch_counts_.end(), 0);
    for (const auto& c : state.cells()) ++scratch_counts_[c.index - 1];
    const std::size_t N = state.size();
    const double M = count_magnetization(scratch_counts_, N, K_);
    const auto [i, j] = probe_sites(N);
    add_measurement(M, state.cell(i).index, state.cell(j).index);
    for (int k = 0; k < K_; ++k) symbol_counts_[k] += scratch_counts_[k];
}

void MomentAccumulator::add_measurement(double M, int probe_a, int probe_b) {
    ++n_;
    const double M2 = M * M;
    sum_M_ += M;
    sum_M2_ += M2;
    sum_M4_ += M2 * M2;
    ++pair_counts_[static_cast<std::size_t>(probe_a - 1) * K_ + (probe_b - 1)];
    const auto bin = std::min<std::size_t>(static_cast<std::size_t>(M / 0.02), kHistogramBins - 1);
    ++histogram_[bin];
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.K_ != K_) throw ParameterMismatch("cannot merge accumulators with different K");
    n_ += other.n_;
    sum_M_ += other.sum_M_;
    sum_M2_ += other.sum_M2_;
    sum_M4_ += other.sum_M4_;
    for (std::size_t i = 0; i < pair_counts_.size(); ++i) pair_counts_[i] += other.pair_counts_[i];
    for (std::size_t i = 0; i < symbol_counts_.size(); ++i)
        symbol_counts_[i] += other.symbol_counts_[i];
    for (std::size_t i = 0; i < kHistogramBins; ++i) histogram_[i] += other.histogram_[i];
}

double count_magnetization(const std::vector<std::uint64_t>& counts, std::size_t N, int K) {
    double sum_sq = 0.0;
    for (const auto c : counts) sum_sq += static_cast<double>(c) * static_cast<double>(c);
    const double nn = static_cast<double>(N) * static_cast<double>(N);
    const double m2 = (K * sum_sq / nn - 1.0) / (K - 1);
    return std::sqrt(std::max(0.0, m2));
}

double magnetization(const SentenceState& state, int K) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(K), 0);
    for (const auto& c : state.cells()) ++counts[c.index - 1];
    return count_magnetization(counts, state.size(), K);
}

double vector_magnetization(const SentenceState& state, const SimplexBasis& basis) {
    std::vector<double> mean(static_cast<std::size_t>(basis.dim()), 0.0);
    for (const auto& c : state.cells())
        for (int d = 0; d < basis.dim(); ++d) mean[d] += basis.component(c.index, d);
    double norm_sq = 0.0;
    for (double v : mean) {
        v /= static_cast<double>(state.size());
        norm_sq += v * v;
    }
    return std::sqrt(norm_sq);
}

double susceptibility(const MomentAccumulator& acc, std::size_t N) {
    if (acc.count() < 2) throw InsufficientSamples("susceptibility requires n >= 2");
    return static_cast<double>(N) * (acc.mean_M2() - acc.mean_M() * acc.mean_M());
}

double chi_tilde(const MomentAccumulator& acc, std::size_t N) {
    return static_cast<double>(N) * acc.mean_M2();
}

double binder(const MomentAccumulator& acc, int K) {
    if (acc.count() < 2) throw InsufficientSamples("binder requires n >= 2");
    const double m2 = acc.mean_M2();
    if (m2 == 0.0) throw DegenerateMoments("binder requires <M^2> > 0");
    const double ratio = acc.mean_M4() / (m2 * m2);
    return -0.5 * (K - 1) * (ratio - static_cast<double>(K + 1) / (K - 1));
}

double correlation(const MomentAccumulator& acc, int K) {
    if (acc.count() == 0) throw InsufficientSamples("correlation requires n >= 1");
    std::uint64_t same = 0;
    for (int a = 1; a <= K; ++a) same += acc.pair_count(a, a);
    const double f_same = static_cast<double>(same) / static_cast<double>(acc.count());
    return (K * f_same - 1.0) / (K - 1);
}

double connected_correlation(const MomentAccumulator& acc, int K) {
    if (acc.count() == 0) throw InsufficientSamples("connected_correlation requires n >= 1");
    const double n = static_cast<double>(acc.count());
    std::vector<double> pa(static_cast<std::size_t>(K), 0.0), pb(static_cast<std::size_t>(K), 0.0);
    for (int a = 1; a <= K; ++a)
        for (int b = 1; b <= K; ++b) {
            const double p = static_cast<double>(acc.pair_count(a, b)) / n;
            pa[a - 1] += p;
            pb[b - 1] += p;
        }
    double mean_dot = 0.0;
    for (int a = 1; a <= K; ++a)
        for (int b = 1; b <= K; ++b)
            mean_dot += pa[a - 1] * pb[b - 1] * simplex_dot(a, b, K);
    return correlation(acc, K) - mean_dot;
}

double mutual_information(const MomentAccumulator& acc) {
    if (acc.count() == 0) throw InsufficientSamples("mutual_information requires n >= 1");
    const int K = acc.K();
    const double n = static_cast<double>(acc.count());
    std::vector<double> pa(static_cast<std::size_t>(K), 0.0), pb(static_cast<std::size_t>(K), 0.0);
    for (int a = 1; a <= K; ++a)
        for (int b = 1; b <= K; ++b) {
            const double p = static_cast<double>(acc.pair_count(a, b)) / n;
            pa[a - 1] += p;
            pb[b - 1] += p;
        }
    double info = 0.0;
    for (int a = 1; a <= K; ++a)
        for (int b = 1; b <= K; ++b) {
            const auto c = acc.pair_count(a, b);
            if (c == 0) continue;
            const double p = static_cast<double>(c) / n;
            info += p * std::log(p / (pa[a - 1] * pb[b - 1]));
        }
    return info;
}

std::vector<std::pair<std::size_t, double>> zipf_ranks(const std::vector<std::uint64_t>& counts) {
    std::vector<std::uint64_t> sorted;
    double total = 0.0;
    for (const auto c : counts) {
        if (c > 0) sorted.push_back(c);
        total += static_cast<double>(c);
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(sorted.size());
    for (std::size_t r = 0; r < sorted.size(); ++r)
        out.emplace_back(r + 1, static_cast<double>(sorted[r]) / total);
    return out;
}

std::vector<std::pair<std::size_t, double>> zipf_ranks(const std::vector<SentenceState>& corpus,
                                                       int K) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(K), 0);
    for (const auto& state : corpus)
        for (const auto& c : state.cells()) ++counts[c.index - 1];
    return zipf_ranks(counts);
}

}  // namespace pottsgram
