#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pottsgram/engine.hpp"
#include "pottsgram/params.hpp"
#include "pottsgram/rng.hpp"
#include "pottsgram/sentence.hpp"

namespace pottsgram {

// Exact Boltzmann expectations of the fixed-length chain with free
// boundaries, E = -J * sum d(s_i, s_{i+1}), by full enumeration.
struct ExactEquilibrium {
    int K = 0;
    int n = 0;
    double J = 0.0;
    double kT = 0.0;
    std::size_t probe_i = 0;
    std::size_t probe_j = 0;
    double mean_M = 0.0;
    double mean_M2 = 0.0;
    double mean_M4 = 0.0;
    double pair_dot = 0.0;    // <e_i . e_j>
    double pair_delta = 0.0;  // <d(s_i, s_j)>
};

// Throws TooLarge when K^n exceeds 1e7 states.
ExactEquilibrium enumerate_potts_equilibrium(int K, int n, double J, double kT,
                                             std::size_t probe_i, std::size_t probe_j);

// A cell sequence encoded for map keys: per cell (index << 1) | terminal.
using OutcomeKey = std::vector<std::uint16_t>;

OutcomeKey encode_outcome(const SentenceState& state);
std::string outcome_to_string(const OutcomeKey& key);

// Exact absorption law of the generation chain at toy scale. For t = 0 the
// absorbing states are the length-n_max configurations at the moment the
// window fills; for t > 0 they are the all-terminal completions of length
// <= n_max, with mass that escapes past n_max reported as truncation loss.
struct AbsorptionDistribution {
    ModelParams params;
    std::size_t n_max = 0;
    std::map<OutcomeKey, double> probabilities;
    double truncation_loss = 0.0;
};

// Throws TooLarge past ~1200 transient states and TruncationLoss when the
// escaped mass exceeds 1e-6.
AbsorptionDistribution absorption_distribution(const ModelParams& params, std::size_t n_max);

inline constexpr double kTruncationTolerance = 1e-6;

// Long-run averages of the context-only dynamics with batch-means errors.
struct EquilibriumStats {
    int K = 0;
    int n = 0;
    double J = 0.0;
    double kT = 0.0;
    std::size_t probe_i = 0;
    std::size_t probe_j = 0;
    std::size_t sweeps = 0;
    double mean_M2 = 0.0;
    double se_M2 = 0.0;
    double mean_delta = 0.0;
    double se_delta = 0.0;
};

// Metropolis run on a fixed all-non-terminal sentence of length n: burn-in,
// then `sweeps` sweeps of n attempts with one measurement per sweep.
// Standard errors come from `n_batches` batch means.
EquilibriumStats run_fixed_length_mcmc(const ModelParams& params, int n, std::size_t sweeps,
                                       std::size_t burn_in_sweeps, std::size_t n_batches,
                                       std::size_t probe_i, std::size_t probe_j, Rng& rng);

struct ComparisonItem {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double z = 0.0;
};

struct ComparisonReport {
    bool pass = false;
    double tv_distance = 0.0;  // absorption comparisons only
    std::vector<ComparisonItem> items;
    std::string summary;
};

// z-scores of the empirical <M^2> and <d(s_i,s_j)> against the exact
// enumeration; passes when all |z| < z_threshold.
ComparisonReport compare_empirical(const ExactEquilibrium& exact, const EquilibriumStats& stats,
                                   double z_threshold);

// Total-variation distance between empirical outcome counts and the exact
// absorption law; passes when TV < tv_threshold.
ComparisonReport compare_empirical(const AbsorptionDistribution& dist,
                                   const std::map<OutcomeKey, std::uint64_t>& counts,
                                   double tv_threshold);

// Inverse-CDF draw from an absorption law (self-consistency tests).
OutcomeKey sample_outcome(const AbsorptionDistribution& dist, Rng& rng);

}  // namespace pottsgram
