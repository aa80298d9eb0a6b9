#include "pottsgram/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pottsgram/observables.hpp"
#include "pottsgram/simplex.hpp"

namespace pottsgram {

namespace {

constexpr double kMaxEnumerationStates = 1e7;
constexpr std::size_t kMaxTransientStates = 1200;

}  // namespace

ExactEquilibrium enumerate_potts_equilibrium(int K, int n, double J, double kT,
                                             std::size_t probe_i, std::size_t probe_j) {
    if (K < 2 || n < 1) throw ConfigError("enumeration requires K >= 2 and n >= 1");
    if (probe_i >= static_cast<std::size_t>(n) || probe_j >= static_cast<std::size_t>(n))
        throw ConfigError("probe site out of range");
    if (std::pow(static_cast<double>(K), n) > kMaxEnumerationStates)
        throw TooLarge("K^n exceeds the enumeration cap");

    const double e_min = -J * (n - 1);  // fully aligned chain
    std::vector<int> sigma(static_cast<std::size_t>(n), 1);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(K), 0);

    double Z = 0.0, sM = 0.0, sM2 = 0.0, sM4 = 0.0, sDot = 0.0, sDelta = 0.0;
    bool done = false;
    while (!done) {
        double energy = 0.0;
        for (int i = 0; i + 1 < n; ++i) energy -= J * (sigma[i] == sigma[i + 1]);
        const double w = std::exp(-(energy - e_min) / kT);

        std::fill(counts.begin(), counts.end(), 0);
        for (const int s : sigma) ++counts[s - 1];
        const double M = count_magnetization(counts, static_cast<std::size_t>(n), K);
        const double M2 = M * M;

        Z += w;
        sM += w * M;
        sM2 += w * M2;
        sM4 += w * M2 * M2;
        sDot += w * simplex_dot(sigma[probe_i], sigma[probe_j], K);
        sDelta += w * (sigma[probe_i] == sigma[probe_j]);

        int pos = 0;
        for (;; ++pos) {
            if (pos == n) {
                done = true;
                break;
            }
            if (sigma[pos] < K) {
                ++sigma[pos];
                break;
            }
            sigma[pos] = 1;
        }
    }

    ExactEquilibrium out;
    out.K = K;
    out.n = n;
    out.J = J;
    out.kT = kT;
    out.probe_i = probe_i;
    out.probe_j = probe_j;
    out.mean_M = sM / Z;
    out.mean_M2 = sM2 / Z;
    out.mean_M4 = sM4 / Z;
    out.pair_dot = sDot / Z;
    out.pair_delta = sDelta / Z;
    return out;
}

OutcomeKey encode_outcome(const SentenceState& state) {
    OutcomeKey key;
    key.reserve(state.size());
    for (const auto& c : state.cells())
        key.push_back(static_cast<std::uint16_t>((c.index << 1) | (c.terminal ? 1 : 0)));
    return key;
}

std::string outcome_to_string(const OutcomeKey& key) {
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out += ' ';
        const bool terminal = key[i] & 1;
        const int index = key[i] >> 1;
        out += terminal ? 'a' : 'A';
        out += std::to_string(index);
    }
    return out;
}

namespace {

struct Transition {
    OutcomeKey to;
    double prob;
};

struct Expansion {
    std::vector<Transition> moves;  // to transient-or-absorbing states
    double self_loop = 0.0;
    double truncation = 0.0;
};

bool is_absorbing(const OutcomeKey& key, const ModelParams& params, std::size_t n_max) {
    bool any_nt = false;
    for (const auto v : key)
        if (!(v & 1)) any_nt = true;
    if (!any_nt) return true;
    return params.t == 0.0 && key.size() == n_max;
}

// Enumerate one step of the generation chain from a transient state.
Expansion expand(const OutcomeKey& key, const ModelParams& params, std::size_t n_max) {
    Expansion out;
    std::vector<std::size_t> nt;
    for (std::size_t i = 0; i < key.size(); ++i)
        if (!(key[i] & 1)) nt.push_back(i);
    const double site_p = 1.0 / static_cast<double>(nt.size());

    const double p_term = params.p_terminal();
    const double p_branch = params.p_branch();
    const double p_ctx = params.p_context();

    for (const std::size_t pos : nt) {
        const int k = key[pos] >> 1;

        if (p_term > 0.0) {
            OutcomeKey next = key;
            next[pos] |= 1;
            out.moves.push_back({std::move(next), p_term * site_p});
        }

        if (p_branch > 0.0) {
            if (key.size() + 1 > n_max) {
                out.truncation += p_branch * site_p;
            } else {
                const double p_same = params.p_child_same();
                const double p_other = params.epsilon / params.K;
                for (int y = 1; y <= params.K; ++y) {
                    const double py = (y == k) ? p_same : p_other;
                    if (py <= 0.0) continue;
                    for (int z = 1; z <= params.K; ++z) {
                        const double pz = (z == k) ? p_same : p_other;
                        if (pz <= 0.0) continue;
                        OutcomeKey next;
                        next.reserve(key.size() + 1);
                        next.insert(next.end(), key.begin(), key.begin() + pos);
                        next.push_back(static_cast<std::uint16_t>(y << 1));
                        next.push_back(static_cast<std::uint16_t>(z << 1));
                        next.insert(next.end(), key.begin() + pos + 1, key.end());
                        out.moves.push_back({std::move(next), p_branch * site_p * py * pz});
                    }
                }
            }
        }

        if (p_ctx > 0.0) {
            if (params.K < 2) {
                out.self_loop += p_ctx * site_p;  // no flip target, NoOp
                continue;
            }
            const double target_p = 1.0 / static_cast<double>(params.K - 1);
            for (int y = 1; y <= params.K; ++y) {
                if (y == k) continue;
                double dE = 0.0;
                if (pos > 0) {
                    const int nb = key[pos - 1] >> 1;
                    dE += (k == nb) - (y == nb);
                }
                if (pos + 1 < key.size()) {
                    const int nb = key[pos + 1] >> 1;
                    dE += (k == nb) - (y == nb);
                }
                dE *= params.J;
                const double accept = dE <= 0.0 ? 1.0 : std::exp(-dE / params.kT);
                const double mass = p_ctx * site_p * target_p;
                if (accept > 0.0) {
                    OutcomeKey next = key;
                    next[pos] = static_cast<std::uint16_t>(y << 1);
                    out.moves.push_back({std::move(next), mass * accept});
                }
                out.self_loop += mass * (1.0 - accept);
            }
        }
    }
    return out;
}

// Dense Gaussian elimination with partial pivoting; a is n x n row-major,
// b the right-hand side, both modified in place. Returns the solution in b.
void solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::fabs(a[r * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("singular absorption system");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t row = n; row-- > 0;) {
        double v = b[row];
        for (std::size_t c = row + 1; c < n; ++c) v -= a[row * n + c] * b[c];
        b[row] = v / a[row * n + row];
    }
}

}  // namespace

AbsorptionDistribution absorption_distribution(const ModelParams& params, std::size_t n_max) {
    if (params.K < 1 || n_max < 1) throw ConfigError("absorption requires K >= 1 and n_max >= 1");

    AbsorptionDistribution dist;
    dist.params = params;
    dist.n_max = n_max;

    // Initial law: uniform over the K single-cell non-terminal roots.
    std::map<OutcomeKey, double> initial;
    for (int k = 1; k <= params.K; ++k)
        initial[{static_cast<std::uint16_t>(k << 1)}] = 1.0 / params.K;

    // BFS over reachable transient states in deterministic discovery order.
    std::map<OutcomeKey, std::size_t> index;
    std::vector<OutcomeKey> states;
    std::vector<double> pi0;
    for (const auto& [key, p] : initial) {
        if (is_absorbing(key, params, n_max)) {
            dist.probabilities[key] += p;
            continue;
        }
        index.emplace(key, states.size());
        states.push_back(key);
        pi0.push_back(p);
    }

    std::vector<Expansion> expansions;
    for (std::size_t cursor = 0; cursor < states.size(); ++cursor) {
        Expansion ex = expand(states[cursor], params, n_max);
        for (const auto& move : ex.moves) {
            if (is_absorbing(move.to, params, n_max)) continue;
            if (index.emplace(move.to, states.size()).second) {
                if (states.size() >= kMaxTransientStates)
                    throw TooLarge("absorption state space exceeds the transient cap");
                states.push_back(move.to);
                pi0.push_back(0.0);
            }
        }
        expansions.push_back(std::move(ex));
    }

    const std::size_t n = states.size();

    // z solves (I - Q)^T z = pi0; z_i is the expected visit count of state i.
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0 - expansions[i].self_loop;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& move : expansions[i].moves) {
            const auto it = index.find(move.to);
            if (it == index.end()) continue;  // absorbing
            a[it->second * n + i] -= move.prob;
        }
    std::vector<double> z = pi0;
    if (n > 0) solve_dense(a, z, n);

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        loss += z[i] * expansions[i].truncation;
        for (const auto& move : expansions[i].moves)
            if (is_absorbing(move.to, params, n_max))
                dist.probabilities[move.to] += z[i] * move.prob;
    }
    dist.truncation_loss = loss;
    if (loss > kTruncationTolerance)
        throw TruncationLoss("truncated mass exceeds tolerance; raise n_max or t");

    double total = loss;
    for (const auto& [key, p] : dist.probabilities) total += p;
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::runtime_error("absorption probabilities do not sum to 1");
    if (loss > 0.0)
        for (auto& [key, p] : dist.probabilities) p /= (1.0 - loss);
    return dist;
}

EquilibriumStats run_fixed_length_mcmc(const ModelParams& params, int n, std::size_t sweeps,
                                       std::size_t burn_in_sweeps, std::size_t n_batches,
                                       std::size_t probe_i, std::size_t probe_j, Rng& rng) {
    if (n_batches < 2 || sweeps < n_batches)
        throw ConfigError("mcmc needs at least 2 batches and sweeps >= batches");
    std::vector<SymbolCell> cells(static_cast<std::size_t>(n));
    for (auto& c : cells) c = {static_cast<std::uint16_t>(1 + rng.below(params.K)), false};
    SentenceState state(std::move(cells));

    context_sweep(state, params, rng, burn_in_sweeps * static_cast<std::size_t>(n));

    const std::size_t batch_size = sweeps / n_batches;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(params.K), 0);
    std::vector<double> batch_m2(n_batches, 0.0), batch_delta(n_batches, 0.0);
    for (std::size_t b = 0; b < n_batches; ++b) {
        for (std::size_t s = 0; s < batch_size; ++s) {
            context_sweep(state, params, rng, static_cast<std::size_t>(n));
            std::fill(counts.begin(), counts.end(), 0);
            for (const auto& c : state.cells()) ++counts[c.index - 1];
            const double M =
                count_magnetization(counts, static_cast<std::size_t>(n), params.K);
            batch_m2[b] += M * M;
            batch_delta[b] += state.cell(probe_i).index == state.cell(probe_j).index;
        }
        batch_m2[b] /= static_cast<double>(batch_size);
        batch_delta[b] /= static_cast<double>(batch_size);
    }

    const auto batch_stats = [&](const std::vector<double>& bm, double& mean, double& se) {
        mean = 0.0;
        for (const double v : bm) mean += v;
        mean /= static_cast<double>(bm.size());
        double var = 0.0;
        for (const double v : bm) var += (v - mean) * (v - mean);
        se = std::sqrt(var / (static_cast<double>(bm.size()) * (bm.size() - 1)));
    };

    EquilibriumStats stats;
    stats.K = params.K;
    stats.n = n;
    stats.J = params.J;
    stats.kT = params.kT;
    stats.probe_i = probe_i;
    stats.probe_j = probe_j;
    stats.sweeps = batch_size * n_batches;
    batch_stats(batch_m2, stats.mean_M2, stats.se_M2);
    batch_stats(batch_delta, stats.mean_delta, stats.se_delta);
    return stats;
}

ComparisonReport compare_empirical(const ExactEquilibrium& exact, const EquilibriumStats& stats,
                                   double z_threshold) {
    if (exact.K != stats.K || exact.n != stats.n || exact.J != stats.J ||
        exact.kT != stats.kT || exact.probe_i != stats.probe_i || exact.probe_j != stats.probe_j)
        throw ParameterMismatch("equilibrium comparison with mismatched parameters");
    if (stats.sweeps == 0) throw ParameterMismatch("empirical input has no samples");

    const auto z_of = [](double value, double reference, double se) {
        if (se == 0.0) return value == reference ? 0.0 : 1e300;
        return std::fabs(value - reference) / se;
    };

    ComparisonReport report;
    report.items.push_back(
        {"M2", stats.mean_M2, exact.mean_M2, z_of(stats.mean_M2, exact.mean_M2, stats.se_M2)});
    report.items.push_back({"pair_delta", stats.mean_delta, exact.pair_delta,
                            z_of(stats.mean_delta, exact.pair_delta, stats.se_delta)});
    report.pass = true;
    for (const auto& item : report.items)
        if (item.z >= z_threshold) report.pass = false;
    char buf[160];
    std::snprintf(buf, sizeof buf, "z(M2)=%.2f z(delta)=%.2f (threshold %.1f)",
                  report.items[0].z, report.items[1].z, z_threshold);
    report.summary = buf;
    return report;
}

ComparisonReport compare_empirical(const AbsorptionDistribution& dist,
                                   const std::map<OutcomeKey, std::uint64_t>& counts,
                                   double tv_threshold) {
    std::uint64_t total = 0;
    for (const auto& [key, c] : counts) total += c;
    if (total == 0) throw ParameterMismatch("empirical input has no samples");

    double tv = 0.0;
    for (const auto& [key, p] : dist.probabilities) {
        const auto it = counts.find(key);
        const double emp = it == counts.end()
                               ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(total);
        tv += std::fabs(emp - p);
    }
    for (const auto& [key, c] : counts)
        if (dist.probabilities.find(key) == dist.probabilities.end())
            tv += static_cast<double>(c) / static_cast<double>(total);
    tv *= 0.5;

    ComparisonReport report;
    report.tv_distance = tv;
    report.pass = tv < tv_threshold;
    char buf[120];
    std::snprintf(buf, sizeof buf, "TV=%.4f over %llu runs (threshold %.3f)", tv,
                  static_cast<unsigned long long>(total), tv_threshold);
    report.summary = buf;
    return report;
}

OutcomeKey sample_outcome(const AbsorptionDistribution& dist, Rng& rng) {
    const double u = rng.unit();
    double cum = 0.0;
    for (const auto& [key, p] : dist.probabilities) {
        cum += p;
        if (u < cum) return key;
    }
    return dist.probabilities.rbegin()->first;
}

}  // namespace pottsgram
