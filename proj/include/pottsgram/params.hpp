#pragma once

#include "pottsgram/errors.hpp"

namespace pottsgram {

// Full parameter set of the generative model: alphabet size K, Potts
// coupling J, rule-mix probability q, termination bias t, child-diversity
// parameter epsilon, and temperature kT.
//
// The three production rules fire with probabilities
//   terminalize: q*t,  branch: q*(1-t),  context flip: 1-q,
// which sum to 1 for any (q, t) in the unit square.
struct ModelParams {
    int K = 2;
    double J = 1.0;
    double q = 0.01;
    double t = 0.0;
    double epsilon = 0.0;
    double kT = 1.0;

    double p_terminal() const { return q * t; }
    double p_branch() const { return q * (1.0 - t); }
    double p_context() const { return 1.0 - q; }

    // Probability that a branch child copies its parent's index:
    // 1 - (K-1)*eps/K. Each specific other index has probability eps/K.
    double p_child_same() const {
        return 1.0 - static_cast<double>(K - 1) * epsilon / static_cast<double>(K);
    }

    void validate() const {
        if (K < 2) throw ConfigError("ModelParams.K must be >= 2");
        if (!(J > 0.0)) throw ConfigError("ModelParams.J must be > 0");
        if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("ModelParams.q must be in [0,1]");
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("ModelParams.t must be in [0,1]");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw ConfigError("ModelParams.epsilon must be in [0,1]");
        if (!(kT > 0.0)) throw ConfigError("ModelParams.kT must be > 0");
    }
};

}  // namespace pottsgram
