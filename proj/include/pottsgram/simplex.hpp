#pragma once

#include <cmath>
#include <vector>

namespace pottsgram {

// Inner product of simplex vectors e_a . e_b = (K*d(a,b) - 1)/(K - 1),
// the value forced by unit norm, zero sum, and constant pairwise overlap.
inline double simplex_dot(int a, int b, int K) {
    if (a == b) return 1.0;
    return -1.0 / static_cast<double>(K - 1);
}

// Explicit coordinates of the K simplex vectors in K-1 dimensions, built
// from the Helmert basis of the zero-sum hyperplane. Used as the
// independent vector-space route for magnetization and correlation checks.
class SimplexBasis {
public:
    explicit SimplexBasis(int K) : K_(K), comps_(static_cast<std::size_t>(K) * (K - 1), 0.0) {
        const double scale = std::sqrt(static_cast<double>(K) / (K - 1));
        for (int d = 1; d <= K - 1; ++d) {
            const double inv = 1.0 / std::sqrt(static_cast<double>(d) * (d + 1));
            for (int k = 1; k <= d; ++k) at(k, d - 1) = scale * inv;
            at(d + 1, d - 1) = -scale * static_cast<double>(d) * inv;
        }
    }

    int K() const { return K_; }
    int dim() const { return K_ - 1; }

    // Component c (0-based) of e_k (1-based symbol index).
    double component(int k, int c) const {
        return comps_[static_cast<std::size_t>(k - 1) * (K_ - 1) + c];
    }

    double dot(int a, int b) const {
        double s = 0.0;
        for (int c = 0; c < K_ - 1; ++c) s += component(a, c) * component(b, c);
        return s;
    }

private:
    double& at(int k, int c) { return comps_[static_cast<std::size_t>(k - 1) * (K_ - 1) + c]; }

    int K_;
    std::vector<double> comps_;
};

}  // namespace pottsgram
