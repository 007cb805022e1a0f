#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spinprep/combinatorics.hpp"
#include "spinprep/spin_config.hpp"
#include "spinprep/spin_model.hpp"

namespace spinprep {

struct PatternSet {
    int n = 0;
    std::vector<SpinConfiguration> patterns;

    PatternSet() = default;
    PatternSet(int n_spins, std::vector<SpinConfiguration> p) : n(n_spins), patterns(std::move(p)) {
        if (patterns.empty()) throw std::invalid_argument("PatternSet: need at least one pattern");
        for (const auto& x : patterns)
            if (x.n != n) throw std::invalid_argument("PatternSet: pattern length mismatch");
        check_patterns_distinct(patterns);
    }

    int size() const { return static_cast<int>(patterns.size()); }
};

/// k-body Hebbian learning: J_chi = -(1/M) sum_m prod_i x^m_{chi_i} for every
/// order in K.
inline SpinGlassHamiltonian hebbian_couplings(const PatternSet& p, const std::vector<int>& K) {
    if (K.empty()) throw std::invalid_argument("hebbian_couplings: empty order set");
    for (int k : K)
        if (k < 1 || k > p.n) throw std::invalid_argument("hebbian_couplings: order out of range");
    SpinGlassHamiltonian h(p.n, K);
    const double scale = -1.0 / static_cast<double>(p.size());
    for (int k : h.orders()) {
        auto& tab = h.table(k);
        std::size_t rank = 0;
        for_each_combination_colex(p.n, k, [&](const int* idx, int kk) {
            std::int64_t acc = 0;
            for (const auto& x : p.patterns) {
                int prod = 1;
                for (int i = 0; i < kk; ++i) prod *= x.spin(idx[i]);
                acc += prod;
            }
            tab[rank] = scale * static_cast<double>(acc);
            ++rank;
        });
    }
    return h;
}

/// Integer-valued Hebbian energy before the -1/M scaling:
/// sum_m sum_k K_k(d(x_m, s); N) with K_k the subset sum over +-1 products.
/// Energy of the Hebbian Hamiltonian equals -(1/M) times this value.
inline std::int64_t hebbian_energy_unnormalized(const PatternSet& p, const std::vector<int>& K,
                                                const SpinConfiguration& s) {
    std::int64_t acc = 0;
    for (const auto& x : p.patterns) {
        const int d = x.hamming(s);
        for (int k : K) acc += krawtchouk_subset_sum(d, p.n, k);
    }
    return acc;
}

/// True iff no single-spin flip lowers the energy (non-strict test). For
/// K = {1,2} this coincides with the usual sign stability condition with
/// zero local fields counting as stable.
inline bool is_local_minimum(const SpinGlassHamiltonian& h, const SpinConfiguration& s) {
    if (s.n != h.n()) throw std::invalid_argument("is_local_minimum: length mismatch");
    const double e0 = h.energy(s);
    const double tol = 1e-12 * (1.0 + std::abs(e0));
    for (int j = 0; j < s.n; ++j)
        if (h.energy(s.flipped(j)) < e0 - tol) return false;
    return true;
}

/// Threshold-logic upper bound on the number of storable patterns for a net
/// with single- to d-body interactions: sum_{i=1}^{d-1} C(N-1, i).
inline std::int64_t capacity_upper_bound(int N, int d) {
    if (d < 1 || d > N) throw std::invalid_argument("capacity_upper_bound: d out of range");
    std::int64_t s = 0;
    for (int i = 1; i <= d - 1; ++i) s += binomial(N - 1, i);
    return s;
}

}  // namespace spinprep
