#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinprep/combinatorics.hpp"
#include "spinprep/spin_config.hpp"

namespace spinprep {

/// Sign convention tag for Hamiltonian files. Internally every computation
/// uses E(s) = sum_k sum_chi J_chi prod_i s_{chi_i}; files tagged
/// `paper_example_minus` carry the opposite overall sign and are negated on
/// load.
enum class SignConvention { eq6_plus, paper_example_minus };

inline std::string to_string(SignConvention c) {
    return c == SignConvention::eq6_plus ? "eq6_plus" : "paper_example_minus";
}

inline SignConvention sign_convention_from_string(const std::string& s) {
    if (s == "eq6_plus") return SignConvention::eq6_plus;
    if (s == "paper_example_minus") return SignConvention::paper_example_minus;
    throw std::invalid_argument("unknown sign convention '" + s + "'");
}

struct InteractionTerm {
    std::vector<int> indices;  // strictly increasing spin positions
    double coupling = 0.0;
};

/// k-local all-to-all Ising Hamiltonian over n spins. For every order k in
/// `orders` the coupling table is dense, indexed by the colexicographic rank
/// of the index tuple, so single-coupling access during Monte Carlo updates
/// is O(1).
class SpinGlassHamiltonian {
  public:
    SpinGlassHamiltonian() = default;

    SpinGlassHamiltonian(int n, std::vector<int> orders) : n_(n), orders_(std::move(orders)) {
        if (n < 0 || n > kMaxSpins)
            throw std::invalid_argument("SpinGlassHamiltonian: n out of range");
        std::sort(orders_.begin(), orders_.end());
        orders_.erase(std::unique(orders_.begin(), orders_.end()), orders_.end());
        for (int k : orders_)
            if (k < 0 || k > n)
                throw std::invalid_argument("SpinGlassHamiltonian: order out of range");
        couplings_.resize(orders_.size());
        for (std::size_t oi = 0; oi < orders_.size(); ++oi)
            couplings_[oi].assign(static_cast<std::size_t>(binomial(n, orders_[oi])), 0.0);
    }

    int n() const { return n_; }
    const std::vector<int>& orders() const { return orders_; }

    bool has_order(int k) const {
        return std::find(orders_.begin(), orders_.end(), k) != orders_.end();
    }

    std::vector<double>& table(int k) { return couplings_[order_slot(k)]; }
    const std::vector<double>& table(int k) const { return couplings_[order_slot(k)]; }

    double& coupling(const std::vector<int>& idx) {
        return couplings_[order_slot(static_cast<int>(idx.size()))][colex_rank(idx)];
    }
    double coupling(const std::vector<int>& idx) const {
        return couplings_[order_slot(static_cast<int>(idx.size()))][colex_rank(idx)];
    }

    std::size_t term_count() const {
        std::size_t c = 0;
        for (const auto& t : couplings_) c += t.size();
        return c;
    }

    /// fn(order k, const int* indices, double J) over all stored terms,
    /// orders ascending, tuples in colex order within each order.
    template <typename Fn>
    void for_each_term(Fn&& fn) const {
        for (std::size_t oi = 0; oi < orders_.size(); ++oi) {
            const int k = orders_[oi];
            const auto& tab = couplings_[oi];
            std::size_t rank = 0;
            for_each_combination_colex(n_, k, [&](const int* idx, int kk) {
                fn(kk, idx, tab[rank]);
                ++rank;
            });
        }
    }

    double energy(const SpinConfiguration& s) const {
        if (s.n != n_) throw std::invalid_argument("energy: configuration length mismatch");
        double e = 0.0;
        for (std::size_t oi = 0; oi < orders_.size(); ++oi) {
            const int k = orders_[oi];
            const auto& tab = couplings_[oi];
            std::size_t rank = 0;
            for_each_combination_colex(n_, k, [&](const int* idx, int kk) {
                int prod = 1;
                for (int i = 0; i < kk; ++i) prod *= s.spin(idx[i]);
                e += tab[rank] * prod;
                ++rank;
            });
        }
        return e;
    }

    double max_abs_coupling() const {
        double m = 0.0;
        for (const auto& tab : couplings_)
            for (double j : tab) m = std::max(m, std::abs(j));
        return m;
    }

    void scale(double factor) {
        for (auto& tab : couplings_)
            for (double& j : tab) j *= factor;
    }

  private:
    std::size_t order_slot(int k) const {
        auto it = std::find(orders_.begin(), orders_.end(), k);
        if (it == orders_.end())
            throw std::invalid_argument("SpinGlassHamiltonian: order " + std::to_string(k) +
                                        " not present");
        return static_cast<std::size_t>(it - orders_.begin());
    }

    int n_ = 0;
    std::vector<int> orders_;
    std::vector<std::vector<double>> couplings_;
};

inline double energy(const SpinGlassHamiltonian& h, const SpinConfiguration& s) {
    return h.energy(s);
}

/// All configurations within Hamming distance `radius` of `center`, each
/// exactly once, sorted lexicographically.
inline std::vector<SpinConfiguration> hamming_ball(const SpinConfiguration& center, int radius) {
    if (radius < 0 || radius > center.n)
        throw std::invalid_argument("hamming_ball: radius out of range");
    std::vector<SpinConfiguration> out;
    for (int j = 0; j <= radius; ++j) {
        for_each_combination_lex(center.n, j, [&](const int* idx, int k) {
            std::uint64_t mask = center.bits;
            for (int i = 0; i < k; ++i) mask ^= (std::uint64_t{1} << idx[i]);
            out.emplace_back(mask, center.n);
        });
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

/// Energies over a configuration set together with the minimum Hamming
/// distance of each entry to the stored pattern set. Entries are sorted
/// lexicographically; every pattern appears with min_hamming = 0.
struct EnergyTable {
    struct Entry {
        SpinConfiguration config;
        double energy = 0.0;
        int min_hamming = 0;
    };

    std::vector<SpinConfiguration> patterns;
    std::vector<Entry> entries;
    std::vector<std::size_t> pattern_rows;  // row of patterns[i] in entries

    std::size_t size() const { return entries.size(); }
};

inline void check_patterns_distinct(const std::vector<SpinConfiguration>& patterns) {
    for (std::size_t a = 0; a < patterns.size(); ++a)
        for (std::size_t b = a + 1; b < patterns.size(); ++b)
            if (patterns[a] == patterns[b])
                throw std::invalid_argument("patterns must be distinct");
}

/// Energy table over the union of Hamming balls of the given radius around
/// all patterns. radius >= n yields the full 2^n spectrum.
inline EnergyTable restricted_spectrum(const SpinGlassHamiltonian& h,
                                       const std::vector<SpinConfiguration>& patterns,
                                       int radius) {
    if (patterns.empty()) throw std::invalid_argument("restricted_spectrum: empty pattern list");
    if (radius < 1) throw std::invalid_argument("restricted_spectrum: radius must be >= 1");
    check_patterns_distinct(patterns);
    const int n = h.n();
    for (const auto& p : patterns)
        if (p.n != n) throw std::invalid_argument("restricted_spectrum: pattern length mismatch");

    std::vector<SpinConfiguration> configs;
    if (radius >= n) {
        configs.reserve(std::size_t{1} << n);
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) configs.emplace_back(m, n);
        std::sort(configs.begin(), configs.end(), lex_less);
    } else {
        for (const auto& p : patterns) {
            auto ball = hamming_ball(p, radius);
            configs.insert(configs.end(), ball.begin(), ball.end());
        }
        std::sort(configs.begin(), configs.end(), lex_less);
        configs.erase(std::unique(configs.begin(), configs.end()), configs.end());
    }

    EnergyTable table;
    table.patterns = patterns;
    table.entries.reserve(configs.size());
    for (const auto& c : configs) {
        int dmin = n + 1;
        for (const auto& p : patterns) dmin = std::min(dmin, c.hamming(p));
        table.entries.push_back({c, h.energy(c), dmin});
    }
    table.pattern_rows.resize(patterns.size());
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        auto it = std::lower_bound(table.entries.begin(), table.entries.end(), patterns[i],
                                   [](const EnergyTable::Entry& e, const SpinConfiguration& p) {
                                       return lex_less(e.config, p);
                                   });
        table.pattern_rows[i] = static_cast<std::size_t>(it - table.entries.begin());
    }
    return table;
}

/// Exact projector-expansion oracle: couplings (including the k=0 offset)
/// whose classical energy is 1 on every non-pattern configuration and 0 on
/// every pattern. Obtained from the parity (Walsh) transform of the
/// indicator; cost O(n 2^n), so this stays a small-n oracle.
inline SpinGlassHamiltonian projector_couplings(const std::vector<SpinConfiguration>& patterns,
                                                int n) {
    if (n < 0 || n > 16) throw std::invalid_argument("projector_couplings: n out of range");
    check_patterns_distinct(patterns);
    for (const auto& p : patterns)
        if (p.n != n) throw std::invalid_argument("projector_couplings: pattern length mismatch");

    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> f(dim, 1.0);
    for (const auto& p : patterns) f[p.bits] = 0.0;

    // In-place Walsh-Hadamard transform; f[S] becomes sum_s f(s) (-1)^{|s & S|}.
    for (std::size_t len = 1; len < dim; len <<= 1) {
        for (std::size_t i = 0; i < dim; i += (len << 1)) {
            for (std::size_t j = i; j < i + len; ++j) {
                const double a = f[j];
                const double b = f[j + len];
                f[j] = a + b;
                f[j + len] = a - b;
            }
        }
    }

    std::vector<int> orders(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) orders[static_cast<std::size_t>(k)] = k;
    SpinGlassHamiltonian h(n, orders);
    const double scale = 1.0 / static_cast<double>(dim);
    std::vector<int> idx;
    for (std::uint32_t mask = 0; mask < dim; ++mask) {
        idx.clear();
        for (int j = 0; j < n; ++j)
            if ((mask >> j) & 1u) idx.push_back(j);
        h.coupling(idx) = f[mask] * scale;
    }
    return h;
}

}  // namespace spinprep
