#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinprep/combinatorics.hpp"
#include "spinprep/spin_config.hpp"
#include "spinprep/spin_model.hpp"

namespace spinprep {

/// Parity-architecture layout of a k-local spin glass: one physical qubit per
/// logical index tuple of length k, logical indices 0..logical_n-1. When the
/// logical Hamiltonian mixes orders k-1 and k, an ancilla spin (index 0,
/// fixed to +1) is prepended and the original logical indices shift up by
/// one; lower-order couplings then live on tuples padded with the ancilla.
struct LhzLayout {
    int logical_n = 0;  // including the ancilla when present
    int order_k = 0;    // physical tuple length
    bool has_ancilla = false;
    std::vector<std::vector<int>> qubits;  // lexicographically sorted tuples
    std::vector<double> fields;            // J~ per physical qubit

    int n_physical() const { return static_cast<int>(qubits.size()); }
    int n_logical_spins() const { return logical_n - (has_ancilla ? 1 : 0); }

    int qubit_id(const std::vector<int>& tuple) const {
        auto it = std::lower_bound(qubits.begin(), qubits.end(), tuple);
        if (it == qubits.end() || *it != tuple)
            throw std::invalid_argument("LhzLayout: no qubit with the requested tuple");
        return static_cast<int>(it - qubits.begin());
    }
};

/// A three- or four-body parity constraint on physical qubits, with its
/// energy term -C_p prod_{q in p} sigma_z (so even parity is rewarded for
/// C_p > 0).
struct Plaquette {
    std::vector<int> members;  // physical qubit ids
    double strength = 1.0;
};

inline LhzLayout build_layout(const SpinGlassHamiltonian& h) {
    std::vector<int> K = h.orders();
    if (K.empty()) throw std::invalid_argument("build_layout: Hamiltonian has no orders");
    for (int k : K)
        if (k < 1 || k > 3)
            throw std::invalid_argument("build_layout: only orders 1..3 are supported");
    const int k = K.back();
    if (k - K.front() > 1)
        throw std::invalid_argument(
            "build_layout: mixed orders spanning more than one level would need "
            "more than one fixed logical spin");

    LhzLayout layout;
    layout.order_k = k;
    layout.has_ancilla = K.front() < k;
    layout.logical_n = h.n() + (layout.has_ancilla ? 1 : 0);

    for_each_combination_lex(layout.logical_n, k, [&](const int* idx, int kk) {
        layout.qubits.emplace_back(idx, idx + kk);
    });

    layout.fields.resize(layout.qubits.size(), 0.0);
    const int shift = layout.has_ancilla ? 1 : 0;
    for (std::size_t q = 0; q < layout.qubits.size(); ++q) {
        const auto& tuple = layout.qubits[q];
        std::vector<int> logical;
        for (int i : tuple) {
            if (layout.has_ancilla && i == 0) continue;
            logical.push_back(i - shift);
        }
        const int order = static_cast<int>(logical.size());
        if (h.has_order(order)) {
            // H~_J = -sum J~ sigma_z must reproduce E = +sum J prod sigma_z.
            layout.fields[q] = -h.coupling(logical);
        }
    }
    return layout;
}

/// Physical image of a logical configuration: bit of qubit chi is 0 when the
/// product of the logical spins in chi is +1, else 1. The ancilla bit is
/// prepended as 0 automatically.
inline SpinConfiguration map_config(const LhzLayout& layout, const SpinConfiguration& x) {
    if (x.n != layout.n_logical_spins())
        throw std::invalid_argument("map_config: logical length mismatch");
    const int shift = layout.has_ancilla ? 1 : 0;
    std::uint64_t mask = 0;
    for (std::size_t q = 0; q < layout.qubits.size(); ++q) {
        int prod = 1;
        for (int i : layout.qubits[q]) {
            if (layout.has_ancilla && i == 0) continue;  // ancilla spin is +1
            prod *= x.spin(i - shift);
        }
        if (prod < 0) mask |= (std::uint64_t{1} << q);
    }
    return SpinConfiguration(mask, layout.n_physical());
}

namespace detail {

/// Incidence vector of a qubit over the non-ancilla logical indices.
inline std::uint64_t incidence_mask(const LhzLayout& layout, int qubit) {
    std::uint64_t v = 0;
    for (int i : layout.qubits[static_cast<std::size_t>(qubit)]) {
        if (layout.has_ancilla && i == 0) continue;
        v |= (std::uint64_t{1} << i);
    }
    return v;
}

/// GF(2) rank via greedy elimination; rows are consumed as bitmasks.
inline int gf2_rank(std::vector<std::uint64_t> rows) {
    std::vector<std::uint64_t> basis;
    for (std::uint64_t r : rows) {
        for (std::uint64_t b : basis) r = std::min(r, r ^ b);
        if (r) basis.push_back(r);
    }
    return static_cast<int>(basis.size());
}

/// Reduce r against the basis; if independent, insert and return true.
inline bool gf2_try_insert(std::vector<std::uint64_t>& basis, std::uint64_t r) {
    for (std::uint64_t b : basis) r = std::min(r, r ^ b);
    if (r == 0) return false;
    basis.push_back(r);
    return true;
}

}  // namespace detail

/// Dimension of the cycle space spanned by qubit subsets that close over the
/// logical indices (ancilla excluded): N_p - rank of the incidence vectors.
/// Equals N_p - N + 1 for the standard full layouts with N logical spins
/// including the ancilla.
inline int expected_constraint_count(const LhzLayout& layout) {
    std::vector<std::uint64_t> rows;
    for (int q = 0; q < layout.n_physical(); ++q)
        rows.push_back(detail::incidence_mask(layout, q));
    return layout.n_physical() - detail::gf2_rank(rows);
}

inline bool plaquette_closes(const LhzLayout& layout, const Plaquette& p) {
    std::uint64_t acc = 0;
    for (int q : p.members) {
        if (q < 0 || q >= layout.n_physical()) return false;
        acc ^= detail::incidence_mask(layout, q);
    }
    return acc == 0;
}

/// Parity of a physical configuration on a plaquette: +1 when the product of
/// the member spins is +1.
inline int plaquette_parity(const Plaquette& p, const SpinConfiguration& z) {
    int prod = 1;
    for (int q : p.members) prod *= z.spin(q);
    return prod;
}

/// Deterministic greedy scan over 3-subsets then 4-subsets of physical
/// qubits (lexicographic), keeping closed subsets that are GF(2)-independent,
/// until the cycle space is spanned. Throws when weight <= 4 cycles cannot
/// span it.
inline std::vector<Plaquette> find_constraints(const LhzLayout& layout) {
    const int np = layout.n_physical();
    if (np > 63) throw std::invalid_argument("find_constraints: too many physical qubits");
    const int target = expected_constraint_count(layout);

    std::vector<std::uint64_t> incidence(static_cast<std::size_t>(np));
    for (int q = 0; q < np; ++q)
        incidence[static_cast<std::size_t>(q)] = detail::incidence_mask(layout, q);

    std::vector<Plaquette> out;
    std::vector<std::uint64_t> chosen_basis;
    for (int weight = 3; weight <= 4 && static_cast<int>(out.size()) < target; ++weight) {
        for_each_combination_lex(np, weight, [&](const int* idx, int w) {
            if (static_cast<int>(out.size()) >= target) return;
            std::uint64_t inc = 0;
            std::uint64_t subset = 0;
            for (int i = 0; i < w; ++i) {
                inc ^= incidence[static_cast<std::size_t>(idx[i])];
                subset |= (std::uint64_t{1} << idx[i]);
            }
            if (inc != 0) return;
            if (!detail::gf2_try_insert(chosen_basis, subset)) return;
            Plaquette p;
            p.members.assign(idx, idx + w);
            out.push_back(std::move(p));
        });
    }
    if (static_cast<int>(out.size()) < target)
        throw std::runtime_error(
            "find_constraints: weight <= 4 plaquettes do not span the cycle space");
    return out;
}

struct ConstraintValidation {
    bool closure_ok = true;
    bool independent_ok = true;
    bool count_ok = true;
    int expected_count = 0;
    std::vector<int> failing_closure;  // indices of non-closing plaquettes

    bool ok() const { return closure_ok && independent_ok && count_ok; }
};

inline ConstraintValidation validate_constraints(const LhzLayout& layout,
                                                 const std::vector<Plaquette>& plaquettes) {
    ConstraintValidation v;
    v.expected_count = expected_constraint_count(layout);
    for (std::size_t i = 0; i < plaquettes.size(); ++i) {
        if (!plaquette_closes(layout, plaquettes[i])) {
            v.closure_ok = false;
            v.failing_closure.push_back(static_cast<int>(i));
        }
    }
    std::vector<std::uint64_t> basis;
    for (const auto& p : plaquettes) {
        std::uint64_t subset = 0;
        for (int q : p.members)
            if (q >= 0 && q < 63) subset |= (std::uint64_t{1} << q);
        if (!detail::gf2_try_insert(basis, subset)) v.independent_ok = false;
    }
    v.count_ok = static_cast<int>(plaquettes.size()) == v.expected_count;
    return v;
}

namespace detail {

inline std::vector<Plaquette> plaquettes_from_tuples(
    const LhzLayout& layout, const std::vector<std::vector<std::vector<int>>>& sets) {
    std::vector<Plaquette> out;
    for (const auto& tuples : sets) {
        Plaquette p;
        for (const auto& t : tuples) p.members.push_back(layout.qubit_id(t));
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace detail

/// The published six-constraint set for the 2D layout on five logical
/// indices (CLI fixture name "eq17").
inline std::vector<Plaquette> reference_constraints_2d(const LhzLayout& layout) {
    if (layout.order_k != 2 || layout.logical_n != 5)
        throw std::invalid_argument("reference_constraints_2d: need the 5-index 2D layout");
    return detail::plaquettes_from_tuples(
        layout, {{{0, 1}, {0, 2}, {1, 2}},
                 {{1, 2}, {1, 3}, {2, 3}},
                 {{2, 3}, {2, 4}, {3, 4}},
                 {{0, 2}, {0, 3}, {1, 2}, {1, 3}},
                 {{1, 3}, {1, 4}, {2, 3}, {2, 4}},
                 {{0, 3}, {0, 4}, {1, 3}, {1, 4}}});
}

/// The published six-constraint set for the 3D layout on five logical
/// indices (CLI fixture name "eq18").
inline std::vector<Plaquette> reference_constraints_3d(const LhzLayout& layout) {
    if (layout.order_k != 3 || layout.logical_n != 5)
        throw std::invalid_argument("reference_constraints_3d: need the 5-index 3D layout");
    return detail::plaquettes_from_tuples(
        layout, {{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}},
                 {{0, 2, 3}, {0, 2, 4}, {0, 3, 4}},
                 {{0, 1, 3}, {1, 2, 4}, {2, 3, 4}},
                 {{0, 1, 3}, {0, 1, 4}, {0, 2, 3}, {0, 2, 4}},
                 {{0, 2, 3}, {0, 2, 4}, {1, 2, 3}, {1, 2, 4}},
                 {{0, 2, 4}, {0, 3, 4}, {1, 2, 4}, {1, 3, 4}}});
}

}  // namespace spinprep
