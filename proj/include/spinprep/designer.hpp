#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spinprep/combinatorics.hpp"
#include "spinprep/hopfield.hpp"
#include "spinprep/rng.hpp"
#include "spinprep/spin_model.hpp"

namespace spinprep {

enum class MoveKind { relearn, unlearn };

inline std::string to_string(MoveKind k) {
    return k == MoveKind::relearn ? "relearn" : "unlearn";
}

struct DesignParams {
    double delta_star = 0.05;  // target ratio Delta_p / Delta_b
    int radius = 2;            // Hamming-ball radius around patterns
    int r = 1;                 // bulk configurations unlearned per step
    double p_relearn = 2.0 / 3.0;
    double phi_max = 0.02;  // upper bound of the uniform relearn strengths
    double eta_max = 0.02;  // upper bound of the uniform unlearn strengths
    double temp_mc = 1.0;   // Metropolis temperature
    long max_steps = 100000;
    std::uint64_t seed = 1;
    long audit_interval = 0;  // full-energy recompute cadence, 0 = off

    void validate() const {
        if (!(delta_star > 0)) throw std::invalid_argument("DesignParams: delta_star must be > 0");
        if (radius < 1) throw std::invalid_argument("DesignParams: radius must be >= 1");
        if (r < 1) throw std::invalid_argument("DesignParams: r must be >= 1");
        if (p_relearn < 0 || p_relearn > 1)
            throw std::invalid_argument("DesignParams: p_relearn must be in [0,1]");
        if (!(phi_max > 0) || !(eta_max > 0))
            throw std::invalid_argument("DesignParams: strength bounds must be > 0");
        if (!(temp_mc > 0)) throw std::invalid_argument("DesignParams: temp_mc must be > 0");
        if (max_steps < 0) throw std::invalid_argument("DesignParams: max_steps must be >= 0");
    }
};

/// Delta_p, Delta_b and their ratio Delta. `delta` is absent when the gap is
/// not positive (lowest bulk entry at or below the highest pattern).
struct SpectralMetrics {
    double delta_p = 0.0;
    double delta_b = 0.0;
    std::optional<double> delta;
};

struct DesignTraceStep {
    MoveKind kind = MoveKind::relearn;
    bool accepted = false;
    double delta_p = 0.0;  // state metrics after the accept/reject decision
    double delta_b = 0.0;
    std::optional<double> delta;
};

struct DesignReport {
    SpinGlassHamiltonian hamiltonian;
    long steps = 0;
    bool converged = false;
    std::vector<DesignTraceStep> trace;
    SpectralMetrics final_metrics;
    double max_audit_error = 0.0;  // incremental vs recomputed energies
};

inline SpectralMetrics spectral_metrics(const EnergyTable& table) {
    if (table.patterns.empty()) throw std::invalid_argument("spectral_metrics: no patterns");
    double pat_min = std::numeric_limits<double>::infinity();
    double pat_max = -std::numeric_limits<double>::infinity();
    for (std::size_t row : table.pattern_rows) {
        pat_min = std::min(pat_min, table.entries[row].energy);
        pat_max = std::max(pat_max, table.entries[row].energy);
    }
    double bulk_min = std::numeric_limits<double>::infinity();
    bool have_bulk = false;
    for (const auto& e : table.entries) {
        if (e.min_hamming >= 1) {
            bulk_min = std::min(bulk_min, e.energy);
            have_bulk = true;
        }
    }
    if (!have_bulk) throw std::invalid_argument("spectral_metrics: no bulk entries");
    SpectralMetrics m;
    m.delta_p = pat_max - pat_min;
    m.delta_b = bulk_min - pat_max;
    if (m.delta_b > 0) m.delta = m.delta_p / m.delta_b;
    return m;
}

/// In-place Hebbian relearn (sign -1) or unlearn (sign +1) of one
/// configuration with per-order strengths.
inline void apply_hebbian_shift(SpinGlassHamiltonian& h, const SpinConfiguration& x,
                                const std::map<int, double>& strengths, double sign) {
    if (x.n != h.n()) throw std::invalid_argument("apply_update: target length mismatch");
    for (const auto& [k, strength] : strengths) {
        if (!(strength > 0)) throw std::invalid_argument("apply_update: strengths must be > 0");
        auto& tab = h.table(k);
        std::size_t rank = 0;
        for_each_combination_colex(h.n(), k, [&](const int* idx, int kk) {
            int prod = 1;
            for (int i = 0; i < kk; ++i) prod *= x.spin(idx[i]);
            tab[rank] += sign * strength * prod;
            ++rank;
        });
    }
}

/// Returns the Hamiltonian after a relearn step on a single pattern
/// (J_chi -= phi_k prod x) or an unlearn step on r bulk configurations
/// (J_chi += sum_b eta_k prod x^{u_b}).
inline SpinGlassHamiltonian apply_update(const SpinGlassHamiltonian& h, MoveKind kind,
                                         const std::vector<SpinConfiguration>& targets,
                                         const std::map<int, double>& strengths) {
    if (kind == MoveKind::relearn && targets.size() != 1)
        throw std::invalid_argument("apply_update: relearn takes exactly one target");
    if (targets.empty()) throw std::invalid_argument("apply_update: no targets");
    SpinGlassHamiltonian out = h;
    const double sign = (kind == MoveKind::relearn) ? -1.0 : +1.0;
    for (const auto& x : targets) apply_hebbian_shift(out, x, strengths, sign);
    return out;
}

namespace detail {

/// Energy shift of configuration s under a Hebbian shift on x: the subset
/// products collapse to Krawtchouk sums of the Hamming distance.
inline double hebbian_shift_energy(const std::vector<int>& orders,
                                   const std::vector<double>& strengths_by_slot,
                                   const std::vector<std::vector<std::int64_t>>& kraw_by_slot,
                                   const SpinConfiguration& x, const SpinConfiguration& s,
                                   double sign) {
    const int d = x.hamming(s);
    double de = 0.0;
    for (std::size_t oi = 0; oi < orders.size(); ++oi)
        de += strengths_by_slot[oi] * static_cast<double>(kraw_by_slot[oi][d]);
    return sign * de;
}

}  // namespace detail

/// Iterative Monte Carlo ground-state design. Starts from the Hebbian net of
/// the pattern set, then alternates relearning of the worst pattern and
/// unlearning of the lowest bulk configurations, accepted by a Metropolis
/// rule on Delta F, until Delta <= delta_star or max_steps.
///
/// Draw order per step (one xoshiro256++ stream): move kind, then one
/// strength per order (ascending k), then the acceptance uniform only when
/// Delta F > 0. Target selection is deterministic: highest-energy pattern
/// (ties -> lowest pattern index), lowest-energy bulk entries (ties ->
/// lexicographically smallest configuration).
inline DesignReport design_ground_states(const PatternSet& p, const std::vector<int>& K,
                                         const DesignParams& params) {
    params.validate();
    Rng rng(params.seed);

    DesignReport report;
    report.hamiltonian = hebbian_couplings(p, K);
    SpinGlassHamiltonian& h = report.hamiltonian;
    EnergyTable table = restricted_spectrum(h, p.patterns, params.radius);

    const std::vector<int>& orders = h.orders();
    const std::size_t n_orders = orders.size();

    // Krawtchouk lookup per order slot: kraw[oi][d] for d = 0..n.
    std::vector<std::vector<std::int64_t>> kraw(n_orders);
    for (std::size_t oi = 0; oi < n_orders; ++oi) {
        kraw[oi].resize(static_cast<std::size_t>(p.n) + 1);
        for (int d = 0; d <= p.n; ++d)
            kraw[oi][static_cast<std::size_t>(d)] = krawtchouk_subset_sum(d, p.n, orders[oi]);
    }

    std::vector<std::size_t> bulk_rows;
    for (std::size_t row = 0; row < table.entries.size(); ++row)
        if (table.entries[row].min_hamming >= 1) bulk_rows.push_back(row);
    if (bulk_rows.empty())
        throw std::invalid_argument("design_ground_states: restricted table has no bulk entries");
    if (static_cast<std::size_t>(params.r) > bulk_rows.size())
        throw std::invalid_argument("design_ground_states: r exceeds bulk size");

    SpectralMetrics current = spectral_metrics(table);
    auto finish = [&](bool converged, long steps) {
        report.converged = converged;
        report.steps = steps;
        const double jmax = h.max_abs_coupling();
        if (jmax > 0) h.scale(1.0 / jmax);
        EnergyTable final_table = restricted_spectrum(h, p.patterns, params.radius);
        report.final_metrics = spectral_metrics(final_table);
        return report;
    };

    if (current.delta && *current.delta <= params.delta_star) return finish(true, 0);

    std::vector<double> proposal_shift(table.entries.size());
    std::vector<double> strengths(n_orders);
    std::vector<std::size_t> unlearn_rows;

    for (long step = 1; step <= params.max_steps; ++step) {
        const MoveKind kind =
            rng.bernoulli(params.p_relearn) ? MoveKind::relearn : MoveKind::unlearn;
        const double bound = (kind == MoveKind::relearn) ? params.phi_max : params.eta_max;
        for (std::size_t oi = 0; oi < n_orders; ++oi) strengths[oi] = rng.uniform(bound);

        std::fill(proposal_shift.begin(), proposal_shift.end(), 0.0);
        std::vector<SpinConfiguration> targets;
        if (kind == MoveKind::relearn) {
            std::size_t best = 0;
            double best_e = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < table.pattern_rows.size(); ++i) {
                const double e = table.entries[table.pattern_rows[i]].energy;
                if (e > best_e) {
                    best_e = e;
                    best = i;
                }
            }
            targets.push_back(table.patterns[best]);
        } else {
            unlearn_rows.assign(bulk_rows.begin(), bulk_rows.end());
            std::partial_sort(unlearn_rows.begin(),
                              unlearn_rows.begin() + static_cast<long>(params.r),
                              unlearn_rows.end(), [&](std::size_t a, std::size_t b) {
                                  const double ea = table.entries[a].energy;
                                  const double eb = table.entries[b].energy;
                                  if (ea != eb) return ea < eb;
                                  return a < b;  // rows are in lex order
                              });
            for (int b = 0; b < params.r; ++b)
                targets.push_back(table.entries[unlearn_rows[static_cast<std::size_t>(b)]].config);
        }

        const double sign = (kind == MoveKind::relearn) ? -1.0 : +1.0;
        for (std::size_t row = 0; row < table.entries.size(); ++row) {
            double de = 0.0;
            for (const auto& x : targets)
                de += detail::hebbian_shift_energy(orders, strengths, kraw, x,
                                                   table.entries[row].config, sign);
            proposal_shift[row] = de;
        }

        // Proposal metrics without committing.
        double pat_min = std::numeric_limits<double>::infinity();
        double pat_max = -std::numeric_limits<double>::infinity();
        for (std::size_t row : table.pattern_rows) {
            const double e = table.entries[row].energy + proposal_shift[row];
            pat_min = std::min(pat_min, e);
            pat_max = std::max(pat_max, e);
        }
        double bulk_min = std::numeric_limits<double>::infinity();
        for (std::size_t row : bulk_rows)
            bulk_min = std::min(bulk_min, table.entries[row].energy + proposal_shift[row]);
        SpectralMetrics proposal;
        proposal.delta_p = pat_max - pat_min;
        proposal.delta_b = bulk_min - pat_max;
        if (proposal.delta_b > 0) proposal.delta = proposal.delta_p / proposal.delta_b;

        const bool terminal = proposal.delta && *proposal.delta <= params.delta_star;
        bool accept = terminal;
        if (!terminal) {
            const double delta_f =
                (proposal.delta_p - current.delta_p) - (proposal.delta_b - current.delta_b);
            accept = delta_f <= 0 || rng.uniform() < std::exp(-delta_f / params.temp_mc);
        }

        if (accept) {
            for (std::size_t row = 0; row < table.entries.size(); ++row)
                table.entries[row].energy += proposal_shift[row];
            std::map<int, double> by_order;
            for (std::size_t oi = 0; oi < n_orders; ++oi) by_order[orders[oi]] = strengths[oi];
            for (const auto& x : targets) apply_hebbian_shift(h, x, by_order, sign);
            current = proposal;
        }
        report.trace.push_back(
            {kind, accept, current.delta_p, current.delta_b, current.delta});

        if (params.audit_interval > 0 && step % params.audit_interval == 0) {
            for (const auto& e : table.entries)
                report.max_audit_error =
                    std::max(report.max_audit_error, std::abs(e.energy - h.energy(e.config)));
        }

        if (terminal) return finish(true, step);
    }
    return finish(false, params.max_steps);
}

}  // namespace spinprep
