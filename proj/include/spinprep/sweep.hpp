#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "spinprep/lhz.hpp"
#include "spinprep/spin_config.hpp"

namespace spinprep {

inline constexpr int kMaxSweepQubits = 14;  // dense desk-scale guard, dim <= 16384

/// Linear switching functions of the transverse-field sweep.
inline double sweep_delta(double t, double total_time) { return t / total_time; }
inline double sweep_epsilon(double t, double total_time) { return 1.0 - t / total_time; }

struct SweepSchedule {
    double total_time = 100.0;  // units of hbar / J
    long n_steps = 0;           // integrator steps, 0 = automatic
    int n_samples = 128;        // diagnostic samples
};

/// The sweep problem over physical qubits: H(t) = delta(t) (H_J + H_C)
/// + epsilon(t) sum_i sigma_x^i, with H_J = -sum_i J~_i sigma_z^i and
/// H_C = -sum_p C_p prod_{q in p} sigma_z^q. Basis index bit q is qubit q.
struct SweepProblem {
    LhzLayout layout;
    std::vector<Plaquette> plaquettes;
    std::vector<SpinConfiguration> pattern_states;  // physical images z_n
    SweepSchedule schedule;

    std::vector<double> diagonal;              // classical energies of H_0
    std::vector<std::size_t> pattern_indices;  // basis index of each z_n

    int n_qubits() const { return layout.n_physical(); }
    std::size_t dim() const { return std::size_t{1} << n_qubits(); }
    int n_patterns() const { return static_cast<int>(pattern_states.size()); }
};

inline SweepProblem make_sweep_problem(const LhzLayout& layout,
                                       const std::vector<Plaquette>& plaquettes,
                                       const std::vector<SpinConfiguration>& pattern_states,
                                       const SweepSchedule& schedule) {
    if (layout.n_physical() > kMaxSweepQubits)
        throw std::invalid_argument("make_sweep_problem: dimension guard exceeded");
    if (!(schedule.total_time > 0))
        throw std::invalid_argument("make_sweep_problem: total_time must be > 0");
    if (pattern_states.empty())
        throw std::invalid_argument("make_sweep_problem: need pattern states");
    for (const auto& p : plaquettes) {
        if (!(p.strength > 0))
            throw std::invalid_argument("make_sweep_problem: constraint strengths must be > 0");
        for (int q : p.members)
            if (q < 0 || q >= layout.n_physical())
                throw std::invalid_argument("make_sweep_problem: plaquette member out of range");
    }
    SweepProblem problem{layout, plaquettes, pattern_states, schedule, {}, {}};
    const std::size_t dim = problem.dim();
    const int np = problem.n_qubits();

    problem.diagonal.assign(dim, 0.0);
    for (std::size_t b = 0; b < dim; ++b) {
        double e = 0.0;
        for (int q = 0; q < np; ++q) {
            const int s = ((b >> q) & 1u) ? -1 : 1;
            e -= layout.fields[static_cast<std::size_t>(q)] * s;
        }
        problem.diagonal[b] = e;
    }
    for (const auto& p : plaquettes) {
        std::uint64_t mask = 0;
        for (int q : p.members) mask |= (std::uint64_t{1} << q);
        for (std::size_t b = 0; b < dim; ++b) {
            const int parity = (std::popcount(b & mask) & 1) ? -1 : 1;
            problem.diagonal[b] -= p.strength * parity;
        }
    }

    for (const auto& z : pattern_states) {
        if (z.n != np)
            throw std::invalid_argument("make_sweep_problem: pattern state length mismatch");
        problem.pattern_indices.push_back(static_cast<std::size_t>(z.bits));
    }
    check_patterns_distinct(pattern_states);
    return problem;
}

/// Convenience: map logical patterns through the layout.
inline SweepProblem make_sweep_problem_logical(const LhzLayout& layout,
                                               const std::vector<Plaquette>& plaquettes,
                                               const std::vector<SpinConfiguration>& patterns,
                                               const SweepSchedule& schedule) {
    std::vector<SpinConfiguration> states;
    states.reserve(patterns.size());
    for (const auto& x : patterns) states.push_back(map_config(layout, x));
    return make_sweep_problem(layout, plaquettes, states, schedule);
}

/// Dense H(t) in the computational basis (real symmetric).
inline Eigen::MatrixXd sweep_hamiltonian(const SweepProblem& p, double t) {
    const double T = p.schedule.total_time;
    if (t < 0 || t > T) throw std::invalid_argument("sweep_hamiltonian: t outside [0, T]");
    const double de = sweep_delta(t, T);
    const double ep = sweep_epsilon(t, T);
    const std::size_t dim = p.dim();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<long>(dim), static_cast<long>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        H(static_cast<long>(b), static_cast<long>(b)) = de * p.diagonal[b];
        for (int q = 0; q < p.n_qubits(); ++q) {
            const std::size_t b2 = b ^ (std::size_t{1} << q);
            H(static_cast<long>(b), static_cast<long>(b2)) += ep;
        }
    }
    return H;
}

struct Eigensystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns
};

namespace detail {

/// Full symmetric eigendecomposition (LAPACK dsyevd), ascending order.
inline void dsyevd_all(Eigen::MatrixXd& a_in_vectors_out, Eigen::VectorXd& values) {
    const int n = static_cast<int>(a_in_vectors_out.rows());
    values.resize(n);
    const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a_in_vectors_out.data(), n,
                                    values.data());
    if (info != 0)
        throw std::runtime_error("eigensystem: LAPACK dsyevd failed to converge, info=" +
                                 std::to_string(info));
}

/// Sign convention: largest-magnitude component of each column positive.
inline void fix_phases(Eigen::MatrixXd& vectors) {
    for (long c = 0; c < vectors.cols(); ++c) {
        long imax = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&imax);
        if (vectors(imax, c) < 0) vectors.col(c) = -vectors.col(c);
    }
}

}  // namespace detail

/// Lowest `count` eigenpairs of a real symmetric matrix, eigenvalues
/// ascending, phases fixed, residuals verified.
inline Eigensystem eigensystem(const Eigen::MatrixXd& H, int count) {
    if (H.rows() != H.cols()) throw std::invalid_argument("eigensystem: matrix not square");
    if (count < 1 || count > H.rows())
        throw std::invalid_argument("eigensystem: count out of range");
    Eigen::MatrixXd vecs = H;
    Eigen::VectorXd vals;
    detail::dsyevd_all(vecs, vals);
    Eigensystem out;
    out.values = vals.head(count);
    out.vectors = vecs.leftCols(count);
    detail::fix_phases(out.vectors);
    const double scale = std::max({1.0, std::abs(vals(0)), std::abs(vals(vals.size() - 1))});
    for (int c = 0; c < count; ++c) {
        const double resid = (H * out.vectors.col(c) - out.values(c) * out.vectors.col(c)).norm();
        if (resid > 1e-8 * scale)
            throw std::runtime_error("eigensystem: residual " + std::to_string(resid) +
                                     " exceeds tolerance");
    }
    return out;
}

namespace detail {

/// out = [delta*(diag - shift_d)] psi + eps*[sum_q psi(. xor q) - shift_v psi].
/// The shifts subtract a diagonal reference energy; they change only a global
/// phase of the evolution.
inline void apply_shifted(const SweepProblem& p, double de, double ep, double shift_d,
                          double shift_v, const std::complex<double>* psi,
                          std::complex<double>* out) {
    const std::size_t dim = p.dim();
    const int np = p.n_qubits();
    for (std::size_t i = 0; i < dim; ++i) {
        std::complex<double> x = psi[i ^ 1u];
        for (int q = 1; q < np; ++q) x += psi[i ^ (std::size_t{1} << q)];
        out[i] = de * (p.diagonal[i] - shift_d) * psi[i] + ep * (x - shift_v * psi[i]);
    }
}

}  // namespace detail

/// Ground state of the transverse-field term: every qubit in the sigma_x
/// eigenstate with eigenvalue -1.
inline Eigen::VectorXcd transverse_ground_state(const SweepProblem& p) {
    const std::size_t dim = p.dim();
    Eigen::VectorXcd psi(static_cast<long>(dim));
    const double amp = std::pow(2.0, -0.5 * p.n_qubits());
    for (std::size_t i = 0; i < dim; ++i)
        psi(static_cast<long>(i)) = (std::popcount(i) & 1) ? -amp : amp;
    return psi;
}

/// Half-width estimate of the occupied energy band during the sweep (the
/// integrator runs in a frame shifted to the pattern band, so only this
/// scale, not the full spectral radius, limits the step size).
inline double occupied_band_scale(const SweepProblem& p) {
    double pat_min = p.diagonal[p.pattern_indices.front()];
    double pat_max = pat_min;
    for (std::size_t idx : p.pattern_indices) {
        pat_min = std::min(pat_min, p.diagonal[idx]);
        pat_max = std::max(pat_max, p.diagonal[idx]);
    }
    double nonpat_min = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < p.dim(); ++b) {
        if (std::find(p.pattern_indices.begin(), p.pattern_indices.end(), b) !=
            p.pattern_indices.end())
            continue;
        nonpat_min = std::min(nonpat_min, p.diagonal[b]);
    }
    return 0.25 * p.n_qubits() + (pat_max - pat_min) + std::max(0.0, nonpat_min - pat_max);
}

/// Default step count for the fixed-step integrator, calibrated so that the
/// norm drift stays below 1e-9 per sweep and step halving moves the final
/// populations by far less than 1e-6 (roughly a 2x margin on both).
inline long default_sweep_steps(const SweepProblem& p, double total_time) {
    const double scale = std::max(1.0, occupied_band_scale(p));
    const long n = static_cast<long>(std::ceil(47.0 * std::pow(total_time * scale, 1.2)));
    return std::max<long>(4000, n);
}

/// Coarser step count for inner optimization loops; final-population errors
/// stay below ~1e-7, ample for cost evaluations at 1e-4 tolerances.
inline long evaluation_sweep_steps(const SweepProblem& p, double total_time) {
    return std::max<long>(20000, std::min(default_sweep_steps(p, total_time),
                                          static_cast<long>(std::ceil(200.0 * total_time))));
}

struct EvolveOptions {
    std::optional<Eigen::VectorXcd> initial;  // default: transverse ground state
    long n_steps = 0;                         // 0 = schedule value or automatic
    bool record = false;                      // eigen-overlap traces at samples
    int track_extra = 3;                      // tracked levels beyond M
};

struct SweepTrajectory {
    std::vector<double> sample_times;
    std::vector<std::vector<double>> overlaps;  // [n][sample], n = 0..M-1
    std::vector<double> p_bulk;                 // per sample
    std::vector<std::vector<double>> energies;  // [track][sample], M + track_extra
    std::vector<Eigen::VectorXcd> psi_samples;  // kept when recording
    Eigen::VectorXcd final_amplitudes;          // <z_n|psi(T)>
    std::vector<double> populations;            // |a_n|^2 at T
    double norm_drift = 0.0;
    long steps_used = 0;
};

namespace detail {

/// Fixed-step classic fourth-order Runge-Kutta for i dpsi/dt = H(t) psi with
/// the Hamiltonian evaluated at the midpoint for the two interior stages.
/// delta/eps are generic so tests can freeze the schedule. `on_sample(step,
/// t, psi)` is invoked at step 0 and after every step when non-null.
template <typename DeltaFn, typename EpsFn, typename SampleFn>
void rk4_evolve(const SweepProblem& p, DeltaFn&& delta_fn, EpsFn&& eps_fn, double t0, double t1,
                long n_steps, double shift_d, double shift_v, Eigen::VectorXcd& psi,
                SampleFn&& on_sample) {
    if (n_steps < 1) throw std::invalid_argument("rk4_evolve: need at least one step");
    const long dim = psi.size();
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    const std::complex<double> mi(0.0, -1.0);
    Eigen::VectorXcd k(dim), stage(dim), acc(dim), tmp(dim);

    auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& out) {
        apply_shifted(p, delta_fn(t), eps_fn(t), shift_d, shift_v, y.data(), tmp.data());
        for (long i = 0; i < dim; ++i) out(i) = mi * tmp(i);
    };

    on_sample(long{0}, t0, psi);
    for (long s = 0; s < n_steps; ++s) {
        const double t = t0 + h * static_cast<double>(s);
        const double tm = t + 0.5 * h;
        rhs(t, psi, k);  // k1
        acc = k;
        stage = psi + (0.5 * h) * k;
        rhs(tm, stage, k);  // k2, midpoint Hamiltonian
        acc += 2.0 * k;
        stage = psi + (0.5 * h) * k;
        rhs(tm, stage, k);  // k3, midpoint Hamiltonian
        acc += 2.0 * k;
        stage = psi + h * k;
        rhs(t + h, stage, k);  // k4
        acc += k;
        psi += (h / 6.0) * acc;
        on_sample(s + 1, t + h, psi);
    }
}

struct NullSample {
    void operator()(long, double, const Eigen::VectorXcd&) const {}
};

}  // namespace detail

/// Integrate the sweep from t = 0 to t = T. With `record`, instantaneous
/// eigensystems at the sample times provide the overlap traces p_n(t); level
/// labels follow the previous sample by maximal overlap (energy order at the
/// first sample) so that traces survive near-degeneracies.
inline SweepTrajectory evolve_sweep(const SweepProblem& p, const EvolveOptions& opts = {}) {
    const double T = p.schedule.total_time;
    const int M = p.n_patterns();
    long n_steps = opts.n_steps > 0 ? opts.n_steps
                                    : (p.schedule.n_steps > 0 ? p.schedule.n_steps
                                                              : default_sweep_steps(p, T));
    const int n_samples = std::max(1, p.schedule.n_samples);
    if (opts.record) {
        // align steps with the sample grid
        const long per = (n_steps + n_samples - 1) / n_samples;
        n_steps = per * n_samples;
    }

    Eigen::VectorXcd psi = opts.initial ? *opts.initial : transverse_ground_state(p);
    if (psi.size() != static_cast<long>(p.dim()))
        throw std::invalid_argument("evolve_sweep: initial state has wrong dimension");

    double shift_d = 0.0;
    for (std::size_t idx : p.pattern_indices) shift_d += p.diagonal[idx];
    shift_d /= static_cast<double>(M);
    const double shift_v = -static_cast<double>(p.n_qubits());

    SweepTrajectory traj;
    traj.steps_used = n_steps;
    const long sample_stride = opts.record ? n_steps / n_samples : n_steps;

    auto on_sample = [&](long step, double t, const Eigen::VectorXcd& state) {
        if (!opts.record) return;
        if (step % sample_stride != 0) return;
        traj.sample_times.push_back(t);
        traj.psi_samples.push_back(state);
    };
    detail::rk4_evolve(
        p, [T](double t) { return sweep_delta(t, T); },
        [T](double t) { return sweep_epsilon(t, T); }, 0.0, T, n_steps, shift_d, shift_v, psi,
        on_sample);

    traj.norm_drift = std::abs(psi.norm() - 1.0);
    if (traj.norm_drift > 1e-6)
        throw std::runtime_error(
            "evolve_sweep: norm drift " + std::to_string(traj.norm_drift) +
            " exceeds 1e-6; increase n_steps (used " + std::to_string(n_steps) + ")");

    traj.final_amplitudes.resize(M);
    traj.populations.resize(static_cast<std::size_t>(M));
    for (int n = 0; n < M; ++n) {
        const std::complex<double> a = psi(static_cast<long>(p.pattern_indices[static_cast<std::size_t>(n)]));
        traj.final_amplitudes(n) = a;
        traj.populations[static_cast<std::size_t>(n)] = std::norm(a);
    }

    if (opts.record) {
        const int n_tracks = std::min<int>(M + opts.track_extra, static_cast<int>(p.dim()));
        const int n_cand = std::min<int>(n_tracks + 2, static_cast<int>(p.dim()));
        const std::size_t n_pts = traj.sample_times.size();
        std::vector<Eigen::MatrixXd> cand_vecs(n_pts);
        std::vector<Eigen::VectorXd> cand_vals(n_pts);

#pragma omp parallel for schedule(dynamic)
        for (std::size_t j = 0; j < n_pts; ++j) {
            Eigen::MatrixXd H = sweep_hamiltonian(p, traj.sample_times[j]);
            Eigen::VectorXd vals;
            detail::dsyevd_all(H, vals);
            cand_vecs[j] = H.leftCols(n_cand);
            cand_vals[j] = vals.head(n_cand);
        }

        traj.overlaps.assign(static_cast<std::size_t>(M), std::vector<double>(n_pts, 0.0));
        traj.p_bulk.assign(n_pts, 0.0);
        traj.energies.assign(static_cast<std::size_t>(n_tracks), std::vector<double>(n_pts, 0.0));

        Eigen::MatrixXd prev_tracks;
        for (std::size_t j = 0; j < n_pts; ++j) {
            Eigen::MatrixXd tracks(cand_vecs[j].rows(), n_tracks);
            Eigen::VectorXd track_vals(n_tracks);
            if (j == 0) {
                tracks = cand_vecs[j].leftCols(n_tracks);
                track_vals = cand_vals[j].head(n_tracks);
            } else {
                // maximal-overlap assignment against the previous sample:
                // greedy over all (track, candidate) pairs, most certain
                // first; if any track ends up with an ambiguous match the
                // sampling does not resolve the crossing, so fall back to
                // energy order for this sample
                Eigen::MatrixXd ov = prev_tracks.transpose() * cand_vecs[j];
                std::vector<std::tuple<double, int, int>> ranked;
                for (int tr = 0; tr < n_tracks; ++tr)
                    for (int c = 0; c < n_cand; ++c)
                        ranked.emplace_back(std::abs(ov(tr, c)), tr, c);
                std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
                    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
                    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
                    return std::get<2>(a) < std::get<2>(b);
                });
                std::vector<int> assign(static_cast<std::size_t>(n_tracks), -1);
                std::vector<bool> used(static_cast<std::size_t>(n_cand), false);
                double min_quality = 1.0;
                int assigned = 0;
                for (const auto& [q, tr, c] : ranked) {
                    if (assign[static_cast<std::size_t>(tr)] >= 0 ||
                        used[static_cast<std::size_t>(c)])
                        continue;
                    assign[static_cast<std::size_t>(tr)] = c;
                    used[static_cast<std::size_t>(c)] = true;
                    min_quality = std::min(min_quality, q);
                    if (++assigned == n_tracks) break;
                }
                if (min_quality < 0.5)
                    for (int tr = 0; tr < n_tracks; ++tr) assign[static_cast<std::size_t>(tr)] = tr;
                for (int tr = 0; tr < n_tracks; ++tr) {
                    tracks.col(tr) = cand_vecs[j].col(assign[static_cast<std::size_t>(tr)]);
                    track_vals(tr) = cand_vals[j](assign[static_cast<std::size_t>(tr)]);
                }
            }
            const Eigen::VectorXcd& state = traj.psi_samples[j];
            double in_manifold = 0.0;
            for (int n = 0; n < n_tracks; ++n) {
                traj.energies[static_cast<std::size_t>(n)][j] = track_vals(n);
                if (n < M) {
                    std::complex<double> ov(0.0, 0.0);
                    for (long i = 0; i < state.size(); ++i) ov += tracks(i, n) * state(i);
                    const double pn = std::norm(ov);
                    traj.overlaps[static_cast<std::size_t>(n)][j] = pn;
                    in_manifold += pn;
                }
            }
            traj.p_bulk[j] = state.squaredNorm() - in_manifold;
            prev_tracks = std::move(tracks);
        }
    }
    return traj;
}

/// Evolve under the Hamiltonian frozen at t_star for the given duration.
inline Eigen::VectorXcd evolve_frozen(const SweepProblem& p, double t_star, double duration,
                                      const Eigen::VectorXcd& initial, long n_steps) {
    const double T = p.schedule.total_time;
    const double de = sweep_delta(t_star, T);
    const double ep = sweep_epsilon(t_star, T);
    Eigen::VectorXcd psi = initial;
    detail::rk4_evolve(
        p, [de](double) { return de; }, [ep](double) { return ep; }, 0.0, duration, n_steps, 0.0,
        0.0, psi, detail::NullSample{});
    return psi;
}

struct AdiabaticityTrace {
    std::vector<double> sample_times;         // strictly inside (0, T)
    std::vector<std::pair<int, int>> pairs;   // 0-based level pairs for A
    std::vector<std::vector<double>> a;       // [pair][sample]
    std::vector<std::vector<double>> b;       // [n][sample], bulk-leakage sums
    std::vector<std::vector<std::pair<int, int>>> degenerate;  // flagged per sample
};

/// A_nm(t) = |<phi_n| dH/dt |phi_m>| / (E_n - E_m)^2 on a grid strictly
/// inside (0, T); dH/dt = (H_0 - V)/T is constant. B_n sums A_nm over the
/// bulk levels m > M. Exact degeneracies are flagged and reported as NaN.
inline AdiabaticityTrace adiabaticity_metrics(const SweepProblem& p, int M, int n_samples = 64,
                                              std::vector<std::pair<int, int>> pairs = {}) {
    const double T = p.schedule.total_time;
    const std::size_t dim = p.dim();
    if (M < 1 || static_cast<std::size_t>(M) >= dim)
        throw std::invalid_argument("adiabaticity_metrics: M out of range");
    if (pairs.empty())
        for (int n = 0; n < M; ++n)
            for (int m = n + 1; m < M; ++m) pairs.emplace_back(n, m);

    AdiabaticityTrace trace;
    trace.pairs = pairs;
    for (int j = 1; j <= n_samples; ++j)
        trace.sample_times.push_back(T * static_cast<double>(j) /
                                     static_cast<double>(n_samples + 1));
    const std::size_t n_pts = trace.sample_times.size();
    trace.a.assign(pairs.size(), std::vector<double>(n_pts, 0.0));
    trace.b.assign(static_cast<std::size_t>(M), std::vector<double>(n_pts, 0.0));
    trace.degenerate.assign(n_pts, {});

#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < n_pts; ++j) {
        Eigen::MatrixXd Phi = sweep_hamiltonian(p, trace.sample_times[j]);
        Eigen::VectorXd vals;
        detail::dsyevd_all(Phi, vals);
        const double scale = std::max({1.0, std::abs(vals(0)), std::abs(vals(vals.size() - 1))});

        // rows of <phi_n| dH/dt |phi_m> for n < M, computed structurally
        Eigen::MatrixXd W(static_cast<long>(dim), M);
        std::vector<std::complex<double>> col(dim), out(dim);
        for (int n = 0; n < M; ++n) {
            for (std::size_t i = 0; i < dim; ++i) col[i] = Phi(static_cast<long>(i), n);
            detail::apply_shifted(p, 1.0 / T, -1.0 / T, 0.0, 0.0, col.data(), out.data());
            for (std::size_t i = 0; i < dim; ++i) W(static_cast<long>(i), n) = out[i].real();
        }
        Eigen::MatrixXd rows = W.transpose() * Phi;  // rows(n, m) = <phi_n|D|phi_m>

        auto a_value = [&](int n, int m) {
            const double gap = vals(n) - vals(m);
            if (std::abs(gap) < 1e-10 * scale) {
#pragma omp critical
                trace.degenerate[j].emplace_back(n, m);
                return std::numeric_limits<double>::quiet_NaN();
            }
            return std::abs(rows(n, m)) / (gap * gap);
        };
        for (std::size_t pi = 0; pi < pairs.size(); ++pi)
            trace.a[pi][j] = a_value(pairs[pi].first, pairs[pi].second);
        for (int n = 0; n < M; ++n) {
            double sum = 0.0;
            for (int m = M; m < static_cast<int>(dim); ++m) sum += a_value(n, m);
            trace.b[static_cast<std::size_t>(n)][j] = sum;
        }
    }
    return trace;
}

}  // namespace spinprep
