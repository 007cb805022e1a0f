#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinprep/rng.hpp"
#include "spinprep/schrieffer_wolff.hpp"
#include "spinprep/sweep.hpp"

namespace spinprep {

struct TargetDistribution {
    std::vector<double> probabilities;  // p_n*, one per pattern

    void validate() const {
        double sum = 0.0;
        for (double p : probabilities) {
            if (p < 0 || p > 1)
                throw std::invalid_argument("TargetDistribution: entries must be in [0,1]");
            sum += p;
        }
        if (sum > 1.0 + 1e-9)
            throw std::invalid_argument("TargetDistribution: probabilities sum above one");
    }
};

/// Omega = sum_n (|a_n|^2 - p_n*)^2; phase-insensitive by construction.
inline double cost(const Eigen::VectorXcd& amplitudes, const TargetDistribution& targets) {
    if (amplitudes.size() != static_cast<long>(targets.probabilities.size()))
        throw std::invalid_argument("cost: length mismatch");
    double omega = 0.0;
    for (long n = 0; n < amplitudes.size(); ++n) {
        const double d = std::norm(amplitudes(n)) - targets.probabilities[static_cast<std::size_t>(n)];
        omega += d * d;
    }
    return omega;
}

enum class SweepBackend { exact, effective };

inline std::string to_string(SweepBackend b) {
    return b == SweepBackend::exact ? "exact" : "effective";
}

struct OptimizerOptions {
    int starts = 5;
    long max_evaluations = 400;  // per start
    double tolerance = 1e-4;
    double c_min_factor = 0.1;  // box [c_min, c_max] = factors times max |J~|
    double c_max_factor = 20.0;
    std::uint64_t seed = 1;
    long eval_steps = 0;      // integrator steps per cost evaluation, 0 = auto
    int sw_order = 4;         // effective backend order
    double t0_ratio = 1.0;    // effective backend crossover
    double simplex_step = 0.35;  // initial simplex extent in log space
    std::vector<double> initial_c;  // optional custom start (first start only)
};

struct OptimizationResult {
    Eigen::VectorXd best_c;
    double best_cost = 0.0;
    long evaluations = 0;
    std::vector<std::pair<Eigen::VectorXd, double>> history;  // (C, Omega) per evaluation
    SweepBackend backend = SweepBackend::exact;
    bool converged = false;
    std::vector<double> best_populations;
};

namespace detail {

/// Downhill simplex (Nelder-Mead) in log-coordinates; reports through eval.
inline void nelder_mead(std::vector<Eigen::VectorXd> simplex,
                        const std::function<double(const Eigen::VectorXd&)>& eval,
                        long max_evaluations, double tolerance, long& used,
                        std::function<bool()> should_stop) {
    const int dim = static_cast<int>(simplex[0].size());
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<double> f(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) {
        f[i] = eval(simplex[i]);
        ++used;
        if (should_stop() || used >= max_evaluations) return;
    }

    while (used < max_evaluations && !should_stop()) {
        std::vector<std::size_t> order(simplex.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<Eigen::VectorXd> sx(simplex.size());
        std::vector<double> sf(simplex.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sx[i] = simplex[order[i]];
            sf[i] = f[order[i]];
        }
        simplex = sx;
        f = sf;
        if (f[0] < tolerance) return;
        if (std::abs(f[f.size() - 1] - f[0]) < 1e-14) return;  // simplex collapsed

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i];
        centroid /= static_cast<double>(simplex.size() - 1);
        const Eigen::VectorXd& worst = simplex.back();

        Eigen::VectorXd xr = centroid + alpha * (centroid - worst);
        const double fr = eval(xr);
        ++used;
        if (fr < f[0]) {
            Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
            const double fe = eval(xe);
            ++used;
            if (fe < fr) {
                simplex.back() = xe;
                f.back() = fe;
            } else {
                simplex.back() = xr;
                f.back() = fr;
            }
        } else if (fr < f[f.size() - 2]) {
            simplex.back() = xr;
            f.back() = fr;
        } else {
            const bool outside = fr < f.back();
            Eigen::VectorXd xc =
                outside ? (centroid + rho * (xr - centroid)).eval()
                        : (centroid + rho * (worst - centroid)).eval();
            const double fc = eval(xc);
            ++used;
            if (fc < (outside ? fr : f.back())) {
                simplex.back() = xc;
                f.back() = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0]);
                    f[i] = eval(simplex[i]);
                    ++used;
                    if (used >= max_evaluations || should_stop()) return;
                }
            }
        }
    }
}

}  // namespace detail

/// Tune the constraint strengths so the sweep ends in the target amplitude
/// distribution. Derivative-free simplex over log C_p (positivity built in),
/// multi-start around C_0 = 2 max|J~|, each evaluation running the chosen
/// backend end to end.
inline OptimizationResult optimize_constraints(const SweepProblem& problem,
                                               const TargetDistribution& targets,
                                               SweepBackend backend,
                                               const OptimizerOptions& opts = {}) {
    targets.validate();
    if (static_cast<int>(targets.probabilities.size()) != problem.n_patterns())
        throw std::invalid_argument("optimize_constraints: one target per pattern required");
    if (problem.plaquettes.empty())
        throw std::invalid_argument("optimize_constraints: problem has no constraints to tune");

    const int n_c = static_cast<int>(problem.plaquettes.size());
    double j_max = 0.0;
    for (double f : problem.layout.fields) j_max = std::max(j_max, std::abs(f));
    if (j_max == 0.0) j_max = 1.0;
    const double c_min = opts.c_min_factor * j_max;
    const double c_max = opts.c_max_factor * j_max;
    const double c_start = std::clamp(2.0 * j_max, c_min, c_max);
    const double T = problem.schedule.total_time;
    const long eval_steps =
        opts.eval_steps > 0 ? opts.eval_steps : evaluation_sweep_steps(problem, T);

    OptimizationResult result;
    result.backend = backend;
    result.best_cost = std::numeric_limits<double>::infinity();

    auto run_backend = [&](const Eigen::VectorXd& c) -> Eigen::VectorXcd {
        SweepProblem candidate = problem;
        for (int i = 0; i < n_c; ++i)
            candidate.plaquettes[static_cast<std::size_t>(i)].strength = c(i);
        // strengths enter the diagonal; rebuild it
        candidate = make_sweep_problem(candidate.layout, candidate.plaquettes,
                                       candidate.pattern_states, candidate.schedule);
        if (backend == SweepBackend::exact) {
            EvolveOptions eopts;
            eopts.n_steps = eval_steps;
            return evolve_sweep(candidate, eopts).final_amplitudes;
        }
        auto part = make_block_partition(candidate);
        auto model = effective_terms(candidate, part, opts.sw_order);
        return effective_evolve(model, candidate.schedule, EffectiveMode::hybrid, opts.t0_ratio)
            .amplitudes;
    };

    auto objective = [&](const Eigen::VectorXd& logc) -> double {
        Eigen::VectorXd c(n_c);
        for (int i = 0; i < n_c; ++i) c(i) = std::clamp(std::exp(logc(i)), c_min, c_max);
        const Eigen::VectorXcd a = run_backend(c);
        const double omega = cost(a, targets);
        result.history.emplace_back(c, omega);
        if (omega < result.best_cost) {
            result.best_cost = omega;
            result.best_c = c;
            result.best_populations.resize(static_cast<std::size_t>(a.size()));
            for (long n = 0; n < a.size(); ++n)
                result.best_populations[static_cast<std::size_t>(n)] = std::norm(a(n));
        }
        return omega;
    };

    Rng rng(opts.seed);
    long used = 0;
    for (int start = 0; start < opts.starts; ++start) {
        Eigen::VectorXd x0(n_c);
        if (start == 0 && !opts.initial_c.empty()) {
            if (static_cast<int>(opts.initial_c.size()) != n_c)
                throw std::invalid_argument("optimize_constraints: initial_c size mismatch");
            for (int i = 0; i < n_c; ++i)
                x0(i) = std::log(std::clamp(opts.initial_c[static_cast<std::size_t>(i)], c_min,
                                            c_max));
        } else {
            for (int i = 0; i < n_c; ++i) {
                double jitter = start == 0 ? 0.0 : (rng.uniform() - 0.5) * 1.4;
                x0(i) = std::log(c_start) + jitter;
            }
        }
        std::vector<Eigen::VectorXd> simplex{x0};
        for (int i = 0; i < n_c; ++i) {
            Eigen::VectorXd v = x0;
            v(i) += opts.simplex_step;
            simplex.push_back(v);
        }
        long start_used = 0;
        detail::nelder_mead(std::move(simplex), objective, opts.max_evaluations,
                            opts.tolerance, start_used,
                            [&] { return result.best_cost < opts.tolerance; });
        used += start_used;
        if (result.best_cost < opts.tolerance) break;
    }
    result.evaluations = used;
    result.converged = result.best_cost < opts.tolerance;
    return result;
}

}  // namespace spinprep
