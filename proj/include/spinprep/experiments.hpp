#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinprep/designer.hpp"
#include "spinprep/io.hpp"
#include "spinprep/lhz.hpp"
#include "spinprep/optimizer.hpp"
#include "spinprep/rng.hpp"
#include "spinprep/schrieffer_wolff.hpp"
#include "spinprep/sweep.hpp"

namespace spinprep {

// ---- Worked-example fixtures -------------------------------------------------
// Couplings as published (two decimals, overall minus convention), stored here
// already negated into the internal sign convention.

inline SpinGlassHamiltonian example_hamiltonian(int which) {
    if (which == 1) {
        SpinGlassHamiltonian h(4, {1, 2});
        h.coupling({0}) = -1.00;
        h.coupling({1}) = -0.37;
        h.coupling({2}) = -0.20;
        h.coupling({3}) = -0.21;
        h.coupling({0, 1}) = -0.35;
        h.coupling({0, 2}) = -0.23;
        h.coupling({0, 3}) = -0.22;
        h.coupling({1, 2}) = 0.36;
        h.coupling({1, 3}) = 0.37;
        h.coupling({2, 3}) = -1.00;
        return h;
    }
    if (which == 2) {
        SpinGlassHamiltonian h(4, {2, 3});
        h.coupling({0, 1}) = -1.00;
        h.coupling({0, 2}) = -0.99;
        h.coupling({0, 3}) = -0.99;
        h.coupling({1, 2}) = 0.50;
        h.coupling({1, 3}) = 0.50;
        h.coupling({2, 3}) = 0.50;
        h.coupling({0, 1, 2}) = -0.50;
        h.coupling({0, 1, 3}) = -0.50;
        h.coupling({0, 2, 3}) = -0.51;
        h.coupling({1, 2, 3}) = 1.00;
        return h;
    }
    throw std::invalid_argument("example_hamiltonian: which must be 1 or 2");
}

inline PatternSet example_patterns(int which) {
    if (which == 1)
        return PatternSet(4, {SpinConfiguration::from_string("0000"),
                              SpinConfiguration::from_string("0011"),
                              SpinConfiguration::from_string("0100")});
    if (which == 2)
        return PatternSet(4, {SpinConfiguration::from_string("0000"),
                              SpinConfiguration::from_string("0001"),
                              SpinConfiguration::from_string("0010"),
                              SpinConfiguration::from_string("0100")});
    throw std::invalid_argument("example_patterns: which must be 1 or 2");
}

/// Physical bit strings the mapping must reproduce for the two examples.
inline std::vector<std::string> example_physical_strings(int which) {
    if (which == 1) return {"0000000000", "0011011110", "0100100110"};
    if (which == 2) return {"0000000000", "0010110111", "0101011011", "1001101101"};
    throw std::invalid_argument("example_physical_strings: which must be 1 or 2");
}

/// Published optimized constraint strengths (exact backend), reference data.
inline std::vector<double> example_reference_strengths(int which) {
    if (which == 1) return {5.05, 4.48, 5.57, 3.25, 2.12, 2.74};
    if (which == 2) return {9.01, 3.31, 4.42, 9.12, 2.07, 2.63};
    throw std::invalid_argument("example_reference_strengths: which must be 1 or 2");
}

struct ExampleFixture {
    SpinGlassHamiltonian hamiltonian;
    PatternSet patterns;
    LhzLayout layout;
    std::vector<Plaquette> plaquettes;  // published constraint set, unit strengths
    SpectralMetrics logical_metrics;
    std::vector<SpinConfiguration> physical_states;
};

/// Load and cross-check a worked example: the physical strings and the
/// constraint set must match the published ones exactly, and the logical
/// spectrum must reproduce the published band ratio. Any mismatch aborts.
inline ExampleFixture verify_example_fixture(int which) {
    ExampleFixture fx{example_hamiltonian(which), example_patterns(which), {}, {}, {}, {}};
    fx.layout = build_layout(fx.hamiltonian);
    fx.plaquettes = which == 1 ? reference_constraints_2d(fx.layout)
                               : reference_constraints_3d(fx.layout);

    const auto expected = example_physical_strings(which);
    for (std::size_t i = 0; i < fx.patterns.patterns.size(); ++i) {
        auto z = map_config(fx.layout, fx.patterns.patterns[i]);
        if (z.to_string() != expected[i])
            throw std::runtime_error("example fixture mismatch: pattern " + std::to_string(i) +
                                     " maps to " + z.to_string() + ", expected " + expected[i]);
        fx.physical_states.push_back(z);
    }
    auto validation = validate_constraints(fx.layout, fx.plaquettes);
    if (!validation.ok())
        throw std::runtime_error("example fixture mismatch: constraint set fails validation");

    auto table = restricted_spectrum(fx.hamiltonian, fx.patterns.patterns, fx.hamiltonian.n());
    fx.logical_metrics = spectral_metrics(table);
    if (!fx.logical_metrics.delta)
        throw std::runtime_error("example fixture mismatch: no positive bulk gap");
    const double delta = *fx.logical_metrics.delta;
    if (which == 1 && (delta < 0.05 || delta > 0.25))
        throw std::runtime_error("example fixture mismatch: example-1 delta " +
                                 std::to_string(delta));
    if (which == 2 && delta >= 0.05)
        throw std::runtime_error("example fixture mismatch: example-2 delta " +
                                 std::to_string(delta));
    return fx;
}

struct ExampleRunResult {
    double total_time = 0.0;
    OptimizationResult optimization;
    std::vector<double> final_populations;  // verified with accurate steps
    double norm_drift = 0.0;
    double max_a12 = 0.0;
    double max_a13 = 0.0;
    double max_b1 = 0.0;
};

struct ExampleReport {
    int which = 1;
    ExampleFixture fixture;
    std::vector<ExampleRunResult> runs;  // one per T
    int best_run = -1;                   // lowest cost
};

struct ExampleOptions {
    std::uint64_t seed = 1;
    int starts = 3;
    long max_evaluations = 400;
    double tolerance = 1e-4;
    int trace_samples = 96;
    int adiabaticity_samples = 64;
    bool compute_adiabaticity = true;
    std::vector<double> initial_strengths;  // optional first-start override
};

/// End-to-end reproduction of a worked example: verify the fixture, optimize
/// the constraint strengths per sweep time, re-measure the best point at
/// accurate integrator settings, and collect the adiabaticity peaks.
inline ExampleReport reproduce_example(int which, const std::vector<double>& t_grid,
                                       const ExampleOptions& opts = {}) {
    ExampleReport report;
    report.which = which;
    report.fixture = verify_example_fixture(which);
    const int m = report.fixture.patterns.size();

    TargetDistribution targets;
    targets.probabilities.assign(static_cast<std::size_t>(m), 1.0 / static_cast<double>(m));

    double best_cost = std::numeric_limits<double>::infinity();
    for (double total_time : t_grid) {
        SweepSchedule schedule;
        schedule.total_time = total_time;
        auto problem = make_sweep_problem(report.fixture.layout, report.fixture.plaquettes,
                                          report.fixture.physical_states, schedule);
        OptimizerOptions oopts;
        oopts.seed = Rng::derive_seed(opts.seed, static_cast<std::uint64_t>(total_time));
        oopts.starts = opts.starts;
        oopts.max_evaluations = opts.max_evaluations;
        oopts.tolerance = opts.tolerance;
        oopts.initial_c = opts.initial_strengths;

        ExampleRunResult run;
        run.total_time = total_time;
        run.optimization = optimize_constraints(problem, targets, SweepBackend::exact, oopts);

        // verify the optimum with the accurate integrator
        auto tuned = problem;
        for (std::size_t i = 0; i < tuned.plaquettes.size(); ++i)
            tuned.plaquettes[i].strength = run.optimization.best_c(static_cast<long>(i));
        tuned = make_sweep_problem(tuned.layout, tuned.plaquettes, tuned.pattern_states,
                                   tuned.schedule);
        auto traj = evolve_sweep(tuned);
        run.final_populations = traj.populations;
        run.norm_drift = traj.norm_drift;

        if (opts.compute_adiabaticity && m >= 3) {
            auto trace = adiabaticity_metrics(tuned, m, opts.adiabaticity_samples,
                                              {{0, 1}, {0, 2}});
            for (std::size_t j = 0; j < trace.sample_times.size(); ++j) {
                if (std::isfinite(trace.a[0][j])) run.max_a12 = std::max(run.max_a12, trace.a[0][j]);
                if (std::isfinite(trace.a[1][j])) run.max_a13 = std::max(run.max_a13, trace.a[1][j]);
                if (std::isfinite(trace.b[0][j])) run.max_b1 = std::max(run.max_b1, trace.b[0][j]);
            }
        }
        if (run.optimization.best_cost < best_cost) {
            best_cost = run.optimization.best_cost;
            report.best_run = static_cast<int>(report.runs.size());
        }
        report.runs.push_back(std::move(run));
    }
    return report;
}

/// Overlap + adiabaticity trace CSV: t, p_1..p_M, p_bulk, E_1..E_{M+extra},
/// A_12..A_1M, B_1. The adiabaticity grid must be the interior of the
/// trajectory grid (one sample fewer); endpoint rows carry nan there.
inline void write_sweep_trace_csv(const SweepProblem& problem, const SweepTrajectory& traj,
                                  const AdiabaticityTrace& adia, const std::string& path,
                                  const std::vector<std::pair<std::string, std::string>>& meta) {
    const int m = problem.n_patterns();
    io::CsvWriter csv(path);
    for (const auto& [k, v] : meta) csv.meta(k, v);
    csv.meta("steps", traj.steps_used);
    std::vector<std::string> cols = {"t"};
    for (int n = 1; n <= m; ++n) cols.push_back("p_" + std::to_string(n));
    cols.push_back("p_bulk");
    for (std::size_t tr = 1; tr <= traj.energies.size(); ++tr)
        cols.push_back("E_" + std::to_string(tr));
    for (int n = 2; n <= m; ++n) cols.push_back("A_1" + std::to_string(n));
    cols.push_back("B_1");
    csv.header(cols);
    for (std::size_t j = 0; j < traj.sample_times.size(); ++j) {
        std::vector<std::string> row = {io::format_double(traj.sample_times[j])};
        for (int n = 0; n < m; ++n)
            row.push_back(io::format_double(traj.overlaps[static_cast<std::size_t>(n)][j]));
        row.push_back(io::format_double(traj.p_bulk[j]));
        for (const auto& track : traj.energies) row.push_back(io::format_double(track[j]));
        if (j >= 1 && j - 1 < adia.sample_times.size()) {
            for (int n = 2; n <= m; ++n)
                row.push_back(io::format_double(adia.a[static_cast<std::size_t>(n - 2)][j - 1]));
            row.push_back(io::format_double(adia.b[0][j - 1]));
        } else {
            for (int n = 2; n <= m + 1; ++n) row.push_back("nan");
        }
        csv.row_of_strings(row);
    }
}

/// Write the plot-ready bundle for a reproduced example: logical spectrum,
/// optimization summaries, and per-T overlap/adiabaticity traces.
inline void write_example_bundle(const ExampleReport& report, const std::string& out_dir,
                                 std::uint64_t seed, int trace_samples = 96) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto& fx = report.fixture;
    const int m = fx.patterns.size();

    {
        io::CsvWriter csv(out_dir + "/logical_spectrum.csv");
        csv.meta("example", static_cast<long>(report.which));
        csv.meta("seed", seed);
        csv.meta("delta_p", fx.logical_metrics.delta_p);
        csv.meta("delta_b", fx.logical_metrics.delta_b);
        if (fx.logical_metrics.delta) csv.meta("delta", *fx.logical_metrics.delta);
        csv.header({"configuration", "energy", "min_hamming"});
        auto table = restricted_spectrum(fx.hamiltonian, fx.patterns.patterns, fx.hamiltonian.n());
        for (const auto& e : table.entries)
            csv.row_of_strings({e.config.to_string(), io::format_double(e.energy),
                                std::to_string(e.min_hamming)});
    }
    io::save_hamiltonian(fx.hamiltonian, out_dir + "/hamiltonian.json");
    io::save_pattern_set(fx.patterns, out_dir + "/patterns.json");

    for (const auto& run : report.runs) {
        const std::string tag = "T" + std::to_string(static_cast<long>(run.total_time));
        {
            auto j = io::optimization_to_json(run.optimization);
            j["total_time"] = run.total_time;
            j["final_populations"] = run.final_populations;
            j["max_a12"] = run.max_a12;
            j["max_a13"] = run.max_a13;
            j["max_b1"] = run.max_b1;
            io::save_json_file(j, out_dir + "/optimize_" + tag + ".json");
        }
        SweepSchedule schedule;
        schedule.total_time = run.total_time;
        schedule.n_samples = trace_samples;
        auto tuned = make_sweep_problem(fx.layout, fx.plaquettes, fx.physical_states, schedule);
        for (std::size_t i = 0; i < tuned.plaquettes.size(); ++i)
            tuned.plaquettes[i].strength = run.optimization.best_c(static_cast<long>(i));
        tuned = make_sweep_problem(tuned.layout, tuned.plaquettes, tuned.pattern_states,
                                   tuned.schedule);
        EvolveOptions eopts;
        eopts.record = true;
        auto traj = evolve_sweep(tuned, eopts);
        // trace_samples - 1 interior points lie exactly on the trajectory grid
        auto adia = adiabaticity_metrics(tuned, m, trace_samples - 1);
        write_sweep_trace_csv(tuned, traj, adia, out_dir + "/trace_" + tag + ".csv",
                              {{"example", std::to_string(report.which)},
                               {"seed", std::to_string(seed)},
                               {"total_time", io::format_double(run.total_time)}});
    }
}

// ---- Capacity experiment -----------------------------------------------------

struct CapacityPoint {
    int n = 0;
    double capacity_mean = 0.0;
    std::vector<int> subgroup_capacity;
};

struct CapacityCurve {
    std::vector<CapacityPoint> points;
    std::vector<int> orders;
    DesignParams params;
    int realizations = 0;
    int subgroup_size = 0;
    double sp = 0.0;
};

namespace detail {

inline std::vector<SpinConfiguration> sample_patterns(Rng& rng, int n, int m) {
    std::vector<SpinConfiguration> pats;
    while (static_cast<int>(pats.size()) < m) {
        SpinConfiguration c(rng.uniform_index(std::uint64_t{1} << n), n);
        if (std::find(pats.begin(), pats.end(), c) == pats.end()) pats.push_back(c);
    }
    return pats;
}

}  // namespace detail

/// Fig.-2-style capacity estimate: for each N, push M upward and record per
/// subgroup the largest M whose success fraction reaches sp; the capacity is
/// the mean of the subgroup maxima. Fully deterministic given the master
/// seed in `params.seed` (realization seeds are derived, not drawn).
inline CapacityCurve capacity_experiment(const std::vector<int>& n_values,
                                         const std::vector<int>& orders,
                                         const DesignParams& params, int n_realizations,
                                         int subgroup_size, double sp, int max_m = 0) {
    if (subgroup_size < 1 || n_realizations % subgroup_size != 0)
        throw std::invalid_argument("capacity_experiment: subgroup size must divide realizations");
    if (!(sp > 0.0) || sp > 1.0)
        throw std::invalid_argument("capacity_experiment: sp must be in (0, 1]");

    CapacityCurve curve;
    curve.orders = orders;
    curve.params = params;
    curve.realizations = n_realizations;
    curve.subgroup_size = subgroup_size;
    curve.sp = sp;

    const int n_subgroups = n_realizations / subgroup_size;
    const int max_order = *std::max_element(orders.begin(), orders.end());

    for (int n : n_values) {
        const int scan_cap =
            max_m > 0 ? max_m
                      : static_cast<int>(std::min<std::int64_t>(
                            capacity_upper_bound(n, max_order) + 2, (std::int64_t{1} << n) - 1));
        CapacityPoint point;
        point.n = n;
        point.subgroup_capacity.assign(static_cast<std::size_t>(n_subgroups), 0);

        for (int m = 1; m <= scan_cap; ++m) {
            std::vector<char> success(static_cast<std::size_t>(n_realizations), 0);
#pragma omp parallel for schedule(dynamic)
            for (int r = 0; r < n_realizations; ++r) {
                const std::uint64_t seed = Rng::derive_seed(
                    Rng::derive_seed(Rng::derive_seed(params.seed, static_cast<std::uint64_t>(n)),
                                     static_cast<std::uint64_t>(m)),
                    static_cast<std::uint64_t>(r));
                Rng rng(seed);
                PatternSet pats(n, detail::sample_patterns(rng, n, m));
                DesignParams run_params = params;
                run_params.seed = Rng::derive_seed(seed, 1);
                run_params.audit_interval = 0;
                auto report = design_ground_states(pats, orders, run_params);
                success[static_cast<std::size_t>(r)] = report.converged ? 1 : 0;
            }
            bool any_subgroup = false;
            for (int s = 0; s < n_subgroups; ++s) {
                int hits = 0;
                for (int i = 0; i < subgroup_size; ++i)
                    hits += success[static_cast<std::size_t>(s * subgroup_size + i)];
                const double fraction = static_cast<double>(hits) / subgroup_size;
                if (fraction >= sp - 1e-12) {
                    point.subgroup_capacity[static_cast<std::size_t>(s)] = m;
                    any_subgroup = true;
                }
            }
            if (!any_subgroup) break;  // no subgroup reaches sp anymore
        }
        double mean = 0.0;
        for (int c : point.subgroup_capacity) mean += c;
        point.capacity_mean = mean / static_cast<double>(n_subgroups);
        curve.points.push_back(std::move(point));
    }
    return curve;
}

inline void write_capacity_csv(const CapacityCurve& curve, const std::string& path) {
    io::CsvWriter csv(path);
    csv.meta("seed", curve.params.seed);
    std::string orders_str;
    for (std::size_t i = 0; i < curve.orders.size(); ++i)
        orders_str += (i ? "," : "") + std::to_string(curve.orders[i]);
    csv.meta("orders", orders_str);
    csv.meta("delta_star", curve.params.delta_star);
    csv.meta("radius", static_cast<long>(curve.params.radius));
    csv.meta("r", static_cast<long>(curve.params.r));
    csv.meta("p_relearn", curve.params.p_relearn);
    csv.meta("temp_mc", curve.params.temp_mc);
    csv.meta("max_steps", curve.params.max_steps);
    csv.meta("realizations", static_cast<long>(curve.realizations));
    csv.meta("subgroup_size", static_cast<long>(curve.subgroup_size));
    csv.meta("sp", curve.sp);
    csv.header({"N", "capacity_mean", "subgroup_capacities"});
    for (const auto& p : curve.points) {
        std::string groups;
        for (std::size_t i = 0; i < p.subgroup_capacity.size(); ++i)
            groups += (i ? ";" : "") + std::to_string(p.subgroup_capacity[i]);
        csv.row_of_strings({std::to_string(p.n), io::format_double(p.capacity_mean), groups});
    }
}

}  // namespace spinprep
