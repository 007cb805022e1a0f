// Command-line front end: ground-state design, parity mapping, sweep
// simulation, effective-theory evolution, constraint optimization, and the
// batch experiments. All outputs are deterministic given the seeds.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "spinprep/designer.hpp"
#include "spinprep/experiments.hpp"
#include "spinprep/io.hpp"
#include "spinprep/lhz.hpp"
#include "spinprep/optimizer.hpp"
#include "spinprep/schrieffer_wolff.hpp"
#include "spinprep/sweep.hpp"

using namespace spinprep;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stoi(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

/// Build the sweep problem shared by the sweep/swe/optimize subcommands:
/// layout file (fields + plaquettes), pattern file (logical), optional
/// constraints file overriding the plaquettes.
SweepProblem problem_from_files(const std::string& layout_path, const std::string& patterns_path,
                                const std::string& constraints_path, double total_time,
                                long steps, int samples) {
    auto [layout, plaquettes] = io::load_layout(layout_path);
    if (!constraints_path.empty()) {
        auto j = io::load_json_file(constraints_path);
        plaquettes.clear();
        for (const auto& pj : j.at("plaquettes")) {
            Plaquette p;
            p.members = pj.at("members").get<std::vector<int>>();
            p.strength = pj.at("strength").get<double>();
            plaquettes.push_back(std::move(p));
        }
    }
    auto patterns = io::load_pattern_set(patterns_path);
    SweepSchedule schedule;
    schedule.total_time = total_time;
    schedule.n_steps = steps;
    schedule.n_samples = samples;
    return make_sweep_problem_logical(layout, plaquettes, patterns.patterns, schedule);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-glass ground-state design and programmable superposition toolkit"};
    app.require_subcommand(1);

    // ---- design ----
    auto* design = app.add_subcommand("design", "Monte Carlo ground-state design");
    std::string d_patterns, d_orders = "1,2", d_out, d_trace;
    DesignParams d_params;
    design->add_option("--patterns", d_patterns, "pattern-set JSON file")->required();
    design->add_option("--orders", d_orders, "interaction orders, e.g. 1,2,3");
    design->add_option("--delta-star", d_params.delta_star, "target band ratio");
    design->add_option("--radius", d_params.radius, "Hamming-ball radius");
    design->add_option("--r", d_params.r, "bulk configurations unlearned per step");
    design->add_option("--p-relearn", d_params.p_relearn, "relearn probability");
    design->add_option("--phi-max", d_params.phi_max, "relearn strength bound");
    design->add_option("--eta-max", d_params.eta_max, "unlearn strength bound");
    design->add_option("--temp", d_params.temp_mc, "Metropolis temperature");
    design->add_option("--seed", d_params.seed, "PRNG seed");
    design->add_option("--max-steps", d_params.max_steps, "iteration cap");
    design->add_option("--audit-every", d_params.audit_interval,
                       "recompute energies every k steps (0 = off)");
    design->add_option("--out", d_out, "output Hamiltonian JSON")->required();
    design->add_option("--trace", d_trace, "trace CSV");
    design->callback([&] {
        auto patterns = io::load_pattern_set(d_patterns);
        auto report = design_ground_states(patterns, parse_int_list(d_orders), d_params);
        io::save_hamiltonian(report.hamiltonian, d_out);
        if (!d_trace.empty()) io::write_design_trace(report, d_params, d_trace);
        std::printf("converged=%s steps=%ld delta_p=%.6g delta_b=%.6g delta=%s\n",
                    report.converged ? "true" : "false", report.steps,
                    report.final_metrics.delta_p, report.final_metrics.delta_b,
                    report.final_metrics.delta
                        ? io::format_double(*report.final_metrics.delta).c_str()
                        : "undefined");
        if (!report.converged) std::exit(2);
    });

    // ---- map-lhz ----
    auto* maplhz = app.add_subcommand("map-lhz", "map a Hamiltonian onto the parity layout");
    std::string m_hamiltonian, m_out, m_fixture;
    maplhz->add_option("--hamiltonian", m_hamiltonian, "Hamiltonian JSON")->required();
    maplhz->add_option("--out", m_out, "output layout JSON")->required();
    maplhz->add_option("--fixture", m_fixture, "published constraint set: eq17 or eq18")
        ->check(CLI::IsMember({"eq17", "eq18"}));
    maplhz->callback([&] {
        auto h = io::load_hamiltonian(m_hamiltonian);
        auto layout = build_layout(h);
        std::vector<Plaquette> plaquettes;
        if (m_fixture == "eq17")
            plaquettes = reference_constraints_2d(layout);
        else if (m_fixture == "eq18")
            plaquettes = reference_constraints_3d(layout);
        else
            plaquettes = find_constraints(layout);
        auto v = validate_constraints(layout, plaquettes);
        if (!v.ok()) {
            std::fprintf(stderr, "constraint validation failed (expected %d plaquettes)\n",
                         v.expected_count);
            std::exit(2);
        }
        io::save_layout(layout, plaquettes, m_out);
        std::printf("qubits=%d plaquettes=%zu ancilla=%s\n", layout.n_physical(),
                    plaquettes.size(), layout.has_ancilla ? "yes" : "no");
    });

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "simulate the transverse-field sweep");
    std::string s_layout, s_patterns, s_constraints, s_out;
    double s_time = 100.0;
    long s_steps = 0;
    int s_samples = 200;
    sweep->add_option("--layout", s_layout, "layout JSON")->required();
    sweep->add_option("--patterns", s_patterns, "logical pattern-set JSON")->required();
    sweep->add_option("--constraints", s_constraints, "plaquette JSON overriding the layout");
    sweep->add_option("--T", s_time, "total sweep time");
    sweep->add_option("--steps", s_steps, "integrator steps (0 = automatic)");
    sweep->add_option("--samples", s_samples, "trace samples");
    sweep->add_option("--out-traces", s_out, "trace CSV")->required();
    sweep->callback([&] {
        auto problem =
            problem_from_files(s_layout, s_patterns, s_constraints, s_time, s_steps, s_samples);
        EvolveOptions opts;
        opts.record = true;
        auto traj = evolve_sweep(problem, opts);
        auto adia = adiabaticity_metrics(problem, problem.n_patterns(), s_samples - 1);
        write_sweep_trace_csv(problem, traj, adia, s_out,
                              {{"total_time", io::format_double(s_time)}});
        std::printf("norm_drift=%.3e populations=", traj.norm_drift);
        for (double p : traj.populations) std::printf("%.6f ", p);
        std::printf("\n");
    });

    // ---- swe (effective theory) ----
    auto* swe = app.add_subcommand("swe", "effective low-energy theory of the sweep");
    std::string w_layout, w_patterns, w_constraints, w_out, w_mode = "hybrid";
    int w_order = 4;
    double w_ratio = 1.0, w_time = 100.0;
    swe->add_option("--layout", w_layout, "layout JSON")->required();
    swe->add_option("--patterns", w_patterns, "logical pattern-set JSON")->required();
    swe->add_option("--constraints", w_constraints, "plaquette JSON overriding the layout");
    swe->add_option("--order", w_order, "max expansion order (<= 4)");
    swe->add_option("--t0-ratio", w_ratio, "epsilon/delta at the crossover");
    swe->add_option("--T", w_time, "total sweep time");
    swe->add_option("--mode", w_mode, "hybrid or effective_only")
        ->check(CLI::IsMember({"hybrid", "effective_only"}));
    swe->add_option("--out", w_out, "output JSON")->required();
    swe->callback([&] {
        auto problem = problem_from_files(w_layout, w_patterns, w_constraints, w_time, 0, 2);
        auto part = make_block_partition(problem);
        auto model = effective_terms(problem, part, w_order);
        auto evo = effective_evolve(
            model, problem.schedule,
            w_mode == "hybrid" ? EffectiveMode::hybrid : EffectiveMode::effective_only, w_ratio);
        nlohmann::json out;
        out["order"] = model.order;
        out["t0"] = evo.crossover_time;
        out["projected_norm"] = evo.projected_norm;
        out["pattern_energies"] = std::vector<double>(
            model.pattern_energies.data(),
            model.pattern_energies.data() + model.pattern_energies.size());
        auto matrix_to_json = [](const Eigen::MatrixXd& m) {
            nlohmann::json rows = nlohmann::json::array();
            for (long r = 0; r < m.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
                rows.push_back(row);
            }
            return rows;
        };
        out["v_projected"] = matrix_to_json(model.v_projected);
        for (std::size_t i = 0; i < model.corrections.size(); ++i)
            out["h_eff_" + std::to_string(i + 2)] = matrix_to_json(model.corrections[i]);
        nlohmann::json amps = nlohmann::json::array();
        for (long n = 0; n < evo.amplitudes.size(); ++n) {
            nlohmann::json a;
            a["re"] = evo.amplitudes(n).real();
            a["im"] = evo.amplitudes(n).imag();
            amps.push_back(a);
        }
        out["amplitudes"] = amps;
        out["populations"] = evo.populations;
        io::save_json_file(out, w_out);
        std::printf("t0=%.4f populations=", evo.crossover_time);
        for (double p : evo.populations) std::printf("%.6f ", p);
        std::printf("\n");
    });

    // ---- optimize ----
    auto* optimize = app.add_subcommand("optimize", "tune constraint strengths to targets");
    std::string o_layout, o_patterns, o_constraints, o_targets, o_backend = "exact", o_out;
    double o_time = 100.0, o_tol = 1e-4;
    long o_steps = 0, o_maxeval = 400;
    int o_starts = 5;
    std::uint64_t o_seed = 1;
    optimize->add_option("--layout", o_layout, "layout JSON")->required();
    optimize->add_option("--patterns", o_patterns, "logical pattern-set JSON")->required();
    optimize->add_option("--constraints", o_constraints, "plaquette JSON overriding the layout");
    optimize->add_option("--targets", o_targets, "target probabilities, e.g. 0.33,0.33,0.34")
        ->required();
    optimize->add_option("--backend", o_backend, "exact or effective")
        ->check(CLI::IsMember({"exact", "effective"}));
    optimize->add_option("--T", o_time, "total sweep time");
    optimize->add_option("--seed", o_seed, "PRNG seed");
    optimize->add_option("--steps", o_steps, "integrator steps per evaluation (0 = automatic)");
    optimize->add_option("--starts", o_starts, "multi-start count");
    optimize->add_option("--tol", o_tol, "cost tolerance");
    optimize->add_option("--max-evals", o_maxeval, "evaluation cap per start");
    optimize->add_option("--out", o_out, "output JSON")->required();
    optimize->callback([&] {
        auto problem = problem_from_files(o_layout, o_patterns, o_constraints, o_time, 0, 2);
        TargetDistribution targets{parse_double_list(o_targets)};
        OptimizerOptions opts;
        opts.seed = o_seed;
        opts.starts = o_starts;
        opts.tolerance = o_tol;
        opts.max_evaluations = o_maxeval;
        opts.eval_steps = o_steps;
        auto result = optimize_constraints(
            problem, targets,
            o_backend == "exact" ? SweepBackend::exact : SweepBackend::effective, opts);
        auto j = io::optimization_to_json(result);
        j["total_time"] = o_time;
        j["seed"] = o_seed;
        io::save_json_file(j, o_out);
        std::printf("converged=%s cost=%.6e evaluations=%ld C=",
                    result.converged ? "true" : "false", result.best_cost, result.evaluations);
        for (long i = 0; i < result.best_c.size(); ++i)
            std::printf("%.4f ", result.best_c(i));
        std::printf("\n");
        if (!result.converged) std::exit(2);
    });

    // ---- capacity ----
    auto* capacity = app.add_subcommand("capacity", "storage-capacity experiment");
    std::string c_orders = "1,2", c_out;
    int c_nmin = 6, c_nmax = 12, c_real = 100, c_subgroup = 20, c_maxm = 0;
    double c_sp = 0.99;
    DesignParams c_params;
    c_params.delta_star = 0.1;
    c_params.radius = 4;
    c_params.max_steps = 20000;
    capacity->add_option("--orders", c_orders, "interaction orders");
    capacity->add_option("--n-min", c_nmin, "smallest N");
    capacity->add_option("--n-max", c_nmax, "largest N (step 2)");
    capacity->add_option("--realizations", c_real, "realizations per (N, M)");
    capacity->add_option("--subgroup", c_subgroup, "subgroup size");
    capacity->add_option("--sp", c_sp, "success probability threshold");
    capacity->add_option("--delta-star", c_params.delta_star, "target band ratio");
    capacity->add_option("--radius", c_params.radius, "Hamming-ball radius");
    capacity->add_option("--r", c_params.r, "bulk configurations unlearned per step");
    capacity->add_option("--p-relearn", c_params.p_relearn, "relearn probability");
    capacity->add_option("--phi-max", c_params.phi_max, "relearn strength bound");
    capacity->add_option("--eta-max", c_params.eta_max, "unlearn strength bound");
    capacity->add_option("--temp", c_params.temp_mc, "Metropolis temperature");
    capacity->add_option("--max-steps", c_params.max_steps, "iteration cap per run");
    capacity->add_option("--m-max", c_maxm, "cap on the M scan (0 = bound-based)");
    capacity->add_option("--seed", c_params.seed, "master seed");
    capacity->add_option("--out", c_out, "output CSV")->required();
    capacity->callback([&] {
        std::vector<int> ns;
        for (int n = c_nmin; n <= c_nmax; n += 2) ns.push_back(n);
        auto curve = capacity_experiment(ns, parse_int_list(c_orders), c_params, c_real,
                                         c_subgroup, c_sp, c_maxm);
        write_capacity_csv(curve, c_out);
        for (const auto& p : curve.points)
            std::printf("N=%d capacity=%.2f\n", p.n, p.capacity_mean);
    });

    // ---- example ----
    auto* example = app.add_subcommand("example", "reproduce a worked example end to end");
    int e_which = 1;
    std::string e_times = "50,100,200", e_outdir = "example_out";
    std::uint64_t e_seed = 1;
    example->add_option("--which", e_which, "1 (2D) or 2 (3D)")->check(CLI::Range(1, 2));
    example->add_option("--T", e_times, "sweep-time grid, e.g. 50,100,200");
    example->add_option("--out-dir", e_outdir, "output directory");
    example->add_option("--seed", e_seed, "PRNG seed");
    example->callback([&] {
        ExampleOptions opts;
        opts.seed = e_seed;
        auto report = reproduce_example(e_which, parse_double_list(e_times), opts);
        write_example_bundle(report, e_outdir, e_seed);
        for (const auto& run : report.runs) {
            std::printf("T=%.0f cost=%.3e populations=", run.total_time,
                        run.optimization.best_cost);
            for (double p : run.final_populations) std::printf("%.4f ", p);
            std::printf("max_A12=%.3f max_A13=%.3f max_B1=%.3f\n", run.max_a12, run.max_a13,
                        run.max_b1);
        }
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
