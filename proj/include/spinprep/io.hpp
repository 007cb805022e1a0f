#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinprep/designer.hpp"
#include "spinprep/hopfield.hpp"
#include "spinprep/lhz.hpp"
#include "spinprep/optimizer.hpp"
#include "spinprep/spin_model.hpp"

namespace spinprep {

inline constexpr const char* kVersion = "0.1.0";

namespace io {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

/// Fixed shortest-round-trip-independent formatting so that identical values
/// always serialize to identical CSV bytes.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- Hamiltonian files -----------------------------------------------------

inline json hamiltonian_to_json(const SpinGlassHamiltonian& h) {
    json terms = json::array();
    h.for_each_term([&](int k, const int* idx, double j) {
        if (j == 0.0) return;
        json t;
        t["indices"] = std::vector<int>(idx, idx + k);
        t["J"] = j;
        terms.push_back(t);
    });
    json out;
    out["N"] = h.n();
    out["K"] = h.orders();
    out["sign_convention"] = to_string(SignConvention::eq6_plus);
    out["terms"] = terms;
    return out;
}

inline SpinGlassHamiltonian hamiltonian_from_json(const json& j) {
    const int n = j.at("N").get<int>();
    const auto orders = j.at("K").get<std::vector<int>>();
    const auto convention = sign_convention_from_string(j.at("sign_convention").get<std::string>());
    const double sign = convention == SignConvention::paper_example_minus ? -1.0 : 1.0;
    SpinGlassHamiltonian h(n, orders);
    for (const auto& t : j.at("terms")) {
        const auto idx = t.at("indices").get<std::vector<int>>();
        for (std::size_t i = 1; i < idx.size(); ++i)
            if (idx[i - 1] >= idx[i])
                throw std::runtime_error("hamiltonian term indices must be strictly increasing");
        h.coupling(idx) = sign * t.at("J").get<double>();
    }
    return h;
}

inline SpinGlassHamiltonian load_hamiltonian(const std::string& path) {
    return hamiltonian_from_json(load_json_file(path));
}

inline void save_hamiltonian(const SpinGlassHamiltonian& h, const std::string& path) {
    save_json_file(hamiltonian_to_json(h), path);
}

// ---- Pattern-set files -----------------------------------------------------

inline json pattern_set_to_json(const PatternSet& p) {
    json out;
    out["N"] = p.n;
    json arr = json::array();
    for (const auto& x : p.patterns) arr.push_back(x.to_string());
    out["patterns"] = arr;
    return out;
}

inline PatternSet pattern_set_from_json(const json& j) {
    const int n = j.at("N").get<int>();
    std::vector<SpinConfiguration> patterns;
    for (const auto& s : j.at("patterns"))
        patterns.push_back(SpinConfiguration::from_string(s.get<std::string>()));
    return PatternSet(n, patterns);
}

inline PatternSet load_pattern_set(const std::string& path) {
    return pattern_set_from_json(load_json_file(path));
}

inline void save_pattern_set(const PatternSet& p, const std::string& path) {
    save_json_file(pattern_set_to_json(p), path);
}

// ---- Layout files ----------------------------------------------------------

inline json layout_to_json(const LhzLayout& layout, const std::vector<Plaquette>& plaquettes) {
    json out;
    out["logical_n"] = layout.logical_n;
    out["order_k"] = layout.order_k;
    out["has_ancilla"] = layout.has_ancilla;
    out["qubits"] = layout.qubits;
    out["fields"] = layout.fields;
    json plist = json::array();
    for (const auto& p : plaquettes) {
        json pj;
        pj["members"] = p.members;
        pj["strength"] = p.strength;
        plist.push_back(pj);
    }
    out["plaquettes"] = plist;
    return out;
}

inline std::pair<LhzLayout, std::vector<Plaquette>> layout_from_json(const json& j) {
    LhzLayout layout;
    layout.logical_n = j.at("logical_n").get<int>();
    layout.order_k = j.at("order_k").get<int>();
    layout.has_ancilla = j.at("has_ancilla").get<bool>();
    layout.qubits = j.at("qubits").get<std::vector<std::vector<int>>>();
    layout.fields = j.at("fields").get<std::vector<double>>();
    if (layout.fields.size() != layout.qubits.size())
        throw std::runtime_error("layout: one field per qubit required");
    std::vector<Plaquette> plaquettes;
    for (const auto& pj : j.at("plaquettes")) {
        Plaquette p;
        p.members = pj.at("members").get<std::vector<int>>();
        p.strength = pj.at("strength").get<double>();
        plaquettes.push_back(std::move(p));
    }
    return {std::move(layout), std::move(plaquettes)};
}

inline std::pair<LhzLayout, std::vector<Plaquette>> load_layout(const std::string& path) {
    return layout_from_json(load_json_file(path));
}

inline void save_layout(const LhzLayout& layout, const std::vector<Plaquette>& plaquettes,
                        const std::string& path) {
    save_json_file(layout_to_json(layout, plaquettes), path);
}

// ---- CSV with metadata header ----------------------------------------------

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path);
        out_ << "# version=" << kVersion << "\n";
    }

    void meta(const std::string& key, const std::string& value) {
        out_ << "# " << key << "=" << value << "\n";
    }
    void meta(const std::string& key, double value) { meta(key, format_double(value)); }
    void meta(const std::string& key, long value) { meta(key, std::to_string(value)); }
    void meta(const std::string& key, std::uint64_t value) { meta(key, std::to_string(value)); }

    void header(const std::vector<std::string>& columns) { row_of_strings(columns); }

    void row_of_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

    std::ofstream& stream() { return out_; }

  private:
    std::ofstream out_;
};

inline void write_design_trace(const DesignReport& report, const DesignParams& params,
                               const std::string& path) {
    CsvWriter csv(path);
    csv.meta("seed", params.seed);
    csv.meta("delta_star", params.delta_star);
    csv.meta("radius", static_cast<long>(params.radius));
    csv.meta("r", static_cast<long>(params.r));
    csv.meta("p_relearn", params.p_relearn);
    csv.meta("phi_max", params.phi_max);
    csv.meta("eta_max", params.eta_max);
    csv.meta("temp_mc", params.temp_mc);
    csv.meta("max_steps", params.max_steps);
    csv.meta("converged", std::string(report.converged ? "true" : "false"));
    csv.meta("steps", report.steps);
    csv.header({"step", "kind", "accepted", "delta_p", "delta_b", "delta"});
    long step = 1;
    for (const auto& t : report.trace) {
        csv.row_of_strings({std::to_string(step++), to_string(t.kind),
                            t.accepted ? "1" : "0", format_double(t.delta_p),
                            format_double(t.delta_b),
                            t.delta ? format_double(*t.delta) : "nan"});
    }
}

inline json optimization_to_json(const OptimizationResult& result) {
    json out;
    out["backend"] = to_string(result.backend);
    out["converged"] = result.converged;
    out["best_cost"] = result.best_cost;
    out["evaluations"] = result.evaluations;
    out["best_c"] = std::vector<double>(result.best_c.data(),
                                        result.best_c.data() + result.best_c.size());
    out["best_populations"] = result.best_populations;
    json hist = json::array();
    for (const auto& [c, omega] : result.history) {
        json h;
        h["C"] = std::vector<double>(c.data(), c.data() + c.size());
        h["cost"] = omega;
        hist.push_back(h);
    }
    out["history"] = hist;
    return out;
}

}  // namespace io
}  // namespace spinprep
