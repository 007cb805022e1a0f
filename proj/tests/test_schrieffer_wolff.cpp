#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinprep/lhz.hpp"
#include "spinprep/rng.hpp"
#include "spinprep/schrieffer_wolff.hpp"
#include "spinprep/sweep.hpp"

using namespace spinprep;

namespace {

// Six-qubit synthetic problem whose two patterns are the two lowest logical
// states by construction: E(000) = -1.35, E(011) = -1.25, next -0.75.
SweepProblem synthetic_problem(double total_time = 40.0) {
    SpinGlassHamiltonian h(3, {1, 2});
    h.coupling({0}) = -0.30;
    h.coupling({1}) = -0.05;
    h.coupling({1, 2}) = -1.0;
    auto layout = build_layout(h);  // 4 logical indices with ancilla, 6 qubits
    auto plaq = find_constraints(layout);
    for (auto& p : plaq) p.strength = 3.0;
    SweepSchedule schedule;
    schedule.total_time = total_time;
    // the two pattern images differ on four physical qubits
    return make_sweep_problem_logical(
        layout, plaq, {SpinConfiguration::from_string("000"),
                       SpinConfiguration::from_string("011")},
        schedule);
}

SweepProblem example1_problem(double total_time) {
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
    auto layout = build_layout(h);
    auto plaq = reference_constraints_2d(layout);
    const double strengths[6] = {5.05, 4.48, 5.57, 3.25, 2.12, 2.74};
    for (int i = 0; i < 6; ++i) plaq[static_cast<std::size_t>(i)].strength = strengths[i];
    SweepSchedule schedule;
    schedule.total_time = total_time;
    return make_sweep_problem_logical(
        layout, plaq,
        {SpinConfiguration::from_string("0000"), SpinConfiguration::from_string("0011"),
         SpinConfiguration::from_string("0100")},
        schedule);
}

Eigen::MatrixXd static_hamiltonian(const SweepProblem& p, double delta, double eps) {
    const std::size_t dim = p.dim();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<long>(dim), static_cast<long>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        H(static_cast<long>(b), static_cast<long>(b)) = delta * p.diagonal[b];
        for (int q = 0; q < p.n_qubits(); ++q)
            H(static_cast<long>(b), static_cast<long>(b ^ (std::size_t{1} << q))) += eps;
    }
    return H;
}

}  // namespace

TEST_CASE("block decomposition") {
    auto p = synthetic_problem();
    auto part = make_block_partition(p);
    const long dim = static_cast<long>(p.dim());

    SECTION("H0 is block diagonal") {
        Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(dim, dim);
        for (long i = 0; i < dim; ++i) h0(i, i) = part.diag(i);
        auto [d, od] = decompose_blocks(h0, part);
        CHECK(od.cwiseAbs().maxCoeff() == 0.0);
        CHECK((d - h0).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("pattern distance >= 2 makes P V P vanish") {
        auto V = detail::dense_transverse_field(p.dim(), p.n_qubits());
        auto [d, od] = decompose_blocks(V, part);
        for (std::size_t a : part.low_indices)
            for (std::size_t b : part.low_indices)
                REQUIRE(d(static_cast<long>(a), static_cast<long>(b)) == 0.0);
        CHECK((d + od - V).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("idempotence: decomposing a block-diagonal part changes nothing") {
        auto V = detail::dense_transverse_field(p.dim(), p.n_qubits());
        auto [d, od] = decompose_blocks(V, part);
        auto [dd, dod] = decompose_blocks(d, part);
        CHECK(dod.cwiseAbs().maxCoeff() == 0.0);
        CHECK((dd - d).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("superoperator L") {
    SECTION("two-level toy against the hand result") {
        // one low state (E=0), one bulk state (E=Delta), X = sigma_x
        BlockPartition part;
        part.low_indices = {0};
        part.diag = Eigen::Vector2d(0.0, 2.5);
        part.is_low = {true, false};
        Eigen::MatrixXd X(2, 2);
        X << 0, 1, 1, 0;
        auto L = superop_L(X, part);
        // L = (1/(0-2.5)) |0><1| - h.c.
        CHECK(L(0, 1) == Catch::Approx(-0.4));
        CHECK(L(1, 0) == Catch::Approx(0.4));
        CHECK(L(0, 0) == 0.0);
        CHECK(L(1, 1) == 0.0);
    }
    SECTION("block-diagonal input gives zero") {
        auto p = synthetic_problem();
        auto part = make_block_partition(p);
        Eigen::MatrixXd diag = part.diag.asDiagonal();
        CHECK(superop_L(diag, part).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("defining property [S1, H0] + V_od = 0") {
        auto p = synthetic_problem();
        auto part = make_block_partition(p);
        auto V = detail::dense_transverse_field(p.dim(), p.n_qubits());
        auto [vd, vod] = decompose_blocks(V, part);
        Eigen::MatrixXd s1 = superop_L(vod, part);
        Eigen::MatrixXd h0 = part.diag.asDiagonal();
        Eigen::MatrixXd resid = s1 * h0 - h0 * s1 + vod;
        CHECK(resid.cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("anti-Hermitian and block-off-diagonal output") {
        auto p = synthetic_problem();
        auto part = make_block_partition(p);
        auto V = detail::dense_transverse_field(p.dim(), p.n_qubits());
        auto [vd, vod] = decompose_blocks(V, part);
        Eigen::MatrixXd s1 = superop_L(vod, part);
        CHECK((s1 + s1.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        auto [s1d, s1od] = decompose_blocks(s1, part);
        CHECK(s1d.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("vanishing denominator raises") {
        BlockPartition part;
        part.low_indices = {0};
        part.diag = Eigen::Vector2d(1.0, 1.0);
        part.is_low = {true, false};
        Eigen::MatrixXd X(2, 2);
        X << 0, 1, 1, 0;
        CHECK_THROWS(superop_L(X, part));
    }
}

TEST_CASE("gap validation") {
    // put a bulk state below a pattern: strengths too weak
    SpinGlassHamiltonian h(3, {2});
    h.coupling({0, 1}) = -1.0;
    h.coupling({0, 2}) = -1.0;
    h.coupling({1, 2}) = -1.0;
    auto layout = build_layout(h);
    auto plaq = find_constraints(layout);
    for (auto& p : plaq) p.strength = 0.05;
    SweepSchedule schedule;
    auto prob = make_sweep_problem_logical(layout, plaq,
                                           {SpinConfiguration::from_string("011")}, schedule);
    CHECK_THROWS(make_block_partition(prob));
}

TEST_CASE("degenerate pattern energies are rejected") {
    // 011 and 100 are exactly degenerate lowest states (E = -1.6, next -0.4);
    // the zero one-body order forces the ancilla so their images differ
    SpinGlassHamiltonian h(3, {1, 2});
    h.coupling({1, 2}) = -1.0;
    h.coupling({0, 1}) = 0.3;
    h.coupling({0, 2}) = 0.3;
    auto layout = build_layout(h);
    auto plaq = find_constraints(layout);
    for (auto& p : plaq) p.strength = 2.0;
    SweepSchedule schedule;
    auto prob = make_sweep_problem_logical(
        layout, plaq,
        {SpinConfiguration::from_string("011"), SpinConfiguration::from_string("100")},
        schedule);
    auto part = make_block_partition(prob);
    CHECK_THROWS(effective_terms(prob, part, 2));
}

TEST_CASE("single-pattern second order matches the perturbation sum") {
    auto layoutp = synthetic_problem();
    SweepProblem p = make_sweep_problem(layoutp.layout, layoutp.plaquettes,
                                        {layoutp.pattern_states[0]}, layoutp.schedule);
    auto part = make_block_partition(p);
    auto model = effective_terms(p, part, 2);
    REQUIRE(model.corrections.size() == 1);
    const std::size_t z = p.pattern_indices[0];
    double expected = 0.0;
    for (int q = 0; q < p.n_qubits(); ++q) {
        const std::size_t flipped = z ^ (std::size_t{1} << q);
        expected -= 1.0 / (p.diagonal[flipped] - p.diagonal[z]);
    }
    CHECK(model.corrections[0](0, 0) == Catch::Approx(expected).margin(1e-10));
}

TEST_CASE("effective terms are Hermitian") {
    auto p = synthetic_problem();
    auto part = make_block_partition(p);
    auto model = effective_terms(p, part, 4);
    REQUIRE(model.corrections.size() == 3);
    for (const auto& c : model.corrections)
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((model.v_projected - model.v_projected.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("order scaling of the effective eigenvalues") {
    // patterns 000 and 001 sit at physical distance 3 (odd), so no
    // correction order vanishes by parity and the truncation error scales
    // exactly as eps^(n+1). Spectrum: E(000) = -1.40, E(001) = -1.20,
    // next state at -0.90.
    SpinGlassHamiltonian h(3, {1, 2});
    h.coupling({0}) = -0.30;
    h.coupling({2}) = -0.15;
    h.coupling({0, 1}) = -1.0;
    h.coupling({1, 2}) = 0.05;
    auto layout = build_layout(h);
    auto plaq = find_constraints(layout);
    for (auto& pl : plaq) pl.strength = 2.5;
    SweepSchedule schedule;
    schedule.total_time = 50.0;
    auto p = make_sweep_problem_logical(
        layout, plaq,
        {SpinConfiguration::from_string("000"), SpinConfiguration::from_string("001")},
        schedule);
    auto part = make_block_partition(p);
    const int M = p.n_patterns();

    // Eigenvalue errors of nondegenerate patterns feel only the diagonal
    // corrections, and diagonal terms of odd order vanish for a transverse-
    // field perturbation (flip paths must close). The O(eps^{n+1}) bound is
    // therefore approached from above: measured slopes are n+1 or better.
    std::vector<double> epsilons = {0.16, 0.08, 0.04, 0.02};
    std::vector<std::vector<double>> errs_by_order;
    for (int order : {2, 3, 4}) {
        auto model = effective_terms(p, part, order);
        std::vector<double> errs;
        for (double eps : epsilons) {
            const double delta = 1.0 - eps;
            Eigen::MatrixXd h_eff = model.at(delta, eps);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h_eff);
            auto exact = eigensystem(static_hamiltonian(p, delta, eps), M);
            double err = 0.0;
            for (int n = 0; n < M; ++n)
                err = std::max(err, std::abs(small.eigenvalues()(n) - exact.values(n)));
            errs.push_back(err);
        }
        // least-squares slope of log err vs log eps
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n_pts = static_cast<double>(errs.size());
        for (std::size_t i = 0; i < errs.size(); ++i) {
            const double x = std::log(epsilons[i]);
            const double y = std::log(errs[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
        INFO("order " << order << " slope " << slope);
        CHECK(slope > order + 1 - 0.3);
        errs_by_order.push_back(errs);
    }
    // higher order is never worse at the smallest eps probed
    CHECK(errs_by_order[2].back() <= errs_by_order[0].back() * (1.0 + 1e-9));
    CHECK(errs_by_order[2].back() < 1e-3 * errs_by_order[0].front());
}

TEST_CASE("generator chain block-diagonalizes order by order") {
    // At the operator level the off-diagonal block norm after rotating with
    // S = eps S1 + eps^2 S2 + eps^3 S3 scales two-sidedly as eps^{n+1}; this
    // is exactly where the (1/3) L([S1,[S1,Vod]]) piece of S3 matters.
    auto p = synthetic_problem();
    auto part = make_block_partition(p);
    auto V = detail::dense_transverse_field(p.dim(), p.n_qubits());
    auto [vd, vod] = decompose_blocks(V, part);
    Eigen::MatrixXd h0 = part.diag.asDiagonal();

    const Eigen::MatrixXd s1 = superop_L(vod, part);
    const Eigen::MatrixXd s2 = -superop_L(detail::commutator(vd, s1), part);
    const Eigen::MatrixXd inner = detail::commutator(s1, detail::commutator(s1, vod));
    const Eigen::MatrixXd s3 =
        -superop_L(detail::commutator(vd, s2), part) + (1.0 / 3.0) * superop_L(inner, part);

    auto offdiag_norm = [&](double eps, int upto) {
        Eigen::MatrixXd S = eps * s1;
        if (upto >= 2) S += (eps * eps) * s2;
        if (upto >= 3) S += (eps * eps * eps) * s3;
        Eigen::MatrixXd rot = S.exp();
        Eigen::MatrixXd transformed = rot * (h0 + eps * V) * rot.transpose();
        auto [d, od] = decompose_blocks(transformed, part);
        return od.norm();
    };
    for (int upto : {1, 2, 3}) {
        const double e1 = offdiag_norm(0.04, upto);
        const double e2 = offdiag_norm(0.02, upto);
        const double slope = std::log(e1 / e2) / std::log(2.0);
        INFO("generators up to S" << upto << " slope " << slope);
        CHECK(slope > upto + 1 - 0.25);
        CHECK(slope < upto + 1 + 0.25);
    }
}

TEST_CASE("patterns far apart leave the effective model diagonal") {
    // two low states at Hamming distance 5 > order: each V factor flips one
    // qubit, so all off-diagonal corrections up to order 4 vanish. The
    // partition is synthetic so that the distance can be dialed in freely.
    auto base = synthetic_problem();
    BlockPartition part;
    part.low_indices = {0, 0b111110};
    part.diag.resize(64);
    Rng rng(3);
    for (long b = 0; b < 64; ++b) part.diag(b) = 5.0 + 0.01 * static_cast<double>(b);
    part.diag(0) = 0.0;
    part.diag(0b111110) = 0.5;
    part.is_low.assign(64, false);
    part.is_low[0] = part.is_low[0b111110] = true;

    auto model = effective_terms(base, part, 4);
    CHECK(model.v_projected.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& c : model.corrections) {
        CHECK(std::abs(c(0, 1)) < 1e-14);
        CHECK(std::abs(c(1, 0)) < 1e-14);
    }
}

TEST_CASE("first-order generator block-diagonalizes to second order") {
    auto p = synthetic_problem();
    auto part = make_block_partition(p);
    auto V = detail::dense_transverse_field(p.dim(), p.n_qubits());
    auto [vd, vod] = decompose_blocks(V, part);
    Eigen::MatrixXd s1 = superop_L(vod, part);
    Eigen::MatrixXd h0 = part.diag.asDiagonal();

    auto offdiag_norm = [&](double eps) {
        Eigen::MatrixXd h = h0 + eps * V;
        Eigen::MatrixXd rot = (eps * s1).exp();
        Eigen::MatrixXd transformed = rot * h * rot.transpose();
        auto [d, od] = decompose_blocks(transformed, part);
        return od.norm();
    };
    const double e1 = offdiag_norm(0.02);
    const double e2 = offdiag_norm(0.01);
    const double slope = std::log(e1 / e2) / std::log(2.0);
    CHECK(slope > 1.7);
    CHECK(slope < 2.3);
}

TEST_CASE("effective evolution") {
    SECTION("single pattern keeps unit modulus") {
        auto base = synthetic_problem();
        SweepProblem p = make_sweep_problem(base.layout, base.plaquettes,
                                            {base.pattern_states[0]}, base.schedule);
        auto part = make_block_partition(p);
        auto model = effective_terms(p, part, 4);
        for (auto mode : {EffectiveMode::hybrid, EffectiveMode::effective_only}) {
            auto out = effective_evolve(model, p.schedule, mode);
            CHECK(std::abs(out.amplitudes(0)) == Catch::Approx(1.0).margin(1e-9));
        }
    }
    SECTION("order-0 truncation with distant patterns freezes populations") {
        auto base = synthetic_problem();
        auto part = make_block_partition(base);
        auto model = effective_terms(base, part, 0);  // delta PH0P + eps PVP only
        REQUIRE(model.corrections.empty());
        REQUIRE(model.v_projected.cwiseAbs().maxCoeff() == 0.0);
        auto hybrid = effective_evolve(model, base.schedule, EffectiveMode::hybrid);
        // populations at t0 from the exact half-sweep stay frozen: compare
        // against the projection of the exact state at t0
        Eigen::VectorXcd psi = transverse_ground_state(base);
        const double T = base.schedule.total_time;
        detail::rk4_evolve(
            base, [T](double t) { return sweep_delta(t, T); },
            [T](double t) { return sweep_epsilon(t, T); }, 0.0, T / 2.0,
            default_sweep_steps(base, T) / 2, 0.0, 0.0, psi, detail::NullSample{});
        Eigen::Vector2cd proj;
        for (int n = 0; n < 2; ++n)
            proj(n) = psi(static_cast<long>(base.pattern_indices[static_cast<std::size_t>(n)]));
        proj.normalize();
        for (int n = 0; n < 2; ++n)
            CHECK(hybrid.populations[static_cast<std::size_t>(n)] ==
                  Catch::Approx(std::norm(proj(n))).margin(1e-6));
    }
    SECTION("gauge consistency: sign flips of the pattern basis do nothing") {
        auto p = synthetic_problem();
        auto part = make_block_partition(p);
        auto model = effective_terms(p, part, 3);
        auto flipped = model;
        // conjugate by diag(1, -1)
        flipped.v_projected(0, 1) *= -1;
        flipped.v_projected(1, 0) *= -1;
        for (auto& c : flipped.corrections) {
            c(0, 1) *= -1;
            c(1, 0) *= -1;
        }
        auto a = effective_evolve(model, p.schedule, EffectiveMode::effective_only);
        auto b = effective_evolve(flipped, p.schedule, EffectiveMode::effective_only);
        for (int n = 0; n < 2; ++n)
            CHECK(a.populations[static_cast<std::size_t>(n)] ==
                  Catch::Approx(b.populations[static_cast<std::size_t>(n)]).margin(1e-12));
    }
    SECTION("hybrid order-4 tracks the exact populations on the worked example") {
        auto p = example1_problem(50.0);
        auto part = make_block_partition(p);
        auto model = effective_terms(p, part, 4);
        auto eff = effective_evolve(model, p.schedule, EffectiveMode::hybrid);
        auto exact = evolve_sweep(p);
        for (int n = 0; n < 3; ++n)
            CHECK(std::abs(eff.populations[static_cast<std::size_t>(n)] -
                           exact.populations[static_cast<std::size_t>(n)]) < 0.1);
    }
    SECTION("rejects bad crossover ratios") {
        auto p = synthetic_problem();
        auto part = make_block_partition(p);
        auto model = effective_terms(p, part, 2);
        CHECK_THROWS(effective_evolve(model, p.schedule, EffectiveMode::hybrid, 0.0));
    }
}
