#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace petzlab;
using petzlab::testing::driven_damped_qubit;
using petzlab::testing::ket0_density;

namespace {

/// Short driven-damped-qubit run used to keep the unit suite fast; the full tau = 10
/// sweeps live in the acceptance suite.
struct ShortModel {
    Lindbladian forward = driven_damped_qubit();
    Mat gamma0 = ket0_density();
    double tau = 2.0;
};

}  // namespace

TEST_CASE("build_interaction") {
    AncillaAssembly asm_;
    asm_.system_dim = 2;
    asm_.n_ancillas = 1;

    SECTION("zero jump gives the zero interaction") {
        REQUIRE(max_abs(build_interaction(Mat(Mat::Zero(2, 2)), 0, asm_)) == 0.0);
    }
    SECTION("sigma_- jump gives the exchange coupling") {
        const Mat expected =
            0.5 * (tensor(sigma_plus(), sigma_minus()) + tensor(sigma_minus(), sigma_plus()));
        REQUIRE(max_abs(build_interaction(sigma_minus(), 0, asm_) - expected) < 1e-15);
    }
    SECTION("always Hermitian") {
        Rng rng(61);
        for (int trial = 0; trial < 10; ++trial) {
            const Mat h = build_interaction(random_ginibre(2, 2, rng), 0, asm_);
            REQUIRE(max_abs(h - h.adjoint()) < 1e-12);
        }
    }
    SECTION("ancilla index out of range is rejected") {
        REQUIRE_THROWS_AS(build_interaction(sigma_minus(), 1, asm_), std::invalid_argument);
    }
}

TEST_CASE("zero engineered couplings leave the ancilla exactly in the ground state") {
    ShortModel m;
    const Trajectory fwd = propagate(m.forward, m.gamma0, 0.0, m.tau, 1000);
    ReverseGenerator rev = build_reverse_generator(fwd, m.forward.hamiltonian, m.forward.jumps);
    // zero out the engineered jump: dynamics reduce to the H_B rotation
    for (auto& j : rev.jumps_b)
        j = j.map([](const Mat& l) { return Mat(Mat::Zero(l.rows(), l.cols())); });

    AncillaAssembly asm_;
    asm_.gamma = 50.0;
    const Lindbladian hw = build_hardware_lindbladian(rev, asm_);
    const Mat anc0 = projector(basis_ket(0, 2));
    const Trajectory run = propagate(hw, tensor(fwd.back(), anc0), 0.0, m.tau, 1000);
    const Mat anc = partial_trace(run.back(), {2, 2}, {1});
    REQUIRE(std::abs(anc(0, 0).real() - 1.0) < 1e-10);
    REQUIRE(run.max_trace_defect < 1e-7);

    // and the system follows the pure H_B rotation
    Lindbladian hb_only{2, rev.h_b, {}};
    const Trajectory ideal = propagate(hb_only, fwd.back(), 0.0, m.tau, 1000);
    REQUIRE(trace_distance(partial_trace(run.back(), {2, 2}, {0}), ideal.back()) < 1e-6);
}

TEST_CASE("hardware reversal approaches the ideal backward dynamics as Gamma grows") {
    ShortModel m;
    std::vector<double> fidelities;
    for (double gamma : {25.0, 100.0, 400.0}) {
        const int steps = std::max(2000, static_cast<int>(std::ceil(m.tau * gamma / 0.1)));
        const Trajectory fwd = propagate(m.forward, m.gamma0, 0.0, m.tau, steps);
        const ReverseGenerator rev =
            build_reverse_generator(fwd, m.forward.hamiltonian, m.forward.jumps);
        AncillaAssembly asm_;
        asm_.gamma = gamma;
        const HardwareRunResult run = hardware_run(fwd, rev, asm_, nullptr, 50);
        fidelities.push_back(run.fidelity_at_t0);
        REQUIRE(run.max_trace_defect < 1e-7);
    }
    REQUIRE(fidelities[0] < fidelities[1]);
    REQUIRE(fidelities[1] < fidelities[2]);
    REQUIRE(fidelities[1] < 1.0);  // close to but below 1 at moderate Gamma
    REQUIRE(fidelities[2] > 0.97);
}

TEST_CASE("adiabatic-elimination consistency against the ideal backward oracle") {
    // trace distance between the reduced hardware dynamics and the ideal
    // backward propagation decreases monotonically through {1e2, 1e3, 1e4}
    ShortModel m;
    std::vector<double> distances;
    for (double gamma : {1e2, 1e3, 1e4}) {
        const int steps = static_cast<int>(std::ceil(m.tau * gamma / 0.1));
        const Trajectory fwd = propagate(m.forward, m.gamma0, 0.0, m.tau, steps);
        const ReverseGenerator rev =
            build_reverse_generator(fwd, m.forward.hamiltonian, m.forward.jumps);
        const Trajectory ideal = propagate(rev.lindbladian(), fwd.back(), 0.0, m.tau, steps);

        AncillaAssembly asm_;
        asm_.gamma = gamma;
        const Lindbladian hw = build_hardware_lindbladian(rev, asm_);
        const Mat rho0 = tensor(fwd.back(), projector(basis_ket(0, 2)));
        const int stride = steps / 40;
        double worst = 0.0;
        propagate_visit(hw, rho0, 0.0, m.tau, steps, {},
                        [&](int node, double, const Mat& rho) {
                            if (node % stride != 0) return;
                            worst = std::max(
                                worst, trace_distance(partial_trace(rho, {2, 2}, {0}),
                                                      ideal.states[node]));
                        });
        distances.push_back(worst);
    }
    REQUIRE(distances[0] > distances[1]);
    REQUIRE(distances[1] > distances[2]);
    REQUIRE(distances[2] < 1e-2);
}

TEST_CASE("apply_rescaling") {
    ShortModel m;
    const Trajectory fwd = propagate(m.forward, m.gamma0, 0.0, m.tau, 500);
    const ReverseGenerator rev =
        build_reverse_generator(fwd, m.forward.hamiltonian, m.forward.jumps);

    SECTION("xi = 1 is the identity transformation") {
        const ReverseGenerator same = apply_rescaling(rev, 1.0);
        REQUIRE(same.tau == rev.tau);
        for (int i : {0, 250, 500}) {
            REQUIRE(max_abs(same.h_b.node(i) - rev.h_b.node(i)) == 0.0);
            REQUIRE(max_abs(same.jumps_b[0].node(i) - rev.jumps_b[0].node(i)) == 0.0);
        }
    }
    SECTION("xi < 1 is rejected") {
        REQUIRE_THROWS_AS(apply_rescaling(rev, 0.5), std::invalid_argument);
    }
    SECTION("ideal effective generator picks up exactly a factor xi node-for-node") {
        const double xi = 4.0;
        const ReverseGenerator scaled = apply_rescaling(rev, xi);
        for (int i : {0, 100, 250, 500}) {
            Lindbladian base{2, Schedule::constant(rev.h_b.node(i)),
                             {Schedule::constant(rev.jumps_b[0].node(i))}};
            Lindbladian resc{2, Schedule::constant(scaled.h_b.node(i)),
                             {Schedule::constant(scaled.jumps_b[0].node(i))}};
            const Mat s_base = generator_superop(base, 0.0).m;
            const Mat s_resc = generator_superop(resc, 0.0).m;
            REQUIRE(max_abs(s_resc - Mat(xi * s_base)) < 1e-8);

            // with residual dissipation: S = S_diss + xi * S_B (Eq. 11)
            Lindbladian with_res = resc;
            with_res.jumps.push_back(m.forward.jumps[0]);
            const Mat s_diss =
                generator_superop(Lindbladian{2, {}, {m.forward.jumps[0]}}, 0.0).m;
            REQUIRE(max_abs(generator_superop(with_res, 0.0).m - (s_diss + xi * s_base)) <
                    1e-8);
        }
    }
    SECTION("large-Gamma endpoint is xi-invariant without residual noise") {
        const double gamma = 400.0;
        const int steps = std::max(2000, static_cast<int>(std::ceil(m.tau * gamma / 0.1)));
        const Trajectory ffine = propagate(m.forward, m.gamma0, 0.0, m.tau, steps);
        const ReverseGenerator rfine =
            build_reverse_generator(ffine, m.forward.hamiltonian, m.forward.jumps);
        AncillaAssembly asm_;
        asm_.gamma = gamma;
        const double f1 = hardware_run(ffine, rfine, asm_, nullptr, 20).fidelity_at_t0;
        asm_.xi = 4.0;
        const double f4 =
            hardware_run(ffine, apply_rescaling(rfine, 4.0), asm_, nullptr, 20).fidelity_at_t0;
        REQUIRE(std::abs(f1 - f4) < 1e-2);
    }
}

TEST_CASE("hardware_sweep collects points deterministically across thread counts") {
    ShortModel m;
    SweepSpec spec;
    spec.forward = m.forward;
    spec.gamma0 = m.gamma0;
    spec.tau = m.tau;
    spec.gammas = {25.0, 100.0};
    spec.xis = {1.0, 2.0};
    spec.min_steps = 1000;
    spec.fidelity_samples = 20;

    spec.threads = 1;
    const auto serial = hardware_sweep(spec);
    spec.threads = 2;
    const auto parallel = hardware_sweep(spec);
    REQUIRE(serial.size() == 4);
    REQUIRE(parallel.size() == 4);
    for (size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial[i].gamma == parallel[i].gamma);
        REQUIRE(serial[i].xi == parallel[i].xi);
        REQUIRE(serial[i].run.fidelity_at_t0 == parallel[i].run.fidelity_at_t0);
    }
}

TEST_CASE("build_hardware_lindbladian validates its inputs") {
    ShortModel m;
    const Trajectory fwd = propagate(m.forward, m.gamma0, 0.0, m.tau, 100);
    const ReverseGenerator rev =
        build_reverse_generator(fwd, m.forward.hamiltonian, m.forward.jumps);
    AncillaAssembly asm_;
    asm_.n_ancillas = 2;  // but rev has one engineered jump
    REQUIRE_THROWS_AS(build_hardware_lindbladian(rev, asm_), std::invalid_argument);

    asm_.n_ancillas = 1;
    Lindbladian residual_with_h = Lindbladian::closed(2, Schedule::constant(pauli_z()));
    REQUIRE_THROWS_AS(build_hardware_lindbladian(rev, asm_, &residual_with_h),
                      std::invalid_argument);
}
