#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace petzlab;
using petzlab::testing::driven_damped_qubit;
using petzlab::testing::ket0_density;

TEST_CASE("petz channel of the identity is the identity on the support") {
    Rng rng(31);
    const Mat sigma = random_density(3, rng);
    const Superop r = petz_channel(Superop::identity(3), sigma);
    REQUIRE(max_abs(r.m - Mat::Identity(9, 9)) < 1e-8);
}

TEST_CASE("petz channel of a unitary is conjugation by its adjoint") {
    Rng rng(32);
    const Mat u = random_unitary(3, rng);
    const Superop n = kraus_to_superop({u});
    const Mat sigma = random_density(3, rng);
    const Superop r = petz_channel(n, sigma);
    const Superop expected = kraus_to_superop({Mat(u.adjoint())});
    REQUIRE(max_abs(r.m - expected.m) < 1e-8);
}

TEST_CASE("petz identity R(N(sigma)) = sigma for random CPTP channels") {
    Rng rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng.bits() % 3);
        const Mat sigma = random_density(d, rng);
        const Superop n = random_cptp(d, 1 + static_cast<int>(rng.bits() % 4), rng);
        const Superop r = petz_channel(n, sigma);
        REQUIRE((r(n(sigma)) - sigma).norm() < 1e-8);
    }
}

TEST_CASE("petz identity also holds for rank-deficient references") {
    Rng rng(34);
    const Mat sigma = random_density(3, rng, 2);
    const Superop n = random_cptp(3, 3, rng);
    const Superop r = petz_channel(n, sigma);
    REQUIRE((r(n(sigma)) - sigma).norm() < 1e-8);
}

TEST_CASE("reverse jumps at the maximally mixed state are exact adjoints") {
    Rng rng(35);
    for (int d : {2, 3, 4}) {
        const Mat l = random_ginibre(d, d, rng);
        const std::vector<Mat> rev = reverse_jumps(identity(d) / d, {l});
        REQUIRE(max_abs(rev[0] - l.adjoint()) < 1e-12);
    }
    const std::vector<Mat> zero = reverse_jumps(0.5 * identity(2), {Mat(Mat::Zero(2, 2))});
    REQUIRE(max_abs(zero[0]) == 0.0);
}

TEST_CASE("reverse jump on the benchmark trajectory matches the Bloch closed form") {
    const Lindbladian lind = driven_damped_qubit();
    const Trajectory fwd = propagate(lind, ket0_density(), 0.0, 10.0, 2000);
    const Mat gamma = fwd.states[1000];  // t = 5
    const Mat l_f = 0.4 * sigma_minus();

    const std::vector<Mat> general = reverse_jumps(gamma, {l_f});
    const Vec3c l_b = qubit_reverse_jump(BlochState{bloch_of(gamma)}, testing::benchmark_jump_vector());
    REQUIRE(max_abs(general[0] - op_from_pauli_vector(l_b)) < 1e-8);
}

TEST_CASE("correction Hamiltonian vanishes without jumps and at maximal mixing") {
    Rng rng(36);
    REQUIRE(max_abs(correction_hamiltonian(random_density(3, rng), {})) == 0.0);
    const Mat l = random_ginibre(2, 2, rng);
    REQUIRE(max_abs(correction_hamiltonian(0.5 * identity(2), {l})) < 1e-12);
}

TEST_CASE("derivative form reduces to -H_F in the trivial cases") {
    Rng rng(37);
    const Mat h_f = random_hermitian(2, rng);
    const Mat gamma = random_density(2, rng);
    SECTION("no jumps") {
        const Mat gamma_dot = Complex(0, -1) * commutator(h_f, gamma);
        const Mat h_b = reverse_hamiltonian_derivative_form(gamma, gamma_dot, h_f, {});
        REQUIRE(max_abs(h_b + h_f) < 1e-9);
    }
    SECTION("maximally mixed state") {
        const Mat l = 0.3 * random_ginibre(2, 2, rng);
        Lindbladian lind{2, Schedule::constant(h_f), {Schedule::constant(l)}};
        const Mat mixed = 0.5 * identity(2);
        const Mat gamma_dot = apply_generator(lind, mixed, 0.0);
        const Mat h_b = reverse_hamiltonian_derivative_form(mixed, gamma_dot, h_f, {l});
        REQUIRE(max_abs(h_b + h_f) < 1e-9);
    }
}

TEST_CASE("Eq. (4) and Eq. (5)+(6) constructions agree along the benchmark trajectory") {
    const Lindbladian lind = driven_damped_qubit();
    const Mat h_f = 0.3 * pauli_x() + pauli_z();
    const Mat l_f = 0.4 * sigma_minus();
    const Trajectory fwd = propagate(lind, ket0_density(), 0.0, 10.0, 2000);
    int checked = 0;
    for (int s = 1; s <= 10; ++s) {
        const int node = s * fwd.steps() / 11;
        const Mat& gamma = fwd.states[node];
        if (herm_eig(gamma).values.minCoeff() <= 1e-8) continue;
        const Mat gamma_dot = apply_generator(lind, gamma, fwd.time(node));
        const Mat deriv = reverse_hamiltonian_derivative_form(gamma, gamma_dot, h_f, {l_f});
        const Mat spectral = -h_f + correction_hamiltonian(gamma, {l_f});
        REQUIRE(is_hermitian(deriv, 1e-10));
        REQUIRE(is_hermitian(spectral, 1e-10));
        REQUIRE(max_abs(deriv - spectral) < 1e-6);
        ++checked;
    }
    REQUIRE(checked >= 8);
}

TEST_CASE("M_t spectral form agrees with the L_B-based alternative") {
    // M = sum_k L^dag L + gamma^{-1/2} L gamma L^dag gamma^{-1/2}
    //   = sum_k L^dag L + L_B^dag L_B
    Rng rng(38);
    const Mat gamma = random_density(3, rng);
    const Mat l = random_ginibre(3, 3, rng);
    const SupportSqrt s = sqrt_on_support(gamma);
    const Mat direct = l.adjoint() * l + s.inv_root * (l * gamma * l.adjoint()) * s.inv_root;
    const Mat l_b = reverse_jumps(gamma, {l})[0];
    const Mat alternative = l.adjoint() * l + l_b.adjoint() * l_b;
    REQUIRE(max_abs(direct - alternative) < 1e-9);
}

TEST_CASE("spectral weights are antisymmetric and bounded") {
    Rng rng(39);
    for (int trial = 0; trial < 200; ++trial) {
        const double li = rng.uniform(), lj = rng.uniform();
        const double w = detail::spectral_weight(li, lj, 1e-10, Complex(1.0, 0.0));
        const double ws = detail::spectral_weight(lj, li, 1e-10, Complex(1.0, 0.0));
        REQUIRE(w == Catch::Approx(-ws).margin(1e-15));
        REQUIRE(std::abs(w) <= 1.0);
    }
    REQUIRE(detail::spectral_weight(0.0, 0.0, 1e-10, Complex(1.0, 0.0)) == 0.0);
    REQUIRE(detail::spectral_weight(0.5, 0.5, 1e-10, Complex(1.0, 0.0)) == 0.0);
    REQUIRE(detail::spectral_weight(0.5, 0.0, 1e-10, Complex(1.0, 0.0)) == 1.0);
    // mixed pair with a negligible matrix element is dropped
    REQUIRE(detail::spectral_weight(0.5, 0.0, 1e-10, Complex(1e-13, 0.0)) == 0.0);
}

TEST_CASE("jump-free reversal is the pure Hamiltonian sign flip") {
    Rng rng(40);
    const Mat h = random_hermitian(2, rng);
    Lindbladian lind = Lindbladian::closed(2, Schedule::constant(h));
    const Mat rho0 = random_density(2, rng);
    const Trajectory fwd = propagate(lind, rho0, 0.0, 2.0, 1000);
    const ReverseGenerator rev = build_reverse_generator(fwd, lind.hamiltonian, lind.jumps);
    REQUIRE(rev.jumps_b.empty());
    for (int i : {0, 500, 1000})
        REQUIRE(max_abs(rev.h_b.node(i) + h) < 1e-9);

    ReversalOptions opts;
    opts.steps = 1000;
    const ReversalReport rep = reversal_experiment(lind, rho0, 2.0, opts);
    REQUIRE(rep.min_fidelity > 1.0 - 1e-9);
}

TEST_CASE("full reversal of the damped qubit recovers the trajectory") {
    ReversalOptions opts;
    opts.steps = 10000;
    const ReversalReport rep = reversal_experiment(driven_damped_qubit(), ket0_density(), 10.0, opts);
    REQUIRE(rep.min_fidelity >= 1.0 - 1e-4);
    REQUIRE(rep.endpoint_trace_distance < 1e-4);

    SECTION("Hamiltonian-only ablation is strictly worse") {
        ReversalOptions ablation = opts;
        ablation.steps = 4000;
        ablation.hamiltonian_only = true;
        ablation.choi_samples = 0;
        const ReversalReport ham_only =
            reversal_experiment(driven_damped_qubit(), ket0_density(), 10.0, ablation);
        REQUIRE(ham_only.endpoint_fidelity < rep.endpoint_fidelity - 1e-3);
    }
}

TEST_CASE("random single-qubit reversal stays faithful on every node") {
    Rng rng(41);
    Lindbladian lind;
    lind.dim = 2;
    lind.hamiltonian = Schedule::constant(random_hermitian(2, rng));
    lind.jumps.push_back(Schedule::constant(0.4 * random_ginibre(2, 2, rng)));
    const Mat rho0 = random_density(2, rng);
    ReversalOptions opts;
    opts.steps = 3000;
    opts.choi_samples = 8;
    const ReversalReport rep = reversal_experiment(lind, rho0, 3.0, opts);
    REQUIRE(rep.min_fidelity >= 1.0 - 1e-3);
    // CP of the backward flow is monitored, never asserted
    REQUIRE(std::isfinite(rep.backward_choi_min));
}

TEST_CASE("dissipation-only reversal ends on the unitary orbit") {
    SECTION("jump-free model gives a zero generator and the unitary endpoint") {
        Rng rng(42);
        const Mat h = random_hermitian(2, rng);
        Lindbladian lind = Lindbladian::closed(2, Schedule::constant(h));
        const Mat rho0 = random_density(2, rng);
        const Trajectory fwd = propagate(lind, rho0, 0.0, 1.0, 500);
        const ReverseGenerator rev =
            build_dissipation_only_reverse(fwd, lind.hamiltonian, lind.jumps);
        for (int i : {0, 250, 500}) REQUIRE(max_abs(rev.h_b.node(i)) < 1e-9);

        ReversalOptions opts;
        opts.steps = 500;
        opts.dissipation_only = true;
        opts.choi_samples = 0;
        const ReversalReport rep = reversal_experiment(lind, rho0, 1.0, opts);
        REQUIRE(rep.unitary_target_trace_distance < 1e-6);
    }
    SECTION("damped-qubit benchmark reaches U_tau |0><0| U_tau^dag") {
        ReversalOptions opts;
        opts.steps = 10000;
        opts.dissipation_only = true;
        opts.choi_samples = 0;
        const ReversalReport rep =
            reversal_experiment(driven_damped_qubit(), ket0_density(), 10.0, opts);
        REQUIRE(rep.unitary_target_trace_distance < 1e-3);
        REQUIRE(rep.endpoint_purity == Catch::Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("support cutoff sensitivity of the benchmark reversal") {
    // the mixed-pair convention is a pragmatic choice; the endpoint must not
    // depend on the cutoff at the 1e-6 level
    ReversalOptions opts;
    opts.steps = 2000;
    opts.choi_samples = 0;
    double endpoints[3];
    int idx = 0;
    for (double eps : {1e-11, 1e-10, 1e-9}) {
        opts.eps = eps;
        endpoints[idx++] =
            reversal_experiment(driven_damped_qubit(), ket0_density(), 10.0, opts).endpoint_fidelity;
    }
    REQUIRE(std::abs(endpoints[0] - endpoints[1]) < 1e-6);
    REQUIRE(std::abs(endpoints[2] - endpoints[1]) < 1e-6);
}
