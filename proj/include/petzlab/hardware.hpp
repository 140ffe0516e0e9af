#pragma once

#include <atomic>
#include <map>
#include <thread>

#include "petzlab/petz.hpp"

namespace petzlab {

/// System plus one strongly decaying two-level ancilla per engineered jump.
/// `gamma` is the ancilla decay rate, `xi` the time/amplitude rescaling.
struct AncillaAssembly {
    int system_dim = 2;
    int n_ancillas = 1;
    double gamma = 100.0;
    double xi = 1.0;

    int ancilla_dim() const { return 1 << n_ancillas; }
    int total_dim() const { return system_dim * ancilla_dim(); }
};

inline Mat lift_system(const Mat& a, const AncillaAssembly& asm_) {
    return tensor(a, identity(asm_.ancilla_dim()));
}

/// Operator acting on ancilla k (identity on the system and other ancillas).
inline Mat ancilla_op(const Mat& a, int k, const AncillaAssembly& asm_) {
    if (k < 0 || k >= asm_.n_ancillas)
        throw std::invalid_argument("ancilla_op: ancilla index out of range");
    Mat out = identity(asm_.system_dim);
    for (int j = 0; j < asm_.n_ancillas; ++j)
        out = tensor(out, j == k ? a : identity(2));
    return out;
}

/// H_int^{(k)} = (1/2)(L_{B,k}^dag (x) sigma_-^{(k)} + L_{B,k} (x) sigma_+^{(k)}).
inline Mat build_interaction(const Mat& l_bk, int k, const AncillaAssembly& asm_) {
    if (l_bk.rows() != asm_.system_dim)
        throw std::invalid_argument("build_interaction: system dimension mismatch");
    const Mat lm = lift_system(Mat(l_bk.adjoint()), asm_) * ancilla_op(sigma_minus(), k, asm_);
    const Mat lp = lift_system(l_bk, asm_) * ancilla_op(sigma_plus(), k, asm_);
    return 0.5 * (lm + lp);
}

/// Full-space Lindbladian: H_sa(t~) = H_B (x) 1 + sqrt(Gamma) sum_k H_int^{(k)},
/// jumps = {sqrt(Gamma) sigma_-^{(k)}} plus lifted residual jumps. The residual,
/// when given, must be dissipation only.
inline Lindbladian build_hardware_lindbladian(const ReverseGenerator& rev,
                                              const AncillaAssembly& asm_,
                                              const Lindbladian* residual = nullptr) {
    if (rev.dim != asm_.system_dim)
        throw std::invalid_argument("build_hardware_lindbladian: system dimension mismatch");
    if (static_cast<int>(rev.jumps_b.size()) != asm_.n_ancillas)
        throw std::invalid_argument("build_hardware_lindbladian: one ancilla per engineered jump");
    for (const auto& j : rev.jumps_b)
        if (j.node_count() != rev.h_b.node_count())
            throw std::invalid_argument("build_hardware_lindbladian: schedule grid mismatch");
    if (residual && !residual->hamiltonian.empty())
        throw std::invalid_argument("build_hardware_lindbladian: residual must be dissipation only");

    const double root_gamma = std::sqrt(asm_.gamma);
    const int n_nodes = rev.h_b.node_count();
    std::vector<Mat> h_nodes(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        Mat h = lift_system(rev.h_b.node(i), asm_);
        for (int k = 0; k < asm_.n_ancillas; ++k)
            h += root_gamma * build_interaction(rev.jumps_b[k].node(i), k, asm_);
        h_nodes[i] = std::move(h);
    }

    Lindbladian lind;
    lind.dim = asm_.total_dim();
    lind.hamiltonian = n_nodes == 1 ? Schedule::constant(std::move(h_nodes.front()))
                                    : Schedule::sampled(0.0, rev.tau, std::move(h_nodes));
    for (int k = 0; k < asm_.n_ancillas; ++k)
        lind.jumps.push_back(Schedule::constant(root_gamma * ancilla_op(sigma_minus(), k, asm_)));
    if (residual)
        for (const auto& j : residual->jumps)
            lind.jumps.push_back(j.map([&](const Mat& l) { return lift_system(l, asm_); }));
    return lind;
}

/// Eq.-(11) rescaling: t~ -> t~/xi, H_B -> xi H_B, L_B -> sqrt(xi) L_B, so the
/// engineered dissipator gains a factor xi while the grid keeps its node count.
inline ReverseGenerator apply_rescaling(const ReverseGenerator& rev, double xi) {
    if (xi < 1.0) throw std::invalid_argument("apply_rescaling: xi must be >= 1");
    ReverseGenerator out = rev;
    out.tau = rev.tau / xi;
    out.h_b = rev.h_b.map([&](const Mat& h) { return Mat(xi * h); }).regrid(0.0, out.tau);
    const double rxi = std::sqrt(xi);
    for (auto& j : out.jumps_b)
        j = j.map([&](const Mat& l) { return Mat(rxi * l); }).regrid(0.0, out.tau);
    return out;
}

struct HardwareRunResult {
    std::vector<double> t_fwd;      // forward times of the sampled nodes
    std::vector<double> fidelity;   // F(gamma_t, tr_anc rho~)
    double fidelity_at_t0 = 0.0;    // end of the backward run
    double min_fidelity = 1.0;
    double max_trace_defect = 0.0;
    double ancilla_excitation = 0.0;  // max excited-ancilla population seen
};

/// Propagates the assembly backward from gamma_tau (x) |0...0><0...0| and
/// samples the recovery fidelity of the reduced system state against the
/// stored forward trajectory.
inline HardwareRunResult hardware_run(const Trajectory& fwd, const ReverseGenerator& rev,
                                      const AncillaAssembly& asm_,
                                      const Lindbladian* residual = nullptr,
                                      int fidelity_samples = 200) {
    const int m = fwd.steps();
    if (rev.h_b.node_count() != m + 1)
        throw std::invalid_argument("hardware_run: reverse grid does not match forward grid");
    const Lindbladian lind = build_hardware_lindbladian(rev, asm_, residual);

    std::vector<int> anc_dims(asm_.n_ancillas, 2);
    std::vector<int> dims{asm_.system_dim};
    dims.insert(dims.end(), anc_dims.begin(), anc_dims.end());

    const Vec anc0 = basis_ket(0, asm_.ancilla_dim());
    const Mat rho0 = tensor(fwd.back(), Mat(anc0 * anc0.adjoint()));

    const int stride = std::max(1, m / std::max(1, fidelity_samples));
    HardwareRunResult res;
    propagate_visit(
        lind, rho0, 0.0, rev.tau, m, {},
        [&](int node, double, const Mat& rho) {
            if (node % stride != 0 && node != m) return;
            const Mat sys = partial_trace(rho, dims, {0});
            const double f = uhlmann_fidelity(fwd.states[m - node], sys);
            res.t_fwd.push_back(fwd.time(m - node));
            res.fidelity.push_back(f);
            res.min_fidelity = std::min(res.min_fidelity, f);
            if (node == m) res.fidelity_at_t0 = f;
            std::vector<int> anc_keep(asm_.n_ancillas);
            for (int k = 0; k < asm_.n_ancillas; ++k) anc_keep[k] = k + 1;
            const Mat anc = partial_trace(rho, dims, anc_keep);
            res.ancilla_excitation =
                std::max(res.ancilla_excitation, 1.0 - anc(0, 0).real());
        },
        &res.max_trace_defect);
    return res;
}

struct SweepSpec {
    Lindbladian forward;
    Mat gamma0;
    double tau = 10.0;
    std::vector<double> gammas;
    std::vector<double> xis{1.0};
    bool residual = false;       // keep the forward dissipator on during reversal
    int min_steps = 10000;
    double dt_factor = 0.1;      // hardware step bound dt <= dt_factor / Gamma
    int fidelity_samples = 200;
    double eps = kSupportEps;
    int threads = 1;
};

struct SweepPoint {
    double gamma = 0.0;
    double xi = 1.0;
    HardwareRunResult run;
};

/// Recovery-fidelity sweep. Each (Gamma, xi) point uses a forward grid fine enough
/// that the rescaled hardware step satisfies dt <= dt_factor/Gamma. Points are
/// independent and distributed over `threads` workers; results are stored by
/// index so the output does not depend on scheduling.
inline std::vector<SweepPoint> hardware_sweep(const SweepSpec& spec) {
    struct Prepared {
        Trajectory fwd;
        ReverseGenerator rev;
    };
    std::vector<std::pair<double, double>> points;
    std::vector<int> steps_for_point;
    std::map<int, Prepared> prepared;

    for (double g : spec.gammas)
        for (double xi : spec.xis) {
            const int steps = std::max(
                spec.min_steps,
                static_cast<int>(std::ceil(spec.tau * g / (spec.dt_factor * xi))));
            points.emplace_back(g, xi);
            steps_for_point.push_back(steps);
            if (!prepared.count(steps)) {
                Prepared p;
                p.fwd = propagate(spec.forward, spec.gamma0, 0.0, spec.tau, steps);
                p.rev = build_reverse_generator(p.fwd, spec.forward.hamiltonian,
                                                spec.forward.jumps, spec.eps);
                prepared.emplace(steps, std::move(p));
            }
        }

    Lindbladian residual;
    if (spec.residual) {
        residual.dim = spec.forward.dim;
        residual.jumps = spec.forward.jumps;
    }

    std::vector<SweepPoint> out(points.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
            const auto [g, xi] = points[i];
            const Prepared& p = prepared.at(steps_for_point[i]);
            AncillaAssembly asm_;
            asm_.system_dim = spec.forward.dim;
            asm_.n_ancillas = static_cast<int>(spec.forward.jumps.size());
            asm_.gamma = g;
            asm_.xi = xi;
            const ReverseGenerator rev = xi == 1.0 ? p.rev : apply_rescaling(p.rev, xi);
            out[i].gamma = g;
            out[i].xi = xi;
            out[i].run = hardware_run(p.fwd, rev, asm_, spec.residual ? &residual : nullptr,
                                      spec.fidelity_samples);
        }
    };
    const int n_threads = std::max(1, spec.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace petzlab
