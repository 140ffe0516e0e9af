#pragma once

#include <iostream>

#include "petzlab/propagate.hpp"

namespace petzlab {

/// Petz recovery channel R_{sigma,N} = J_sigma^{1/2} o N^dag o J_{N(sigma)}^{-1/2}
/// as a dense superoperator. The adjoint is the Hilbert-Schmidt dual; the J
/// maps are restricted to the eps-supports of sigma and N(sigma).
/// A channel that fails the TP/CP gate triggers a warning, not a rejection:
/// backward propagators need not stay CP at intermediate stages.
inline Superop petz_channel(const Superop& n, const Mat& sigma, double eps = kSupportEps) {
    if (static_cast<int>(sigma.rows()) != n.dim)
        throw std::invalid_argument("petz_channel: dimension mismatch");
    const double tp_defect = trace_preservation_defect(n);
    if (tp_defect > 1e-6)
        std::cerr << "petzlab: warning: petz_channel input is not trace-preserving "
                     "(defect " << tp_defect << ")\n";
    if (n.dim <= 8) {
        const double cp = choi_min_eigenvalue(n);
        if (cp < -1e-6)
            std::cerr << "petzlab: warning: petz_channel input is not CP "
                         "(Choi min eigenvalue " << cp << ")\n";
    }
    const SupportSqrt s_sigma = sqrt_on_support(hermitize(sigma), eps);
    const SupportSqrt s_out = sqrt_on_support(hermitize(n(hermitize(sigma))), eps);
    return compose(jmap_sqrt(s_sigma), compose(adjoint_channel(n), jmap_inv_sqrt(s_out)));
}

namespace detail {

/// Spectral weights (sqrt(l) - sqrt(l'))/(sqrt(l) + sqrt(l')) with the
/// degenerate and support-cutoff conventions applied. `element` is the
/// matrix element the weight multiplies; mixed support pairs drop small
/// elements entirely.
inline double spectral_weight(double li, double lj, double cutoff, Complex element) {
    const bool zi = li <= cutoff, zj = lj <= cutoff;
    if (zi && zj) return 0.0;
    if (std::abs(li - lj) < 1e-12) return 0.0;
    if (zi != zj) {
        if (std::abs(element) <= 1e-12) return 0.0;
        return zi ? -1.0 : 1.0;
    }
    const double si = std::sqrt(li), sj = std::sqrt(lj);
    return (si - sj) / (si + sj);
}

struct RecoveryNode {
    Mat h_c;                  // correction Hamiltonian H_C
    std::vector<Mat> jumps;   // reverse jumps L_{B,k}
};

/// Shares one eigendecomposition of gamma between the reverse jumps and the
/// correction Hamiltonian.
inline RecoveryNode recovery_at(const SupportSqrt& s, const std::vector<Mat>& fwd_jumps,
                                double eps) {
    const int d = static_cast<int>(s.root.rows());
    RecoveryNode out;
    out.jumps.reserve(fwd_jumps.size());

    Mat m_sum = Mat::Zero(d, d);  // M_t = sum_k L^dag L + gamma^{-1/2} L gamma L^dag gamma^{-1/2}
    const Mat gamma_supp = s.root * s.root;
    for (const Mat& l : fwd_jumps) {
        out.jumps.push_back(s.root * l.adjoint() * s.inv_root);
        m_sum += l.adjoint() * l;
        m_sum += s.inv_root * (l * gamma_supp * l.adjoint()) * s.inv_root;
    }

    if (fwd_jumps.empty()) {
        out.h_c = Mat::Zero(d, d);
        return out;
    }

    const double lmax = s.values.size() ? std::max(s.values.maxCoeff(), 0.0) : 0.0;
    const double cutoff = eps * lmax;
    const Mat m_eig = s.vectors.adjoint() * m_sum * s.vectors;
    Mat core = Mat::Zero(d, d);
    const Complex half_i(0.0, 0.5);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double w = spectral_weight(s.values(i), s.values(j), cutoff, m_eig(i, j));
            if (w != 0.0) core(i, j) = -half_i * w * m_eig(i, j);
        }
    out.h_c = hermitize(s.vectors * core * s.vectors.adjoint());
    return out;
}

}  // namespace detail

/// L_{B,k} = Pi gamma^{1/2} L_{F,k}^dag gamma^{-1/2} Pi on the eps-support.
inline std::vector<Mat> reverse_jumps(const Mat& gamma, const std::vector<Mat>& fwd_jumps,
                                      double eps = kSupportEps) {
    const SupportSqrt s = sqrt_on_support(hermitize(gamma), eps);
    std::vector<Mat> out;
    out.reserve(fwd_jumps.size());
    for (const Mat& l : fwd_jumps) out.push_back(s.root * l.adjoint() * s.inv_root);
    return out;
}

/// H_C = -(i/2) sum_{l,l'} [(sqrt(l)-sqrt(l'))/(sqrt(l)+sqrt(l'))] <l|M|l'> |l><l'|.
inline Mat correction_hamiltonian(const Mat& gamma, const std::vector<Mat>& fwd_jumps,
                                  double eps = kSupportEps) {
    const SupportSqrt s = sqrt_on_support(hermitize(gamma), eps);
    return detail::recovery_at(s, fwd_jumps, eps).h_c;
}

/// H_B via the derivative form -(1/2) gamma^{-1/2} (K_F - i d/dt) gamma^{1/2} + h.c.
/// with K_F = H_F - (i/2) sum_k L_k^dag L_k and the derivative of the root
/// assembled spectrally from gamma_dot = L_F(gamma).
inline Mat reverse_hamiltonian_derivative_form(const Mat& gamma, const Mat& gamma_dot,
                                               const Mat& h_f, const std::vector<Mat>& fwd_jumps,
                                               double eps = kSupportEps) {
    const int d = static_cast<int>(gamma.rows());
    const SupportSqrt s = sqrt_on_support(hermitize(gamma), eps);
    const double lmax = s.values.size() ? std::max(s.values.maxCoeff(), 0.0) : 0.0;
    const double cutoff = eps * lmax;

    // d/dt gamma^{1/2} in the eigenbasis: <l| gamma_dot |l'> / (sqrt(l) + sqrt(l'))
    const Mat gd_eig = s.vectors.adjoint() * gamma_dot * s.vectors;
    Mat droot_eig = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double li = std::max(s.values(i), 0.0), lj = std::max(s.values(j), 0.0);
            if (li <= cutoff && lj <= cutoff) continue;
            droot_eig(i, j) = gd_eig(i, j) / (std::sqrt(li) + std::sqrt(lj));
        }
    const Mat droot = s.vectors * droot_eig * s.vectors.adjoint();

    Mat sum_ldl = Mat::Zero(d, d);
    for (const Mat& l : fwd_jumps) sum_ldl += l.adjoint() * l;
    const Mat k_f = h_f - Complex(0.0, 0.5) * sum_ldl;

    const Mat a = s.inv_root * k_f * s.root;
    const Mat b = s.inv_root * droot;
    const Complex half_i(0.0, 0.5);
    Mat h_b = -0.5 * (a + a.adjoint()) + half_i * (b - b.adjoint());
    return hermitize(s.projector * h_b * s.projector);
}

/// Backward generator on the reversed forward grid: schedules of H_B(t~) and
/// L_{B,k}(t~) with t~ = tau - t node-for-node.
struct ReverseGenerator {
    int dim = 0;
    double tau = 0.0;
    Schedule h_b;
    std::vector<Schedule> jumps_b;
    int source_steps = 0;  // node count - 1 of the forward trajectory

    Lindbladian lindbladian() const { return {dim, h_b, jumps_b}; }
};

namespace detail {

template <typename NodeTransform>
ReverseGenerator build_reverse(const Trajectory& fwd, const Schedule& h_f,
                               const std::vector<Schedule>& jumps_f, double eps,
                               bool include_forward_h, NodeTransform&& transform) {
    const int m = fwd.steps();
    if (m < 1) throw std::invalid_argument("build_reverse_generator: empty trajectory");
    const int d = static_cast<int>(fwd.states.front().rows());
    const double tau = fwd.tau();

    std::vector<Mat> h_nodes(m + 1);
    std::vector<std::vector<Mat>> jump_nodes(jumps_f.size(), std::vector<Mat>(m + 1));
    for (int j = 0; j <= m; ++j) {
        const int fwd_idx = m - j;
        const double t = fwd.time(fwd_idx);
        const Mat& gamma = fwd.states[fwd_idx];
        if (!gamma.allFinite() || std::abs(gamma.trace().real() - 1.0) > 1e-6 ||
            !is_hermitian(gamma, 1e-6))
            throw std::invalid_argument("build_reverse_generator: invalid forward state");
        const SupportSqrt s = sqrt_on_support(hermitize(gamma), eps);
        if (s.values.minCoeff() < -1e-6)
            throw std::invalid_argument("build_reverse_generator: negative forward state");

        std::vector<Mat> lf;
        lf.reserve(jumps_f.size());
        for (const auto& sched : jumps_f) lf.push_back(sched.at(t));
        RecoveryNode node = recovery_at(s, lf, eps);

        Mat h = node.h_c;
        if (include_forward_h && !h_f.empty()) h -= h_f.at(t);
        transform(fwd_idx, h, node.jumps);
        h_nodes[j] = std::move(h);
        for (size_t k = 0; k < jumps_f.size(); ++k)
            jump_nodes[k][j] = std::move(node.jumps[k]);
    }

    ReverseGenerator rev;
    rev.dim = d;
    rev.tau = tau;
    rev.source_steps = m;
    rev.h_b = Schedule::sampled(0.0, tau, std::move(h_nodes));
    for (auto& nodes : jump_nodes)
        rev.jumps_b.push_back(Schedule::sampled(0.0, tau, std::move(nodes)));
    return rev;
}

}  // namespace detail

/// Full reversal: h_b(t~) = -H_F(t) + H_C(gamma_t), jumps_b(t~) = L_{B,k}(gamma_t).
inline ReverseGenerator build_reverse_generator(const Trajectory& fwd, const Schedule& h_f,
                                                const std::vector<Schedule>& jumps_f,
                                                double eps = kSupportEps) {
    return detail::build_reverse(fwd, h_f, jumps_f, eps, true,
                                 [](int, Mat&, std::vector<Mat>&) {});
}

/// Dissipation-only reversal: H'_B(t~) = U_{tau-t} H_C(t) U_{tau-t}^dag and
/// L'_{B,k}(t~) = U_{tau-t} L_{B,k}(t) U_{tau-t}^dag, with U_t the forward
/// Hamiltonian propagator integrated on the same grid.
inline ReverseGenerator build_dissipation_only_reverse(const Trajectory& fwd,
                                                       const Schedule& h_f,
                                                       const std::vector<Schedule>& jumps_f,
                                                       double eps = kSupportEps) {
    const int d = static_cast<int>(fwd.states.front().rows());
    const std::vector<Mat> us =
        unitary_schedule(h_f, fwd.t0, fwd.t0 + fwd.tau(), fwd.steps(), d);
    const int m = fwd.steps();
    return detail::build_reverse(
        fwd, h_f, jumps_f, eps, false,
        [&](int fwd_idx, Mat& h, std::vector<Mat>& jumps) {
            const Mat& u = us[m - fwd_idx];  // U_{tau - t}
            h = hermitize(u * h * u.adjoint());
            for (Mat& l : jumps) l = u * l * u.adjoint();
        });
}

struct ReversalOptions {
    int steps = 10000;
    double eps = kSupportEps;
    bool hamiltonian_only = false;   // ablation: jumps_b forced empty
    bool dissipation_only = false;   // Eq.-(7)-style modified reversal
    int choi_samples = 16;           // backward CP monitor (reported, not asserted)
    bool keep_trajectories = false;  // retain both trajectories in the report
};

struct ReversalReport {
    std::vector<double> times;        // forward t per node
    std::vector<double> fidelity;     // F(gamma_t, gamma~_{tau-t})
    std::vector<double> purity_fwd;
    std::vector<double> purity_bwd;
    double min_fidelity = 0.0;
    double endpoint_fidelity = 0.0;        // F at t = 0
    double endpoint_trace_distance = 0.0;  // to gamma_0
    double endpoint_purity = 0.0;
    double unitary_target_trace_distance = -1.0;  // to U_tau gamma_0 U_tau^dag
    double max_trace_defect = 0.0;
    double backward_choi_min = 1.0;  // min over sampled short-time backward propagators
    Trajectory forward_traj, backward_traj;  // populated when keep_trajectories is set
};

/// Runs forward, builds the reverse generator, propagates backward, and
/// reports per-node recovery fidelities plus endpoint metrics.
inline ReversalReport reversal_experiment(const Lindbladian& forward, const Mat& gamma0,
                                          double tau, const ReversalOptions& opts = {}) {
    const Trajectory fwd = propagate(forward, gamma0, 0.0, tau, opts.steps);
    ReverseGenerator rev =
        opts.dissipation_only
            ? build_dissipation_only_reverse(fwd, forward.hamiltonian, forward.jumps, opts.eps)
            : build_reverse_generator(fwd, forward.hamiltonian, forward.jumps, opts.eps);
    if (opts.hamiltonian_only) rev.jumps_b.clear();

    const Lindbladian backward = rev.lindbladian();
    const Trajectory bwd = propagate(backward, fwd.back(), 0.0, tau, opts.steps);

    const int m = fwd.steps();
    ReversalReport rep;
    rep.times.resize(m + 1);
    rep.fidelity.resize(m + 1);
    rep.purity_fwd.resize(m + 1);
    rep.purity_bwd.resize(m + 1);
    rep.min_fidelity = 1.0;
    for (int i = 0; i <= m; ++i) {
        rep.times[i] = fwd.time(i);
        rep.fidelity[i] = uhlmann_fidelity(fwd.states[i], bwd.states[m - i]);
        rep.purity_fwd[i] = purity(fwd.states[i]);
        rep.purity_bwd[i] = purity(bwd.states[m - i]);
        rep.min_fidelity = std::min(rep.min_fidelity, rep.fidelity[i]);
    }
    rep.endpoint_fidelity = rep.fidelity.front();
    rep.endpoint_trace_distance = trace_distance(bwd.back(), gamma0);
    rep.endpoint_purity = purity(bwd.back());
    rep.max_trace_defect = std::max(fwd.max_trace_defect, bwd.max_trace_defect);

    if (opts.dissipation_only) {
        const std::vector<Mat> us = unitary_schedule(forward.hamiltonian, 0.0, tau,
                                                     opts.steps, forward.dim);
        rep.unitary_target_trace_distance =
            trace_distance(bwd.back(), us.back() * gamma0 * us.back().adjoint());
    }

    if (opts.choi_samples > 0) {
        const double dt = tau / opts.steps;
        for (int k = 0; k < opts.choi_samples; ++k) {
            const double t = (k + 0.5) * tau / opts.choi_samples;
            const Superop step{backward.dim,
                               Mat(expm_dense(dt * generator_superop(backward, t).m))};
            rep.backward_choi_min = std::min(rep.backward_choi_min, choi_min_eigenvalue(step));
        }
    }
    if (opts.keep_trajectories) {
        rep.forward_traj = fwd;
        rep.backward_traj = bwd;
    }
    return rep;
}

}  // namespace petzlab
