#pragma once

#include "petzlab/code.hpp"

namespace petzlab {

/// One term of the driving Hamiltonian: coeff * sin/cos(freq t) * P_L.
struct DriveTerm {
    double coeff = 0.0;
    double freq = 0.0;
    bool is_sin = true;
    std::string pauli;  // logical Pauli string, one character per logical qubit

    double envelope(double t) const {
        return coeff * (is_sin ? std::sin(freq * t) : std::cos(freq * t));
    }
};

struct StrobeOptions {
    double dt = 0.02;      // strobe interval and recovery-channel duration
    double duration = 2.0;
    int substeps = 8;      // integrator substeps per interval
    double eps = kSupportEps;
};

struct StrobeResult {
    std::vector<double> times;
    std::vector<std::string> observables;       // logical Pauli strings
    std::vector<std::vector<double>> noise_free;  // [observable][node]
    std::vector<std::vector<double>> noisy;
    std::vector<std::vector<double>> recovered;
    std::vector<double> fidelity_noisy;      // F(noise-free, noisy) per node
    std::vector<double> fidelity_recovered;  // F(noise-free, recovered) per node
};

/// Alternates noisy driven evolution over dt with the instantaneous Petz
/// recovery channel of the noise-only dynamics (reference pi_d^C), and tracks
/// the noise-free and no-recovery baselines.
inline StrobeResult strobe_run(const CodeBasis& code, const std::vector<DriveTerm>& drive,
                               const NoiseModel& noise, const StrobeOptions& opts = {}) {
    code.validate(1e-8);
    int n_logical = 0;
    while ((1 << n_logical) < code.d) ++n_logical;
    if ((1 << n_logical) != code.d)
        throw std::invalid_argument("strobe_run: logical dimension must be a power of two");

    const Lindbladian noise_lind = build_noise(noise);
    if (noise_lind.dim != code.physical_dim())
        throw std::invalid_argument("strobe_run: noise and code sizes differ");
    const Superop n_dt = channel_from(noise_lind, 0.0, opts.dt, 1);
    const Superop recovery = petz_code_channel(n_dt, code, opts.eps);

    std::vector<Mat> drive_ops;
    drive_ops.reserve(drive.size());
    for (const auto& term : drive) {
        if (static_cast<int>(term.pauli.size()) != n_logical)
            throw std::invalid_argument("strobe_run: drive Pauli string length mismatch");
        drive_ops.push_back(logical_pauli(code, term.pauli));
    }

    const std::vector<Mat> jumps = noise_lind.jumps_at(0.0);
    double jump_norm = 0.0;
    for (const Mat& l : jumps) jump_norm += 2.0 * l.norm() * l.norm();

    const int d_phys = code.physical_dim();
    auto hamiltonian_at = [&](double t) {
        Mat h = Mat::Zero(d_phys, d_phys);
        for (size_t i = 0; i < drive.size(); ++i) h += drive[i].envelope(t) * drive_ops[i];
        return h;
    };
    auto evolve = [&](Mat& rho, double t0, bool with_noise) {
        const double h_step = opts.dt / opts.substeps;
        for (int s = 0; s < opts.substeps; ++s) {
            const double tm = t0 + h_step * (s + 0.5);
            const Mat h = hamiltonian_at(tm);
            const Complex mi(0.0, -1.0);
            auto action = [&](const Mat& x) {
                Mat out = mi * commutator(h, x);
                if (with_noise) out += apply_dissipator(jumps, x);
                return out;
            };
            const double bound = 2.0 * h.norm() + (with_noise ? jump_norm : 0.0);
            rho = expm_apply(action, rho, h_step, bound);
            rho = hermitize(rho);
            rho /= rho.trace().real();
        }
    };

    const Vec psi0 = code.vectors.col(0);  // |0...0>_L
    Mat rho_free = psi0 * psi0.adjoint();
    Mat rho_noisy = rho_free;
    Mat rho_rec = rho_free;

    StrobeResult res;
    res.observables = pauli_labels(n_logical);
    std::vector<Mat> obs_ops;
    obs_ops.reserve(res.observables.size());
    for (const auto& label : res.observables) obs_ops.push_back(logical_pauli(code, label));
    res.noise_free.resize(obs_ops.size());
    res.noisy.resize(obs_ops.size());
    res.recovered.resize(obs_ops.size());

    const int n_intervals = static_cast<int>(std::round(opts.duration / opts.dt));
    auto record = [&](double t) {
        res.times.push_back(t);
        for (size_t o = 0; o < obs_ops.size(); ++o) {
            res.noise_free[o].push_back((obs_ops[o] * rho_free).trace().real());
            res.noisy[o].push_back((obs_ops[o] * rho_noisy).trace().real());
            res.recovered[o].push_back((obs_ops[o] * rho_rec).trace().real());
        }
        res.fidelity_noisy.push_back(uhlmann_fidelity(rho_free, rho_noisy));
        res.fidelity_recovered.push_back(uhlmann_fidelity(rho_free, rho_rec));
    };

    record(0.0);
    for (int j = 0; j < n_intervals; ++j) {
        const double t0 = j * opts.dt;
        evolve(rho_free, t0, false);
        evolve(rho_noisy, t0, true);
        evolve(rho_rec, t0, true);
        rho_rec = hermitize(recovery(rho_rec));
        rho_rec /= rho_rec.trace().real();
        record((j + 1) * opts.dt);
    }
    return res;
}

}  // namespace petzlab
