#pragma once

#include "petzlab/petz.hpp"

namespace petzlab {

/// d orthonormal logical states |i>_L embedded in N physical qubits; columns
/// of `vectors` are the basis states.
struct CodeBasis {
    int n_physical = 0;
    int d = 0;
    Mat vectors;  // 2^N x d

    int physical_dim() const { return 1 << n_physical; }

    void validate(double tol = 1e-10) const {
        if (vectors.rows() != physical_dim() || vectors.cols() != d)
            throw std::invalid_argument("CodeBasis: shape mismatch");
        if (max_abs(Mat(vectors.adjoint() * vectors) - identity(d)) > tol)
            throw std::invalid_argument("CodeBasis: basis is not orthonormal");
    }
};

/// First d computational basis states.
inline CodeBasis computational_code(int n_physical, int d) {
    CodeBasis c{n_physical, d, Mat::Zero(1 << n_physical, d)};
    for (int i = 0; i < d; ++i) c.vectors(i, i) = 1.0;
    return c;
}

/// Codewords (|b> + |~b>)/sqrt(2) from bitstring representatives `words`
/// (~b is the bitwise complement). Pairing low and high excitation numbers
/// makes single amplitude-damping losses leave the code space, which is what
/// Petz recovery needs to act on.
inline CodeBasis self_complementary_code(int n_physical, const std::vector<int>& words) {
    const int dim = 1 << n_physical;
    CodeBasis c{n_physical, static_cast<int>(words.size()),
                Mat::Zero(dim, static_cast<int>(words.size()))};
    for (size_t w = 0; w < words.size(); ++w) {
        const int b = words[w];
        if (b < 0 || b >= dim)
            throw std::invalid_argument("self_complementary_code: word out of range");
        c.vectors(b, w) = 1.0 / std::sqrt(2.0);
        c.vectors((dim - 1) ^ b, w) = 1.0 / std::sqrt(2.0);
    }
    c.validate();
    return c;
}

inline Mat code_projector(const CodeBasis& c) { return c.vectors * c.vectors.adjoint(); }

/// pi_d = (1/d) sum_i |i>_L <i|_L, the maximally mixed state of the code space.
inline Mat code_maximally_mixed(const CodeBasis& c) { return code_projector(c) / c.d; }

/// Lifts a d x d logical operator through the code basis.
inline Mat lift_logical(const CodeBasis& c, const Mat& logical) {
    if (logical.rows() != c.d || logical.cols() != c.d)
        throw std::invalid_argument("lift_logical: logical dimension mismatch");
    return c.vectors * logical * c.vectors.adjoint();
}

/// Logical Pauli string (one character per logical qubit, d = 2^n), lifted to
/// the physical space: X_L = |0>_L<1| + |1>_L<0| and so on.
inline Mat logical_pauli(const CodeBasis& c, const std::string& s) {
    if ((size_t{1} << s.size()) != static_cast<size_t>(c.d))
        throw std::invalid_argument("logical_pauli: string length does not match logical dim");
    return lift_logical(c, pauli_string(s));
}

/// Single-qubit operator placed on physical qubit `q` (leftmost = most
/// significant index).
inline Mat qubit_op(const Mat& a, int q, int n_qubits) {
    if (q < 0 || q >= n_qubits) throw std::invalid_argument("qubit_op: index out of range");
    Mat out = a;
    if (q > 0) out = tensor(identity(1 << q), out);
    if (q < n_qubits - 1) out = tensor(out, identity(1 << (n_qubits - 1 - q)));
    return out;
}

struct NoiseModel {
    enum class Kind { amplitude_damping, dephasing, correlated, composite };
    Kind kind = Kind::composite;
    double g1 = 1.0;              // single-qubit rate (damping or dephasing)
    double g2 = 0.0;              // nearest-neighbour correlated rate
    int n_physical = 1;
    bool both_orderings = true;   // include both L_{-+} and L_{+-} per pair
    bool dephasing_local = false; // composite with sigma_z local part

    bool has_local() const {
        return kind == Kind::amplitude_damping || kind == Kind::dephasing ||
               kind == Kind::composite;
    }
    bool has_correlated() const {
        return kind == Kind::correlated || kind == Kind::composite;
    }
    bool local_is_dephasing() const {
        return kind == Kind::dephasing || dephasing_local;
    }
};

/// Jump list: {g1 sigma_-^{(n)}} (or g1 sigma_z^{(n)} for dephasing) on every
/// qubit plus {g2 sigma_-+^{(n)} sigma_+-^{(n+1)}} on every nearest-neighbour
/// pair of the chain.
inline Lindbladian build_noise(const NoiseModel& model) {
    if (model.n_physical < 1 || model.n_physical > 6)
        throw std::invalid_argument("build_noise: supported sizes are 1 <= N <= 6");
    const int n = model.n_physical;
    Lindbladian lind;
    lind.dim = 1 << n;
    if (model.has_local() && model.g1 != 0.0) {
        const Mat& local = model.local_is_dephasing() ? pauli_z() : sigma_minus();
        for (int q = 0; q < n; ++q)
            lind.jumps.push_back(Schedule::constant(model.g1 * qubit_op(local, q, n)));
    }
    if (model.has_correlated() && model.g2 != 0.0) {
        for (int q = 0; q + 1 < n; ++q) {
            const Mat mp = qubit_op(sigma_minus(), q, n) * qubit_op(sigma_plus(), q + 1, n);
            lind.jumps.push_back(Schedule::constant(model.g2 * mp));
            if (model.both_orderings) {
                const Mat pm = qubit_op(sigma_plus(), q, n) * qubit_op(sigma_minus(), q + 1, n);
                lind.jumps.push_back(Schedule::constant(model.g2 * pm));
            }
        }
    }
    return lind;
}

/// F_e of a physical channel compressed onto the code space:
/// (1/d^2) sum_{i,k} Tr[|k>_L<i| C(|i>_L<k|)].
inline double entanglement_fidelity_general(const Superop& channel, const CodeBasis& c) {
    Complex acc = 0.0;
    for (int i = 0; i < c.d; ++i)
        for (int k = 0; k < c.d; ++k) {
            const Mat e_ik = c.vectors.col(i) * c.vectors.col(k).adjoint();
            const Mat e_ki = c.vectors.col(k) * c.vectors.col(i).adjoint();
            acc += (e_ki * channel(e_ik)).trace();
        }
    return acc.real() / (c.d * c.d);
}

/// Petz-specialized closed form (recovery with reference pi_d^C):
/// F_e(R o N) = sum_{i,k} Tr[N(|k>_L<i|) N(pi)^{-1/2} N(|i>_L<k|) N(pi)^{-1/2}] / d^3.
inline double entanglement_fidelity_petz(const Superop& noise, const CodeBasis& c,
                                         double eps = kSupportEps) {
    const Mat n_pi = hermitize(noise(code_maximally_mixed(c)));
    const Mat inv_root = sqrt_on_support(n_pi, eps).inv_root;
    Complex acc = 0.0;
    for (int i = 0; i < c.d; ++i)
        for (int k = 0; k < c.d; ++k) {
            const Mat n_ik = noise(Mat(c.vectors.col(i) * c.vectors.col(k).adjoint()));
            const Mat n_ki = noise(Mat(c.vectors.col(k) * c.vectors.col(i).adjoint()));
            acc += (n_ki * inv_root * n_ik * inv_root).trace();
        }
    return acc.real() / (static_cast<double>(c.d) * c.d * c.d);
}

/// F_avg = (d F_e + 1) / (d + 1).
inline double average_fidelity(double f_e, int d) { return (d * f_e + 1.0) / (d + 1.0); }

/// Petz recovery channel for the code space, reference state pi_d^C.
inline Superop petz_code_channel(const Superop& n_dt, const CodeBasis& c,
                                 double eps = kSupportEps) {
    return petz_channel(n_dt, code_maximally_mixed(c), eps);
}

/// Continuous-form construction: propagate pi_d^C forward under the noise,
/// build the backward generator (Eq. 4/6 machinery), and integrate it into a
/// channel. Inputs are restricted to the support of the noisy reference state
/// (the recovery dynamics are only defined there); with that convention the
/// result converges to petz_code_channel as `steps` grows.
inline Superop petz_code_channel_continuous(const NoiseModel& model, double dt,
                                            const CodeBasis& c, int steps,
                                            double eps = kSupportEps) {
    const Lindbladian noise = build_noise(model);
    const Trajectory fwd = propagate(noise, code_maximally_mixed(c), 0.0, dt, steps);
    const ReverseGenerator rev =
        build_reverse_generator(fwd, noise.hamiltonian, noise.jumps, eps);
    const Superop flow = channel_from(rev.lindbladian(), 0.0, dt, steps);
    const Mat pi_noisy_support = sqrt_on_support(fwd.back(), eps).projector;
    return compose(flow, sandwich(pi_noisy_support, pi_noisy_support));
}

/// Haar-random pure state of the code space, lifted to the physical space.
inline Vec haar_logical_state(const CodeBasis& c, Rng& rng) {
    return c.vectors * haar_state(c.d, rng);
}

/// Stabilizer generators of the [[5,1,3]] code: XZZXI and cyclic shifts.
inline std::vector<Mat> five_qubit_stabilizers() {
    return {pauli_string("XZZXI"), pauli_string("IXZZX"), pauli_string("XIXZZ"),
            pauli_string("ZXIXZ")};
}

/// [[5,1,3]] code basis generated from its stabilizer group:
/// |0>_L ~ prod_g (1 + g)|00000>, |1>_L = XXXXX |0>_L.
inline CodeBasis five_qubit_code() {
    const int dim = 32;
    Mat proj = identity(dim);
    for (const Mat& g : five_qubit_stabilizers())
        proj = proj * 0.5 * (identity(dim) + g);
    Vec zero_l = proj * basis_ket(0, dim);
    zero_l /= zero_l.norm();
    Vec one_l = pauli_string("XXXXX") * zero_l;
    one_l /= one_l.norm();
    CodeBasis c{5, 2, Mat(dim, 2)};
    c.vectors.col(0) = zero_l;
    c.vectors.col(1) = one_l;
    c.validate();
    return c;
}

}  // namespace petzlab
