#pragma once

#include "petzlab/petzlab.hpp"

namespace petzlab::testing {

/// Driven damped qubit benchmark: H = 0.3 sigma_x + sigma_z, L = 0.4 sigma_-.
inline Lindbladian driven_damped_qubit() {
    Lindbladian lind;
    lind.dim = 2;
    lind.hamiltonian = Schedule::constant(0.3 * pauli_x() + pauli_z());
    lind.jumps.push_back(Schedule::constant(0.4 * sigma_minus()));
    return lind;
}

inline Mat ket0_density() { return projector(basis_ket(0, 2)); }

/// Pauli coefficient vector of 0.4 sigma_-; with |0> the sigma_z = +1
/// eigenstate, sigma_- = |0><1| = (sigma_x + i sigma_y)/2.
inline Vec3c benchmark_jump_vector() {
    return {Complex(0.2, 0.0), Complex(0.0, 0.2), Complex(0.0, 0.0)};
}

/// Analytic amplitude-damping Kraus channel with damping p = 1 - e^{-g^2 t}.
inline Superop amplitude_damping_kraus(double g, double t) {
    const double p = 1.0 - std::exp(-g * g * t);
    Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - p);
    k1(0, 1) = std::sqrt(p);
    return kraus_to_superop({k0, k1});
}

/// Index-summation partial trace, independent of the library implementation.
inline Mat partial_trace_oracle_keep0(const Mat& a, int da, int db) {
    Mat out = Mat::Zero(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k)
                out(i, j) += a(i * db + k, j * db + k);
    return out;
}

/// Term-by-term master-equation right-hand side (oracle for apply_generator).
inline Mat lindblad_rhs_oracle(const Mat& h, const std::vector<Mat>& ls, const Mat& rho) {
    const Complex i(0.0, 1.0);
    Mat out = -i * (h * rho) + i * (rho * h);
    for (const Mat& l : ls) {
        out += l * rho * l.adjoint();
        out -= 0.5 * (l.adjoint() * l) * rho;
        out -= 0.5 * rho * (l.adjoint() * l);
    }
    return out;
}

}  // namespace petzlab::testing
