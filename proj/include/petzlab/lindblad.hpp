#pragma once

#include "petzlab/operators.hpp"
#include "petzlab/schedule.hpp"
#include "petzlab/superop.hpp"

namespace petzlab {

/// Generator of a Lindblad master equation: a Hamiltonian schedule plus a
/// list of jump-operator schedules. A default-constructed Hamiltonian means
/// H = 0.
struct Lindbladian {
    int dim = 0;
    Schedule hamiltonian;
    std::vector<Schedule> jumps;

    static Lindbladian closed(int d, Schedule h) { return {d, std::move(h), {}}; }

    Mat hamiltonian_at(double t) const {
        return hamiltonian.empty() ? Mat(Mat::Zero(dim, dim)) : hamiltonian.at(t);
    }

    std::vector<Mat> jumps_at(double t) const {
        std::vector<Mat> ls;
        ls.reserve(jumps.size());
        for (const auto& j : jumps) ls.push_back(j.at(t));
        return ls;
    }

    void validate() const {
        if (dim < 1) throw std::invalid_argument("Lindbladian: dim must be positive");
        if (!hamiltonian.empty()) {
            if (hamiltonian.dim() != dim)
                throw std::invalid_argument("Lindbladian: Hamiltonian dimension mismatch");
            for (int i = 0; i < hamiltonian.node_count(); ++i)
                if (!is_hermitian(hamiltonian.node(i)))
                    throw std::invalid_argument("Lindbladian: non-Hermitian Hamiltonian sample");
        }
        for (const auto& j : jumps)
            if (j.dim() != dim)
                throw std::invalid_argument("Lindbladian: jump dimension mismatch");
    }
};

inline Mat apply_dissipator(const std::vector<Mat>& ls, const Mat& rho) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const Mat& l : ls) {
        const Mat ldl = l.adjoint() * l;
        out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
    }
    return out;
}

/// L(rho) = -i[H(t), rho] + sum_k (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho}).
inline Mat apply_generator(const Lindbladian& lind, const Mat& rho, double t) {
    if (rho.rows() != lind.dim || rho.cols() != lind.dim)
        throw std::invalid_argument("apply_generator: dimension mismatch");
    const Complex mi(0.0, -1.0);
    Mat out = lind.hamiltonian.empty()
                  ? Mat(Mat::Zero(lind.dim, lind.dim))
                  : Mat(mi * commutator(lind.hamiltonian.at(t), rho));
    if (!lind.jumps.empty()) out += apply_dissipator(lind.jumps_at(t), rho);
    return out;
}

/// d/dt Tr[rho^2] = 2 Tr[D(rho) rho]; the Hamiltonian does not contribute.
inline double purity_rate(const Lindbladian& lind, const Mat& rho, double t) {
    if (lind.jumps.empty()) return 0.0;
    return 2.0 * (apply_dissipator(lind.jumps_at(t), rho) * rho).trace().real();
}

/// Vectorized generator under column-stacking:
/// S = -i(1 (x) H - H^T (x) 1) + sum_k [conj(L) (x) L
///     - 1/2 (1 (x) L^dag L + (L^dag L)^T (x) 1)].
inline Superop generator_superop(const Lindbladian& lind, double t) {
    const int d = lind.dim;
    const Mat id = identity(d);
    Superop s = Superop::zero(d);
    if (!lind.hamiltonian.empty()) {
        const Mat h = lind.hamiltonian.at(t);
        s.m += Complex(0.0, -1.0) * (tensor(id, h) - tensor(h.transpose(), id));
    }
    for (const Mat& l : lind.jumps_at(t)) {
        const Mat ldl = l.adjoint() * l;
        s.m += tensor(l.conjugate(), l) -
               0.5 * (tensor(id, ldl) + tensor(ldl.transpose(), id));
    }
    return s;
}

/// Upper bound on the superoperator norm, used to pick sub-steps for the
/// exponential action.
inline double generator_norm_bound(const Lindbladian& lind, double t) {
    double b = 0.0;
    if (!lind.hamiltonian.empty()) b += 2.0 * lind.hamiltonian.at(t).norm();
    for (const auto& j : lind.jumps) {
        const double ln = j.at(t).norm();
        b += 2.0 * ln * ln;
    }
    return b;
}

}  // namespace petzlab
