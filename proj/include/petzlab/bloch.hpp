#pragma once

#include "petzlab/operators.hpp"

namespace petzlab {

using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;

/// Clamp applied before evaluating hyperbolics: x = atanh|r| diverges in the
/// pure-state limit, where the general support-projected path is
/// authoritative.
inline constexpr double kBlochPurityClamp = 1e-8;

struct BlochState {
    Vec3 r;
    double radius() const { return r.norm(); }
};

inline Mat rho_from_bloch(const Vec3& r) {
    return 0.5 * (identity(2) + r.x() * pauli_x() + r.y() * pauli_y() + r.z() * pauli_z());
}

inline Vec3 bloch_of(const Mat& rho) {
    return {(pauli_x() * rho).trace().real(), (pauli_y() * rho).trace().real(),
            (pauli_z() * rho).trace().real()};
}

/// v . sigma for a complex coefficient vector.
inline Mat op_from_pauli_vector(const Vec3c& v) {
    return v.x() * pauli_x() + v.y() * pauli_y() + v.z() * pauli_z();
}

/// Traceless Pauli coefficients of a 2x2 operator.
inline Vec3c pauli_vector_of(const Mat& a) {
    return {0.5 * (pauli_x() * a).trace(), 0.5 * (pauli_y() * a).trace(),
            0.5 * (pauli_z() * a).trace()};
}

inline Vec3c cross(const Vec3c& a, const Vec3c& b) {
    return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
            a.x() * b.y() - a.y() * b.x()};
}

/// e^{-x(n.sigma)/2} (v.sigma) e^{x(n.sigma)/2}
///   = [v - 2 sinh^2(x/2) (n x (n x v)) - i sinh(x) (n x v)] . sigma
inline Vec3c bch_conjugate(double x, const Vec3& n, const Vec3c& v) {
    if (std::abs(n.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("bch_conjugate: n must be a unit vector");
    const Vec3c nc = n.cast<Complex>();
    const Vec3c nxv = cross(nc, v);
    const double sh = std::sinh(0.5 * x);
    return v - 2.0 * sh * sh * cross(nc, nxv) - Complex(0.0, std::sinh(x)) * nxv;
}

/// l_B = l* - (cosh^2 x / 2 cosh^2(x/2)) [r x (r x l*)] + i cosh(x) [r x l*]
/// with x = atanh|r|.
inline Vec3c qubit_reverse_jump(const BlochState& state, const Vec3c& l_f) {
    const double rnorm = std::min(state.radius(), 1.0 - kBlochPurityClamp);
    const double x = std::atanh(rnorm);
    const Vec3c r = (state.radius() > 0 ? Vec3(state.r * (rnorm / state.radius()))
                                        : state.r)
                        .cast<Complex>();
    const Vec3c lc = l_f.conjugate();
    const Vec3c rxl = cross(r, lc);
    const double ch = std::cosh(x), ch2 = std::cosh(0.5 * x);
    return lc - (ch * ch / (2.0 * ch2 * ch2)) * cross(r, rxl) + Complex(0.0, ch) * rxl;
}

/// h_B = -h_F + (cosh^2 x / 2 cosh^2(x/2)) sum_k [ Re[(r.l)(r x l*)]
///        - (sinh^2(x/2)/cosh x) [r x (i l* x l)] ]
inline Vec3 qubit_reverse_hamiltonian(const BlochState& state, const Vec3& h_f,
                                      const std::vector<Vec3c>& l_fs) {
    const double rnorm = std::min(state.radius(), 1.0 - kBlochPurityClamp);
    const double x = std::atanh(rnorm);
    const Vec3 r = state.radius() > 0 ? Vec3(state.r * (rnorm / state.radius())) : state.r;
    const Vec3c rc = r.cast<Complex>();
    const double ch = std::cosh(x), ch2 = std::cosh(0.5 * x), sh2 = std::sinh(0.5 * x);
    Vec3 sum = Vec3::Zero();
    for (const Vec3c& l : l_fs) {
        const Vec3c lc = l.conjugate();
        // plain bilinear r.l (Eigen's dot() would conjugate the left factor)
        const Complex r_dot_l = rc.x() * l.x() + rc.y() * l.y() + rc.z() * l.z();
        const Vec3c rxlc = cross(rc, lc);
        const Vec3c term1 = r_dot_l * rxlc;
        const Vec3c illl = Complex(0.0, 1.0) * cross(lc, l);  // i (l* x l), a real vector
        const Vec3c term2 = (sh2 * sh2 / ch) * cross(rc, illl);
        sum += (term1 - term2).real();
    }
    return -h_f + (ch * ch / (2.0 * ch2 * ch2)) * sum;
}

}  // namespace petzlab
