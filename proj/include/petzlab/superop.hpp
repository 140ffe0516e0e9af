#pragma once

#include "petzlab/operators.hpp"
#include "petzlab/rng.hpp"

namespace petzlab {

/// Dense superoperator acting on column-stacked operators:
/// vec(X)_{i + d*j} = X(i, j) and vec(A X B) = (B^T (x) A) vec(X).
struct Superop {
    int dim = 0;  // Hilbert-space dimension d; matrix is d^2 x d^2
    Mat m;

    static Superop zero(int d) { return {d, Mat::Zero(d * d, d * d)}; }
    static Superop identity(int d) { return {d, Mat::Identity(d * d, d * d)}; }

    /// Action on an operator.
    Mat operator()(const Mat& x) const;
};

inline Vec vec_stack(const Mat& x) {
    return Eigen::Map<const Vec>(x.data(), x.size());
}

inline Mat unstack(const Vec& v, int d) {
    return Eigen::Map<const Mat>(v.data(), d, d);
}

inline Mat Superop::operator()(const Mat& x) const { return unstack(m * vec_stack(x), dim); }

/// Superoperator of X -> A X B.
inline Superop sandwich(const Mat& a, const Mat& b) {
    return {static_cast<int>(a.rows()), tensor(b.transpose(), a)};
}

/// J_rho^{+-1/2}(X) = rho^{+-1/2} X rho^{+-1/2}, restricted to the support
/// of rho for the negative power.
inline Superop jmap_sqrt(const SupportSqrt& s) { return sandwich(s.root, s.root); }
inline Superop jmap_inv_sqrt(const SupportSqrt& s) { return sandwich(s.inv_root, s.inv_root); }

inline Superop compose(const Superop& outer, const Superop& inner) {
    if (outer.dim != inner.dim) throw std::invalid_argument("compose: dimension mismatch");
    return {outer.dim, outer.m * inner.m};
}

/// Hilbert-Schmidt adjoint N^dagger: conjugate transpose of the matrix under
/// the fixed column-stacking convention.
inline Superop adjoint_channel(const Superop& s) { return {s.dim, s.m.adjoint()}; }

inline Superop kraus_to_superop(const std::vector<Mat>& kraus) {
    if (kraus.empty()) throw std::invalid_argument("kraus_to_superop: empty set");
    const int d = static_cast<int>(kraus.front().rows());
    Superop s = Superop::zero(d);
    for (const Mat& k : kraus) s.m += tensor(k.conjugate(), k);
    return s;
}

/// Trace preservation: vec(1)^dagger is a left fixed point of the matrix.
inline double trace_preservation_defect(const Superop& s) {
    const Vec tr_row = vec_stack(identity(s.dim));
    return (s.m.adjoint() * tr_row - tr_row).cwiseAbs().maxCoeff();
}

inline bool is_trace_preserving(const Superop& s, double tol = 1e-8) {
    return trace_preservation_defect(s) <= tol;
}

/// Unnormalized Choi matrix C = sum_{ij} E_ij (x) S(E_ij); PSD iff S is CP.
inline Mat choi_matrix(const Superop& s) {
    const int d = s.dim;
    Mat c = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            c.block(i * d, j * d, d, d) = s(e);
        }
    return c;
}

inline double choi_min_eigenvalue(const Superop& s) {
    return herm_eig(hermitize(choi_matrix(s)), 1e-6).values.minCoeff();
}

inline bool is_cptp(const Superop& s, double tol = 1e-8) {
    return is_trace_preserving(s, tol) && choi_min_eigenvalue(s) >= -tol;
}

/// Random CPTP channel with `n_kraus` Kraus operators, drawn from a Haar
/// isometry (QR of a Ginibre block column).
inline Superop random_cptp(int d, int n_kraus, Rng& rng) {
    const Mat g = random_ginibre(d * n_kraus, d, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    std::vector<Mat> kraus;
    kraus.reserve(n_kraus);
    for (int k = 0; k < n_kraus; ++k)
        kraus.push_back(q.block(k * d, 0, d, d));
    return kraus_to_superop(kraus);
}

}  // namespace petzlab
