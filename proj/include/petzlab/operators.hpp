#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace petzlab {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Relative eigenvalue cutoff used for support detection (fraction of the
/// largest eigenvalue).
inline constexpr double kSupportEps = 1e-10;

/// Max-norm Hermiticity gate applied before symmetrizing inputs of
/// eigendecompositions.
inline constexpr double kHermTol = 1e-9;

inline double max_abs(const Mat& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double fro_norm(const Mat& a) { return a.norm(); }

inline bool is_hermitian(const Mat& a, double tol = kHermTol) {
    return max_abs(a - a.adjoint()) <= tol * std::max(1.0, max_abs(a));
}

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

inline Mat identity(int d) { return Mat::Identity(d, d); }

inline const Mat& pauli_i() {
    static const Mat m = Mat::Identity(2, 2);
    return m;
}

inline const Mat& pauli_x() {
    static const Mat m = (Mat(2, 2) << 0, 1, 1, 0).finished();
    return m;
}

inline const Mat& pauli_y() {
    static const Mat m =
        (Mat(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
    return m;
}

inline const Mat& pauli_z() {
    static const Mat m = (Mat(2, 2) << 1, 0, 0, -1).finished();
    return m;
}

/// sigma_- = |0><1| in the convention |0> = (1,0)^T (sigma_z eigenvalue +1).
inline const Mat& sigma_minus() {
    static const Mat m = (Mat(2, 2) << 0, 1, 0, 0).finished();
    return m;
}

inline const Mat& sigma_plus() {
    static const Mat m = (Mat(2, 2) << 0, 0, 1, 0).finished();
    return m;
}

inline const Mat& pauli(char c) {
    switch (c) {
        case 'I': return pauli_i();
        case 'X': return pauli_x();
        case 'Y': return pauli_y();
        case 'Z': return pauli_z();
        default: throw std::invalid_argument("unknown Pauli label");
    }
}

inline Vec basis_ket(int i, int d) {
    if (i < 0 || i >= d) throw std::invalid_argument("basis_ket: index out of range");
    Vec v = Vec::Zero(d);
    v(i) = 1.0;
    return v;
}

inline Mat projector(const Vec& psi) { return psi * psi.adjoint(); }

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

inline Mat anticommutator(const Mat& a, const Mat& b) { return a * b + b * a; }

struct EigenSystem {
    RVec values;  // ascending
    Mat vectors;  // columns are eigenvectors, unitary
};

/// Hermitian eigendecomposition. Rejects inputs whose anti-Hermitian part
/// exceeds `tol` in max-norm (relative to max(1, |A|)), then symmetrizes.
inline EigenSystem herm_eig(const Mat& a, double tol = kHermTol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("herm_eig: non-square input");
    if (!is_hermitian(a, tol))
        throw std::invalid_argument("herm_eig: input is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Mat> solver(hermitize(a));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("herm_eig: eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

struct SupportSqrt {
    Mat root;        // gamma^{1/2} restricted to the support
    Mat inv_root;    // gamma^{-1/2} on the support, zero off it
    Mat projector;   // projector onto eigenvectors above the cutoff
    int rank = 0;
    RVec values;     // full spectrum, ascending (diagnostic)
    Mat vectors;
};

/// Square root, inverse square root and support projector of a PSD operator.
/// `eps` is the eigenvalue cutoff relative to the largest eigenvalue;
/// eigenvalues at or below the cutoff are treated as exactly zero.
inline SupportSqrt sqrt_on_support(const Mat& rho, double eps = kSupportEps) {
    EigenSystem es = herm_eig(rho);
    const int d = static_cast<int>(rho.rows());
    const double lmax = es.values.size() ? es.values.maxCoeff() : 0.0;
    const double cutoff = eps * std::max(lmax, 0.0);

    SupportSqrt out;
    out.values = es.values;
    out.vectors = es.vectors;
    out.root = Mat::Zero(d, d);
    out.inv_root = Mat::Zero(d, d);
    out.projector = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double l = es.values(i);
        if (l <= cutoff) continue;
        const Mat p = es.vectors.col(i) * es.vectors.col(i).adjoint();
        out.root += std::sqrt(l) * p;
        out.inv_root += (1.0 / std::sqrt(l)) * p;
        out.projector += p;
        ++out.rank;
    }
    return out;
}

inline Mat tensor(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat tensor(const std::vector<Mat>& factors) {
    if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
    Mat out = factors.front();
    for (size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
    return out;
}

inline Vec tensor(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (int i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Partial trace over the factors not listed in `keep`. The leftmost factor
/// is the most significant index. Kept factors retain their original order.
inline Mat partial_trace(const Mat& a, const std::vector<int>& dims,
                         const std::vector<int>& keep) {
    const int n = static_cast<int>(dims.size());
    long prod = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("partial_trace: nonpositive factor dim");
        prod *= d;
    }
    if (prod != a.rows() || a.rows() != a.cols())
        throw std::invalid_argument("partial_trace: dims inconsistent with operator");

    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: keep index out of range");
        kept[k] = true;
    }

    std::vector<long> stride(n, 1);
    for (int f = n - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

    long dkeep = 1, dtrace = 1;
    std::vector<int> keep_f, trace_f;
    for (int f = 0; f < n; ++f) {
        if (kept[f]) { dkeep *= dims[f]; keep_f.push_back(f); }
        else         { dtrace *= dims[f]; trace_f.push_back(f); }
    }

    // base index of a combined (kept, traced) multi-index
    auto unpack = [&](long idx, const std::vector<int>& fs) {
        long base = 0;
        for (int i = static_cast<int>(fs.size()) - 1; i >= 0; --i) {
            const int f = fs[i];
            base += (idx % dims[f]) * stride[f];
            idx /= dims[f];
        }
        return base;
    };

    Mat out = Mat::Zero(dkeep, dkeep);
    for (long r = 0; r < dkeep; ++r) {
        const long rb = unpack(r, keep_f);
        for (long c = 0; c < dkeep; ++c) {
            const long cb = unpack(c, keep_f);
            Complex s = 0.0;
            for (long t = 0; t < dtrace; ++t) {
                const long tb = unpack(t, trace_f);
                s += a(rb + tb, cb + tb);
            }
            out(r, c) = s;
        }
    }
    return out;
}

inline double purity(const Mat& rho) { return (rho * rho).trace().real(); }

inline double trace_distance(const Mat& rho, const Mat& sigma) {
    EigenSystem es = herm_eig(hermitize(rho - sigma), 1e-6);
    return 0.5 * es.values.cwiseAbs().sum();
}

inline double min_eigenvalue(const Mat& rho) {
    return herm_eig(rho, 1e-6).values.minCoeff();
}

/// Uhlmann fidelity F(rho, sigma) = Tr sqrt(sigma^{1/2} rho sigma^{1/2}).
/// Square-root convention: F of two pure states is |<psi|phi>|.
inline double uhlmann_fidelity(const Mat& rho, const Mat& sigma) {
    const Mat s = sqrt_on_support(hermitize(sigma), 1e-14).root;
    EigenSystem es = herm_eig(hermitize(s * hermitize(rho) * s), 1e-6);
    double f = 0.0;
    for (int i = 0; i < es.values.size(); ++i)
        f += std::sqrt(std::max(es.values(i), 0.0));
    return std::min(f, 1.0 + 1e-12);
}

/// Checks the density-matrix contract (Hermitian, unit trace, eigenvalues
/// above -tol). Returns false instead of throwing.
inline bool is_density_matrix(const Mat& rho, double tol = 1e-8) {
    if (rho.rows() != rho.cols()) return false;
    if (!is_hermitian(rho, tol)) return false;
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        return false;
    return herm_eig(hermitize(rho)).values.minCoeff() >= -tol;
}

inline std::vector<std::string> pauli_labels(int n_qubits) {
    std::vector<std::string> labels{""};
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<std::string> next;
        next.reserve(labels.size() * 4);
        for (const auto& l : labels)
            for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(l + c);
        labels.swap(next);
    }
    return labels;
}

/// Tensor product of single-qubit Paulis; leftmost character acts on the most
/// significant qubit.
inline Mat pauli_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("pauli_string: empty label");
    Mat out = pauli(s[0]);
    for (size_t i = 1; i < s.size(); ++i) out = tensor(out, pauli(s[i]));
    return out;
}

struct PauliDecomposition {
    int n_qubits = 0;
    std::map<std::string, Complex> coeffs;

    Mat reconstruct() const {
        const int d = 1 << n_qubits;
        Mat out = Mat::Zero(d, d);
        for (const auto& [label, c] : coeffs) out += c * pauli_string(label);
        return out;
    }
};

/// A = sum_P c_P P with c_P = Tr(P A) / 2^N. Hermitian A yields real c_P.
inline PauliDecomposition pauli_decompose(const Mat& a) {
    const int d = static_cast<int>(a.rows());
    if (a.rows() != a.cols()) throw std::invalid_argument("pauli_decompose: non-square");
    int n = 0;
    while ((1 << n) < d) ++n;
    if ((1 << n) != d)
        throw std::invalid_argument("pauli_decompose: dimension is not a power of two");
    PauliDecomposition out;
    out.n_qubits = n;
    for (const auto& label : pauli_labels(n))
        out.coeffs[label] = (pauli_string(label) * a).trace() / static_cast<double>(d);
    return out;
}

}  // namespace petzlab
