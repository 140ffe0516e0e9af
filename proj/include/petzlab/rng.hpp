#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "petzlab/operators.hpp"

namespace petzlab {

/// Deterministic RNG. Gaussian variates are produced by an explicit
/// Box-Muller transform so streams do not depend on the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0, 1)
        return (engine_() >> 11) * (1.0 / 9007199254740992.0);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Complex cnormal() { return Complex(normal(), normal()); }

    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline Mat random_ginibre(int rows, int cols, Rng& rng) {
    Mat g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = rng.cnormal();
    return g;
}

inline Mat random_hermitian(int d, Rng& rng) {
    return hermitize(random_ginibre(d, d, rng));
}

/// Haar-random pure state.
inline Vec haar_state(int d, Rng& rng) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.cnormal();
    return v / v.norm();
}

/// Haar-random unitary via QR of a Ginibre matrix with phase fixing.
inline Mat random_unitary(int d, Rng& rng) {
    Eigen::HouseholderQR<Mat> qr(random_ginibre(d, d, rng));
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        Complex diag = r(i, i);
        q.col(i) *= (std::abs(diag) > 0) ? diag / std::abs(diag) : 1.0;
    }
    return q;
}

/// Random density matrix; full rank unless `rank` restricts it.
inline Mat random_density(int d, Rng& rng, int rank = -1) {
    const int k = rank <= 0 ? d : rank;
    const Mat g = random_ginibre(d, k, rng);
    Mat rho = g * g.adjoint();
    return rho / rho.trace().real();
}

}  // namespace petzlab
