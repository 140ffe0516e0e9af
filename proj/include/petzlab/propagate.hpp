#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <functional>

#include "petzlab/lindblad.hpp"

namespace petzlab {

/// Thrown when integration produces non-finite entries; carries the last
/// time a valid state was seen.
struct NumericError : std::runtime_error {
    double last_good_time;
    NumericError(const std::string& what, double t)
        : std::runtime_error(what + " (last good t = " + std::to_string(t) + ")"),
          last_good_time(t) {}
};

/// Dense matrix exponential (scaling-and-squaring with Pade approximation).
inline Mat expm_dense(const Mat& a) { return a.exp(); }

/// exp(dt * G) applied to x, where G is a linear action on operators.
/// Evaluated by truncated Taylor series with sub-stepping chosen from the
/// norm bound, exact to machine precision.
template <typename Action>
Mat expm_apply(Action&& gen, const Mat& x, double dt, double norm_bound) {
    const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(dt) * norm_bound / 0.5)));
    const double h = dt / substeps;
    Mat y = x;
    for (int s = 0; s < substeps; ++s) {
        Mat term = y;
        Mat acc = y;
        for (int k = 1; k <= 48; ++k) {
            term = (h / k) * gen(term);
            acc += term;
            if (term.norm() <= 1e-16 * acc.norm()) break;
        }
        y = acc;
    }
    return y;
}

/// Uniform-grid trajectory of density matrices with step metadata and
/// integration diagnostics.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Mat> states;
    double max_trace_defect = 0.0;  // |Tr(rho) - 1| before renormalization
    double min_eig_seen = 0.0;      // negativity diagnostic at sampled nodes

    int steps() const { return static_cast<int>(states.size()) - 1; }
    double time(int i) const { return t0 + dt * i; }
    double tau() const { return dt * steps(); }
    const Mat& front() const { return states.front(); }
    const Mat& back() const { return states.back(); }
};

struct PropagateOptions {
    bool renormalize = true;
    int diag_stride = 0;  // 0 = automatic; min-eigenvalue sampling stride
};

/// Core stepper: per-step propagator exp(dt * S(t_mid)) with the generator
/// sampled at the step midpoint, applied as an exponential action. Calls
/// visit(node_index, t, rho) for every node including the initial one.
template <typename Visit>
void propagate_visit(const Lindbladian& lind, const Mat& rho0, double t0, double t1,
                     int steps, const PropagateOptions& opts, Visit&& visit,
                     double* max_trace_defect = nullptr) {
    lind.validate();
    if (steps < 1) throw std::invalid_argument("propagate: steps must be >= 1");
    if (!(t1 > t0)) throw std::invalid_argument("propagate: need t1 > t0");
    if (rho0.rows() != lind.dim || rho0.cols() != lind.dim)
        throw std::invalid_argument("propagate: state dimension mismatch");

    const double dt = (t1 - t0) / steps;
    Mat rho = rho0;
    double worst_defect = 0.0;
    visit(0, t0, rho);
    for (int i = 0; i < steps; ++i) {
        const double tm = t0 + dt * (i + 0.5);
        const double bound = generator_norm_bound(lind, tm);
        if (!std::isfinite(bound) || bound * std::abs(dt) > 1e12)
            throw NumericError("propagate: generator norm blew up", t0 + dt * i);
        rho = expm_apply([&](const Mat& x) { return apply_generator(lind, x, tm); },
                         rho, dt, bound);
        if (!rho.allFinite())
            throw NumericError("propagate: non-finite state entries", t0 + dt * i);
        rho = hermitize(rho);
        const double tr = rho.trace().real();
        worst_defect = std::max(worst_defect, std::abs(tr - 1.0));
        if (opts.renormalize && tr != 0.0) rho /= tr;
        visit(i + 1, t0 + dt * (i + 1), rho);
    }
    if (max_trace_defect) *max_trace_defect = worst_defect;
}

inline Trajectory propagate(const Lindbladian& lind, const Mat& rho0, double t0,
                            double t1, int steps, const PropagateOptions& opts = {}) {
    Trajectory traj;
    traj.t0 = t0;
    traj.dt = (t1 - t0) / steps;
    traj.states.reserve(steps + 1);
    propagate_visit(lind, rho0, t0, t1, steps, opts,
                    [&](int, double, const Mat& rho) { traj.states.push_back(rho); },
                    &traj.max_trace_defect);

    const int stride = opts.diag_stride > 0
                           ? opts.diag_stride
                           : (lind.dim <= 8 ? std::max(1, steps / 4096) : std::max(1, steps / 256));
    double min_eig = 0.0;
    for (int i = 0; i < static_cast<int>(traj.states.size()); i += stride)
        min_eig = std::min(min_eig, herm_eig(traj.states[i]).values.minCoeff());
    traj.min_eig_seen = min_eig;
    return traj;
}

/// Time-ordered channel as a dense superoperator: the product of per-step
/// midpoint exponentials. t1 == t0 yields the identity channel.
inline Superop channel_from(const Lindbladian& lind, double t0, double t1, int steps) {
    lind.validate();
    if (t1 == t0) return Superop::identity(lind.dim);
    if (steps < 1) throw std::invalid_argument("channel_from: steps must be >= 1");
    if (!(t1 > t0)) throw std::invalid_argument("channel_from: need t1 > t0");
    const double dt = (t1 - t0) / steps;
    Superop total = Superop::identity(lind.dim);
    for (int i = 0; i < steps; ++i) {
        const double tm = t0 + dt * (i + 0.5);
        const Superop s = generator_superop(lind, tm);
        total.m = expm_dense(dt * s.m) * total.m;
        if (!total.m.allFinite())
            throw NumericError("channel_from: non-finite propagator", t0 + dt * i);
    }
    return total;
}

/// Unitary schedule U_t = T[exp(-i int_0^t H dt')] integrated on the same
/// grid as the trajectory stepper; node i holds U at t = t0 + i dt.
inline std::vector<Mat> unitary_schedule(const Schedule& h, double t0, double t1,
                                         int steps, int dim) {
    const double dt = (t1 - t0) / steps;
    std::vector<Mat> us;
    us.reserve(steps + 1);
    us.push_back(identity(dim));
    const Complex mi(0.0, -1.0);
    for (int i = 0; i < steps; ++i) {
        const double tm = t0 + dt * (i + 0.5);
        const Mat hm = h.empty() ? Mat(Mat::Zero(dim, dim)) : h.at(tm);
        us.push_back(expm_dense(mi * dt * hm) * us.back());
    }
    return us;
}

}  // namespace petzlab
