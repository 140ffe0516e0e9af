#pragma once

#include <functional>

#include "petzlab/rng.hpp"

namespace petzlab {

using Objective = std::function<double(const RVec&)>;

struct NelderMeadOptions {
    int max_iters = 4000;
    double init_step = 0.1;
    double f_tol = 1e-12;   // absolute spread of simplex values
    double x_tol = 1e-10;   // max vertex distance from the best point
};

struct MinimizeResult {
    RVec x;
    double f = 0.0;
    long long evals = 0;
    int iters = 0;
    bool converged = false;
};

/// Nelder-Mead downhill simplex (reflection / expansion / contraction /
/// shrink with the standard coefficients).
inline MinimizeResult nelder_mead(const Objective& f, const RVec& x0,
                                  const NelderMeadOptions& opts = {}) {
    const int n = static_cast<int>(x0.size());
    long long evals = 0;
    auto eval = [&](const RVec& x) {
        ++evals;
        return f(x);
    };

    std::vector<RVec> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 1; i <= n; ++i) xs[i](i - 1) += opts.init_step;
    for (int i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

    std::vector<int> order(n + 1);
    MinimizeResult res;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order[0], worst = order[n], second_worst = order[n - 1];

        double spread = fs[worst] - fs[best];
        double extent = 0.0;
        for (int i = 0; i <= n; ++i)
            extent = std::max(extent, (xs[i] - xs[best]).lpNorm<Eigen::Infinity>());
        if (spread < opts.f_tol || extent < opts.x_tol) {
            res.converged = true;
            break;
        }

        RVec centroid = RVec::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += xs[i];
        centroid /= n;

        const RVec xr = centroid + (centroid - xs[worst]);
        const double fr = eval(xr);
        if (fr < fs[best]) {
            const RVec xe = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = eval(xe);
            if (fe < fr) { xs[worst] = xe; fs[worst] = fe; }
            else         { xs[worst] = xr; fs[worst] = fr; }
        } else if (fr < fs[second_worst]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            const RVec xc = centroid + 0.5 * ((outside ? xr : xs[worst]) - centroid);
            const double fc = eval(xc);
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
                    fs[i] = eval(xs[i]);
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    res.x = xs[best];
    res.f = fs[best];
    res.evals = evals;
    res.iters = iter;
    return res;
}

struct PolishOptions {
    int max_iters = 40;
    double fd_step = 1e-5;   // central-difference step
    double grad_tol = 1e-9;
};

/// Quasi-Newton (BFGS) refinement with central-difference gradients and a
/// backtracking Armijo line search.
inline MinimizeResult bfgs_polish(const Objective& f, const RVec& x0,
                                  const PolishOptions& opts = {}) {
    const int n = static_cast<int>(x0.size());
    long long evals = 0;
    auto eval = [&](const RVec& x) {
        ++evals;
        return f(x);
    };
    auto gradient = [&](const RVec& x) {
        RVec g(n);
        RVec xp = x;
        for (int i = 0; i < n; ++i) {
            const double xi = x(i);
            xp(i) = xi + opts.fd_step;
            const double fp = eval(xp);
            xp(i) = xi - opts.fd_step;
            const double fm = eval(xp);
            xp(i) = xi;
            g(i) = (fp - fm) / (2.0 * opts.fd_step);
        }
        return g;
    };

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    RVec x = x0;
    double fx = eval(x);
    RVec g = gradient(x);

    MinimizeResult res;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        if (g.norm() < opts.grad_tol) {
            res.converged = true;
            break;
        }
        RVec p = -(h_inv * g);
        if (p.dot(g) >= 0) p = -g;  // reset on a non-descent direction

        double step = 1.0;
        double f_new = fx;
        RVec x_new = x;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            x_new = x + step * p;
            f_new = eval(x_new);
            if (f_new <= fx + 1e-4 * step * p.dot(g)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || f_new >= fx) break;

        const RVec g_new = gradient(x_new);
        const RVec s = x_new - x;
        const RVec y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            const Eigen::MatrixXd v = eye - (s * y.transpose()) / sy;
            h_inv = v * h_inv * v.transpose() + (s * s.transpose()) / sy;
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    res.x = x;
    res.f = fx;
    res.evals = evals;
    res.iters = iter;
    return res;
}

}  // namespace petzlab
