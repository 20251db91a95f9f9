#pragma once

// Riemannian gradient descent on the complex Stiefel manifold
// St(N, r) = { V in C^{N x r} : V^dagger V = I }.
//
// Metric: Re Tr(A^dagger B). Tangent projection of a Euclidean gradient G is
// G - V herm(V^dagger G); retraction is the positive-diagonal QR factor.
// Step lengths start from the Barzilai-Borwein estimate and are cut back
// until the Armijo condition holds.

#include "random.hpp"

#include <functional>

namespace roofent {

inline Matrix hermitian_part(const Matrix &a) { return 0.5 * (a + a.adjoint()); }

inline Matrix stiefel_tangent(const Matrix &v, const Matrix &euclid_grad) {
    return euclid_grad - v * hermitian_part(v.adjoint() * euclid_grad);
}

inline Matrix stiefel_retract(const Matrix &v, const Matrix &step) { return orthonormalize_columns(v + step); }

inline double stiefel_violation(const Matrix &v) {
    return (v.adjoint() * v - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

inline double real_inner(const Matrix &a, const Matrix &b) { return (a.adjoint() * b).trace().real(); }

struct StiefelOptions {
    int max_iters    = 3000;
    double grad_tol  = 1e-8;
    double value_tol = 1e-9;
    int stall_window = 25; // iterations of |df| <= value_tol before stopping
};

struct StiefelRun {
    Matrix point;
    double value     = 0.0;
    double grad_norm = 0.0;
    int iterations   = 0;
    bool converged   = false;
};

/// Value and Euclidean gradient in real-coordinate form
/// (d f / d Re V + i d f / d Im V).
using ValueAndGradient = std::function<std::pair<double, Matrix>(const Matrix &)>;

inline StiefelRun minimize_on_stiefel(const ValueAndGradient &fg, Matrix start, const StiefelOptions &opts) {
    StiefelRun run;
    run.point         = std::move(start);
    auto [f, g]       = fg(run.point);
    Matrix xi         = stiefel_tangent(run.point, g);
    double gnorm2     = xi.squaredNorm();
    Matrix prev_point = run.point;
    Matrix prev_xi    = xi;
    double step       = 1.0 / std::max(1.0, std::sqrt(gnorm2));
    int stalled       = 0;

    for(int it = 0; it < opts.max_iters; ++it) {
        run.iterations = it;
        if(std::sqrt(gnorm2) < opts.grad_tol) {
            run.converged = true;
            break;
        }
        if(it > 0) {
            const Matrix s = run.point - prev_point;
            const Matrix y = xi - prev_xi;
            const double sy = std::abs(real_inner(s, y));
            if(sy > 1e-300) step = std::clamp(s.squaredNorm() / sy, 1e-12, 1e4);
        }
        // backtracking line search
        Matrix trial;
        double f_trial = 0.0;
        bool accepted  = false;
        for(int bt = 0; bt < 60; ++bt) {
            trial   = stiefel_retract(run.point, -step * xi);
            f_trial = fg(trial).first;
            if(f_trial <= f - 1e-4 * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if(!accepted) {
            // no descent possible at machine precision
            run.converged = true;
            break;
        }
        prev_point = run.point;
        prev_xi    = xi;
        run.point  = std::move(trial);
        auto fg_new = fg(run.point);
        const double df = f - fg_new.first;
        f        = fg_new.first;
        xi       = stiefel_tangent(run.point, fg_new.second);
        gnorm2   = xi.squaredNorm();
        stalled  = (df <= opts.value_tol) ? stalled + 1 : 0;
        if(stalled >= opts.stall_window) {
            run.iterations = it + 1;
            run.converged  = true;
            break;
        }
        run.iterations = it + 1;
    }
    run.value     = f;
    run.grad_norm = std::sqrt(gnorm2);
    if(run.grad_norm < opts.grad_tol) run.converged = true;
    return run;
}

} // namespace roofent
