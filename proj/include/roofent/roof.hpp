#pragma once

// Convex and concave roofs of the restricted entropy
//
//     E(rho, A) = inf  sum_i l_i S(rho_i |_A)     (entanglement of formation)
//     C(rho, A) = sup  sum_i l_i S(rho_i |_A)     (concave roof)
//
// over decompositions rho = sum_i l_i rho_i. Both extrema are attained on pure
// decompositions, which are parameterised by isometries V (N x r) through
//
//     psi_i = sum_j V_ij sqrt(p_j) e_j          (p_j, e_j eigenpairs of rho)
//
// so the search space is the complex Stiefel manifold.

#include "stiefel.hpp"
#include "subalgebra.hpp"

#include <array>
#include <future>
#include <optional>
#include <thread>

namespace roofent {

enum class RoofDirection { min, max };

inline const char *to_string(RoofDirection d) { return d == RoofDirection::min ? "min" : "max"; }

/// Weighted decomposition of `target`. Pure members keep their normalised
/// state vector alongside the density matrix.
class Ensemble {
  public:
    Ensemble() = default;
    Ensemble(std::vector<double> weights, std::vector<Matrix> members, Matrix target,
             std::vector<std::optional<Vector>> pure_vectors = {})
        : weights_(std::move(weights)), members_(std::move(members)), pure_(std::move(pure_vectors)),
          target_(std::move(target)) {
        if(pure_.empty()) pure_.resize(members_.size());
        if(weights_.size() != members_.size() || pure_.size() != members_.size())
            throw DimensionMismatch("ensemble: weight/member count mismatch");
        double sum = 0.0;
        for(double w : weights_) {
            if(w < 0.0) throw InvalidState("ensemble: negative weight " + detail::fmt_double(w));
            sum += w;
        }
        if(std::abs(sum - 1.0) > 1e-9) throw InvalidState("ensemble: weights sum to " + detail::fmt_double(sum));
        for(const auto &m : members_)
            if(m.rows() != target_.rows()) throw DimensionMismatch("ensemble: member dimension differs from target");
        if(reconstruction_error() > 1e-8)
            throw InvalidState("ensemble does not reconstruct its target (error " +
                               detail::fmt_double(reconstruction_error()) + ")");
    }

    /// Ensemble from unnormalised vectors: weights are squared norms.
    static Ensemble from_vectors(const std::vector<Vector> &psis, const Matrix &target, double prune_below = 0.0) {
        std::vector<double> w;
        std::vector<Matrix> m;
        std::vector<std::optional<Vector>> p;
        for(const auto &psi : psis) {
            const double t = psi.squaredNorm();
            if(t <= prune_below || t == 0.0) continue;
            const Vector v = psi / std::sqrt(t);
            w.push_back(t);
            m.emplace_back(v * v.adjoint());
            p.emplace_back(v);
        }
        return Ensemble(std::move(w), std::move(m), target, std::move(p));
    }

    [[nodiscard]] std::size_t size() const { return weights_.size(); }
    [[nodiscard]] const std::vector<double> &weights() const { return weights_; }
    [[nodiscard]] const std::vector<Matrix> &members() const { return members_; }
    [[nodiscard]] const std::vector<std::optional<Vector>> &pure_vectors() const { return pure_; }
    [[nodiscard]] const Matrix &target() const { return target_; }
    [[nodiscard]] bool all_pure() const {
        return std::all_of(pure_.begin(), pure_.end(), [](const auto &v) { return v.has_value(); });
    }
    [[nodiscard]] Matrix mixture() const {
        Matrix s = Matrix::Zero(target_.rows(), target_.cols());
        for(std::size_t i = 0; i < size(); ++i) s += weights_[i] * members_[i];
        return s;
    }
    [[nodiscard]] double reconstruction_error() const {
        if(target_.size() == 0) return 0.0;
        return (mixture() - target_).cwiseAbs().maxCoeff();
    }
    /// sqrt(l_i) |v_i> for pure members; throws on mixed members.
    [[nodiscard]] std::vector<Vector> scaled_vectors() const {
        std::vector<Vector> out;
        for(std::size_t i = 0; i < size(); ++i) {
            if(!pure_[i]) throw InvalidState("ensemble member " + std::to_string(i) + " is not pure");
            out.emplace_back(std::sqrt(weights_[i]) * *pure_[i]);
        }
        return out;
    }

  private:
    std::vector<double> weights_;
    std::vector<Matrix> members_;
    std::vector<std::optional<Vector>> pure_;
    Matrix target_;
};

/// N x r matrix with orthonormal columns (within 1e-10).
class StiefelPoint {
  public:
    explicit StiefelPoint(Matrix v) : v_(std::move(v)) {
        if(v_.rows() < v_.cols()) throw DimensionMismatch("Stiefel point needs rows >= cols");
        const double err = stiefel_violation(v_);
        if(err > 1e-10) throw InvalidState("matrix columns are not orthonormal (error " + detail::fmt_double(err) + ")");
    }
    [[nodiscard]] const Matrix &matrix() const { return v_; }
    [[nodiscard]] Eigen::Index members() const { return v_.rows(); }
    [[nodiscard]] Eigen::Index rank() const { return v_.cols(); }

  private:
    Matrix v_;
};

/// Spectral data of a state needed by the HJW map: columns sqrt(p_j) e_j for
/// the eigenvalues above the rank threshold.
struct HjwFrame {
    Matrix scaled_eigvecs; // dim x r
    RealVector eigenvalues;
    Matrix target;
    [[nodiscard]] Eigen::Index rank() const { return scaled_eigvecs.cols(); }
    [[nodiscard]] Eigen::Index dim() const { return scaled_eigvecs.rows(); }
};

inline HjwFrame make_hjw_frame(const Matrix &rho) {
    const EigenDecomposition ed = eigh(rho);
    if(ed.values.size() > 0 && ed.values.minCoeff() < -tol::negativity)
        throw InvalidState("state has negative eigenvalue " + detail::fmt_double(ed.values.minCoeff()));
    std::vector<Eigen::Index> keep;
    for(Eigen::Index j = ed.values.size() - 1; j >= 0; --j)
        if(ed.values(j) > tol::rank) keep.push_back(j);
    HjwFrame f;
    f.scaled_eigvecs.resize(rho.rows(), static_cast<Eigen::Index>(keep.size()));
    f.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
    for(std::size_t c = 0; c < keep.size(); ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        f.eigenvalues(col) = ed.values(keep[c]);
        f.scaled_eigvecs.col(col) = std::sqrt(ed.values(keep[c])) * ed.vectors.col(keep[c]);
    }
    f.target = rho;
    return f;
}

/// Numerical rank (eigenvalues above 1e-9).
inline Eigen::Index state_rank(const Matrix &rho) { return make_hjw_frame(rho).rank(); }

/// Unnormalised members psi_i as the columns of C V^T.
inline Matrix hjw_members(const Matrix &v, const HjwFrame &frame) {
    if(v.cols() != frame.rank())
        throw DimensionMismatch("HJW: isometry has " + std::to_string(v.cols()) + " columns but the state has rank " +
                                std::to_string(frame.rank()));
    return frame.scaled_eigvecs * v.transpose();
}

inline Ensemble hjw_ensemble(const StiefelPoint &v, const Matrix &rho, double prune_below = 0.0) {
    const HjwFrame frame = make_hjw_frame(rho);
    const Matrix psis    = hjw_members(v.matrix(), frame);
    std::vector<Vector> cols;
    for(Eigen::Index i = 0; i < psis.cols(); ++i) cols.emplace_back(psis.col(i));
    return Ensemble::from_vectors(cols, rho, prune_below);
}

inline constexpr double kMemberWeightFloor = 1e-14;
// Logs in the gradient run over every positive eigenvalue, like the value
// does. An absolute cutoff here stalls the line search near support
// boundaries, where small-weight members carry eigenvalues far below it.
inline constexpr double kMemberLogFloor = 0.0;

/// ||psi||^2 S(restrict(psi psi^dagger) / ||psi||^2) for an unnormalised psi.
inline double member_value(const Vector &psi, const SubalgebraSpec &a) {
    const double t = psi.squaredNorm();
    if(t < kMemberWeightFloor) return 0.0;
    return block_entropy(restrict_outer(psi, psi, a)) + t * std::log(t);
}

/// Wirtinger gradient d/d conj(psi) of member_value:
///     F(psi) = -R*(ln R(psi psi^dagger)) psi + ln ||psi||^2 psi
/// with the logarithm taken on the support.
inline Vector member_gradient(const Vector &psi, const SubalgebraSpec &a) {
    const double t = psi.squaredNorm();
    if(t < kMemberWeightFloor) return Vector::Zero(psi.size());
    const BlockOperator lx = block_log_on_support(restrict_outer(psi, psi, a), kMemberLogFloor);
    return -adjoint_restrict_apply(lx, a, psi) + std::log(t) * psi;
}

namespace detail {
inline double members_value(const Matrix &psis, const SubalgebraSpec &a) {
    double f = 0.0;
    for(Eigen::Index i = 0; i < psis.cols(); ++i) f += member_value(psis.col(i), a);
    return f;
}

inline std::pair<double, Matrix> value_and_gradient(const Matrix &v, const HjwFrame &frame, const SubalgebraSpec &a) {
    const Matrix psis = hjw_members(v, frame);
    Matrix fmat(psis.rows(), psis.cols());
    double f = 0.0;
    for(Eigen::Index i = 0; i < psis.cols(); ++i) {
        const Vector psi = psis.col(i);
        const double t   = psi.squaredNorm();
        if(t < kMemberWeightFloor) {
            fmat.col(i).setZero();
            continue;
        }
        const BlockOperator x  = restrict_outer(psi, psi, a);
        f += block_entropy(x) + t * std::log(t);
        const BlockOperator lx = block_log_on_support(x, kMemberLogFloor);
        fmat.col(i) = -adjoint_restrict_apply(lx, a, psi) + std::log(t) * psi;
    }
    // G_ij = c_j^dagger F_i, real-coordinate gradient is 2G
    const Matrix g = 2.0 * (frame.scaled_eigvecs.adjoint() * fmat).transpose();
    return {f, g};
}
} // namespace detail

/// Sum_i l_i S(psi_i|_A) for the decomposition defined by V (the direction
/// only matters to callers; the value is the same functional).
inline double roof_objective(const StiefelPoint &v, const Matrix &rho, const SubalgebraSpec &a) {
    return detail::members_value(hjw_members(v.matrix(), make_hjw_frame(rho)), a);
}

/// Euclidean gradient of roof_objective with respect to V in real-coordinate
/// form: entry (i, j) is df/dRe V_ij + i df/dIm V_ij.
inline Matrix roof_gradient(const StiefelPoint &v, const Matrix &rho, const SubalgebraSpec &a) {
    return detail::value_and_gradient(v.matrix(), make_hjw_frame(rho), a).second;
}

/// Riemannian (tangent-projected) gradient at V.
inline Matrix roof_tangent_gradient(const StiefelPoint &v, const Matrix &rho, const SubalgebraSpec &a) {
    return stiefel_tangent(v.matrix(), roof_gradient(v, rho, a));
}

/// Least-squares Lagrange multiplier check of F(psi_i) + M psi_i = 0 over
/// Hermitian M. Returns the residual norm divided by max(sum_i ||F(psi_i)||, 1);
/// the floor keeps optima sitting on a support boundary, where every F
/// vanishes, from reading as non-stationary.
inline double stationarity_residual(const Ensemble &ens, const SubalgebraSpec &a) {
    const std::vector<Vector> psis = ens.scaled_vectors();
    const Eigen::Index d = ens.target().rows();
    std::vector<Vector> fs;
    double fnorm = 0.0;
    for(const auto &psi : psis) {
        fs.push_back(member_gradient(psi, a));
        fnorm += fs.back().norm();
    }
    if(fnorm < 1e-300) return 0.0;
    const double denom = std::max(fnorm, 1.0);
    const auto n    = static_cast<Eigen::Index>(psis.size());
    const Eigen::Index params = d * d;
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(2 * d * n, params);
    Eigen::VectorXd rhs(2 * d * n);
    // Hermitian basis: E_kk, E_kl + E_lk, i(E_kl - E_lk) for k < l
    Eigen::Index p = 0;
    auto add_basis = [&](const Matrix &b) {
        for(Eigen::Index i = 0; i < n; ++i) {
            const Vector bv = b * psis[static_cast<std::size_t>(i)];
            lhs.block(2 * d * i, p, d, 1)     = bv.real();
            lhs.block(2 * d * i + d, p, d, 1) = bv.imag();
        }
        ++p;
    };
    for(Eigen::Index k = 0; k < d; ++k) {
        Matrix b = Matrix::Zero(d, d);
        b(k, k)  = 1.0;
        add_basis(b);
    }
    for(Eigen::Index k = 0; k < d; ++k)
        for(Eigen::Index l = k + 1; l < d; ++l) {
            Matrix b = Matrix::Zero(d, d);
            b(k, l) = b(l, k) = 1.0;
            add_basis(b);
            b(k, l) = cplx(0, 1);
            b(l, k) = cplx(0, -1);
            add_basis(b);
        }
    for(Eigen::Index i = 0; i < n; ++i) {
        rhs.segment(2 * d * i, d)     = -fs[static_cast<std::size_t>(i)].real();
        rhs.segment(2 * d * i + d, d) = -fs[static_cast<std::size_t>(i)].imag();
    }
    const Eigen::VectorXd m = lhs.completeOrthogonalDecomposition().solve(rhs);
    return (lhs * m - rhs).norm() / denom;
}

struct RoofOptions {
    Eigen::Index member_count = 0; // 0 selects rank^2
    int restarts              = 32;
    int max_iters             = 3000;  // per restart
    int polish_iters          = 50000; // final run from the best restart; badly conditioned states need it
    double grad_tol           = 1e-8;
    double value_tol          = 1e-9;
    std::uint64_t seed        = 0;
    RoofDirection direction   = RoofDirection::min;
    int threads               = 1;
};

struct RoofResult {
    double value = 0.0;
    Ensemble ensemble;
    double stationarity_residual = 0.0;
    int restarts_agreeing        = 0;
    int iterations               = 0;
    int best_restart             = -1;
    bool converged               = true;
    std::vector<std::string> flags;
    Matrix isometry; // best V (empty on the pure fast path)
};

namespace detail {
inline StiefelOptions stiefel_options(const RoofOptions &o) {
    StiefelOptions s;
    s.max_iters = o.max_iters;
    s.grad_tol  = o.grad_tol;
    s.value_tol = o.value_tol;
    return s;
}

// Runs fn(k) for k in [0, count) on up to `threads` workers; results are
// stored by index so the outcome does not depend on scheduling.
template<class T, class Fn>
std::vector<T> run_indexed(int count, int threads, Fn fn) {
    std::vector<T> out(static_cast<std::size_t>(count));
    if(threads <= 1 || count <= 1) {
        for(int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = fn(k);
        return out;
    }
    const int workers = std::min(threads, count);
    std::vector<std::thread> pool;
    for(int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for(int k = w; k < count; k += workers) out[static_cast<std::size_t>(k)] = fn(k);
        });
    for(auto &t : pool) t.join();
    return out;
}
} // namespace detail

/// Multi-start Riemannian gradient descent (direction=min) or ascent
/// (direction=max) over the HJW parameterisation.
inline RoofResult optimize_roof(const Matrix &rho_in, const SubalgebraSpec &a, const RoofOptions &opts) {
    const DensityMatrix rho(rho_in);
    if(rho.dim() != a.ambient_dim())
        throw DimensionMismatch("state dim " + std::to_string(rho.dim()) + " does not match subalgebra ambient dim " +
                                std::to_string(a.ambient_dim()));
    if(opts.restarts < 1) throw Error("roof: restarts must be >= 1");
    const HjwFrame frame = make_hjw_frame(rho.matrix());
    const Eigen::Index r = frame.rank();

    RoofResult res;
    if(r == 1) {
        const Vector psi = frame.scaled_eigvecs.col(0);
        res.ensemble     = Ensemble::from_vectors({psi}, rho.matrix());
        res.value        = restricted_entropy(res.ensemble.members()[0], a);
        res.stationarity_residual = 0.0;
        res.restarts_agreeing     = opts.restarts;
        res.iterations            = 0;
        res.best_restart          = 0;
        return res;
    }
    const Eigen::Index n = opts.member_count > 0 ? opts.member_count : r * r;
    if(n < r || n > 4 * r * r)
        throw Error("roof: member_count " + std::to_string(n) + " outside [" + std::to_string(r) + ", " +
                    std::to_string(4 * r * r) + "]");

    const double sign = opts.direction == RoofDirection::min ? 1.0 : -1.0;
    const ValueAndGradient fg = [&](const Matrix &v) {
        auto [f, g] = detail::value_and_gradient(v, frame, a);
        return std::pair<double, Matrix>{sign * f, sign * g};
    };
    const StiefelOptions sopts = detail::stiefel_options(opts);
    const auto runs = detail::run_indexed<StiefelRun>(opts.restarts, opts.threads, [&](int k) {
        CounterRng rng(opts.seed, static_cast<std::uint64_t>(k));
        return minimize_on_stiefel(fg, haar_isometry(rng, n, r), sopts);
    });

    int best = 0;
    for(int k = 1; k < opts.restarts; ++k)
        if(runs[static_cast<std::size_t>(k)].value < runs[static_cast<std::size_t>(best)].value) best = k;
    for(const auto &run : runs)
        if(std::abs(run.value - runs[static_cast<std::size_t>(best)].value) <= 10.0 * opts.value_tol) ++res.restarts_agreeing;
    // Polish the winner without the value-stall rule. Optima on a support
    // boundary approach it with components ~eps whose value change eps^2 ln eps
    // drops below value_tol long before the gradient eps ln eps is small.
    StiefelOptions polish = sopts;
    polish.value_tol      = 0.0;
    polish.max_iters      = opts.polish_iters;
    StiefelRun b          = minimize_on_stiefel(fg, runs[static_cast<std::size_t>(best)].point, polish);
    if(!(b.value <= runs[static_cast<std::size_t>(best)].value)) b = runs[static_cast<std::size_t>(best)];
    b.iterations += runs[static_cast<std::size_t>(best)].iterations;

    const Matrix psis = hjw_members(b.point, frame);
    std::vector<Vector> cols;
    for(Eigen::Index i = 0; i < psis.cols(); ++i) cols.emplace_back(psis.col(i));
    res.ensemble     = Ensemble::from_vectors(cols, rho.matrix(), 1e-12);
    res.value        = sign * b.value;
    res.iterations   = b.iterations;
    res.best_restart = best;
    res.converged    = b.converged;
    res.isometry     = b.point;
    if(!b.converged) res.flags.emplace_back("unconverged");
    res.stationarity_residual = stationarity_residual(res.ensemble, a);
    return res;
}

inline RoofResult entanglement_of_formation(const Matrix &rho, const SubalgebraSpec &a, RoofOptions opts = {}) {
    opts.direction = RoofDirection::min;
    RoofResult r   = optimize_roof(rho, a, opts);
    r.value        = std::max(0.0, r.value);
    return r;
}

inline RoofResult concave_roof(const Matrix &rho, const SubalgebraSpec &a, RoofOptions opts = {}) {
    opts.direction = RoofDirection::max;
    return optimize_roof(rho, a, opts);
}

// --- brute-force oracle -----------------------------------------------------

namespace detail {
inline Matrix u2_mixing(double theta, double alpha, double beta) {
    Matrix v(2, 2);
    v << std::cos(theta) * std::polar(1.0, alpha), std::sin(theta) * std::polar(1.0, beta),
        -std::sin(theta) * std::polar(1.0, -beta), std::cos(theta) * std::polar(1.0, -alpha);
    return v;
}
} // namespace detail

/// Derivative-free search for the roof value. Rank-2 states use an
/// exhaustive grid over two-member unitary mixings refined by pattern search;
/// other ranks use `budget` Haar-random isometries with r^2 members refined
/// coordinatewise. The result bounds the true minimum from above (or the
/// maximum from below).
inline double brute_force_roof(const Matrix &rho, const SubalgebraSpec &a, int budget, RoofDirection direction) {
    const HjwFrame frame = make_hjw_frame(DensityMatrix(rho).matrix());
    const Eigen::Index r = frame.rank();
    const double sign    = direction == RoofDirection::min ? 1.0 : -1.0;
    auto eval = [&](const Matrix &v) { return sign * detail::members_value(hjw_members(v, frame), a); };
    if(r == 1) return detail::members_value(frame.scaled_eigvecs, a);

    if(r == 2) {
        const int res = std::max(4, static_cast<int>(std::cbrt(static_cast<double>(std::max(budget, 64)))));
        std::array<double, 3> best{0, 0, 0};
        double fbest = std::numeric_limits<double>::infinity();
        for(int i = 0; i <= res; ++i)
            for(int j = 0; j < res; ++j)
                for(int k = 0; k < res; ++k) {
                    const std::array<double, 3> p{0.5 * M_PI * i / res, 2 * M_PI * j / res, 2 * M_PI * k / res};
                    const double f = eval(detail::u2_mixing(p[0], p[1], p[2]));
                    if(f < fbest) {
                        fbest = f;
                        best  = p;
                    }
                }
        double h = 2 * M_PI / res;
        while(h > 1e-11) {
            bool improved = false;
            for(int c = 0; c < 3; ++c)
                for(double s : {h, -h}) {
                    auto p = best;
                    p[static_cast<std::size_t>(c)] += s;
                    const double f = eval(detail::u2_mixing(p[0], p[1], p[2]));
                    if(f < fbest) {
                        fbest    = f;
                        best     = p;
                        improved = true;
                    }
                }
            if(!improved) h *= 0.5;
        }
        return sign * fbest;
    }

    const Eigen::Index n = r * r;
    CounterRng rng(0x5EEDBA5EULL, 0);
    Matrix best  = haar_isometry(rng, n, r);
    double fbest = eval(best);
    for(int s = 1; s < budget; ++s) {
        Matrix v       = haar_isometry(rng, n, r);
        const double f = eval(v);
        if(f < fbest) {
            fbest = f;
            best  = std::move(v);
        }
    }
    double h = 0.1;
    for(int sweep = 0; sweep < 4000 && h > 1e-8; ++sweep) {
        bool improved = false;
        for(Eigen::Index i = 0; i < n; ++i)
            for(Eigen::Index j = 0; j < r; ++j)
                for(cplx dir : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
                    Matrix v = best;
                    v(i, j) += h * dir;
                    v              = orthonormalize_columns(v);
                    const double f = eval(v);
                    if(f < fbest) {
                        fbest    = f;
                        best     = std::move(v);
                        improved = true;
                    }
                }
        if(!improved) h *= 0.5;
    }
    return sign * fbest;
}

} // namespace roofent
