#pragma once

// Leaves of state space induced by a roof functional: the roof is affine on
// the convex hull of an optimal decomposition's pure members. This header
// checks that property numerically and evaluates the pairwise and
// many-state compatibility conditions between candidate extremal points.

#include "roof.hpp"

#include <cfloat>

namespace roofent {

/// Extremal points of a leaf with their restricted entropies.
struct Leaf {
    std::vector<PureStateVector> extremals;
    std::vector<double> point_values;
};

inline constexpr double kRayOverlap = 1.0 - 1e-8;

inline bool same_ray(const Vector &a, const Vector &b) {
    return std::norm(a.normalized().dot(b.normalized())) > kRayOverlap;
}

/// Normalised distinct rays among `vs` (first occurrence kept).
inline std::vector<Vector> distinct_rays(const std::vector<Vector> &vs) {
    std::vector<Vector> out;
    for(const auto &v : vs) {
        const Vector n = v.normalized();
        if(std::none_of(out.begin(), out.end(), [&](const Vector &o) { return same_ray(o, n); })) out.push_back(n);
    }
    return out;
}

inline Leaf make_leaf(const std::vector<Vector> &vectors, const SubalgebraSpec &a) {
    Leaf leaf;
    for(const auto &v : distinct_rays(vectors)) {
        leaf.extremals.emplace_back(v);
        leaf.point_values.push_back(restricted_entropy(v * v.adjoint(), a));
    }
    return leaf;
}

/// Leaf spanned by a certified optimal decomposition.
inline Leaf leaf_from_ensemble(const RoofResult &res, const SubalgebraSpec &a, double residual_threshold = 1e-4) {
    if(!(res.stationarity_residual < residual_threshold))
        throw Error("leaf_from_ensemble: stationarity residual " + detail::fmt_double(res.stationarity_residual) +
                    " exceeds " + detail::fmt_double(residual_threshold) + "; ensemble is not certified");
    std::vector<Vector> vs;
    for(const auto &p : res.ensemble.pure_vectors()) {
        if(!p) throw InvalidState("leaf_from_ensemble: mixed member");
        vs.push_back(*p);
    }
    return make_leaf(vs, a);
}

inline Matrix leaf_mixture(const Leaf &leaf, const std::vector<double> &mu) {
    if(mu.size() != leaf.extremals.size()) throw DimensionMismatch("leaf mixture: weight count differs from leaf size");
    const Eigen::Index d = leaf.extremals.front().dim();
    Matrix m = Matrix::Zero(d, d);
    for(std::size_t i = 0; i < mu.size(); ++i) m += mu[i] * leaf.extremals[i].projector();
    return m;
}

inline double leaf_linear_value(const Leaf &leaf, const std::vector<double> &mu) {
    double s = 0.0;
    for(std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * leaf.point_values[i];
    return s;
}

struct LinearityPoint {
    std::vector<double> weights;
    double roof   = 0.0;
    double linear = 0.0;
    double gap    = 0.0;
    std::vector<std::string> flags;
};

struct LinearityReport {
    double max_gap = 0.0;
    std::vector<LinearityPoint> per_point;
};

/// Weight vectors (t, 1 - t) for t = 0, 1/(k-1), ..., 1.
inline std::vector<std::vector<double>> segment_grid(int points) {
    std::vector<std::vector<double>> g;
    for(int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.5 : static_cast<double>(i) / (points - 1);
        g.push_back({t, 1.0 - t});
    }
    return g;
}

/// Compares the roof value of leaf mixtures against the affine
/// interpolation of the extremal values.
inline LinearityReport leaf_linearity_check(const Leaf &leaf, const SubalgebraSpec &a,
                                            const std::vector<std::vector<double>> &weight_grid, const RoofOptions &opts,
                                            RoofDirection direction = RoofDirection::min) {
    LinearityReport rep;
    for(const auto &mu : weight_grid) {
        LinearityPoint pt;
        pt.weights = mu;
        double s   = 0.0;
        for(double w : mu) s += w;
        std::vector<double> norm_mu = mu;
        for(double &w : norm_mu) w /= s;
        const Matrix omega = leaf_mixture(leaf, norm_mu);
        RoofOptions o      = opts;
        o.direction        = direction;
        const RoofResult r = optimize_roof(omega, a, o);
        pt.roof   = direction == RoofDirection::min ? std::max(0.0, r.value) : r.value;
        pt.linear = leaf_linear_value(leaf, norm_mu);
        pt.gap    = std::abs(pt.roof - pt.linear);
        pt.flags  = r.flags;
        rep.max_gap = std::max(rep.max_gap, pt.gap);
        rep.per_point.push_back(std::move(pt));
    }
    return rep;
}

/// Lawson-Hanson non-negative least squares: argmin ||A x - b|| with x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd &a, const Eigen::VectorXd &b, int max_iter = 500) {
    const Eigen::Index n = a.cols();
    Eigen::VectorXd x    = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff()) * static_cast<double>(a.rows());
    for(int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index jmax = -1;
        double wmax       = tol;
        for(Eigen::Index j = 0; j < n; ++j)
            if(!passive[static_cast<std::size_t>(j)] && w(j) > wmax) {
                wmax = w(j);
                jmax = j;
            }
        if(jmax < 0) break;
        passive[static_cast<std::size_t>(jmax)] = true;
        while(true) {
            std::vector<Eigen::Index> idx;
            for(Eigen::Index j = 0; j < n; ++j)
                if(passive[static_cast<std::size_t>(j)]) idx.push_back(j);
            Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
            for(std::size_t c = 0; c < idx.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
            const Eigen::VectorXd zp = ap.completeOrthogonalDecomposition().solve(b);
            Eigen::VectorXd z        = Eigen::VectorXd::Zero(n);
            for(std::size_t c = 0; c < idx.size(); ++c) z(idx[c]) = zp(static_cast<Eigen::Index>(c));
            bool feasible = true;
            for(auto j : idx)
                if(z(j) <= 0) feasible = false;
            if(feasible) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for(auto j : idx)
                if(z(j) <= 0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
            x += alpha * (z - x);
            for(auto j : idx)
                if(x(j) <= 1e-15) {
                    passive[static_cast<std::size_t>(j)] = false;
                    x(j) = 0.0;
                }
        }
    }
    return x;
}

struct MembershipResult {
    bool member = false;
    std::vector<double> weights; // empty when no non-negative mixture fits
    double mixture_residual = 0.0;
    double roof             = 0.0;
    double gap              = 0.0;
};

/// omega belongs to the leaf iff it is a non-negative mixture of the
/// extremals (residual < 1e-8) and its roof value equals the linear one
/// within 5e-4.
inline MembershipResult leaf_membership(const Matrix &omega, const Leaf &leaf, const SubalgebraSpec &a,
                                        const RoofOptions &opts, RoofDirection direction = RoofDirection::min) {
    const Eigen::Index d = omega.rows();
    const auto k         = static_cast<Eigen::Index>(leaf.extremals.size());
    Eigen::MatrixXd lhs(2 * d * d, k);
    Eigen::VectorXd rhs(2 * d * d);
    for(Eigen::Index c = 0; c < k; ++c) {
        const Matrix p = leaf.extremals[static_cast<std::size_t>(c)].projector();
        for(Eigen::Index i = 0; i < d * d; ++i) {
            lhs(i, c)         = p(i % d, i / d).real();
            lhs(d * d + i, c) = p(i % d, i / d).imag();
        }
    }
    for(Eigen::Index i = 0; i < d * d; ++i) {
        rhs(i)         = omega(i % d, i / d).real();
        rhs(d * d + i) = omega(i % d, i / d).imag();
    }
    const Eigen::VectorXd mu = nnls(lhs, rhs);
    MembershipResult out;
    out.mixture_residual = (lhs * mu - rhs).cwiseAbs().maxCoeff();
    if(out.mixture_residual >= 1e-8) return out;
    out.weights.assign(mu.data(), mu.data() + mu.size());
    RoofOptions o = opts;
    o.direction   = direction;
    const RoofResult r = optimize_roof(omega, a, o);
    out.roof   = direction == RoofDirection::min ? std::max(0.0, r.value) : r.value;
    out.gap    = std::abs(out.roof - leaf_linear_value(leaf, out.weights));
    out.member = out.gap < 5e-4;
    return out;
}

// --- compatibility relations --------------------------------------------------

enum class CompatDirection { entanglement, conditional };

/// How the cross terms of the many-state compatibility inequality are read.
///  - symmetric: -1/2 sum_{i != j} Tr{[g_i g_j^* R(|v_i><v_j|) + g_j g_i^* R(|v_j><v_i|)] ln R_i},
///    the quadratic form of the supporting functional of the roof at a
///    stationary decomposition. Reduces to the first-order equality for
///    (1, eps) and is non-negative on certified optima.
///  - literal: sum_{i != j} Tr{[g_j g_i^* R(|v_i><v_j|) + g_i g_j^* R(|v_j><v_i|)] ln R_i}
///    exactly as usually typeset, kept for comparison.
enum class CompatConvention { symmetric, literal };

struct CompatResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    double off_support_mass = 0.0; // cross-operator weight outside supp R_i, summed
};

inline CompatResult compatibility_gap(const std::vector<Vector> &sigmas, const std::vector<cplx> &gamma,
                                      const SubalgebraSpec &a, CompatDirection direction = CompatDirection::entanglement,
                                      CompatConvention convention = CompatConvention::symmetric) {
    if(sigmas.size() != gamma.size() || sigmas.empty())
        throw DimensionMismatch("compatibility_gap: need one coefficient per state");
    const std::size_t n = sigmas.size();
    std::vector<Vector> v;
    for(const auto &s : sigmas) v.push_back(s.normalized());
    std::vector<BlockOperator> logs, supports;
    std::vector<double> ents;
    for(const auto &vi : v) {
        const BlockOperator ri = restrict_outer(vi, vi, a);
        logs.push_back(block_log_on_support(ri));
        supports.push_back(block_support(ri));
        ents.push_back(block_entropy(ri));
    }
    CompatResult out;
    double lhs = 0.0;
    for(std::size_t i = 0; i < n; ++i) lhs += std::norm(gamma[i]) * ents[i];
    for(std::size_t i = 0; i < n; ++i)
        for(std::size_t j = 0; j < n; ++j) {
            if(i == j) continue;
            const BlockOperator xij = restrict_outer(v[i], v[j], a); // R(|v_i><v_j|)
            const BlockOperator xji = restrict_outer(v[j], v[i], a);
            for(std::size_t k = 0; k < xij.blocks.size(); ++k) {
                const Matrix &p = supports[i].blocks[k];
                out.off_support_mass += (xij.blocks[k] - p * xij.blocks[k] * p).norm();
            }
            if(convention == CompatConvention::symmetric) {
                const cplx t = gamma[i] * std::conj(gamma[j]) * trace_pairing(xij, logs[i]) +
                               gamma[j] * std::conj(gamma[i]) * trace_pairing(xji, logs[i]);
                lhs -= 0.5 * t.real();
            } else {
                const cplx t = gamma[j] * std::conj(gamma[i]) * trace_pairing(xij, logs[i]) +
                               gamma[i] * std::conj(gamma[j]) * trace_pairing(xji, logs[i]);
                lhs += t.real();
            }
        }
    Vector w = Vector::Zero(v.front().size());
    for(std::size_t i = 0; i < n; ++i) w += gamma[i] * v[i];
    out.lhs = lhs;
    out.rhs = w.squaredNorm() > 0.0 ? member_value(w, a) : 0.0;
    out.gap = direction == CompatDirection::entanglement ? out.rhs - out.lhs : out.lhs - out.rhs;
    return out;
}

/// Gap evaluated for `count` seeded random coefficient vectors.
inline std::vector<CompatResult> compatibility_sweep(const std::vector<Vector> &sigmas, const SubalgebraSpec &a,
                                                     int count, std::uint64_t seed,
                                                     CompatDirection direction = CompatDirection::entanglement,
                                                     CompatConvention convention = CompatConvention::symmetric) {
    CounterRng rng(seed, 0xC0FFEEULL);
    std::vector<CompatResult> out;
    for(int s = 0; s < count; ++s) {
        std::vector<cplx> g;
        for(std::size_t i = 0; i < sigmas.size(); ++i) g.push_back(rng.complex_normal());
        out.push_back(compatibility_gap(sigmas, g, a, direction, convention));
    }
    return out;
}

struct FirstOrderResidual {
    cplx value;
    double off_support_1 = 0.0; // ||X - P1 X P1|| for X = R(|v1><v2|)
    double off_support_2 = 0.0;
};

/// Tr[R(|v1><v2|)(ln R1 - ln R2)]; vanishes for states on a common leaf.
inline FirstOrderResidual first_order_residual(const Vector &sigma1, const Vector &sigma2, const SubalgebraSpec &a) {
    const Vector v1 = sigma1.normalized();
    const Vector v2 = sigma2.normalized();
    const BlockOperator r1 = restrict_outer(v1, v1, a);
    const BlockOperator r2 = restrict_outer(v2, v2, a);
    const BlockOperator x  = restrict_outer(v1, v2, a);
    const BlockOperator l1 = block_log_on_support(r1);
    const BlockOperator l2 = block_log_on_support(r2);
    const BlockOperator p1 = block_support(r1);
    const BlockOperator p2 = block_support(r2);
    FirstOrderResidual out{trace_pairing(x, l1) - trace_pairing(x, l2)};
    for(std::size_t k = 0; k < x.blocks.size(); ++k) {
        out.off_support_1 += (x.blocks[k] - p1.blocks[k] * x.blocks[k] * p1.blocks[k]).norm();
        out.off_support_2 += (x.blocks[k] - p2.blocks[k] * x.blocks[k] * p2.blocks[k]).norm();
    }
    return out;
}

/// Largest |first_order_residual| over all member pairs of an ensemble.
inline double max_pairwise_first_order(const Ensemble &ens, const SubalgebraSpec &a) {
    const auto &pv = ens.pure_vectors();
    std::vector<Vector> rays;
    for(const auto &p : pv) {
        if(!p) throw InvalidState("max_pairwise_first_order: mixed member");
        rays.push_back(*p);
    }
    rays = distinct_rays(rays);
    double m = 0.0;
    for(std::size_t i = 0; i < rays.size(); ++i)
        for(std::size_t j = i + 1; j < rays.size(); ++j) m = std::max(m, std::abs(first_order_residual(rays[i], rays[j], a).value));
    return m;
}

// --- second-order stability under HJW mixing ------------------------------------

struct StabilityReport {
    double first_order_max  = 0.0;
    double second_order     = 0.0; // min (min direction) or max (max direction) curvature
    int directions          = 0;
    bool stable             = true;
};

namespace detail {
// exp(t A) for anti-Hermitian A via the spectrum of the Hermitian -iA.
inline Matrix expm_antihermitian(const Matrix &a, double t) {
    const Matrix h = cplx(0, -1) * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
    Vector ph(es.eigenvalues().size());
    for(Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, t * es.eigenvalues()(i));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline double mixed_value(const Matrix &psis, const SubalgebraSpec &a) {
    double f = 0.0;
    for(Eigen::Index i = 0; i < psis.cols(); ++i) f += member_value(psis.col(i), a);
    return f;
}

// Directional derivative of the objective along psi -> psi exp(tA)^T at t = 0.
inline double mixing_derivative(const Matrix &psis, const Matrix &gen, const SubalgebraSpec &a) {
    const Matrix dpsi = psis * gen.transpose();
    double s          = 0.0;
    for(Eigen::Index i = 0; i < psis.cols(); ++i) s += 2.0 * member_gradient(psis.col(i), a).dot(dpsi.col(i)).real();
    return s;
}

inline std::vector<Matrix> antihermitian_basis(Eigen::Index n) {
    std::vector<Matrix> basis;
    for(Eigen::Index k = 0; k < n; ++k) {
        Matrix b = Matrix::Zero(n, n);
        b(k, k)  = cplx(0, 1);
        basis.push_back(b);
    }
    for(Eigen::Index k = 0; k < n; ++k)
        for(Eigen::Index l = k + 1; l < n; ++l) {
            Matrix b = Matrix::Zero(n, n);
            b(k, l)  = M_SQRT1_2;
            b(l, k)  = -M_SQRT1_2;
            basis.push_back(b);
            b(k, l) = cplx(0, M_SQRT1_2);
            b(l, k) = cplx(0, M_SQRT1_2);
            basis.push_back(b);
        }
    return basis;
}
} // namespace detail

/// Probes optimality of a pure decomposition under mixture-preserving
/// perturbations psi -> psi U^T, U = exp(tA), with `extra_members`
/// zero-weight members appended (default: the state dimension).
///
/// The objective is not twice differentiable where a member has zero
/// weight (it is homogeneous of degree two but not quadratic there), so no
/// Hessian is formed. Curvature is measured by central second differences
/// along single generators: every element of an orthonormal basis of the
/// anti-Hermitian matrices, `probe_count` random generators, and injection
/// generators that feed w = sum_i c_i psi_i into the first empty slot, for
/// c = (e_i + phase e_j)/sqrt 2 over all pairs and `probe_count` random c.
inline StabilityReport hjw_stability_check(const Ensemble &ens, const SubalgebraSpec &a, RoofDirection direction,
                                           int probe_count, std::uint64_t seed = 0, Eigen::Index extra_members = -1) {
    const std::vector<Vector> scaled = ens.scaled_vectors();
    const Eigen::Index d = ens.target().rows();
    const auto n0        = static_cast<Eigen::Index>(scaled.size());
    const Eigen::Index extra = extra_members < 0 ? d : extra_members;
    const Eigen::Index n = n0 + extra;
    Matrix psis          = Matrix::Zero(d, n);
    for(Eigen::Index i = 0; i < n0; ++i) psis.col(i) = scaled[static_cast<std::size_t>(i)];

    std::vector<Matrix> gens = detail::antihermitian_basis(n);
    CounterRng rng(seed, 0x57AB1EULL);
    for(int p = 0; p < probe_count; ++p) {
        const Matrix g = ginibre(rng, n, n);
        gens.emplace_back(0.5 * (g - g.adjoint()));
    }
    if(extra > 0 && n0 > 1) {
        auto inject = [&](const Vector &c) {
            Matrix gen = Matrix::Zero(n, n);
            for(Eigen::Index i = 0; i < n0; ++i) {
                gen(n0, i) = c(i);
                gen(i, n0) = -std::conj(c(i));
            }
            gens.push_back(gen);
        };
        const std::array<cplx, 4> phases{cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)};
        for(Eigen::Index i = 0; i < n0; ++i)
            for(Eigen::Index j = i + 1; j < n0; ++j)
                for(const cplx ph : phases) {
                    Vector c = Vector::Zero(n0);
                    c(i)     = 1.0;
                    c(j)     = ph;
                    inject(c);
                }
        for(int p = 0; p < probe_count; ++p) inject(ginibre(rng, n0, 1).col(0));
    }

    const double sign = direction == RoofDirection::min ? 1.0 : -1.0;
    const double f0   = detail::mixed_value(psis, a);
    const double h    = 1e-3;
    StabilityReport rep;
    double curvature = std::numeric_limits<double>::infinity();
    for(Matrix &gen : gens) {
        gen /= gen.norm();
        rep.first_order_max = std::max(rep.first_order_max, std::abs(detail::mixing_derivative(psis, gen, a)));
        const double fp = detail::mixed_value(psis * detail::expm_antihermitian(gen, h).transpose(), a);
        const double fm = detail::mixed_value(psis * detail::expm_antihermitian(gen, -h).transpose(), a);
        curvature       = std::min(curvature, sign * (fp - 2 * f0 + fm) / (h * h));
    }
    if(!std::isfinite(curvature)) curvature = 0.0;
    // rounding floor of the second difference
    if(std::abs(curvature) < 64.0 * DBL_EPSILON * std::max(1.0, std::abs(f0)) / (h * h)) curvature = 0.0;
    rep.directions   = static_cast<int>(gens.size());
    rep.second_order = curvature == 0.0 ? 0.0 : sign * curvature;
    rep.stable       = rep.first_order_max < 1e-5 && curvature >= -1e-6;
    return rep;
}

} // namespace roofent
