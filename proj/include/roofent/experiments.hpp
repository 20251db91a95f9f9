#pragma once

// Worked families: the Pauli-x symmetric states on M_2, the permutation
// symmetric states on M_3 with their orbit ansaetze and bifurcation scan,
// and the map carrying the first family into the second.

#include "leaf.hpp"

#include <chrono>
#include <functional>
#include <numeric>

namespace roofent {

// --- state families -------------------------------------------------------------

/// Diagonal 1/3, off-diagonal z; physical for -1/6 <= z <= 1/3.
inline Matrix m3_symmetric_state(double z) {
    if(z < -1.0 / 6.0 - 1e-12 || z > 1.0 / 3.0 + 1e-12)
        throw InvalidState("m3_symmetric_state: z = " + detail::fmt_double(z) + " outside -1/6 <= z <= 1/3");
    Matrix m = Matrix::Constant(3, 3, z);
    m.diagonal().setConstant(1.0 / 3.0);
    return m;
}

/// (1 + x sigma_x) / 2.
inline Matrix m2_symmetric_state(double x) {
    if(std::abs(x) > 1.0 + 1e-12) throw InvalidState("m2_symmetric_state: |x| = " + detail::fmt_double(std::abs(x)) + " > 1");
    return 0.5 * (Matrix::Identity(2, 2) + x * pauli_x());
}

struct PairDecomposition {
    double a = 0.0, b = 0.0; // members (a, b) and (b, a)
    Ensemble ensemble;
    double value = 0.0; // binary entropy of (a^2, b^2)
};

/// Swap-paired decomposition of m2_symmetric_state(x) with a >= |b| and
/// ab = x/2 (b carries the sign of x).
inline PairDecomposition m2_pair_decomposition(double x) {
    if(std::abs(x) > 1.0 + 1e-12) throw InvalidState("m2_pair_decomposition: |x| > 1");
    x                 = std::clamp(x, -1.0, 1.0);
    const double root = std::sqrt(std::max(0.0, 1.0 - x * x));
    PairDecomposition p;
    p.a = std::sqrt(0.5 * (1.0 + root));
    p.b = std::copysign(std::sqrt(std::max(0.0, 0.5 * (1.0 - root))), x);
    Vector u(2), v(2);
    u << p.a, p.b;
    v << p.b, p.a;
    const Matrix rho = m2_symmetric_state(x);
    if(same_ray(u, v))
        p.ensemble = Ensemble({1.0}, {u * u.adjoint()}, rho, {u});
    else
        p.ensemble = Ensemble({0.5, 0.5}, {u * u.adjoint(), v * v.adjoint()}, rho, {u, v});
    const RealVector probs = (RealVector(2) << p.a * p.a, p.b * p.b).finished();
    p.value = entropy_of_spectrum(probs);
    return p;
}

// --- symmetry groups --------------------------------------------------------------

struct GroupAction {
    std::vector<Matrix> elements;
    std::vector<std::string> labels;
};

namespace detail {
inline bool equal_up_to_phase(const Matrix &u, const Matrix &v, double t) {
    const cplx ov = (v.adjoint() * u).trace();
    if(std::abs(ov) < 1e-300) return u.norm() < t && v.norm() < t;
    return (u - (ov / std::abs(ov)) * v).cwiseAbs().maxCoeff() < t;
}

inline std::string cycle_label(const std::vector<int> &perm) {
    std::string out;
    std::vector<bool> seen(perm.size(), false);
    for(std::size_t s = 0; s < perm.size(); ++s) {
        if(seen[s] || perm[s] == static_cast<int>(s)) continue;
        out += "(";
        std::size_t c = s;
        while(!seen[c]) {
            seen[c] = true;
            out += std::to_string(c + 1);
            c = static_cast<std::size_t>(perm[c]);
            if(!seen[c]) out += " ";
        }
        out += ")";
    }
    return out.empty() ? "()" : out;
}
} // namespace detail

/// Identity present and products stay in the set up to a phase.
inline bool is_closed(const GroupAction &g, double t = 1e-10) {
    const Eigen::Index d = g.elements.front().rows();
    auto contains = [&](const Matrix &m) {
        return std::any_of(g.elements.begin(), g.elements.end(), [&](const Matrix &e) { return detail::equal_up_to_phase(m, e, t); });
    };
    if(!contains(Matrix::Identity(d, d))) return false;
    for(const auto &x : g.elements)
        for(const auto &y : g.elements)
            if(!contains(x * y)) return false;
    return true;
}

/// All n! permutation matrices P e_k = e_{pi(k)}, labelled in cycle notation.
inline GroupAction permutation_action(int n) {
    if(n < 1 || n > 5) throw Error("permutation_action: n must be in [1, 5], got " + std::to_string(n));
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    GroupAction g;
    do {
        Matrix p = Matrix::Zero(n, n);
        for(int k = 0; k < n; ++k) p(perm[static_cast<std::size_t>(k)], k) = 1.0;
        g.elements.push_back(p);
        g.labels.push_back(detail::cycle_label(perm));
    } while(std::next_permutation(perm.begin(), perm.end()));
    return g;
}

/// Pauli-x flip group {1, sigma_x} on C^2.
inline GroupAction pauli_x_action() { return {{Matrix::Identity(2, 2), pauli_x()}, {"1", "x"}}; }

inline double invariance_defect(const Matrix &rho, const GroupAction &g) {
    double m = 0.0;
    for(const auto &u : g.elements) m = std::max(m, (u * rho * u.adjoint() - rho).cwiseAbs().maxCoeff());
    return m;
}

// --- orbit ansaetze -----------------------------------------------------------------

struct OrbitFit {
    bool ok         = false;
    double residual = 0.0; // max |orbit average - rho|
    double value    = 0.0; // common restricted entropy of the orbit members
    std::vector<Vector> rays;
    std::optional<Ensemble> ensemble;
};

/// Distinct rays g v for g in G, equal weights. Succeeds when their average
/// reproduces rho within 1e-8.
inline OrbitFit orbit_ansatz(const Matrix &rho, const GroupAction &g, const Vector &candidate, const SubalgebraSpec &a) {
    if(invariance_defect(rho, g) > 1e-9) throw InvalidState("orbit_ansatz: state is not invariant under the group");
    std::vector<Vector> images;
    for(const auto &u : g.elements) images.emplace_back(u * candidate.normalized());
    OrbitFit fit;
    fit.rays = distinct_rays(images);
    const double w = 1.0 / static_cast<double>(fit.rays.size());
    Matrix avg     = Matrix::Zero(rho.rows(), rho.cols());
    for(const auto &r : fit.rays) avg += w * r * r.adjoint();
    fit.residual = (avg - rho).cwiseAbs().maxCoeff();
    fit.value    = restricted_entropy(fit.rays.front() * fit.rays.front().adjoint(), a);
    if(fit.residual >= 1e-8) return fit;
    std::vector<double> ws(fit.rays.size(), w);
    std::vector<Matrix> ms;
    std::vector<std::optional<Vector>> pv;
    for(const auto &r : fit.rays) {
        ms.emplace_back(r * r.adjoint());
        pv.emplace_back(r);
    }
    // the validated ensemble reconstructs within 1e-8 by construction of the check above
    fit.ensemble = Ensemble(std::move(ws), std::move(ms), rho, std::move(pv));
    fit.ok       = true;
    return fit;
}

/// Rays invariant under the transposition (2 3) whose equal-weight S_3 orbit
/// averages to m3_symmetric_state(z). Writing them as (x, y, y), x >= 0,
/// the constraint is 2 x Re y + |y|^2 = 3z with x^2 + 2|y|^2 = 1; the
/// odd ray (0, 1, -1)/sqrt(2) contributes at z = -1/6.
///
/// The complex solutions form a one-parameter family |y|^2 = u between the
/// two roots of 9u^2 - (6z + 4)u + 9z^2 = 0, with real y at the ends. The
/// real end-point branches are always returned; `interior_samples` adds
/// complex branches at evenly spaced u strictly between them.
inline std::vector<Vector> solve_h_invariant_candidate(double z, int interior_samples = 0) {
    std::vector<Vector> out;
    if(z < -1.0 / 6.0 - 1e-12 || z > 1.0 / 3.0 + 1e-12) return out;
    const double disc = std::max(0.0, (4.0 - 12.0 * z) * (4.0 + 24.0 * z));
    const double um   = ((6.0 * z + 4.0) - std::sqrt(disc)) / 18.0;
    const double up   = ((6.0 * z + 4.0) + std::sqrt(disc)) / 18.0;
    auto add_real = [&](double u) {
        u = std::clamp(u, 0.0, 0.5);
        const double x = std::sqrt(std::max(0.0, 1.0 - 2.0 * u));
        const double s = std::sqrt(u);
        const double c = 3.0 * z - u;
        std::vector<double> signs;
        if(std::abs(c) < 1e-14) signs = {1.0, -1.0};
        else signs = {c > 0 ? 1.0 : -1.0};
        for(double sg : signs) {
            Vector v(3);
            v << x, sg * s, sg * s;
            if(std::abs(2.0 * x * sg * s + u - 3.0 * z) > 1e-10) continue;
            if(std::none_of(out.begin(), out.end(), [&](const Vector &o) { return same_ray(o, v); })) out.push_back(v);
        }
    };
    add_real(um);
    add_real(up);
    for(int k = 1; k <= interior_samples && up - um > 1e-12; ++k) {
        const double u  = um + (up - um) * k / (interior_samples + 1);
        const double x  = std::sqrt(1.0 - 2.0 * u);
        const double re = (3.0 * z - u) / (2.0 * x);
        const double im = std::sqrt(std::max(0.0, u - re * re));
        Vector v(3);
        v << x, cplx(re, im), cplx(re, im);
        out.push_back(v);
    }
    if(std::abs(z + 1.0 / 6.0) < 1e-12) {
        Vector v(3);
        v << 0.0, M_SQRT1_2, -M_SQRT1_2;
        out.push_back(v);
    }
    return out;
}

/// Best single-orbit value over the H-invariant branches (infinity if none fit).
inline OrbitFit best_h_invariant_orbit(double z, const SubalgebraSpec &a) {
    const Matrix rho     = m3_symmetric_state(z);
    const GroupAction g  = permutation_action(3);
    OrbitFit best;
    best.value = std::numeric_limits<double>::infinity();
    for(const auto &c : solve_h_invariant_candidate(z)) {
        OrbitFit f = orbit_ansatz(rho, g, c, a);
        if(f.ok && f.value < best.value) best = std::move(f);
    }
    return best;
}

namespace detail {
inline Matrix orbit_average(const GroupAction &g, const Vector &v) {
    const std::vector<Vector> rays = [&] {
        std::vector<Vector> im;
        for(const auto &u : g.elements) im.emplace_back(u * v.normalized());
        return distinct_rays(im);
    }();
    Matrix avg = Matrix::Zero(v.size(), v.size());
    for(const auto &r : rays) avg += r * r.adjoint() / static_cast<double>(rays.size());
    return avg;
}
} // namespace detail

struct TwoOrbitFit {
    bool ok         = false;
    double mu       = 0.0; // weight of the candA orbit
    double residual = 0.0;
    double value    = std::numeric_limits<double>::infinity();
    Vector cand_b;
    std::optional<Ensemble> ensemble;
};

/// Fixed candidate orbits: least-squares mu for mu avg_A + (1 - mu) avg_B = rho.
inline TwoOrbitFit two_orbit_fixed(const Matrix &rho, const GroupAction &g, const Vector &cand_a, const Vector &cand_b,
                                   const SubalgebraSpec &a) {
    const Matrix pa = detail::orbit_average(g, cand_a);
    const Matrix pb = detail::orbit_average(g, cand_b);
    const Matrix dm = pa - pb;
    const Matrix rt = rho - pb;
    TwoOrbitFit fit;
    fit.cand_b     = cand_b.normalized();
    const double n2 = dm.squaredNorm();
    fit.mu          = n2 > 1e-300 ? std::clamp((dm.adjoint() * rt).trace().real() / n2, 0.0, 1.0) : 0.0;
    fit.residual    = (fit.mu * pa + (1.0 - fit.mu) * pb - rho).cwiseAbs().maxCoeff();
    if(fit.residual >= 1e-8) return fit;
    const double va = restricted_entropy(cand_a.normalized() * cand_a.normalized().adjoint(), a);
    const double vb = restricted_entropy(fit.cand_b * fit.cand_b.adjoint(), a);
    fit.value = fit.mu * va + (1.0 - fit.mu) * vb;
    fit.ok    = true;
    std::vector<double> w;
    std::vector<Matrix> m;
    std::vector<std::optional<Vector>> pv;
    auto push_orbit = [&](const Vector &c, double weight) {
        if(weight <= 0.0) return;
        std::vector<Vector> im;
        for(const auto &u : g.elements) im.emplace_back(u * c.normalized());
        const auto rays = distinct_rays(im);
        for(const auto &r : rays) {
            w.push_back(weight / static_cast<double>(rays.size()));
            m.emplace_back(r * r.adjoint());
            pv.emplace_back(r);
        }
    };
    push_orbit(cand_a, fit.mu);
    push_orbit(cand_b, 1.0 - fit.mu);
    fit.ensemble = Ensemble(std::move(w), std::move(m), rho, std::move(pv));
    return fit;
}

/// Two-orbit ansatz with candB optimised along its real (x, y, y) branch,
/// x = sqrt(1 - 2y^2), y in [0, 1/sqrt 2]: grid search, then golden-section
/// refinement around the best feasible grid point. With optimise_b false
/// only the given candB is used.
inline TwoOrbitFit two_orbit_ansatz(const Matrix &rho, const GroupAction &g, const Vector &cand_a, const Vector &cand_b,
                                    const SubalgebraSpec &a, bool optimise_b = true) {
    if(!optimise_b) return two_orbit_fixed(rho, g, cand_a, cand_b, a);
    auto branch = [](double y) {
        Vector v(3);
        v << std::sqrt(std::max(0.0, 1.0 - 2.0 * y * y)), y, y;
        return v;
    };
    auto eval = [&](double y) { return two_orbit_fixed(rho, g, cand_a, branch(y), a); };
    const double ymax = M_SQRT1_2;
    const int grid    = 400;
    TwoOrbitFit best  = two_orbit_fixed(rho, g, cand_a, cand_b, a);
    int best_k        = -1;
    for(int k = 0; k <= grid; ++k) {
        TwoOrbitFit f = eval(ymax * k / grid);
        if(f.ok && f.value < best.value) {
            best   = std::move(f);
            best_k = k;
        }
    }
    if(best_k < 0) return best;
    double lo = ymax * std::max(0, best_k - 1) / grid;
    double hi = ymax * std::min(grid, best_k + 1) / grid;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto value_at = [&](double y) {
        const TwoOrbitFit f = eval(y);
        return f.ok ? f.value : std::numeric_limits<double>::infinity();
    };
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    double fc = value_at(c), fd = value_at(d);
    while(hi - lo > 1e-10) {
        if(fc < fd) {
            hi = d;
            d  = c;
            fd = fc;
            c  = hi - phi * (hi - lo);
            fc = value_at(c);
        } else {
            lo = c;
            c  = d;
            fc = fd;
            d  = lo + phi * (hi - lo);
            fd = value_at(d);
        }
    }
    TwoOrbitFit refined = eval(0.5 * (lo + hi));
    if(refined.ok && refined.value < best.value) best = std::move(refined);
    return best;
}

// --- Gamma map ------------------------------------------------------------------------

/// Isometry J(u, v) = (u, v/sqrt 2, v/sqrt 2) from C^2 into C^3.
inline Matrix gamma_isometry() {
    Matrix j = Matrix::Zero(3, 2);
    j(0, 0) = 1.0;
    j(1, 1) = j(2, 1) = M_SQRT1_2;
    return j;
}

inline Vector gamma_map(const Vector &v) {
    if(v.size() != 2) throw DimensionMismatch("gamma_map: expected a 2-vector");
    return gamma_isometry() * v;
}

/// rho -> J rho J^dagger: rows (a, c/sqrt2, c/sqrt2), (c*/sqrt2, d/2, d/2), ...
inline Matrix gamma_map(const Matrix &rho) {
    if(rho.rows() != 2 || rho.cols() != 2) throw DimensionMismatch("gamma_map: expected a 2x2 matrix");
    const Matrix j = gamma_isometry();
    return j * rho * j.adjoint();
}

/// (a, b) -> (a, b/2, b/2).
inline std::array<double, 3> gamma_map(const std::array<double, 2> &p) { return {p[0], 0.5 * p[1], 0.5 * p[1]}; }

inline Ensemble gamma_map(const Ensemble &ens) {
    std::vector<Matrix> m;
    std::vector<std::optional<Vector>> pv;
    for(std::size_t i = 0; i < ens.size(); ++i) {
        m.push_back(gamma_map(ens.members()[i]));
        pv.push_back(ens.pure_vectors()[i] ? std::optional<Vector>(gamma_map(*ens.pure_vectors()[i])) : std::nullopt);
    }
    return {ens.weights(), std::move(m), gamma_map(ens.target()), std::move(pv)};
}

// --- bifurcation scan ---------------------------------------------------------------------

struct ScanRow {
    double z           = 0.0;
    double E_direct    = 0.0;
    double E_orbit1    = 0.0;
    double E_two_orbit = 0.0;
    double mu          = 0.0;
    std::string best_label;
    double residual    = 0.0;
    std::vector<std::string> flags;
    double runtime_ms  = 0.0;
};

struct Bracket {
    double lo = 0.0, hi = 0.0;
    [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
    [[nodiscard]] double width() const { return hi - lo; }
};

struct ScanDetection {
    std::optional<Bracket> z0;
    std::optional<Bracket> z1;
    std::optional<StabilityReport> z0_stability_below; // orbit ensemble just below z0
    std::optional<StabilityReport> z0_stability_above; // orbit ensemble just above z0
    double z1_candidate = 5.0 / 18.0; // orbit of (2,1,1)/sqrt6 alone
    int bisection_steps = 0;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    ScanDetection detected;
    double lipschitz = 0.0; // max |dE/dz| between neighbouring grid points
};

struct ScanOptions {
    RoofOptions roof;
    double gap_threshold = 1e-4;
    double mu_threshold  = 1e-3;
    double bracket_width = 1e-3;
    bool timing          = false; // record wall time per point; off keeps output reproducible
    int stability_probes = 16;
};

/// Uniform grid of `steps` points on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, int steps) {
    if(steps < 1) throw Error("grid: steps must be >= 1");
    std::vector<double> g;
    for(int i = 0; i < steps; ++i) g.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
    return g;
}

inline std::vector<double> default_scan_grid() { return uniform_grid(-1.0 / 6.0, 1.0 / 3.0, 151); }

namespace detail {
inline Vector uniform_ray(Eigen::Index n) { return Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))); }

inline TwoOrbitFit m3_two_orbit(double z, const SubalgebraSpec &a) {
    Vector b(3);
    b << 2.0, 1.0, 1.0;
    return two_orbit_ansatz(m3_symmetric_state(z), permutation_action(3), uniform_ray(3), b / std::sqrt(6.0), a);
}
} // namespace detail

inline ScanRow scan_point(double z, const ScanOptions &opts) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const SubalgebraSpec a = diagonal_subalgebra(3);
    ScanRow row;
    row.z = z;
    const RoofResult direct = entanglement_of_formation(m3_symmetric_state(z), a, opts.roof);
    row.E_direct = direct.value;
    row.residual = direct.stationarity_residual;
    row.flags    = direct.flags;
    row.E_orbit1 = best_h_invariant_orbit(z, a).value;
    const TwoOrbitFit two = detail::m3_two_orbit(z, a);
    row.E_two_orbit = two.ok ? two.value : std::numeric_limits<double>::infinity();
    row.mu          = two.ok ? two.mu : std::numeric_limits<double>::quiet_NaN();
    if(row.E_orbit1 <= row.E_direct + 1e-6) row.best_label = "orbit1";
    else if(row.E_two_orbit <= row.E_direct + 1e-6) row.best_label = "two_orbit";
    else row.best_label = "direct";
    if(row.E_direct > std::min(row.E_orbit1, row.E_two_orbit) + 1e-6) row.flags.emplace_back("direct_above_ansatz");
    if(opts.timing) row.runtime_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return row;
}

namespace detail {
inline bool mu_interior(double mu, double t) { return std::isfinite(mu) && mu >= t && mu <= 1.0 - t; }

inline bool mu_split(double z, const SubalgebraSpec &a, double t) {
    const TwoOrbitFit f = m3_two_orbit(z, a);
    return f.ok && mu_interior(f.mu, t);
}
} // namespace detail

/// Scans the M_3 family. z0 is where the best (2 3)-invariant single orbit
/// stops matching the direct optimum (moving down from 0); z1 is where the
/// optimal two-orbit mixture weight leaves the end points (moving up from 0).
/// Both are bisected to `bracket_width`.
inline ScanReport bifurcation_scan(std::vector<double> grid, const ScanOptions &opts = {}) {
    std::sort(grid.begin(), grid.end());
    for(double z : grid)
        if(z < -1.0 / 6.0 - 1e-12 || z > 1.0 / 3.0 + 1e-12)
            throw InvalidState("bifurcation_scan: grid point " + detail::fmt_double(z) + " outside -1/6 <= z <= 1/3");
    ScanReport rep;
    rep.rows = detail::run_indexed<ScanRow>(static_cast<int>(grid.size()), 1, [&](int i) {
        return scan_point(grid[static_cast<std::size_t>(i)], opts);
    });
    for(std::size_t i = 1; i < rep.rows.size(); ++i) {
        const double dz = rep.rows[i].z - rep.rows[i - 1].z;
        if(dz > 0) rep.lipschitz = std::max(rep.lipschitz, std::abs(rep.rows[i].E_direct - rep.rows[i - 1].E_direct) / dz);
    }
    const SubalgebraSpec a = diagonal_subalgebra(3);
    auto gap_at = [&](double z) {
        return best_h_invariant_orbit(z, a).value - entanglement_of_formation(m3_symmetric_state(z), a, opts.roof).value;
    };

    // z0: walk down from the largest grid point <= 0
    for(std::size_t k = rep.rows.size(); k-- > 0;) {
        const ScanRow &r = rep.rows[k];
        if(r.z > 0.0) continue;
        if(r.E_orbit1 - r.E_direct > opts.gap_threshold) {
            if(k + 1 < rep.rows.size() && rep.rows[k + 1].z <= 0.0 + 1e-15) {
                Bracket b{r.z, rep.rows[k + 1].z};
                while(b.width() > opts.bracket_width) {
                    const double m = b.mid();
                    if(gap_at(m) > opts.gap_threshold) b.lo = m;
                    else b.hi = m;
                    ++rep.detected.bisection_steps;
                }
                rep.detected.z0 = b;
            }
            break;
        }
    }
    if(rep.detected.z0) {
        const double step = 0.02;
        for(int side = 0; side < 2; ++side) {
            const double z = side == 0 ? rep.detected.z0->lo - step : rep.detected.z0->hi + step;
            if(z < -1.0 / 6.0 || z > 0.0) continue;
            const OrbitFit f = best_h_invariant_orbit(z, a);
            if(!f.ok) continue;
            const StabilityReport s = hjw_stability_check(*f.ensemble, a, RoofDirection::min, opts.stability_probes, opts.roof.seed);
            (side == 0 ? rep.detected.z0_stability_below : rep.detected.z0_stability_above) = s;
        }
    }

    // z1: walk up from the smallest grid point >= 0
    for(std::size_t k = 0; k < rep.rows.size(); ++k) {
        const ScanRow &r = rep.rows[k];
        if(r.z < 0.0) continue;
        if(detail::mu_interior(r.mu, opts.mu_threshold)) {
            if(k > 0 && rep.rows[k - 1].z >= 0.0 - 1e-15) {
                Bracket b{rep.rows[k - 1].z, r.z};
                while(b.width() > opts.bracket_width) {
                    const double m = b.mid();
                    if(detail::mu_split(m, a, opts.mu_threshold)) b.hi = m;
                    else b.lo = m;
                    ++rep.detected.bisection_steps;
                }
                rep.detected.z1 = b;
            }
            break;
        }
    }
    return rep;
}

struct LinearityRow {
    double z   = 0.0;
    bool applicable = false;
    double gap = 0.0;
};

/// |E_direct - (mu E_A + (1 - mu) E_B)| wherever the two-orbit weight is
/// off the lower end point; other rows are marked not applicable.
inline std::vector<LinearityRow> leaf_linearity_along_scan(const ScanReport &rep, double mu_threshold = 1e-3) {
    std::vector<LinearityRow> out;
    for(const auto &r : rep.rows) {
        LinearityRow l;
        l.z          = r.z;
        l.applicable = std::isfinite(r.mu) && r.mu >= mu_threshold && std::isfinite(r.E_two_orbit);
        if(l.applicable) l.gap = std::abs(r.E_direct - r.E_two_orbit);
        out.push_back(l);
    }
    return out;
}

} // namespace roofent
