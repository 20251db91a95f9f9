#include <gtest/gtest.h>

#include <roofent/experiments.hpp>

using namespace roofent;

namespace {

const SubalgebraSpec d2 = diagonal_subalgebra(2);
const SubalgebraSpec d3 = diagonal_subalgebra(3);

Vector vec(std::initializer_list<cplx> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for(cplx x : v) out(i++) = x;
    return out.normalized();
}

double maxabs(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }

double h_constraint(const Vector &v, double z) {
    // 2 Re(conj(x) y) + |y|^2 - 3z for v = (x, y, y)
    return 2.0 * (std::conj(v(0)) * v(1)).real() + std::norm(v(1)) - 3.0 * z;
}

} // namespace

TEST(M3State, Examples) {
    EXPECT_LT(maxabs(m3_symmetric_state(0.0) - Matrix::Identity(3, 3) / 3.0), 1e-15);
    const Vector u = vec({1, 1, 1});
    EXPECT_LT(maxabs(m3_symmetric_state(1.0 / 3.0) - u * u.adjoint()), 1e-15);
    const RealVector ev = eigh(m3_symmetric_state(-1.0 / 6.0)).values;
    EXPECT_NEAR(ev(0), 0.0, 1e-15);
    EXPECT_NEAR(ev(1), 0.5, 1e-15);
    EXPECT_NEAR(ev(2), 0.5, 1e-15);
    try {
        m3_symmetric_state(0.4);
        FAIL();
    } catch(const InvalidState &e) {
        EXPECT_NE(std::string(e.what()).find("-1/6 <= z <= 1/3"), std::string::npos);
    }
    EXPECT_THROW(m3_symmetric_state(-0.2), InvalidState);
}

TEST(M2State, Examples) {
    EXPECT_LT(maxabs(m2_symmetric_state(0.0) - Matrix::Identity(2, 2) / 2.0), 1e-15);
    const Vector u = vec({1, 1});
    EXPECT_LT(maxabs(m2_symmetric_state(1.0) - u * u.adjoint()), 1e-15);
    const RealVector ev = eigh(m2_symmetric_state(0.6)).values;
    EXPECT_NEAR(ev(0), 0.2, 1e-15);
    EXPECT_NEAR(ev(1), 0.8, 1e-15);
    EXPECT_THROW(m2_symmetric_state(1.1), InvalidState);
    EXPECT_LT(invariance_defect(m2_symmetric_state(0.37), pauli_x_action()), 1e-15);
}

TEST(M2Pair, Examples) {
    const PairDecomposition one = m2_pair_decomposition(1.0);
    EXPECT_EQ(one.ensemble.size(), 1u);
    EXPECT_NEAR(one.value, std::log(2.0), 1e-12);
    EXPECT_NEAR(m2_pair_decomposition(0.0).value, 0.0, 1e-15);
    const PairDecomposition p = m2_pair_decomposition(0.6);
    EXPECT_NEAR(p.a * p.a, 0.9, 1e-14);
    EXPECT_NEAR(p.b * p.b, 0.1, 1e-14);
    EXPECT_NEAR(p.value, -(0.9 * std::log(0.9) + 0.1 * std::log(0.1)), 1e-14);
    EXPECT_NEAR(p.value, entanglement_of_formation(m2_symmetric_state(0.6), d2).value, 1e-4);
    EXPECT_NEAR(p.value, brute_force_roof(m2_symmetric_state(0.6), d2, 8000, RoofDirection::min), 1e-4);
    EXPECT_LT(p.ensemble.reconstruction_error(), 1e-12);
}

TEST(Groups, Permutations) {
    const GroupAction g = permutation_action(3);
    EXPECT_EQ(g.elements.size(), 6u);
    EXPECT_TRUE(is_closed(g));
    for(double z : {-0.1, 0.05, 0.3}) EXPECT_LT(invariance_defect(m3_symmetric_state(z), g), 1e-12);
    EXPECT_TRUE(is_closed(pauli_x_action()));
    EXPECT_EQ(permutation_action(5).elements.size(), 120u);
    EXPECT_THROW(permutation_action(6), Error);
}

TEST(OrbitAnsatz, Examples) {
    const GroupAction g = permutation_action(3);
    const OrbitFit lo   = orbit_ansatz(m3_symmetric_state(-1.0 / 6.0), g, vec({1, -1, 0}), d3);
    ASSERT_TRUE(lo.ok);
    EXPECT_EQ(lo.rays.size(), 3u);
    for(double w : lo.ensemble->weights()) EXPECT_NEAR(w, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(lo.value, std::log(2.0), 1e-14);

    const OrbitFit hi = orbit_ansatz(m3_symmetric_state(1.0 / 3.0), g, vec({1, 1, 1}), d3);
    ASSERT_TRUE(hi.ok);
    EXPECT_EQ(hi.rays.size(), 1u);
    EXPECT_NEAR(hi.value, std::log(3.0), 1e-14);

    const OrbitFit bad = orbit_ansatz(m3_symmetric_state(0.1), g, vec({1, 0, 0}), d3);
    EXPECT_FALSE(bad.ok);
    EXPECT_NEAR(bad.residual, 0.1, 1e-14);
    EXPECT_THROW(orbit_ansatz(random_kit(1, RandomKind::density, 3), g, vec({1, 0, 0}), d3), InvalidState);
}

TEST(HInvariant, Examples) {
    const auto top = solve_h_invariant_candidate(1.0 / 3.0);
    EXPECT_TRUE(std::any_of(top.begin(), top.end(), [](const Vector &v) { return same_ray(v, vec({1, 1, 1})); }));
    const auto zero = solve_h_invariant_candidate(0.0);
    EXPECT_TRUE(std::any_of(zero.begin(), zero.end(), [](const Vector &v) { return same_ray(v, vec({1, 0, 0})); }));
    for(const auto &v : zero) EXPECT_NEAR(h_constraint(v, 0.0), 0.0, 1e-12);
    EXPECT_TRUE(solve_h_invariant_candidate(0.5).empty());
}

TEST(HInvariant, ComplexBranchesSatisfyConstraint) {
    const auto c = solve_h_invariant_candidate(0.2, 5);
    int complex_count = 0;
    for(const auto &v : c) {
        EXPECT_NEAR(h_constraint(v, 0.2), 0.0, 1e-12);
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        if(std::abs(v(1).imag()) > 1e-6) ++complex_count;
        EXPECT_TRUE(orbit_ansatz(m3_symmetric_state(0.2), permutation_action(3), v, d3).ok);
    }
    EXPECT_EQ(complex_count, 5);
}

TEST(HInvariant, BestBranchMatchesOptimizerBelowZ1) {
    for(double z : {-0.1, 0.05, 0.2}) {
        const OrbitFit f = best_h_invariant_orbit(z, d3);
        ASSERT_TRUE(f.ok);
        EXPECT_NEAR(f.value, entanglement_of_formation(m3_symmetric_state(z), d3).value, 1e-4) << "z = " << z;
        // the real endpoints beat every sampled interior phase
        for(const auto &v : solve_h_invariant_candidate(z, 7))
            EXPECT_GE(orbit_ansatz(m3_symmetric_state(z), permutation_action(3), v, d3).value, f.value - 1e-12);
    }
}

TEST(TwoOrbit, Examples) {
    const GroupAction g = permutation_action(3);
    const Vector a = vec({1, 1, 1}), b = vec({2, 1, 1});
    const TwoOrbitFit top = two_orbit_ansatz(m3_symmetric_state(1.0 / 3.0), g, a, b, d3);
    ASSERT_TRUE(top.ok);
    EXPECT_NEAR(top.mu, 1.0, 1e-9);
    // orbit of (2,1,1)/sqrt6 alone averages to z = 5/18
    const TwoOrbitFit pure_b = two_orbit_fixed(m3_symmetric_state(5.0 / 18.0), g, a, b, d3);
    ASSERT_TRUE(pure_b.ok);
    EXPECT_NEAR(pure_b.mu, 0.0, 1e-12);
    for(double mu : {0.25, 0.6}) {
        const TwoOrbitFit f = two_orbit_fixed(m3_symmetric_state(mu / 3.0 + (1 - mu) * 5.0 / 18.0), g, a, b, d3);
        ASSERT_TRUE(f.ok);
        EXPECT_NEAR(f.mu, mu, 1e-12);
    }
    const TwoOrbitFit mid = two_orbit_ansatz(m3_symmetric_state(0.3), g, a, b, d3);
    ASSERT_TRUE(mid.ok);
    EXPECT_NEAR(mid.value, entanglement_of_formation(m3_symmetric_state(0.3), d3).value, 2e-4);
    EXPECT_LT(mid.ensemble->reconstruction_error(), 1e-8);
}

TEST(Gamma, Examples) {
    EXPECT_LT((gamma_map(Vector(vec({1, std::sqrt(2.0)}))) - vec({1, 1, 1})).norm(), 1e-15);
    EXPECT_LT((gamma_map(Vector(vec({std::sqrt(2.0), 1}))) - vec({2, 1, 1})).norm(), 1e-15);
    const auto p = gamma_map(std::array<double, 2>{0.4, 0.6});
    EXPECT_DOUBLE_EQ(p[0], 0.4);
    EXPECT_DOUBLE_EQ(p[1], 0.3);
    EXPECT_DOUBLE_EQ(p[2], 0.3);
    const Matrix rho = m2_symmetric_state(0.6);
    const Matrix g   = gamma_map(rho);
    EXPECT_NEAR(g.trace().real(), 1.0, 1e-15);
    EXPECT_NEAR(g(0, 1).real(), 0.3 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g(1, 1).real(), 0.25, 1e-15);
    // the vector rule induces the density rule
    const Vector v = vec({cplx(0.3, 0.1), 0.8});
    EXPECT_LT(maxabs(gamma_map(Matrix(v * v.adjoint())) - gamma_map(v) * gamma_map(v).adjoint()), 1e-15);
    EXPECT_THROW(gamma_map(Vector(Vector::Ones(3))), DimensionMismatch);
    EXPECT_THROW(gamma_map(Matrix(Matrix::Identity(3, 3))), DimensionMismatch);
}

TEST(Gamma, PushedOptimalEnsembleIsOptimalInDimThree) {
    for(double x : {0.2, 0.6}) {
        const RoofResult r = entanglement_of_formation(m2_symmetric_state(x), d2);
        const Ensemble e   = gamma_map(r.ensemble);
        EXPECT_LT((e.target() - gamma_map(m2_symmetric_state(x))).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LT(e.reconstruction_error(), 1e-8);
        double f = 0.0;
        for(std::size_t i = 0; i < e.size(); ++i) f += e.weights()[i] * restricted_entropy(e.members()[i], d3);
        EXPECT_NEAR(f, entanglement_of_formation(e.target(), d3).value, 2e-4);
    }
}

TEST(Scan, PointsAndInvariants) {
    ScanOptions o;
    const ScanReport rep = bifurcation_scan({1.0 / 3.0, -1.0 / 6.0, 0.0, 0.3}, o);
    ASSERT_EQ(rep.rows.size(), 4u);
    EXPECT_EQ(rep.rows[0].z, -1.0 / 6.0);
    EXPECT_NEAR(rep.rows[0].E_direct, std::log(2.0), 2e-4);
    EXPECT_NEAR(rep.rows[1].E_direct, 0.0, 2e-4);
    EXPECT_NEAR(rep.rows[3].E_direct, std::log(3.0), 2e-4);
    for(const auto &r : rep.rows) {
        EXPECT_LE(r.E_direct, std::min(r.E_orbit1, r.E_two_orbit) + 1e-6);
        EXPECT_EQ(r.runtime_ms, 0.0);
    }
    EXPECT_TRUE(std::isfinite(rep.lipschitz));
    EXPECT_GT(rep.lipschitz, 0.0);
    EXPECT_THROW(bifurcation_scan({0.0, 0.5}), InvalidState);
}

TEST(Scan, PermutationCovariance) {
    const Matrix p = permutation_action(3).elements[3];
    for(double z : {-0.12, 0.1, 0.3}) {
        const Matrix rho = m3_symmetric_state(z);
        EXPECT_NEAR(entanglement_of_formation(p * rho * p.adjoint(), d3).value, entanglement_of_formation(rho, d3).value,
                    1e-9);
    }
}

TEST(Scan, CoarseGridDetectsBothBifurcations) {
    const std::vector<double> grid = {-0.16, -0.12, -0.08, -0.04, 0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 1.0 / 3.0};
    const ScanReport rep           = bifurcation_scan(grid);
    ASSERT_TRUE(rep.detected.z0.has_value());
    ASSERT_TRUE(rep.detected.z1.has_value());
    const Bracket z0 = *rep.detected.z0, z1 = *rep.detected.z1;
    EXPECT_GT(z0.lo, -1.0 / 6.0);
    EXPECT_LT(z0.hi, 0.0);
    EXPECT_LE(z0.width(), 1e-3);
    EXPECT_GT(z1.lo, 0.0);
    EXPECT_LT(z1.hi, 1.0 / 3.0);
    EXPECT_LE(z1.width(), 1e-3);
    // zero-weight instability of the symmetric orbit below z0 only
    ASSERT_TRUE(rep.detected.z0_stability_below && rep.detected.z0_stability_above);
    EXPECT_FALSE(rep.detected.z0_stability_below->stable);
    EXPECT_TRUE(rep.detected.z0_stability_above->stable);
}

TEST(Scan, LeafLinearityRows) {
    const ScanReport rep = bifurcation_scan({0.25, 0.29, 0.31, 1.0 / 3.0});
    const auto rows      = leaf_linearity_along_scan(rep);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_FALSE(rows[0].applicable);
    for(std::size_t i = 1; i < 4; ++i) {
        ASSERT_TRUE(rows[i].applicable) << rows[i].z;
        EXPECT_LT(rows[i].gap, 5e-4);
    }
    EXPECT_NEAR(rows[3].gap, 0.0, 1e-12);
}
