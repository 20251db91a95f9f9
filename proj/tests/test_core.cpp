#include <gtest/gtest.h>

#include <cstring>

#include <roofent/core.hpp>
#include <roofent/random.hpp>

using namespace roofent;

namespace {

Matrix diag(std::initializer_list<double> v) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for(double x : v) m(i, i) = x, ++i;
    return m;
}

Matrix rand_state(std::uint64_t seed, Eigen::Index d, Eigen::Index r = 0) {
    return random_kit(seed, RandomKind::density, d, r);
}

} // namespace

TEST(Eigh, DiagonalInputSortsAscending) {
    const auto e = eigh(diag({3, 1, 2}));
    EXPECT_NEAR(e.values(0), 1, 1e-14);
    EXPECT_NEAR(e.values(1), 2, 1e-14);
    EXPECT_NEAR(e.values(2), 3, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 2)), 1, 1e-14);
}

TEST(Eigh, PauliX) {
    const auto e = eigh(pauli_x());
    EXPECT_NEAR(e.values(0), -1, 1e-14);
    EXPECT_NEAR(e.values(1), 1, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 0) + e.vectors(1, 0)), 0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 1) - e.vectors(1, 1)), 0, 1e-14);
}

TEST(Eigh, RandomReconstruction) {
    CounterRng rng(11);
    const Matrix h = random_hermitian(rng, 6);
    const auto e   = eigh(h);
    const Matrix back = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT((back - h).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((e.vectors.adjoint() * e.vectors - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Eigh, DegenerateBasisIsReproducible) {
    CounterRng rng(5);
    const Matrix u = haar_unitary(rng, 4);
    const Matrix h = u * diag({1, 1, 2, 2}) * u.adjoint();
    const auto a = eigh(h), b = eigh(h);
    EXPECT_EQ(a.vectors, b.vectors);
}

TEST(Eigh, RejectsNonHermitian) {
    Matrix m = pauli_x();
    m(0, 1)  = 2.0;
    EXPECT_THROW(eigh(m), NotHermitian);
    try {
        eigh(m);
    } catch(const NotHermitian &e) {
        EXPECT_NEAR(e.max_asymmetry, 1.0, 1e-12);
    }
}

TEST(Entropy, Examples) {
    EXPECT_NEAR(von_neumann_entropy(Matrix::Identity(2, 2) / 2.0), std::log(2.0), 1e-14);
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix::from_pure(random_kit(3, RandomKind::pure, 4)).matrix()), 0, 1e-12);
    EXPECT_NEAR(von_neumann_entropy(diag({0.5, 0.25, 0.25})), 1.5 * std::log(2.0), 1e-14);
}

TEST(Entropy, RejectsNegativeEigenvalue) {
    EXPECT_THROW(von_neumann_entropy(diag({1.01, -0.01})), InvalidState);
    EXPECT_NO_THROW(von_neumann_entropy(diag({1.0 + 1e-11, -1e-11})));
}

TEST(Entropy, Concavity) {
    for(std::uint64_t s = 0; s < 10; ++s) {
        const Matrix a = rand_state(100 + s, 3), b = rand_state(200 + s, 3, 2);
        for(double t : {0.25, 0.5, 0.75})
            EXPECT_GE(von_neumann_entropy(t * a + (1 - t) * b),
                      t * von_neumann_entropy(a) + (1 - t) * von_neumann_entropy(b) - 1e-9);
    }
}

TEST(Entropy, UnitaryInvariance) {
    for(std::uint64_t s = 0; s < 10; ++s) {
        const Matrix r = rand_state(s, 4);
        const Matrix u = random_kit(1000 + s, RandomKind::haar_unitary, 4);
        EXPECT_NEAR(von_neumann_entropy(u * r * u.adjoint()), von_neumann_entropy(r), 1e-10);
    }
}

TEST(LogOnSupport, Examples) {
    const SupportLog l = matrix_log_on_support(diag({0.5, 0.5, 0}));
    EXPECT_LT((l.log - diag({-std::log(2.0), -std::log(2.0), 0})).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(l.rank, 2);
    EXPECT_LT((l.support - diag({1, 1, 0})).cwiseAbs().maxCoeff(), 1e-14);
    const SupportLog id = matrix_log_on_support(Matrix::Identity(3, 3));
    EXPECT_LT(id.log.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(id.rank, 3);
    EXPECT_THROW(matrix_log_on_support(diag({1, -1e-3}), 1e-9), InvalidState);
}

TEST(RelativeEntropy, Examples) {
    const Matrix r = rand_state(9, 3);
    EXPECT_NEAR(relative_entropy(r, r), 0, 1e-12);
    Vector v(2);
    v << 0.6, cplx(0, 0.8);
    EXPECT_NEAR(relative_entropy(Matrix::Identity(2, 2) / 2.0, v * v.adjoint()), std::log(2.0), 1e-12);
    EXPECT_TRUE(std::isinf(relative_entropy(diag({1, 0}), diag({0, 1}))));
    EXPECT_GT(relative_entropy(diag({1, 0}), diag({0, 1})), 0);
}

TEST(RelativeEntropy, NonNegative) {
    for(std::uint64_t s = 0; s < 20; ++s) {
        const Matrix a = rand_state(300 + s, 3), b = rand_state(400 + s, 3);
        EXPECT_GT(relative_entropy(a, b), 1e-8);
    }
}

TEST(RelativeEntropy, PureDecompositionIdentity) {
    // sum_k l_k S(rho | rho_k) = S(rho) for pure rho_k
    for(std::uint64_t s = 0; s < 10; ++s) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(s % 3);
        const Matrix rho     = rand_state(500 + s, d);
        const auto e         = eigh(rho);
        const Matrix v       = random_kit(600 + s, RandomKind::haar_unitary, d);
        double sum           = 0.0;
        for(Eigen::Index i = 0; i < d; ++i) {
            Vector psi = Vector::Zero(d);
            for(Eigen::Index j = 0; j < d; ++j) psi += v(i, j) * std::sqrt(e.values(j)) * e.vectors.col(j);
            const double l = psi.squaredNorm();
            sum += l * relative_entropy(rho, psi * psi.adjoint() / l);
        }
        EXPECT_NEAR(sum, von_neumann_entropy(rho), 1e-8);
    }
}

TEST(PartialTrace, Examples) {
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = M_SQRT1_2;
    EXPECT_LT((partial_trace(bell * bell.adjoint(), {2, 2}, {0}) - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(),
              1e-14);
    const Matrix a = rand_state(1, 2), b = rand_state(2, 3);
    EXPECT_LT((partial_trace(kron(a, b), {2, 3}, {0}) - a).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((partial_trace(kron(a, b), {2, 3}, {1}) - b).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((partial_trace(Matrix::Identity(4, 4) / 4.0, {2, 2}, {1}) - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(),
              1e-14);
    EXPECT_THROW(partial_trace(a, {2, 3}, {0}), DimensionMismatch);
}

TEST(PartialTrace, PreservesTraceAndPositivity) {
    const Matrix r = rand_state(77, 12);
    const Matrix p = partial_trace(r, {2, 3, 2}, {0, 2});
    EXPECT_NEAR(p.trace().real(), 1.0, 1e-12);
    EXPECT_GE(eigvalsh_unchecked(p).minCoeff(), -1e-12);
}

TEST(RandomKit, Determinism) {
    const Matrix u1 = random_kit(7, RandomKind::haar_unitary, 3);
    const Matrix u2 = random_kit(7, RandomKind::haar_unitary, 3);
    EXPECT_EQ(0, std::memcmp(u1.data(), u2.data(), sizeof(cplx) * 9));
    EXPECT_LT((u1.adjoint() * u1 - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NE(random_kit(8, RandomKind::haar_unitary, 3), u1);
}

TEST(RandomKit, DensityRankAndPureNorm) {
    const Matrix r = random_kit(7, RandomKind::density, 4, 2);
    EXPECT_NO_THROW(DensityMatrix{r});
    const RealVector ev = eigh(r).values;
    EXPECT_EQ((ev.array() > 1e-9).count(), 2);
    EXPECT_NEAR(random_kit(7, RandomKind::pure, 5).norm(), 1.0, 1e-12);
    EXPECT_THROW(random_kit(7, RandomKind::density, 3, 4), DimensionMismatch);
}

TEST(DensityMatrix, Validation) {
    EXPECT_THROW(DensityMatrix(diag({0.5, 0.4})), InvalidState);
    EXPECT_THROW(DensityMatrix(diag({1.2, -0.2})), InvalidState);
    EXPECT_NO_THROW(DensityMatrix::tracial(3));
    EXPECT_TRUE(PureStateVector::normalized(Vector::Ones(3)).is_normalized());
}
