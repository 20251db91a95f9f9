#pragma once

// Seeded, reproducible random matrices.
//
// The generator is counter based: the i-th 64-bit draw of stream s under key
// k is splitmix64(k ^ splitmix64(s) + i * golden). Streams are independent
// functions of (seed, stream), so splitting work across restarts or threads
// never changes what any single stream produces. Normal variates use the
// Box-Muller transform written out here so results do not depend on the
// standard library's distribution implementations.

#include "core.hpp"

#include <cstdint>

namespace roofent {

namespace detail {
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}
} // namespace detail

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(detail::splitmix64(seed ^ detail::splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

    std::uint64_t next_u64() { return detail::splitmix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

    /// Uniform in (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11U) + 0.5) * 0x1.0p-53; }

    double normal() {
        if(has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r  = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        spare_          = r * std::sin(th);
        has_spare_      = true;
        return r * std::cos(th);
    }

    /// Standard complex normal (E|z|^2 = 1).
    cplx complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }

    [[nodiscard]] std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_          = 0.0;
    bool has_spare_        = false;
};

inline Matrix ginibre(CounterRng &rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix g(rows, cols);
    for(Eigen::Index j = 0; j < cols; ++j)
        for(Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
    return g;
}

/// Thin QR factor with the diagonal of R made real positive, so the result
/// is a function of the input alone.
inline Matrix orthonormalize_columns(const Matrix &a) {
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q       = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    for(Eigen::Index j = 0; j < a.cols(); ++j) {
        const cplx d = r(j, j);
        if(std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// Haar-distributed rows x cols isometry (cols <= rows).
inline Matrix haar_isometry(CounterRng &rng, Eigen::Index rows, Eigen::Index cols) {
    return orthonormalize_columns(ginibre(rng, rows, cols));
}

inline Matrix haar_unitary(CounterRng &rng, Eigen::Index dim) { return haar_isometry(rng, dim, dim); }

inline Vector random_pure(CounterRng &rng, Eigen::Index dim) {
    Vector v = ginibre(rng, dim, 1).col(0);
    return v / v.norm();
}

/// Random density matrix of exactly the requested rank (induced measure).
inline Matrix random_density(CounterRng &rng, Eigen::Index dim, Eigen::Index rank) {
    if(rank < 1 || rank > dim)
        throw DimensionMismatch("random_density: rank " + std::to_string(rank) + " not in [1, " + std::to_string(dim) + "]");
    const Matrix g = ginibre(rng, dim, rank);
    Matrix rho     = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

/// Random Hermitian matrix (GUE-like) with O(1) entries.
inline Matrix random_hermitian(CounterRng &rng, Eigen::Index dim) {
    const Matrix g = ginibre(rng, dim, dim);
    return 0.5 * (g + g.adjoint());
}

enum class RandomKind { haar_unitary, pure, density };

/// One-shot seeded generation. Vectors come back as a single column.
inline Matrix random_kit(std::uint64_t seed, RandomKind kind, Eigen::Index dim, Eigen::Index rank = 0) {
    if(dim < 1) throw DimensionMismatch("random_kit: dim must be positive");
    if(rank > dim) throw DimensionMismatch("random_kit: rank " + std::to_string(rank) + " exceeds dim " + std::to_string(dim));
    CounterRng rng(seed);
    switch(kind) {
        case RandomKind::haar_unitary: return haar_unitary(rng, dim);
        case RandomKind::pure: return random_pure(rng, dim);
        case RandomKind::density: return random_density(rng, dim, rank == 0 ? dim : rank);
    }
    return {};
}

} // namespace roofent
