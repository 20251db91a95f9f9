#pragma once

// Dense Hermitian linear algebra and entropies on finite-dimensional
// state spaces. All logarithms are natural (results in nats).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace roofent {

using cplx   = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Error hierarchy. Everything thrown by the library derives from Error so
// front ends can map it onto a single "input error" exit path.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};
class InvalidState : public Error {
  public:
    using Error::Error;
};
class DimensionMismatch : public Error {
  public:
    using Error::Error;
};
class NotHermitian : public Error {
  public:
    double max_asymmetry;
    NotHermitian(const std::string &what, double asym) : Error(what), max_asymmetry(asym) {}
};

namespace tol {
inline constexpr double hermitian      = 1e-12; // relative asymmetry
inline constexpr double negativity     = 1e-10; // eigenvalue clamp window
inline constexpr double trace          = 1e-10;
inline constexpr double rank           = 1e-9;  // eigenvalues above this count towards rank
inline constexpr double support        = 1e-12; // restricted-state eigenvalues frozen out of logs
inline constexpr double pure_norm      = 1e-10;
} // namespace tol

namespace detail {
inline std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}
} // namespace detail

inline double max_asymmetry(const Matrix &h) {
    if(h.size() == 0) return 0.0;
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_square(const Matrix &m, const char *who) {
    if(m.rows() != m.cols())
        throw DimensionMismatch(std::string(who) + ": matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected square");
}

inline void require_hermitian(const Matrix &h, double rel_tol = tol::hermitian) {
    require_square(h, "hermitian");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asym  = max_asymmetry(h);
    if(asym > rel_tol * scale)
        throw NotHermitian("matrix is not Hermitian: max |H - H^dagger| = " + detail::fmt_double(asym), asym);
}

/// Square complex matrix that is Hermitian within `tol::hermitian` (relative).
/// The stored entries are symmetrised on construction.
class HermitianMatrix {
  public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {
        require_hermitian(m_);
        m_ = 0.5 * (m_ + m_.adjoint()).eval();
    }
    [[nodiscard]] Eigen::Index dim() const { return m_.rows(); }
    [[nodiscard]] const Matrix &matrix() const { return m_; }
    operator const Matrix &() const { return m_; } // NOLINT(google-explicit-constructor)

  protected:
    Matrix m_;
};

/// Positive unit-trace matrix: eigenvalues >= -1e-10 and |Tr - 1| <= 1e-10.
class DensityMatrix : public HermitianMatrix {
  public:
    DensityMatrix() = default;
    explicit DensityMatrix(Matrix m);

    /// Builds |v><v| / <v|v>.
    static DensityMatrix from_pure(const Vector &v) {
        const double n2 = v.squaredNorm();
        if(n2 <= 0.0) throw InvalidState("pure state vector has zero norm");
        return DensityMatrix(Matrix(v * v.adjoint() / n2));
    }
    /// Diagonal state from a probability vector.
    static DensityMatrix diagonal(const std::vector<double> &p) {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.size()));
        for(std::size_t i = 0; i < p.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
        return DensityMatrix(std::move(m));
    }
    static DensityMatrix tracial(Eigen::Index d) {
        if(d < 1) throw DimensionMismatch("tracial state needs dim >= 1");
        return DensityMatrix(Matrix(Matrix::Identity(d, d) / static_cast<double>(d)));
    }
};

/// Possibly unnormalised pure state. `weight()` is the squared norm.
class PureStateVector {
  public:
    PureStateVector() = default;
    explicit PureStateVector(Vector v) : v_(std::move(v)) {}
    static PureStateVector normalized(Vector v) {
        const double n = v.norm();
        if(n <= 0.0) throw InvalidState("cannot normalise the zero vector");
        return PureStateVector(v / n);
    }
    [[nodiscard]] Eigen::Index dim() const { return v_.size(); }
    [[nodiscard]] double weight() const { return v_.squaredNorm(); }
    [[nodiscard]] bool is_normalized(double t = tol::pure_norm) const { return std::abs(weight() - 1.0) <= t; }
    [[nodiscard]] const Vector &vector() const { return v_; }
    [[nodiscard]] Matrix projector() const { return v_ * v_.adjoint(); }

  private:
    Vector v_;
};

struct EigenDecomposition {
    RealVector values; // ascending
    Matrix vectors;    // orthonormal columns
};

namespace detail {

// Makes the first clearly non-zero component of v real and positive.
inline void fix_phase(Eigen::Ref<Vector> v) {
    const double thresh = 1e-6 * v.cwiseAbs().maxCoeff();
    for(Eigen::Index k = 0; k < v.size(); ++k) {
        if(std::abs(v(k)) > thresh) {
            v *= std::conj(v(k)) / std::abs(v(k));
            v(k) = std::abs(v(k));
            return;
        }
    }
}

// Replaces the columns of q (an orthonormal basis of a degenerate eigenspace)
// by the Gram-Schmidt orthonormalisation of the coordinate vectors projected
// onto that space, taken in lexicographic order.
inline Matrix canonical_basis(const Matrix &q) {
    const Eigen::Index d = q.rows();
    const Eigen::Index m = q.cols();
    Matrix out(d, m);
    Eigen::Index filled = 0;
    for(Eigen::Index k = 0; k < d && filled < m; ++k) {
        Vector v = q * q.row(k).adjoint(); // projection of e_k
        for(Eigen::Index j = 0; j < filled; ++j) v -= out.col(j) * out.col(j).dot(v);
        for(Eigen::Index j = 0; j < filled; ++j) v -= out.col(j) * out.col(j).dot(v);
        const double n = v.norm();
        if(n > 1e-3) out.col(filled++) = v / n;
    }
    if(filled < m) return q; // unreachable for an orthonormal q
    return out;
}

} // namespace detail

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
/// Eigenvectors are made reproducible: degenerate eigenspaces get the
/// lexicographic Gram-Schmidt basis and every vector has its first
/// significant component real positive.
inline EigenDecomposition eigh(const Matrix &h) {
    require_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
    EigenDecomposition out{es.eigenvalues(), es.eigenvectors()};
    const Eigen::Index d  = h.rows();
    const double scale    = std::max(1.0, out.values.cwiseAbs().maxCoeff());
    const double cluster  = 1e-9 * scale;
    Eigen::Index start = 0;
    while(start < d) {
        Eigen::Index end = start + 1;
        while(end < d && out.values(end) - out.values(end - 1) < cluster) ++end;
        if(end - start > 1) {
            out.vectors.middleCols(start, end - start) = detail::canonical_basis(out.vectors.middleCols(start, end - start));
        }
        start = end;
    }
    for(Eigen::Index k = 0; k < d; ++k) detail::fix_phase(out.vectors.col(k));
    return out;
}

/// Eigenvalues only; no Hermiticity check (internal hot paths).
inline RealVector eigvalsh_unchecked(const Matrix &h) {
    if(h.rows() == 1) return RealVector::Constant(1, h(0, 0).real());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// -sum p ln p over the given spectrum, treating 0 ln 0 as 0. Entries below
/// `floor` are skipped. The spectrum need not sum to one.
inline double entropy_of_spectrum(const RealVector &p, double floor = 0.0) {
    double s = 0.0;
    for(Eigen::Index i = 0; i < p.size(); ++i)
        if(p(i) > floor) s -= p(i) * std::log(p(i));
    return s;
}

inline DensityMatrix::DensityMatrix(Matrix m) : HermitianMatrix(std::move(m)) {
    const double tr = m_.trace().real();
    if(std::abs(tr - 1.0) > tol::trace)
        throw InvalidState("density matrix trace is " + detail::fmt_double(tr) + ", expected 1");
    const RealVector ev = eigvalsh_unchecked(m_);
    if(ev.size() > 0 && ev.minCoeff() < -tol::negativity)
        throw InvalidState("density matrix has negative eigenvalue " + detail::fmt_double(ev.minCoeff()));
}

/// Von Neumann entropy in nats. Eigenvalues in [-1e-10, 0] are clamped to
/// zero, anything more negative is an error.
inline double von_neumann_entropy(const Matrix &rho) {
    require_hermitian(rho);
    const RealVector ev = eigvalsh_unchecked(0.5 * (rho + rho.adjoint()));
    if(ev.size() > 0 && ev.minCoeff() < -tol::negativity)
        throw InvalidState("negative eigenvalue " + detail::fmt_double(ev.minCoeff()) + " in entropy argument");
    return entropy_of_spectrum(ev.cwiseMax(0.0).cwiseMin(1.0));
}

struct SupportLog {
    Matrix log;     // ln on the support, 0 on the null space
    Matrix support; // orthogonal projector onto the support
    Eigen::Index rank = 0;
};

/// Logarithm restricted to eigenvalues above `null_tol`.
inline SupportLog matrix_log_on_support(const Matrix &rho, double null_tol = tol::rank) {
    require_hermitian(rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
    const RealVector &ev = es.eigenvalues();
    if(ev.size() > 0 && ev.minCoeff() < -null_tol)
        throw InvalidState("negative eigenvalue " + detail::fmt_double(ev.minCoeff()) + " below -" +
                           detail::fmt_double(null_tol));
    const Eigen::Index d = rho.rows();
    RealVector logs = RealVector::Zero(d);
    RealVector mask = RealVector::Zero(d);
    SupportLog out;
    for(Eigen::Index i = 0; i < d; ++i) {
        if(ev(i) > null_tol) {
            logs(i) = std::log(ev(i));
            mask(i) = 1.0;
            ++out.rank;
        }
    }
    const Matrix &q = es.eigenvectors();
    out.log     = q * logs.cast<cplx>().asDiagonal() * q.adjoint();
    out.support = q * mask.cast<cplx>().asDiagonal() * q.adjoint();
    return out;
}

/// Relative entropy S(base|component) = Tr rho_c (ln rho_c - ln rho_b).
/// Returns +infinity when the support of `component` is not contained in the
/// support of `base`.
inline double relative_entropy(const Matrix &base, const Matrix &component, double null_tol = tol::rank) {
    if(base.rows() != component.rows())
        throw DimensionMismatch("relative_entropy: dimensions " + std::to_string(base.rows()) + " and " +
                                std::to_string(component.rows()));
    const SupportLog lb = matrix_log_on_support(base, null_tol);
    const SupportLog lc = matrix_log_on_support(component, null_tol);
    const Matrix outside = Matrix::Identity(base.rows(), base.rows()) - lb.support;
    const double leak    = (outside * component).trace().real();
    if(leak > 1e2 * null_tol) return std::numeric_limits<double>::infinity();
    return (component * (lc.log - lb.log)).trace().real();
}

/// Partial trace of a state on a tensor product, keeping the listed factors
/// (in ascending order). Factor 0 is the most significant index.
inline Matrix partial_trace(const Matrix &rho, const std::vector<Eigen::Index> &dims, std::vector<Eigen::Index> keep) {
    require_square(rho, "partial_trace");
    const Eigen::Index total =
        std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<Eigen::Index>());
    if(dims.empty() || total != rho.rows())
        throw DimensionMismatch("partial_trace: product of factor dims " + std::to_string(total) +
                                " does not match matrix dim " + std::to_string(rho.rows()));
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    const auto nf = static_cast<Eigen::Index>(dims.size());
    std::vector<bool> kept(dims.size(), false);
    for(auto k : keep) {
        if(k < 0 || k >= nf) throw DimensionMismatch("partial_trace: factor index out of range");
        kept[static_cast<std::size_t>(k)] = true;
    }
    Eigen::Index dk = 1;
    for(std::size_t f = 0; f < dims.size(); ++f)
        if(kept[f]) dk *= dims[f];

    // Split a flat index into (kept index, traced index).
    auto split = [&](Eigen::Index flat) {
        Eigen::Index ik = 0, it = 0;
        Eigen::Index stride = total;
        for(std::size_t f = 0; f < dims.size(); ++f) {
            stride /= dims[f];
            const Eigen::Index digit = (flat / stride) % dims[f];
            if(kept[f]) ik = ik * dims[f] + digit;
            else it = it * dims[f] + digit;
        }
        return std::pair{ik, it};
    };
    std::vector<std::pair<Eigen::Index, Eigen::Index>> idx(static_cast<std::size_t>(total));
    for(Eigen::Index i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = split(i);

    Matrix out = Matrix::Zero(dk, dk);
    for(Eigen::Index i = 0; i < total; ++i) {
        const auto [ki, ti] = idx[static_cast<std::size_t>(i)];
        for(Eigen::Index j = 0; j < total; ++j) {
            const auto [kj, tj] = idx[static_cast<std::size_t>(j)];
            if(ti == tj) out(ki, kj) += rho(i, j);
        }
    }
    return out;
}

/// Kronecker product of two dense matrices.
inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for(Eigen::Index i = 0; i < a.rows(); ++i)
        for(Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

/// Positive semidefinite square root via the spectral decomposition.
inline Matrix psd_sqrt(const Matrix &h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
    const RealVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace roofent
