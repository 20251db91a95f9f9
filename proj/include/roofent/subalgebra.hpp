#pragma once

// Finite-dimensional *-subalgebras in framed block form
//     A = U ( (+)_k M_{n_k} (x) 1_{m_k} ) U^dagger
// and the restriction map of functionals onto them.

#include "core.hpp"

#include <optional>

namespace roofent {

struct Block {
    Eigen::Index size         = 1; // n_k
    Eigen::Index multiplicity = 1; // m_k
    friend bool operator==(const Block &, const Block &) = default;
};

enum class SubalgebraKind { diagonal, tensor_factor, full, trivial, framed };

inline const char *to_string(SubalgebraKind k) {
    switch(k) {
        case SubalgebraKind::diagonal: return "diagonal";
        case SubalgebraKind::tensor_factor: return "tensor_factor";
        case SubalgebraKind::full: return "full";
        case SubalgebraKind::trivial: return "trivial";
        case SubalgebraKind::framed: return "framed";
    }
    return "framed";
}

/// Validated, immutable description of an imbedding A in M_d.
class SubalgebraSpec {
  public:
    /// `framing` may be omitted for the identity frame.
    SubalgebraSpec(Eigen::Index ambient_dim, std::vector<Block> blocks, std::optional<Matrix> framing = std::nullopt,
                   SubalgebraKind kind = SubalgebraKind::framed)
        : dim_(ambient_dim), blocks_(std::move(blocks)), kind_(kind) {
        if(dim_ < 1) throw DimensionMismatch("subalgebra: ambient_dim must be positive");
        if(blocks_.empty()) throw DimensionMismatch("subalgebra: block list is empty");
        Eigen::Index total = 0;
        for(const auto &b : blocks_) {
            if(b.size < 1 || b.multiplicity < 1) throw DimensionMismatch("subalgebra: block dims must be positive");
            offsets_.push_back(total);
            total += b.size * b.multiplicity;
        }
        if(total != dim_)
            throw DimensionMismatch("subalgebra: sum n_k*m_k = " + std::to_string(total) + " but ambient_dim = " +
                                    std::to_string(dim_));
        if(framing) {
            if(framing->rows() != dim_ || framing->cols() != dim_)
                throw DimensionMismatch("subalgebra: framing unitary has wrong shape");
            const double err = (framing->adjoint() * *framing - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
            if(err > 1e-10) throw Error("subalgebra: framing matrix is not unitary (error " + detail::fmt_double(err) + ")");
            frame_ = std::move(framing);
        }
    }

    [[nodiscard]] Eigen::Index ambient_dim() const { return dim_; }
    [[nodiscard]] const std::vector<Block> &blocks() const { return blocks_; }
    [[nodiscard]] Eigen::Index offset(std::size_t k) const { return offsets_[k]; }
    [[nodiscard]] bool has_identity_frame() const { return !frame_.has_value(); }
    [[nodiscard]] Matrix framing() const { return frame_ ? *frame_ : Matrix(Matrix::Identity(dim_, dim_)); }
    [[nodiscard]] SubalgebraKind kind() const { return kind_; }
    /// Sum of block sizes: the dimension of the space the restricted states live on.
    [[nodiscard]] Eigen::Index reduced_dim() const {
        Eigen::Index s = 0;
        for(const auto &b : blocks_) s += b.size;
        return s;
    }

    /// U^dagger x (identity frame is a no-op copy).
    [[nodiscard]] Vector unframe(const Vector &x) const { return frame_ ? Vector(frame_->adjoint() * x) : x; }
    [[nodiscard]] Matrix unframe(const Matrix &x) const {
        return frame_ ? Matrix(frame_->adjoint() * x * *frame_) : x;
    }
    [[nodiscard]] Matrix reframe(const Matrix &y) const { return frame_ ? Matrix(*frame_ * y * frame_->adjoint()) : y; }
    [[nodiscard]] Vector reframe_vector(const Vector &y) const { return frame_ ? Vector(*frame_ * y) : y; }

  private:
    Eigen::Index dim_;
    std::vector<Block> blocks_;
    std::vector<Eigen::Index> offsets_;
    std::optional<Matrix> frame_;
    SubalgebraKind kind_;
};

/// Block-diagonal operator aligned with a SubalgebraSpec: one n_k x n_k
/// matrix per block.
struct BlockOperator {
    std::vector<Matrix> blocks;

    [[nodiscard]] cplx trace() const {
        cplx t = 0;
        for(const auto &b : blocks) t += b.trace();
        return t;
    }
    [[nodiscard]] bool is_hermitian(double t = 1e-10) const {
        return std::all_of(blocks.begin(), blocks.end(), [t](const Matrix &b) { return max_asymmetry(b) <= t; });
    }
    /// Direct sum of the blocks as one dense matrix.
    [[nodiscard]] Matrix dense() const {
        Eigen::Index n = 0;
        for(const auto &b : blocks) n += b.rows();
        Matrix out = Matrix::Zero(n, n);
        Eigen::Index o = 0;
        for(const auto &b : blocks) {
            out.block(o, o, b.rows(), b.rows()) = b;
            o += b.rows();
        }
        return out;
    }
};

inline void require_aligned(const BlockOperator &y, const SubalgebraSpec &a) {
    if(y.blocks.size() != a.blocks().size())
        throw DimensionMismatch("block operator has " + std::to_string(y.blocks.size()) + " blocks, subalgebra has " +
                                std::to_string(a.blocks().size()));
    for(std::size_t k = 0; k < y.blocks.size(); ++k)
        if(y.blocks[k].rows() != a.blocks()[k].size || y.blocks[k].cols() != a.blocks()[k].size)
            throw DimensionMismatch("block " + std::to_string(k) + " has wrong size");
}

namespace detail {
// Restriction of an already-unframed matrix.
inline BlockOperator restrict_unframed(const Matrix &y, const SubalgebraSpec &a) {
    BlockOperator out;
    out.blocks.reserve(a.blocks().size());
    for(std::size_t k = 0; k < a.blocks().size(); ++k) {
        const auto [n, m] = a.blocks()[k];
        const Eigen::Index o = a.offset(k);
        Matrix b = Matrix::Zero(n, n);
        for(Eigen::Index i = 0; i < n; ++i)
            for(Eigen::Index j = 0; j < n; ++j) {
                cplx s = 0;
                for(Eigen::Index r = 0; r < m; ++r) s += y(o + i * m + r, o + j * m + r);
                b(i, j) = s;
            }
        out.blocks.push_back(std::move(b));
    }
    return out;
}
} // namespace detail

/// Restriction of a (not necessarily Hermitian) operator onto A: block k is
/// the multiplicity-space partial trace of the k-th diagonal block of
/// U^dagger X U. Linear, trace preserving, positive.
inline BlockOperator restrict_to(const Matrix &x, const SubalgebraSpec &a) {
    if(x.rows() != a.ambient_dim() || x.cols() != a.ambient_dim())
        throw DimensionMismatch("restrict: operator dim " + std::to_string(x.rows()) + " vs ambient dim " +
                                std::to_string(a.ambient_dim()));
    return detail::restrict_unframed(a.unframe(x), a);
}

/// Restriction of the rank-one operator |u><v| without forming it.
inline BlockOperator restrict_outer(const Vector &u, const Vector &v, const SubalgebraSpec &a) {
    const Vector fu = a.unframe(u);
    const Vector fv = a.unframe(v);
    BlockOperator out;
    out.blocks.reserve(a.blocks().size());
    for(std::size_t k = 0; k < a.blocks().size(); ++k) {
        const auto [n, m] = a.blocks()[k];
        const Eigen::Index o = a.offset(k);
        // reshape the block segment as n x m and contract the multiplicity index
        const Eigen::Map<const Matrix, 0, Eigen::Stride<1, Eigen::Dynamic>> su(fu.data() + o, n, m,
                                                                               Eigen::Stride<1, Eigen::Dynamic>(1, m));
        const Eigen::Map<const Matrix, 0, Eigen::Stride<1, Eigen::Dynamic>> sv(fv.data() + o, n, m,
                                                                               Eigen::Stride<1, Eigen::Dynamic>(1, m));
        out.blocks.emplace_back(su * sv.adjoint());
    }
    return out;
}

/// Adjoint of restrict_to with respect to the trace pairing:
/// U ( (+)_k y_k (x) 1_{m_k} ) U^dagger.
inline Matrix adjoint_restrict(const BlockOperator &y, const SubalgebraSpec &a) {
    require_aligned(y, a);
    const Eigen::Index d = a.ambient_dim();
    Matrix out = Matrix::Zero(d, d);
    for(std::size_t k = 0; k < a.blocks().size(); ++k) {
        const auto [n, m] = a.blocks()[k];
        const Eigen::Index o = a.offset(k);
        for(Eigen::Index i = 0; i < n; ++i)
            for(Eigen::Index j = 0; j < n; ++j)
                for(Eigen::Index r = 0; r < m; ++r) out(o + i * m + r, o + j * m + r) = y.blocks[k](i, j);
    }
    return a.reframe(out);
}

/// adjoint_restrict(y) applied to a vector, without forming the dense matrix.
inline Vector adjoint_restrict_apply(const BlockOperator &y, const SubalgebraSpec &a, const Vector &v) {
    const Vector fv = a.unframe(v);
    Vector out(fv.size());
    for(std::size_t k = 0; k < a.blocks().size(); ++k) {
        const auto [n, m] = a.blocks()[k];
        const Eigen::Index o = a.offset(k);
        const Eigen::Map<const Matrix, 0, Eigen::Stride<1, Eigen::Dynamic>> sv(fv.data() + o, n, m,
                                                                               Eigen::Stride<1, Eigen::Dynamic>(1, m));
        Eigen::Map<Matrix, 0, Eigen::Stride<1, Eigen::Dynamic>> so(out.data() + o, n, m,
                                                                   Eigen::Stride<1, Eigen::Dynamic>(1, m));
        so = y.blocks[k] * sv;
    }
    return a.reframe_vector(out);
}

/// -sum_k Tr d_k ln d_k over the blocks (eigenvalues below `floor` skipped).
inline double block_entropy(const BlockOperator &b, double floor = 0.0) {
    double s = 0.0;
    for(const auto &blk : b.blocks) {
        if(blk.rows() == 1) {
            const double p = blk(0, 0).real();
            if(p > floor) s -= p * std::log(p);
        } else {
            s += entropy_of_spectrum(eigvalsh_unchecked(blk), floor);
        }
    }
    return s;
}

/// Entropy of the state restricted to A, in nats.
inline double restricted_entropy(const Matrix &rho, const SubalgebraSpec &a) {
    require_hermitian(rho);
    const BlockOperator r = restrict_to(rho, a);
    for(const auto &blk : r.blocks) {
        const RealVector ev = eigvalsh_unchecked(0.5 * (blk + blk.adjoint()));
        if(ev.minCoeff() < -tol::negativity)
            throw InvalidState("restricted state has negative eigenvalue " + detail::fmt_double(ev.minCoeff()));
    }
    double s = 0.0;
    for(const auto &blk : r.blocks) s += entropy_of_spectrum(eigvalsh_unchecked(0.5 * (blk + blk.adjoint())).cwiseMax(0.0));
    return s;
}

/// Block-wise logarithm on the support (eigenvalues <= null_tol map to 0).
inline BlockOperator block_log_on_support(const BlockOperator &b, double null_tol = tol::support) {
    BlockOperator out;
    out.blocks.reserve(b.blocks.size());
    for(const auto &blk : b.blocks) {
        if(blk.rows() == 1) {
            const double p = blk(0, 0).real();
            out.blocks.emplace_back(Matrix::Constant(1, 1, p > null_tol ? std::log(p) : 0.0));
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (blk + blk.adjoint()));
        RealVector l = RealVector::Zero(blk.rows());
        for(Eigen::Index i = 0; i < blk.rows(); ++i)
            if(es.eigenvalues()(i) > null_tol) l(i) = std::log(es.eigenvalues()(i));
        out.blocks.emplace_back(es.eigenvectors() * l.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
    }
    return out;
}

/// Block-wise support projector (eigenvalues > null_tol).
inline BlockOperator block_support(const BlockOperator &b, double null_tol = tol::support) {
    BlockOperator out;
    for(const auto &blk : b.blocks) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (blk + blk.adjoint()));
        RealVector l = RealVector::Zero(blk.rows());
        for(Eigen::Index i = 0; i < blk.rows(); ++i)
            if(es.eigenvalues()(i) > null_tol) l(i) = 1.0;
        out.blocks.emplace_back(es.eigenvectors() * l.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
    }
    return out;
}

inline cplx trace_pairing(const BlockOperator &x, const BlockOperator &y) {
    cplx s = 0;
    for(std::size_t k = 0; k < x.blocks.size(); ++k) s += (x.blocks[k] * y.blocks[k]).trace();
    return s;
}

// --- constructors -----------------------------------------------------------

inline SubalgebraSpec diagonal_subalgebra(Eigen::Index n) {
    return SubalgebraSpec(n, std::vector<Block>(static_cast<std::size_t>(n), Block{1, 1}), std::nullopt,
                          SubalgebraKind::diagonal);
}

inline SubalgebraSpec full_subalgebra(Eigen::Index n) {
    return SubalgebraSpec(n, {Block{n, 1}}, std::nullopt, SubalgebraKind::full);
}

inline SubalgebraSpec trivial_subalgebra(Eigen::Index n) {
    return SubalgebraSpec(n, {Block{1, n}}, std::nullopt, SubalgebraKind::trivial);
}

/// The algebra acting on factor `which` of a tensor product with the given
/// factor dimensions. The framing permutation moves the kept factor first.
inline SubalgebraSpec tensor_factor_subalgebra(const std::vector<Eigen::Index> &dims, std::size_t which) {
    if(dims.empty() || which >= dims.size()) throw DimensionMismatch("tensor_factor: factor index out of range");
    Eigen::Index total = 1;
    for(auto d : dims) {
        if(d < 1) throw DimensionMismatch("tensor_factor: factor dims must be positive");
        total *= d;
    }
    const Eigen::Index nk   = dims[which];
    const Eigen::Index rest = total / nk;
    Matrix perm             = Matrix::Zero(total, total);
    for(Eigen::Index flat = 0; flat < total; ++flat) {
        Eigen::Index stride = total, kept = 0, other = 0;
        for(std::size_t f = 0; f < dims.size(); ++f) {
            stride /= dims[f];
            const Eigen::Index digit = (flat / stride) % dims[f];
            if(f == which) kept = digit;
            else other = other * dims[f] + digit;
        }
        perm(flat, kept * rest + other) = 1.0; // column = new position
    }
    std::optional<Matrix> frame;
    if(!perm.isIdentity()) frame = std::move(perm);
    return SubalgebraSpec(total, {Block{nk, rest}}, std::move(frame), SubalgebraKind::tensor_factor);
}

/// Restrict an arbitrary framing's block algebra, e.g. a rotated diagonal.
inline SubalgebraSpec framed_subalgebra(Eigen::Index ambient_dim, std::vector<Block> blocks, Matrix framing) {
    return SubalgebraSpec(ambient_dim, std::move(blocks), std::move(framing), SubalgebraKind::framed);
}

} // namespace roofent
