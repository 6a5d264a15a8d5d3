#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"

namespace symiso {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Block {
    int dim = 1;
    double weight = 1.0;

    friend bool operator==(const Block&, const Block&) = default;
};

/// Finite-dimensional von Neumann algebra  M_{n_1} + ... + M_{n_K}  with the
/// faithful trace  tau(x) = sum_k c_k Tr(x_k).
class FiniteAlgebra {
public:
    FiniteAlgebra() : FiniteAlgebra(std::vector<Block>{{1, 1.0}}) {}

    explicit FiniteAlgebra(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
        if (blocks_.empty()) throw Error(Errc::InvalidArgument, "algebra needs at least one block");
        for (const auto& b : blocks_) {
            if (b.dim < 1) throw Error(Errc::InvalidArgument, "block dim must be >= 1");
            if (!(b.weight > 0.0) || !std::isfinite(b.weight))
                throw Error(Errc::InvalidArgument, "block weight must be finite and > 0");
        }
        offsets_.reserve(blocks_.size());
        int off = 0;
        for (const auto& b : blocks_) {
            offsets_.push_back(off);
            off += b.dim * b.dim;
        }
        vector_dim_ = off;
    }

    static FiniteAlgebra matrix(int n, double weight = 1.0) { return FiniteAlgebra({{n, weight}}); }

    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t num_blocks() const { return blocks_.size(); }
    int dim(std::size_t k) const { return blocks_.at(k).dim; }
    double weight(std::size_t k) const { return blocks_.at(k).weight; }

    /// tau(1)
    double total_trace() const {
        double t = 0.0;
        for (const auto& b : blocks_) t += b.weight * b.dim;
        return t;
    }

    /// Dimension as a complex vector space, sum_k n_k^2.
    int vector_dim() const { return vector_dim_; }
    int offset(std::size_t k) const { return offsets_.at(k); }

    friend bool operator==(const FiniteAlgebra& a, const FiniteAlgebra& b) { return a.blocks_ == b.blocks_; }

private:
    std::vector<Block> blocks_;
    std::vector<int> offsets_;
    int vector_dim_ = 0;
};

/// An element of a FiniteAlgebra: one square complex matrix per block.
class Operator {
public:
    Operator() = default;

    Operator(FiniteAlgebra alg, std::vector<Matrix> blocks) : alg_(std::move(alg)), blocks_(std::move(blocks)) {
        if (blocks_.size() != alg_.num_blocks())
            throw Error(Errc::ShapeMismatch, "operator has " + std::to_string(blocks_.size()) +
                                                 " blocks, algebra has " + std::to_string(alg_.num_blocks()));
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            if (blocks_[k].rows() != alg_.dim(k) || blocks_[k].cols() != alg_.dim(k))
                throw Error(Errc::ShapeMismatch, "block " + std::to_string(k) + " has wrong shape");
        }
    }

    static Operator zero(const FiniteAlgebra& alg) { return scalar(alg, 0.0); }
    static Operator identity(const FiniteAlgebra& alg) { return scalar(alg, 1.0); }

    static Operator scalar(const FiniteAlgebra& alg, Complex c) {
        std::vector<Matrix> b;
        for (const auto& blk : alg.blocks()) b.push_back(c * Matrix::Identity(blk.dim, blk.dim));
        return {alg, std::move(b)};
    }

    /// Central projection onto block k.
    static Operator block_identity(const FiniteAlgebra& alg, std::size_t k) {
        auto z = zero(alg);
        z.blocks_.at(k).setIdentity();
        return z;
    }

    static Operator matrix_unit(const FiniteAlgebra& alg, std::size_t k, int i, int j) {
        auto z = zero(alg);
        z.blocks_.at(k)(i, j) = 1.0;
        return z;
    }

    static Operator diagonal(const FiniteAlgebra& alg, const std::vector<std::vector<Complex>>& diags) {
        auto z = zero(alg);
        if (diags.size() != alg.num_blocks()) throw Error(Errc::ShapeMismatch, "diagonal: block count");
        for (std::size_t k = 0; k < diags.size(); ++k) {
            if (static_cast<int>(diags[k].size()) != alg.dim(k)) throw Error(Errc::ShapeMismatch, "diagonal: size");
            for (int i = 0; i < alg.dim(k); ++i) z.blocks_[k](i, i) = diags[k][i];
        }
        return z;
    }

    /// Inverse of vectorize(): blockwise row-major matrix units.
    static Operator from_vector(const FiniteAlgebra& alg, const Vector& v) {
        if (v.size() != alg.vector_dim()) throw Error(Errc::ShapeMismatch, "from_vector: wrong length");
        std::vector<Matrix> b;
        for (std::size_t k = 0; k < alg.num_blocks(); ++k) {
            const int n = alg.dim(k);
            Matrix m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = v(alg.offset(k) + i * n + j);
            b.push_back(std::move(m));
        }
        return {alg, std::move(b)};
    }

    Vector vectorize() const {
        Vector v(alg_.vector_dim());
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const int n = alg_.dim(k);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) v(alg_.offset(k) + i * n + j) = blocks_[k](i, j);
        }
        return v;
    }

    const FiniteAlgebra& algebra() const { return alg_; }
    std::size_t num_blocks() const { return blocks_.size(); }
    const Matrix& block(std::size_t k) const { return blocks_.at(k); }
    Matrix& block(std::size_t k) { return blocks_.at(k); }
    const std::vector<Matrix>& blocks() const { return blocks_; }

    Operator adjoint() const {
        return map_blocks([](const Matrix& m) -> Matrix { return m.adjoint(); });
    }

    Operator transpose() const {
        return map_blocks([](const Matrix& m) -> Matrix { return m.transpose(); });
    }

    template <class F>
    Operator map_blocks(F&& f) const {
        std::vector<Matrix> b;
        b.reserve(blocks_.size());
        for (const auto& m : blocks_) b.push_back(f(m));
        return {alg_, std::move(b)};
    }

    /// Operator norm, max over blocks of the largest singular value.
    double norm_inf() const {
        double n = 0.0;
        for (const auto& m : blocks_) {
            if (m.size() == 0) continue;
            Eigen::JacobiSVD<Matrix> svd(m);
            n = std::max(n, svd.singularValues()(0));
        }
        return n;
    }

    /// Largest entry modulus.
    double max_abs() const {
        double n = 0.0;
        for (const auto& m : blocks_) n = std::max(n, m.cwiseAbs().maxCoeff());
        return n;
    }

    bool is_hermitian(double rel_tol = tol().alg) const {
        const double scale = std::max(1.0, max_abs());
        for (const auto& m : blocks_) {
            if ((m - m.adjoint()).cwiseAbs().maxCoeff() > rel_tol * scale) return false;
        }
        return true;
    }

    Operator& operator+=(const Operator& o) {
        check_same(o);
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
        return *this;
    }
    Operator& operator-=(const Operator& o) {
        check_same(o);
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
        return *this;
    }
    Operator& operator*=(Complex c) {
        for (auto& m : blocks_) m *= c;
        return *this;
    }

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator-(Operator a) { return a *= -1.0; }
    friend Operator operator*(Complex c, Operator a) { return a *= c; }
    friend Operator operator*(Operator a, Complex c) { return a *= c; }
    friend Operator operator*(double c, Operator a) { return a *= Complex(c); }

    friend Operator operator*(const Operator& a, const Operator& b) {
        a.check_same(b);
        std::vector<Matrix> out;
        out.reserve(a.blocks_.size());
        for (std::size_t k = 0; k < a.blocks_.size(); ++k) out.push_back(a.blocks_[k] * b.blocks_[k]);
        return {a.alg_, std::move(out)};
    }

    void check_same(const Operator& o) const {
        if (!(alg_ == o.alg_)) throw Error(Errc::ShapeMismatch, "operators live in different algebras");
    }

private:
    FiniteAlgebra alg_;
    std::vector<Matrix> blocks_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

/// tau(x) = sum_k c_k Tr(x_k)
inline Complex trace(const Operator& x) {
    Complex t = 0.0;
    for (std::size_t k = 0; k < x.num_blocks(); ++k) t += x.algebra().weight(k) * x.block(k).trace();
    return t;
}

struct BlockSpectrum {
    RealVector eigenvalues;  // descending
    Matrix eigenvectors;     // columns, unitary
};

struct SpectralDecomposition {
    FiniteAlgebra algebra;
    std::vector<BlockSpectrum> blocks;

    Operator reconstruct() const {
        std::vector<Matrix> out;
        for (const auto& b : blocks)
            out.push_back(b.eigenvectors * b.eigenvalues.cast<Complex>().asDiagonal() * b.eigenvectors.adjoint());
        return {algebra, std::move(out)};
    }
};

namespace detail {

inline void require_hermitian(const Operator& x, const char* who) {
    if (!x.is_hermitian()) throw Error(Errc::NotHermitian, std::string(who) + ": operator is not hermitian");
}

inline bool lex_less(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
        if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return false;
}

inline BlockSpectrum eigh_block(const Matrix& m) {
    const Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw Error(Errc::InternalError, "hermitian eigensolver failed");
    const auto n = h.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (vals(a) != vals(b)) return vals(a) > vals(b);
        return lex_less(vecs.col(a), vecs.col(b));
    });
    BlockSpectrum out{RealVector(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvalues(i) = vals(order[static_cast<std::size_t>(i)]);
        out.eigenvectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace detail

inline SpectralDecomposition spectral_decompose(const Operator& x) {
    detail::require_hermitian(x, "spectral_decompose");
    SpectralDecomposition sd{x.algebra(), {}};
    for (const auto& m : x.blocks()) sd.blocks.push_back(detail::eigh_block(m));
    return sd;
}

/// Interval (lo, hi]; either end may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double v) const { return v > lo && v <= hi; }
};

inline Operator spectral_projection(const SpectralDecomposition& sd, Interval iv) {
    std::vector<Matrix> out;
    for (const auto& b : sd.blocks) {
        const auto n = b.eigenvalues.size();
        Matrix p = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (iv.contains(b.eigenvalues(i))) p += b.eigenvectors.col(i) * b.eigenvectors.col(i).adjoint();
        }
        out.push_back(std::move(p));
    }
    return {sd.algebra, std::move(out)};
}

inline Operator spectral_projection(const Operator& x, Interval iv) {
    return spectral_projection(spectral_decompose(x), iv);
}

/// U f(Lambda) U^*. `f` returning NaN signals a point outside its domain.
template <class F>
Operator functional_calculus(const SpectralDecomposition& sd, F&& f) {
    std::vector<Matrix> out;
    for (const auto& b : sd.blocks) {
        const auto n = b.eigenvalues.size();
        RealVector fv(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            fv(i) = f(b.eigenvalues(i));
            if (!std::isfinite(fv(i)))
                throw Error(Errc::DomainError,
                            "function undefined at eigenvalue " + std::to_string(b.eigenvalues(i)));
        }
        out.push_back(b.eigenvectors * fv.cast<Complex>().asDiagonal() * b.eigenvectors.adjoint());
    }
    return {sd.algebra, std::move(out)};
}

template <class F>
Operator functional_calculus(const Operator& x, F&& f) {
    return functional_calculus(spectral_decompose(x), std::forward<F>(f));
}

inline Operator positive_part(const Operator& x) {
    return functional_calculus(x, [](double t) { return t > 0.0 ? t : 0.0; });
}

inline Operator negative_part(const Operator& x) {
    return functional_calculus(x, [](double t) { return t < 0.0 ? -t : 0.0; });
}

/// Square root of a PSD operator. Eigenvalues within tol_alg * max(1, ||a||)
/// of zero are treated as exact zeros, so the root has the numerical rank of a.
inline Operator sqrt_psd(const Operator& a) {
    const auto sd = spectral_decompose(a);
    double scale = 1.0;
    for (const auto& b : sd.blocks)
        for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i) scale = std::max(scale, std::abs(b.eigenvalues(i)));
    const double cut = tol().alg * scale;
    return functional_calculus(sd, [cut](double t) {
        if (t < -cut) return std::numeric_limits<double>::quiet_NaN();
        return t <= cut ? 0.0 : std::sqrt(t);
    });
}

/// Per-block singular values, each descending.
inline std::vector<RealVector> singular_values(const Operator& x) {
    std::vector<RealVector> out;
    for (const auto& m : x.blocks()) {
        Eigen::JacobiSVD<Matrix> svd(m);
        out.push_back(svd.singularValues());
    }
    return out;
}

/// tol_rank = tol_alg * max(1, largest singular value)
inline double rank_threshold(const Operator& x) {
    double smax = 0.0;
    for (const auto& s : singular_values(x))
        if (s.size() > 0) smax = std::max(smax, s(0));
    return tol().alg * std::max(1.0, smax);
}

/// |x| = (x^* x)^{1/2}, computed from the SVD x = U S V^*.
inline Operator abs(const Operator& x) {
    return x.map_blocks([](const Matrix& m) -> Matrix {
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
        const auto& v = svd.matrixV();
        return v * svd.singularValues().cast<Complex>().asDiagonal() * v.adjoint();
    });
}

/// s(x): projection onto the closure of the range of |x|, i.e. the span of
/// the right singular vectors whose singular value exceeds tol_rank.
inline Operator support_projection(const Operator& x) {
    const double cut = rank_threshold(x);
    return x.map_blocks([cut](const Matrix& m) -> Matrix {
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        const auto& v = svd.matrixV();
        Matrix p = Matrix::Zero(m.rows(), m.cols());
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > cut) p += v.col(i) * v.col(i).adjoint();
        return p;
    });
}

/// Smallest eigenvalue over all blocks of a hermitian operator.
inline double min_eigenvalue(const Operator& x) {
    const auto sd = spectral_decompose(x);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : sd.blocks)
        if (b.eigenvalues.size() > 0) m = std::min(m, b.eigenvalues(b.eigenvalues.size() - 1));
    return m;
}

/// x^* = x and spec(x) >= -tol_alg * max(1, ||x||).
inline bool is_psd(const Operator& x, double rel_tol = tol().alg) {
    if (!x.is_hermitian(rel_tol)) return false;
    return min_eigenvalue(x) >= -rel_tol * std::max(1.0, x.max_abs());
}

}  // namespace symiso
