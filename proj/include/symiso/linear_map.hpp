#pragma once

#include <utility>

#include "algebra.hpp"

namespace symiso {

/// Complex-linear map between finite algebras, stored as a dense matrix in
/// the canonical basis of blockwise row-major matrix units.
class LinearMap {
public:
    LinearMap() = default;

    LinearMap(FiniteAlgebra domain, FiniteAlgebra codomain, Matrix matrix)
        : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
        if (matrix_.rows() != codomain_.vector_dim() || matrix_.cols() != domain_.vector_dim())
            throw Error(Errc::ShapeMismatch, "linear map matrix must be " + std::to_string(codomain_.vector_dim()) + "x" +
                                                 std::to_string(domain_.vector_dim()));
    }

    /// Builds the matrix column by column from the images of matrix units.
    template <class F>
    static LinearMap from_function(const FiniteAlgebra& domain, const FiniteAlgebra& codomain, F&& f) {
        Matrix m(codomain.vector_dim(), domain.vector_dim());
        for (std::size_t k = 0; k < domain.num_blocks(); ++k) {
            const int n = domain.dim(k);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const Operator img = f(Operator::matrix_unit(domain, k, i, j));
                    if (!(img.algebra() == codomain)) throw Error(Errc::ShapeMismatch, "image lies in the wrong algebra");
                    m.col(domain.offset(k) + i * n + j) = img.vectorize();
                }
        }
        return {domain, codomain, std::move(m)};
    }

    static LinearMap identity(const FiniteAlgebra& alg) {
        return {alg, alg, Matrix::Identity(alg.vector_dim(), alg.vector_dim())};
    }

    const FiniteAlgebra& domain() const { return domain_; }
    const FiniteAlgebra& codomain() const { return codomain_; }
    const Matrix& matrix() const { return matrix_; }

    Operator apply(const Operator& x) const {
        if (!(x.algebra() == domain_)) throw Error(Errc::ShapeMismatch, "apply: operator not in the domain algebra");
        return Operator::from_vector(codomain_, matrix_ * x.vectorize());
    }

    Operator operator()(const Operator& x) const { return apply(x); }

    /// Canonical basis element number `idx` of the domain.
    Operator domain_basis(int idx) const { return Operator::from_vector(domain_, Vector::Unit(domain_.vector_dim(), idx)); }

private:
    FiniteAlgebra domain_;
    FiniteAlgebra codomain_;
    Matrix matrix_;
};

/// Basis of the real space of hermitian elements: e_ii, e_ij + e_ji, i(e_ij - e_ji).
/// Diagonal units come first within each block.
inline std::vector<Operator> hermitian_basis(const FiniteAlgebra& alg) {
    std::vector<Operator> out;
    for (std::size_t k = 0; k < alg.num_blocks(); ++k) {
        const int n = alg.dim(k);
        for (int i = 0; i < n; ++i) out.push_back(Operator::matrix_unit(alg, k, i, i));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const auto eij = Operator::matrix_unit(alg, k, i, j);
                const auto eji = Operator::matrix_unit(alg, k, j, i);
                out.push_back(eij + eji);
                out.push_back(Complex(0.0, 1.0) * (eij - eji));
            }
    }
    return out;
}

inline int matrix_rank(const Matrix& m, double rel_tol = 1e-10) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

}  // namespace symiso
