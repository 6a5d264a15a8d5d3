#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "algebra.hpp"

namespace symiso {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Independent stream for (seed, stream name, trial index). Streams do not
/// depend on execution order, so serial and parallel runs agree.
inline Rng derive_rng(std::uint64_t seed, std::string_view name, std::uint64_t index) {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ detail::fnv1a(name));
    h = detail::splitmix64(h ^ index);
    return Rng(h);
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(gaussian(rng), gaussian(rng)) / std::sqrt(2.0);
    return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
inline Matrix haar_unitary(Rng& rng, int n) {
    const Matrix g = gaussian_matrix(rng, n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        const Complex d = r(i, i);
        const double a = std::abs(d);
        if (a > 0) q.col(i) *= d / a;
    }
    return q;
}

inline FiniteAlgebra random_algebra(Rng& rng, int max_blocks = 3, int max_dim = 4) {
    const int nb = uniform_int(rng, 1, max_blocks);
    std::vector<Block> blocks;
    for (int k = 0; k < nb; ++k) blocks.push_back({uniform_int(rng, 1, max_dim), uniform(rng, 0.5, 3.0)});
    return FiniteAlgebra(std::move(blocks));
}

inline Operator random_operator(Rng& rng, const FiniteAlgebra& alg) {
    std::vector<Matrix> b;
    for (const auto& blk : alg.blocks()) b.push_back(gaussian_matrix(rng, blk.dim, blk.dim));
    return {alg, std::move(b)};
}

inline Operator random_hermitian(Rng& rng, const FiniteAlgebra& alg) {
    const auto g = random_operator(rng, alg);
    return 0.5 * (g + g.adjoint());
}

inline Operator random_unitary(Rng& rng, const FiniteAlgebra& alg) {
    std::vector<Matrix> b;
    for (const auto& blk : alg.blocks()) b.push_back(haar_unitary(rng, blk.dim));
    return {alg, std::move(b)};
}

/// a = g^* g + delta * 1 with g a Gaussian of random rank per block, so that
/// delta = 0 produces singular operators.
inline Operator random_psd(Rng& rng, const FiniteAlgebra& alg, double delta) {
    std::vector<Matrix> b;
    for (const auto& blk : alg.blocks()) {
        const int rank = uniform_int(rng, 1, blk.dim);
        const Matrix g = gaussian_matrix(rng, rank, blk.dim);
        b.push_back(g.adjoint() * g + delta * Matrix::Identity(blk.dim, blk.dim));
    }
    return {alg, std::move(b)};
}

/// Random orthogonal projection with a uniformly chosen rank in every block.
inline Operator random_projection(Rng& rng, const FiniteAlgebra& alg, bool allow_zero = true) {
    std::vector<Matrix> b;
    for (const auto& blk : alg.blocks()) {
        const int rank = uniform_int(rng, allow_zero ? 0 : 1, blk.dim);
        const Matrix u = haar_unitary(rng, blk.dim);
        b.push_back(u.leftCols(rank) * u.leftCols(rank).adjoint());
    }
    return {alg, std::move(b)};
}

/// Hermitian h with ||h||_inf <= 1.
inline Operator random_hermitian_contraction(Rng& rng, const FiniteAlgebra& alg) {
    const auto sd = spectral_decompose(random_hermitian(rng, alg));
    return functional_calculus(sd, [&rng](double) { return uniform(rng, -1.0, 1.0); });
}

}  // namespace symiso
