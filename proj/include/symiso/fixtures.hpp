#pragma once

#include "isometry.hpp"
#include "jordan.hpp"

// Small hand-built maps used as negative controls and documentation examples.

namespace symiso::fixtures {

/// x -> (tr x / n) 1 on M_n: positive and unital but not Jordan.
inline LinearMap normalized_trace_map(int n = 2) {
    const auto alg = FiniteAlgebra::matrix(n);
    return LinearMap::from_function(alg, alg, [&](const Operator& x) {
        return Operator::scalar(alg, x.block(0).trace() / static_cast<double>(n));
    });
}

/// x -> x^T on M_n.
inline LinearMap transpose_map(int n) {
    const auto alg = FiniteAlgebra::matrix(n);
    return LinearMap::from_function(alg, alg, [](const Operator& x) { return x.transpose(); });
}

/// x -> x + x^T on M_2: not an isometry for L_1 (e_12 has norm 1, image norm 2).
inline LinearMap symmetrizer_map() {
    const auto alg = FiniteAlgebra::matrix(2);
    return LinearMap::from_function(alg, alg, [](const Operator& x) { return x + x.transpose(); });
}

/// Identity on `alg` with the coefficient of the matrix unit e_00 of block 0
/// negated. Invertible, but T(x) >= 0 no longer forces x >= 0.
inline LinearMap negated_coefficient_map(const FiniteAlgebra& alg = FiniteAlgebra::matrix(2)) {
    Matrix m = Matrix::Identity(alg.vector_dim(), alg.vector_dim());
    m(alg.offset(0), alg.offset(0)) = -1.0;
    return {alg, alg, std::move(m)};
}

/// x -> (1/sqrt 2)(x + x^T) from M_2 into M_2 + M_2 with unit weights: an
/// L_2 isometry whose Jordan part is x + x^T.
inline SynthSpec half_transpose_spec(double p = 2.0) {
    JordanPlan plan{FiniteAlgebra::matrix(2), FiniteAlgebra({{2, 1.0}, {2, 1.0}}),
                    {{0, 0, false, std::nullopt}, {0, 1, true, std::nullopt}}};
    const double beta = std::pow(0.5, 1.0 / p);
    return {plan, {beta, beta}, LpNorm{p}, LpNorm{p}};
}

/// Calibrated spec with the scalar of the first transposed target (or the
/// first target if none is transposed) scaled by `factor`.
inline SynthSpec break_calibration(SynthSpec spec, double factor = 1.1) {
    std::size_t target = spec.plan.entries.at(0).target;
    for (const auto& e : spec.plan.entries)
        if (e.transpose) {
            target = e.target;
            break;
        }
    spec.beta.at(target) *= factor;
    return spec;
}

}  // namespace symiso::fixtures
