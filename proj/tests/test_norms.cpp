#include <cmath>

#include "support.hpp"
#include "symiso/suites.hpp"

using namespace symiso;
using symiso::testing::diag_op;

namespace {

StepFunction sf(std::vector<Piece> p) { return StepFunction(std::move(p)); }

const StepFunction kShortWeight({{2.0, 1.0}, {1.0, 1.0}});

}  // namespace

TEST(EvaluateNorm, Examples) {
    EXPECT_NEAR(evaluate_norm(LpNorm{2.0}, diag_op(FiniteAlgebra::matrix(2), {{3.0, 4.0}})), 5.0, 1e-12);
    EXPECT_NEAR(evaluate_norm(LorentzNorm{1.0, kShortWeight}, sf({{3.0, 1.0}, {2.0, 1.0}})), 8.0, 1e-12);
    EXPECT_NEAR(evaluate_norm(LogNorm{}, diag_op(FiniteAlgebra::matrix(1), {{std::exp(1.0) - 1.0}})), 1.0, 1e-12);
}

TEST(EvaluateNorm, WeightTooShort) {
    try {
        evaluate_norm(LorentzNorm{1.0, kShortWeight}, Operator::identity(FiniteAlgebra::matrix(3)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::WeightTooShort);
    }
}

TEST(EvaluateNorm, InvalidSpecs) {
    EXPECT_THROW(validate(LpNorm{0.0}), Error);
    EXPECT_THROW(validate(LpNorm{-1.0}), Error);
    EXPECT_THROW(validate(LorentzNorm{1.0, sf({{1.0, 1.0}, {2.0, 1.0}})}), Error);  // increasing
    EXPECT_THROW(validate(LorentzNorm{1.0, sf({{1.0, 1.0}, {0.0, 1.0}})}), Error);  // not strictly positive
}

TEST(EvaluateNorm, LorentzWithUnitWeightIsLp) {
    auto rng = derive_rng(30, "lorentz-lp", 0);
    const StepFunction one({{1.0, 100.0}});
    for (int t = 0; t < 30; ++t) {
        const auto x = random_operator(rng, random_algebra(rng));
        for (double p : {0.5, 1.0, 2.0, 3.7}) {
            const double lp = evaluate_norm(LpNorm{p}, x);
            EXPECT_NEAR(evaluate_norm(LorentzNorm{p, one}, x), lp, 1e-12 * std::max(1.0, lp));
        }
    }
}

TEST(EvaluateNorm, AdjointAbsUnitaryInvariance) {
    auto rng = derive_rng(31, "norm-invariance", 0);
    for (int t = 0; t < 20; ++t) {
        const auto alg = random_algebra(rng);
        const auto x = random_operator(rng, alg);
        const auto u = random_unitary(rng, alg);
        const auto v = random_unitary(rng, alg);
        for (const auto& spec : suites::all_variants()) {
            const double n = evaluate_norm(spec, x);
            const double s = 1e-9 * std::max(1.0, n);
            EXPECT_NEAR(evaluate_norm(spec, x.adjoint()), n, s);
            EXPECT_NEAR(evaluate_norm(spec, abs(x)), n, s);
            EXPECT_NEAR(evaluate_norm(spec, u * x * v), n, s);
        }
    }
}

TEST(DeltaAxioms, LpTwoOverRandomOperators) {
    auto rng = derive_rng(32, "axioms", 0);
    const auto alg = FiniteAlgebra({{2, 1.0}, {3, 0.5}});
    std::vector<Operator> samples;
    for (int i = 0; i < 200; ++i) samples.push_back(random_operator(rng, alg));
    const auto r = check_delta_axioms(LpNorm{2.0}, samples);
    EXPECT_TRUE(r.passed) << to_json(r).dump(2);
    EXPECT_LE(r.observed_constant, 1.0 + 1e-9);
}

TEST(DeltaAxioms, LogNormHasUnitConstant) {
    auto rng = derive_rng(33, "axioms", 0);
    const auto alg = FiniteAlgebra::matrix(3);
    std::vector<Operator> samples;
    for (int i = 0; i < 200; ++i) samples.push_back(random_operator(rng, alg));
    const auto r = check_delta_axioms(LogNorm{}, samples);
    EXPECT_TRUE(r.passed);
    EXPECT_LE(r.observed_constant, 1.0 + 1e-9);
}

TEST(DeltaAxioms, LpHalfSharpConstant) {
    const auto alg = FiniteAlgebra::matrix(2);
    const auto x = diag_op(alg, {{1.0, 0.0}});
    const auto y = diag_op(alg, {{0.0, 1.0}});
    EXPECT_NEAR(evaluate_norm(LpNorm{0.5}, x + y), 4.0, 1e-12);
    const auto r = check_delta_axioms(LpNorm{0.5}, {x, y});
    EXPECT_TRUE(r.passed);
    EXPECT_NEAR(r.observed_constant, 2.0, 1e-12);
    EXPECT_NEAR(quasi_triangle_constant(LpNorm{0.5}), 2.0, 1e-15);
}

TEST(DeltaAxioms, QuarterExponentConstantAttained) {
    // Disjoint equal projections attain 2^(1/p - 1).
    const auto alg = FiniteAlgebra::matrix(2);
    const auto x = diag_op(alg, {{1.0, 0.0}});
    const auto y = diag_op(alg, {{0.0, 1.0}});
    const double ratio = evaluate_norm(LpNorm{0.25}, x + y) / 2.0;
    EXPECT_NEAR(ratio, std::pow(2.0, 1.0 / 0.25 - 1.0), 1e-12);
    EXPECT_TRUE(check_delta_axioms(LpNorm{0.25}, {x, y}).passed);
}

TEST(DeltaAxioms, NeedsTwoSamples) {
    EXPECT_THROW(check_delta_axioms(LpNorm{1.0}, {Operator::zero(FiniteAlgebra::matrix(2))}), Error);
}

TEST(CheckSymmetric, AllVariants) {
    for (const auto& spec : suites::all_variants()) {
        const auto r = check_symmetric(spec, 100, 34);
        EXPECT_TRUE(r.passed) << norm_name(spec) << "\n" << to_json(r).dump(2);
        EXPECT_GE(r.trials, 100);
    }
}

TEST(Slm, HandComputedPair) {
    const auto y = sf({{4.0, 1.0}, {1.0, 1.0}});
    const auto x = sf({{2.0, 2.0}});
    ASSERT_TRUE(log_submajorizes(x, y).holds);
    EXPECT_NEAR(evaluate_norm(LpNorm{1.0}, x), 4.0, 1e-12);
    EXPECT_NEAR(evaluate_norm(LpNorm{1.0}, y), 5.0, 1e-12);
    EXPECT_NEAR(evaluate_norm(LogNorm{}, x), 2.0 * std::log(3.0), 1e-12);
    EXPECT_NEAR(evaluate_norm(LogNorm{}, y), std::log(5.0) + std::log(2.0), 1e-12);
    EXPECT_NEAR(evaluate_norm(LorentzNorm{1.0, kShortWeight}, x), 6.0, 1e-12);
    EXPECT_NEAR(evaluate_norm(LorentzNorm{1.0, kShortWeight}, y), 9.0, 1e-12);
}

TEST(Slm, AllVariantsSmallSample) {
    for (const auto& spec : suites::all_variants()) {
        const auto r = check_slm(spec, 100, 35);
        EXPECT_TRUE(r.passed) << norm_name(spec) << "\n" << to_json(r).dump(2);
        EXPECT_EQ(r.trials, 100);
    }
}

TEST(Slm, PairsAreLogMajorizedAndDistinct) {
    for (const auto& spec : suites::all_variants()) {
        for (int t = 0; t < 50; ++t) {
            auto rng = derive_rng(36, "pairs", static_cast<std::uint64_t>(t));
            const auto pair = make_log_majorized_pair(rng, spec);
            EXPECT_TRUE(log_submajorizes(mu(pair.x), mu(pair.y)).holds);
            EXPECT_FALSE(approx_equal(mu(pair.x), mu(pair.y), tol().maj));
            EXPECT_GT(pair.log_gap, 0.0);
        }
    }
}

TEST(Slm, LpEqualityForcesEqualMu) {
    // b <<_log a with equal Lp norms: b unitarily equivalent to a, so mu agrees.
    auto rng = derive_rng(37, "lp-rigidity", 0);
    for (int t = 0; t < 30; ++t) {
        const auto alg = random_algebra(rng);
        const auto a = random_operator(rng, alg);
        const auto b = random_unitary(rng, alg) * a * random_unitary(rng, alg);
        ASSERT_TRUE(log_submajorizes(mu(b), mu(a)).holds);
        for (double p : {0.5, 1.0, 2.0, 3.7}) {
            const double na = evaluate_norm(LpNorm{p}, a);
            if (std::abs(evaluate_norm(LpNorm{p}, b) - na) > 1e-10 * std::max(1.0, na)) continue;
            EXPECT_TRUE(approx_equal(mu(a), mu(b), 1e-8));
        }
        // Any strict log-majorization strictly lowers the Lp norm.
        const auto c = b * Operator::scalar(alg, 0.999);
        for (double p : {0.5, 1.0, 2.0, 3.7}) EXPECT_LT(evaluate_norm(LpNorm{p}, c), evaluate_norm(LpNorm{p}, a));
    }
}

TEST(NormJson, SpecRoundTrip) {
    for (const auto& spec : suites::all_variants()) {
        const auto back = norm_from_json(json::parse(to_json(spec).dump()));
        EXPECT_EQ(norm_name(back), norm_name(spec));
        EXPECT_EQ(to_json(back), to_json(spec));
    }
    EXPECT_THROW(norm_from_json(json::parse(R"({"type":"orlicz"})")), Error);
}

TEST(NormSuites, SmallSample) {
    SuiteOptions o;
    o.seed = 3;
    o.trials = 20;
    EXPECT_TRUE(suites::norm_axioms(o).passed);
    EXPECT_TRUE(suites::slm_all_variants(o).passed);
}
