#include <cmath>

#include "support.hpp"
#include "symiso/suites.hpp"

using namespace symiso;
using symiso::testing::diag_op;

namespace {

StepFunction sf(std::vector<Piece> p) { return StepFunction(std::move(p)); }

SuiteOptions small(int trials, std::uint64_t seed = 7) {
    SuiteOptions o;
    o.seed = seed;
    o.trials = trials;
    return o;
}

}  // namespace

TEST(Submajorizes, Examples) {
    const auto v1 = submajorizes(sf({{1.0, 2.0}}), sf({{2.0, 1.0}, {0.0, 1.0}}));
    EXPECT_TRUE(v1.holds);
    EXPECT_NEAR(v1.slack.value(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(v1.worst_t, 2.0);

    const auto a = sf({{3.0, 0.5}, {1.0, 2.0}});
    const auto v2 = submajorizes(a, a);
    EXPECT_TRUE(v2.holds);
    EXPECT_EQ(v2.slack.value(), 0.0);

    const auto v3 = submajorizes(sf({{3.0, 1.0}, {0.0, 1.0}}), sf({{2.0, 2.0}}));
    EXPECT_FALSE(v3.holds);
    EXPECT_DOUBLE_EQ(v3.worst_t, 1.0);
    EXPECT_DOUBLE_EQ(v3.slack.value(), -1.0);
}

TEST(Submajorizes, PaddingFlag) {
    const auto b = sf({{1.0, 1.0}});
    const auto a = sf({{2.0, 1.0}, {1.0, 1.0}});
    EXPECT_TRUE(submajorizes(b, a).holds);
    try {
        submajorizes(b, a, {.pad = false});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ShapeMismatch);
    }
}

TEST(LogSubmajorizes, Examples) {
    EXPECT_TRUE(log_submajorizes(sf({{4.0, 1.0}, {0.25, 1.0}}), sf({{4.0, 1.0}, {1.0, 1.0}})).holds);

    // A zero tail on the left is -inf and never violates.
    const auto v = log_submajorizes(sf({{2.0, 1.0}, {0.0, 1.0}}), sf({{3.0, 1.0}, {1.0, 1.0}}));
    EXPECT_TRUE(v.holds);

    const auto bad = log_submajorizes(sf({{1.0, 2.0}}), sf({{2.0, 1.0}, {0.0, 1.0}}));
    EXPECT_FALSE(bad.holds);
    EXPECT_DOUBLE_EQ(bad.worst_t, 2.0);
    EXPECT_TRUE(bad.slack.is_neg_inf());
}

TEST(LogSubmajorizes, BothSidesMinusInfinity) {
    const auto f = sf({{2.0, 1.0}, {0.0, 1.0}});
    EXPECT_TRUE(log_submajorizes(f, f).holds);
}

TEST(FkDeterminant, Examples) {
    EXPECT_NEAR(fk_determinant(diag_op(FiniteAlgebra::matrix(2), {{2.0, 3.0}})), 6.0, 1e-12);
    EXPECT_NEAR(fk_determinant(diag_op(FiniteAlgebra::matrix(1, 2.0), {{3.0}})), 9.0, 1e-12);
    EXPECT_EQ(fk_determinant(diag_op(FiniteAlgebra::matrix(2), {{2.0, 0.0}})), 0.0);
}

TEST(FkDeterminant, ProductOfWeightedSingularValues) {
    auto rng = derive_rng(20, "det", 0);
    for (int t = 0; t < 20; ++t) {
        const auto alg = random_algebra(rng);
        const auto x = random_operator(rng, alg);
        double logdet = 0.0;
        for (std::size_t k = 0; k < alg.num_blocks(); ++k)
            logdet += alg.weight(k) * std::log(std::abs(x.block(k).determinant()));
        EXPECT_NEAR(std::log(fk_determinant(x)), logdet, 1e-9 * (1.0 + std::abs(logdet)));
    }
}

TEST(Disjointness, Examples) {
    const auto alg = FiniteAlgebra::matrix(2);
    const auto d1 = disjointness_from_mu_equality(diag_op(alg, {{1.0, 0.0}}), diag_op(alg, {{0.0, 1.0}}));
    EXPECT_TRUE(d1.mu_equal);
    EXPECT_TRUE(d1.product_zero);
    EXPECT_FALSE(d1.violation);

    const auto e = diag_op(alg, {{1.0, 0.0}});
    const auto d2 = disjointness_from_mu_equality(e, e);
    EXPECT_FALSE(d2.mu_equal);
    EXPECT_FALSE(d2.product_zero);

    try {
        disjointness_from_mu_equality(diag_op(alg, {{1.0, -1.0}}), e);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), Errc::NotPSD);
    }
}

TEST(Disjointness, RandomOverlappingPairsNeverMuEqual) {
    auto rng = derive_rng(21, "disjoint", 0);
    int checked = 0;
    for (int t = 0; t < 500; ++t) {
        const auto alg = random_algebra(rng);
        const auto x = random_psd(rng, alg, t % 2 == 0 ? 0.0 : 1e-3);
        const auto y = random_psd(rng, alg, t % 3 == 0 ? 0.0 : 1e-3);
        const auto d = disjointness_from_mu_equality(x, y);
        if (d.product_zero) continue;
        ++checked;
        EXPECT_FALSE(d.mu_equal);
    }
    EXPECT_GT(checked, 450);
}

TEST(Anticommute, PauliPairShowsPositivityIsNeeded) {
    // sigma_x and sigma_z anticommute with a nonzero product; neither is PSD.
    const auto alg = FiniteAlgebra::matrix(2);
    Matrix sx(2, 2), sz(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    const Operator x(alg, {sx}), z(alg, {sz});
    EXPECT_LE((x * z + z * x).norm_inf(), 1e-15);
    EXPECT_NEAR((x * z).norm_inf(), 1.0, 1e-15);
    EXPECT_FALSE(is_psd(x));
    EXPECT_FALSE(is_psd(z));
    // Shifted to PSD, the pair no longer anticommutes.
    const auto xp = x + Operator::identity(alg);
    const auto zp = z + Operator::identity(alg);
    EXPECT_TRUE(is_psd(xp));
    EXPECT_GT((xp * zp + zp * xp).norm_inf(), 1.0);
}

// Small-sample runs of the property suites; the full counts run in the acceptance binary.
class PropertySuite : public ::testing::TestWithParam<const char*> {};

TEST_P(PropertySuite, PassesOnSmallSample) {
    for (const auto& e : suites::registry()) {
        if (std::string(e.name) != GetParam()) continue;
        const auto r = e.fn(small(40));
        EXPECT_TRUE(r.passed) << to_json(r).dump(2);
        EXPECT_GT(r.trials, 0);
        return;
    }
    FAIL() << "unknown suite " << GetParam();
}

INSTANTIATE_TEST_SUITE_P(Majorization, PropertySuite,
                         ::testing::Values("mu-oracle", "sandwich-logmaj", "det-monotone", "product-logmaj",
                                           "power-transfer", "convex-transfer", "mu-rigidity", "projection-rigidity",
                                           "anticommute", "sum-diff"),
                         [](const auto& info) {
                             std::string n = info.param;
                             std::replace(n.begin(), n.end(), '-', '_');
                             return n;
                         });

TEST(MuRigidity, PerturbationIsDetected) {
    auto rng = derive_rng(22, "rigidity", 0);
    const auto alg = FiniteAlgebra::matrix(3);
    const auto a = random_psd(rng, alg, 0.1);
    const auto p = spectral_projection(a, {spectral_decompose(a).blocks[0].eigenvalues(1) * 0.999,
                                           std::numeric_limits<double>::infinity()});
    const auto b = a - 0.05 * p;
    EXPECT_FALSE(approx_equal(mu(a), mu(b), tol().maj));
    EXPECT_TRUE(approx_equal(mu(a), mu(a), tol().maj));
}

TEST(MajorizationJson, VerdictRoundTrip) {
    const auto v = log_submajorizes(sf({{1.0, 2.0}}), sf({{2.0, 1.0}, {0.0, 1.0}}));
    const auto j = to_json(v);
    EXPECT_EQ(j.at("slack"), "-inf");
    const auto back = verdict_from_json(json::parse(j.dump()));
    EXPECT_EQ(back.holds, v.holds);
    EXPECT_EQ(back.worst_t, v.worst_t);
    EXPECT_TRUE(back.slack == v.slack);
    EXPECT_EQ(back.checked_points, v.checked_points);
}
