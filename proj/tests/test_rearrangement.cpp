#include <cmath>

#include "support.hpp"
#include "symiso/random.hpp"

using namespace symiso;
using symiso::testing::diag_op;
using symiso::testing::step_dist;

namespace {

StepFunction sf(std::vector<Piece> p) { return StepFunction(std::move(p)); }

void expect_pieces(const StepFunction& f, const std::vector<Piece>& expected, double tol = 1e-12) {
    ASSERT_EQ(f.pieces().size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_NEAR(f.pieces()[i].value, expected[i].value, tol) << "piece " << i;
        EXPECT_NEAR(f.pieces()[i].width, expected[i].width, tol) << "piece " << i;
    }
}

/// Random step function whose breakpoints are multiples of 1/64, so a
/// midpoint rule on a dyadic grid integrates it without discretisation error.
StepFunction dyadic_step(Rng& rng, bool positive) {
    std::vector<Piece> p;
    const int n = uniform_int(rng, 1, 6);
    for (int i = 0; i < n; ++i)
        p.push_back({positive ? uniform(rng, 0.1, 3.0) : uniform(rng, -1.0, 3.0), uniform_int(rng, 1, 64) / 64.0});
    return StepFunction(std::move(p), 0.0);
}

}  // namespace

TEST(StepFunction, Basics) {
    const auto f = sf({{3.0, 1.0}, {1.0, 1.0}});
    EXPECT_DOUBLE_EQ(f.length(), 2.0);
    EXPECT_TRUE(f.is_decreasing());
    EXPECT_DOUBLE_EQ(f.at(0.0), 3.0);
    EXPECT_DOUBLE_EQ(f.at(1.0), 1.0);  // right-continuous
    EXPECT_THROW(f.at(2.0), Error);
    EXPECT_THROW(sf({{1.0, 0.0}}), Error);
}

TEST(StepFunction, MergesNearEqualNeighbours) {
    const auto f = sf({{2.0, 1.0}, {2.0 + 1e-13, 3.0}, {1.0, 1.0}});
    ASSERT_EQ(f.pieces().size(), 2u);
    EXPECT_NEAR(f.pieces()[0].value, 2.0 + 0.75e-13, 1e-15);
    EXPECT_DOUBLE_EQ(f.pieces()[0].width, 4.0);
}

TEST(Mu, Examples) {
    expect_pieces(mu(diag_op(FiniteAlgebra::matrix(2), {{3.0, -1.0}})), {{3.0, 1.0}, {1.0, 1.0}});
    expect_pieces(mu(diag_op(FiniteAlgebra({{1, 2.0}, {1, 1.0}}), {{5.0}, {7.0}})), {{7.0, 1.0}, {5.0, 2.0}});
}

TEST(Mu, FixedOperatorAgainstSingularValues) {
    // Singular values of [[1,2],[0,1]] are 1 +- sqrt 2 in absolute value.
    const FiniteAlgebra alg({{2, 1.5}, {1, 0.5}});
    Matrix a(2, 2);
    a << 1.0, 2.0, 0.0, 1.0;
    const Operator x(alg, {a, Matrix::Constant(1, 1, -3.0)});
    expect_pieces(mu(x), {{3.0, 0.5}, {2.414213562373095, 1.5}, {0.4142135623730951, 1.5}}, 1e-12);
}

TEST(Mu, PadsToTotalTraceAndSnapsZeros) {
    const FiniteAlgebra alg({{3, 1.0}});
    const auto f = mu(diag_op(alg, {{2.0, 1e-14, 0.0}}));
    expect_pieces(f, {{2.0, 1.0}, {0.0, 2.0}});
    EXPECT_DOUBLE_EQ(mu(Operator::zero(alg)).length(), 3.0);
}

// d is right-continuous with jumps at the levels; evaluating just right of a
// level keeps accumulated breakpoint rounding from selecting the piece to its left.
double d_at_level(const StepFunction& d, double s) { return distribution_at(d, s + 1e-12 * std::max(1.0, s)); }

TEST(Mu, DistributionInverseOracle) {
    auto rng = derive_rng(11, "mu-oracle", 0);
    for (int t = 0; t < 20; ++t) {
        const auto x = random_operator(rng, FiniteAlgebra::matrix(4, uniform(rng, 0.5, 2.0)));
        const auto d = distribution(abs(x));
        const auto f = mu(x);
        // inf{s >= 0 : d(s) <= t}, scanning candidate levels 0 and the singular values.
        std::vector<double> levels{0.0};
        const RealVector sv = Eigen::JacobiSVD<Matrix>(x.block(0)).singularValues();
        levels.insert(levels.end(), sv.data(), sv.data() + sv.size());
        std::sort(levels.begin(), levels.end());
        const double len = f.length();
        for (int g = 0; g < 10000; ++g) {
            const double tt = len * (g + 0.5) / 10000.0;
            double oracle = levels.back();
            for (double s : levels)
                if (d_at_level(d, s) <= tt) {
                    oracle = s;
                    break;
                }
            ASSERT_NEAR(f.at(tt), oracle, 1e-9) << "t=" << tt;
        }
    }
}

TEST(Distribution, Examples) {
    const auto alg = FiniteAlgebra::matrix(2);
    const auto d = distribution(diag_op(alg, {{3.0, 1.0}}));
    EXPECT_DOUBLE_EQ(distribution_at(d, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(distribution_at(d, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(distribution_at(d, 3.0), 0.0);
    const auto z = distribution(Operator::zero(alg));
    EXPECT_DOUBLE_EQ(distribution_at(z, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(distribution_at(z, 5.0), 0.0);
    EXPECT_THROW(distribution(Operator::matrix_unit(alg, 0, 0, 1)), Error);
}

TEST(Distribution, InverseReproducesMuAtBreakpoints) {
    auto rng = derive_rng(12, "distribution", 0);
    for (int t = 0; t < 30; ++t) {
        const auto alg = random_algebra(rng);
        const auto h = random_hermitian(rng, alg);
        const auto f = mu(h);
        const auto d = distribution(abs(h));
        auto bps = f.breakpoints();
        bps.pop_back();
        bps.insert(bps.begin(), 0.0);
        std::vector<double> levels{0.0};
        for (const auto& sv : singular_values(h)) levels.insert(levels.end(), sv.data(), sv.data() + sv.size());
        std::sort(levels.begin(), levels.end());
        for (double tt : bps) {
            double oracle = levels.back();
            for (double s : levels)
                if (d_at_level(d, s) <= tt + 1e-12 * f.length()) {
                    oracle = s;
                    break;
                }
            EXPECT_EQ(f.at(tt), oracle);
        }
    }
}

TEST(PrefixIntegral, Examples) {
    const auto f = sf({{3.0, 1.0}, {1.0, 1.0}});
    EXPECT_DOUBLE_EQ(prefix_integral(f, 1.5), 3.5);
    EXPECT_DOUBLE_EQ(prefix_integral(f, 0.0), 0.0);
    EXPECT_THROW(prefix_integral(f, -0.1), Error);
    EXPECT_THROW(prefix_integral(f, 2.5), Error);
}

TEST(PrefixIntegral, DenseGridOracle) {
    auto rng = derive_rng(13, "prefix", 0);
    constexpr int kPerUnit = 1 << 18;
    for (int t = 0; t < 5; ++t) {
        const auto f = dyadic_step(rng, false);
        const double h = 1.0 / kPerUnit;
        const int n = static_cast<int>(std::lround(f.length() * kPerUnit));
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += f.at((i + 0.5) * h) * h;
            if ((i + 1) % 4096 == 0) {
                ASSERT_NEAR(prefix_integral(f, (i + 1) * h), acc, 1e-9);
            }
        }
        EXPECT_NEAR(prefix_integral(f, f.length()), acc, 1e-9);
    }
}

TEST(LogPrefixIntegral, Examples) {
    EXPECT_NEAR(log_prefix_integral(sf({{std::exp(1.0), 1.0}, {1.0, 1.0}}), 2.0).value(), 1.0, 1e-15);
    EXPECT_TRUE(log_prefix_integral(sf({{2.0, 1.0}, {0.0, 1.0}}), 2.0).is_neg_inf());
    EXPECT_NEAR(log_prefix_integral(sf({{2.0, 1.0}, {0.0, 1.0}}), 1.0).value(), std::log(2.0), 1e-15);
    try {
        log_prefix_integral(sf({{1.0, 1.0}, {-1.0, 1.0}}), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NegativeValue);
    }
    try {
        log_prefix_integral(sf({{1.0, 1.0}}), 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::OutOfDomain);
    }
}

TEST(LogPrefixIntegral, DenseGridOracle) {
    auto rng = derive_rng(14, "log-prefix", 0);
    constexpr int kPerUnit = 1 << 18;
    for (int t = 0; t < 5; ++t) {
        const auto f = dyadic_step(rng, true);
        const double h = 1.0 / kPerUnit;
        const int n = static_cast<int>(std::lround(f.length() * kPerUnit));
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += std::log(f.at((i + 0.5) * h)) * h;
            if ((i + 1) % 4096 == 0) {
                ASSERT_NEAR(log_prefix_integral(f, (i + 1) * h).value(), acc, 1e-8);
            }
        }
    }
}

TEST(Rearrange, Examples) {
    expect_pieces(rearrange(sf({{1.0, 1.0}, {3.0, 2.0}})), {{3.0, 2.0}, {1.0, 1.0}});
    const auto g = sf({{3.0, 1.0}, {2.0, 0.5}, {0.0, 1.0}});
    EXPECT_EQ(step_dist(rearrange(g), g), 0.0);
    EXPECT_THROW(rearrange(sf({{-1.0, 1.0}})), Error);
}

TEST(Rearrange, DecreasingProductsAreFixed) {
    auto rng = derive_rng(15, "rearrange", 0);
    const auto w = sf({{3.0, 2.0}, {2.0, 6.0}, {1.0, 24.0}});
    for (int t = 0; t < 20; ++t) {
        const auto x = random_operator(rng, random_algebra(rng));
        const auto m = power(mu(x), uniform(rng, 0.5, 3.0));
        const auto prod = product(m, truncate(w, m.length()));
        EXPECT_TRUE(prod.is_decreasing());
        EXPECT_EQ(step_dist(rearrange(prod), prod), 0.0);
    }
}

TEST(Rearrange, EquimeasurableAndMassPreserving) {
    auto rng = derive_rng(16, "rearrange", 0);
    for (int t = 0; t < 30; ++t) {
        const auto f = dyadic_step(rng, true);
        const auto r = rearrange(f);
        EXPECT_NEAR(prefix_integral(r, r.length()), prefix_integral(f, f.length()), 1e-12);
        for (double s : {0.2, 1.0, 2.5}) {
            double mf = 0.0, mr = 0.0;
            for (const auto& p : f.pieces()) mf += p.value > s ? p.width : 0.0;
            for (const auto& p : r.pieces()) mr += p.value > s ? p.width : 0.0;
            EXPECT_NEAR(mf, mr, 1e-12);
        }
    }
}

TEST(MuInvariants, AdjointAbsScalarUnitary) {
    auto rng = derive_rng(17, "mu-invariants", 0);
    for (int t = 0; t < 40; ++t) {
        const auto alg = random_algebra(rng);
        const auto x = random_operator(rng, alg);
        const auto m = mu(x);
        const double scale = tol().alg * (1.0 + x.norm_inf());
        EXPECT_LE(step_dist(mu(x.adjoint()), m), scale);
        EXPECT_LE(step_dist(mu(abs(x)), m), scale);
        const Complex alpha = std::polar(uniform(rng, 0.1, 3.0), uniform(rng, 0.0, 6.0));
        EXPECT_LE(step_dist(mu(alpha * x), map_values(m, [&](double v) { return std::abs(alpha) * v; })),
                  scale * std::abs(alpha));
        const auto u = random_unitary(rng, alg);
        const auto v = random_unitary(rng, alg);
        EXPECT_LE(step_dist(mu(u * x * v), m), scale);
    }
}

TEST(MuInvariants, OrderAndTriangle) {
    auto rng = derive_rng(18, "mu-order", 0);
    for (int t = 0; t < 40; ++t) {
        const auto alg = random_algebra(rng);
        const auto a = random_psd(rng, alg, 1e-3);
        const auto ra = sqrt_psd(a);
        const auto c = functional_calculus(random_hermitian(rng, alg), [&rng](double) { return uniform(rng, 0.0, 1.0); });
        const auto b = ra * c * ra;  // 0 <= b <= a
        const auto ma = mu(a);
        const auto mb = mu(b);
        for (double tt : union_breakpoints(ma, mb)) {
            if (tt >= ma.length()) continue;
            EXPECT_LE(mb.at(tt), ma.at(tt) + 1e-9 * (1.0 + a.norm_inf()));
        }

        const auto x = random_operator(rng, alg);
        const auto y = random_operator(rng, alg);
        const auto mx = mu(x), my = mu(y), ms = mu(x + y);
        for (double tt : union_breakpoints(ms, mx))
            EXPECT_LE(prefix_integral(ms, tt), prefix_integral(mx, tt) + prefix_integral(my, tt) + 1e-9);
    }
}

TEST(StepFunctionJson, RoundTrip) {
    const auto f = sf({{3.25, 0.5}, {1.0 / 3.0, 1.75}, {0.0, 2.0}});
    const auto g = step_from_json(json::parse(to_json(f).dump()));
    EXPECT_EQ(step_dist(f, g), 0.0);
    EXPECT_EQ(f.length(), g.length());
}
