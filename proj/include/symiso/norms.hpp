#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "algebra.hpp"
#include "majorization.hpp"
#include "random.hpp"
#include "rearrangement.hpp"

namespace symiso {

struct LpNorm {
    double p = 1.0;
};

/// Lambda^p_w: (int mu(t)^p w(t) dt)^{1/p}, w strictly positive and non-increasing.
struct LorentzNorm {
    double p = 1.0;
    StepFunction weight;
};

/// ||x||_log = int log(1 + mu(t; x)) dt
struct LogNorm {};

using NormSpec = std::variant<LpNorm, LorentzNorm, LogNorm>;

inline std::string norm_name(const NormSpec& spec) {
    auto num = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    return std::visit(
        [&num](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpNorm>) return "lp(" + num(s.p) + ")";
            else if constexpr (std::is_same_v<T, LorentzNorm>) return "lorentz(" + num(s.p) + ")";
            else return "log";
        },
        spec);
}

inline void validate(const NormSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (!std::is_same_v<T, LogNorm>) {
                if (!(s.p > 0.0) || !std::isfinite(s.p)) throw Error(Errc::InvalidArgument, "norm exponent must be > 0");
            }
            if constexpr (std::is_same_v<T, LorentzNorm>) {
                if (s.weight.empty()) throw Error(Errc::InvalidArgument, "Lorentz weight is empty");
                for (const auto& piece : s.weight.pieces())
                    if (!(piece.value > 0.0)) throw Error(Errc::InvalidArgument, "Lorentz weight must be > 0");
                if (!s.weight.is_decreasing()) throw Error(Errc::InvalidArgument, "Lorentz weight must be non-increasing");
            }
        },
        spec);
}

/// Norm of an operator with generalised singular value function `m`.
inline double evaluate_norm(const NormSpec& spec, const StepFunction& m) {
    validate(spec);
    return std::visit(
        [&m](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpNorm>) {
                double acc = 0.0;
                for (const auto& piece : m.pieces()) acc += std::pow(piece.value, s.p) * piece.width;
                return std::pow(acc, 1.0 / s.p);
            } else if constexpr (std::is_same_v<T, LorentzNorm>) {
                const double len = m.length();
                if (s.weight.length() < len * (1.0 - 1e-12))
                    throw Error(Errc::WeightTooShort, "Lorentz weight covers " + std::to_string(s.weight.length()) +
                                                          " < tau(1) = " + std::to_string(len));
                const auto w = truncate(s.weight, std::min(len, s.weight.length()));
                const auto weighted = combine(m, w, [&](double v, double wt) { return std::pow(v, s.p) * wt; });
                double acc = 0.0;
                for (const auto& piece : weighted.pieces()) acc += piece.value * piece.width;
                return std::pow(acc, 1.0 / s.p);
            } else {
                double acc = 0.0;
                for (const auto& piece : m.pieces()) acc += std::log1p(piece.value) * piece.width;
                return acc;
            }
        },
        spec);
}

inline double evaluate_norm(const NormSpec& spec, const Operator& x) { return evaluate_norm(spec, mu(x)); }

struct AxiomViolation {
    std::string axiom;  // "definite", "contractive", "continuity", "quasi-triangle", "symmetric", "log-monotone", "slm-strict"
    std::string detail;
    double magnitude = 0.0;
    std::vector<Operator> witnesses;
};

struct NormCheckReport {
    std::vector<AxiomViolation> violations;
    bool passed = true;
    int trials = 0;
    /// Largest observed ||x+y|| / (||x|| + ||y||) (quasi-triangle checks only).
    double observed_constant = 0.0;

    void add(AxiomViolation v) {
        violations.push_back(std::move(v));
        passed = false;
    }
};

/// Quasi-triangle constant asserted for the variant; 0 means "estimate only".
inline double quasi_triangle_constant(const NormSpec& spec) {
    if (const auto* lp = std::get_if<LpNorm>(&spec)) return lp->p >= 1.0 ? 1.0 : std::pow(2.0, 1.0 / lp->p - 1.0);
    if (std::holds_alternative<LogNorm>(spec)) return 1.0;
    return 0.0;
}

/// Checks positivity/definiteness, contractivity under |alpha| <= 1, continuity
/// at 0 along alpha = 2^-k, and the quasi-triangle inequality on sample pairs.
inline NormCheckReport check_delta_axioms(const NormSpec& spec, const std::vector<Operator>& samples) {
    if (samples.size() < 2) throw Error(Errc::InvalidArgument, "check_delta_axioms needs at least two samples");
    const double tn = tol().norm;
    NormCheckReport r;
    const std::vector<Complex> alphas = {0.0, 0.3, -0.7, Complex(0.0, 0.5), std::polar(1.0, 1.1), 1.0, -1.0};

    std::vector<double> norms;
    for (const auto& x : samples) {
        ++r.trials;
        const double nx = evaluate_norm(spec, x);
        norms.push_back(nx);
        if (!(nx >= 0.0) || !std::isfinite(nx)) {
            r.add({"definite", "norm is negative or not finite", nx, {x}});
            continue;
        }
        const bool nonzero = x.max_abs() > tol().alg;
        if (nonzero && nx <= 0.0) r.add({"definite", "nonzero operator with zero norm", nx, {x}});
        if (!nonzero && nx > tn) r.add({"definite", "zero operator with positive norm", nx, {x}});
        for (const auto a : alphas) {
            const double na = evaluate_norm(spec, a * x);
            if (na > nx * (1.0 + tn) + tn) r.add({"contractive", "||a x|| > ||x|| for |a| <= 1", na - nx, {x}});
        }
        double prev = nx;
        for (int k = 1; k <= 60; ++k) {
            const double nk = evaluate_norm(spec, std::ldexp(1.0, -k) * x);
            if (nk > prev * (1.0 + tn) + tn) {
                r.add({"continuity", "||2^-k x|| increased at k=" + std::to_string(k), nk - prev, {x}});
                break;
            }
            prev = nk;
        }
        if (prev > 1e-6 * std::max(1.0, nx)) r.add({"continuity", "||2^-60 x|| does not vanish", prev, {x}});
    }
    const double c = quasi_triangle_constant(spec);
    const std::size_t n = samples.size();
    auto check_pair = [&](std::size_t i, std::size_t j) {
        if (i == j || !(samples[i].algebra() == samples[j].algebra())) return;
        const double denom = norms[i] + norms[j];
        const double nsum = evaluate_norm(spec, samples[i] + samples[j]);
        if (denom > 0.0) r.observed_constant = std::max(r.observed_constant, nsum / denom);
        if (c > 0.0 && nsum > c * denom * (1.0 + tn) + tn)
            r.add({"quasi-triangle", "||x+y|| > C(||x||+||y||)", nsum - c * denom, {samples[i], samples[j]}});
        if (!std::isfinite(nsum)) r.add({"quasi-triangle", "||x+y|| not finite", 0.0, {samples[i], samples[j]}});
    };
    for (std::size_t i = 0; i + 1 < n; ++i) check_pair(i, i + 1);
    for (std::size_t i = 0; i < n / 2; ++i) check_pair(i, n - 1 - i);
    return r;
}

namespace detail {

/// Algebra for randomized norm checks, kept inside a Lorentz weight's length.
inline FiniteAlgebra norm_test_algebra(Rng& rng, const NormSpec& spec) {
    auto alg = random_algebra(rng, 3, 4);
    if (const auto* l = std::get_if<LorentzNorm>(&spec)) {
        const double room = l->weight.length();
        if (alg.total_trace() > room) {
            std::vector<Block> blocks = alg.blocks();
            const double shrink = room / alg.total_trace() * uniform(rng, 0.5, 1.0);
            for (auto& b : blocks) b.weight *= shrink;
            alg = FiniteAlgebra(std::move(blocks));
        }
    }
    return alg;
}

}  // namespace detail

/// Randomized check of symmetry: mu(y) <= mu(x) implies ||y|| <= ||x||.
/// Uses y = u x c v with unitaries u, v and a contraction c, plus the two
/// extreme cases y = u x v (equal norms) and y = x / 2.
inline NormCheckReport check_symmetric(const NormSpec& spec, int trials, std::uint64_t seed) {
    if (trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");
    const double tn = tol().norm;
    NormCheckReport r;
    for (int t = 0; t < trials; ++t) {
        auto rng = derive_rng(seed, "check_symmetric", static_cast<std::uint64_t>(t));
        const auto alg = detail::norm_test_algebra(rng, spec);
        const auto x = random_operator(rng, alg);
        const auto u = random_unitary(rng, alg);
        const auto v = random_unitary(rng, alg);
        const auto c = random_hermitian_contraction(rng, alg);
        const double nx = evaluate_norm(spec, x);
        ++r.trials;
        const double n_equiv = evaluate_norm(spec, u * x * v);
        if (std::abs(n_equiv - nx) > tn * std::max(1.0, nx))
            r.add({"symmetric", "unitarily equivalent operators have different norms", n_equiv - nx, {x}});
        for (const auto& y : {Operator(u * x * c * v), Operator(0.5 * x)}) {
            const double ny = evaluate_norm(spec, y);
            if (ny > nx + tn * std::max(1.0, nx)) r.add({"symmetric", "mu(y) <= mu(x) but ||y|| > ||x||", ny - nx, {x, y}});
        }
    }
    return r;
}

/// Strict pair for the log-monotonicity checks: mu(x) <<_log mu(y), mu(x) != mu(y).
struct LogMajorizedPair {
    Operator x;
    Operator y;
    /// -log of the shrink factor applied to one singular value of x; the
    /// integrated log-mass deficit at t = tau(1).
    double log_gap = 0.0;
};

/// y has random singular values; x is built by a Robin Hood transfer of
/// log-mass between two singular values of y followed by shrinking one
/// value by a factor in [0.5, 0.95]. Single block M_n with trace weight c.
inline LogMajorizedPair make_log_majorized_pair(Rng& rng, const NormSpec& spec) {
    const int n = uniform_int(rng, 2, 6);
    double c = uniform(rng, 0.5, 2.0);
    if (const auto* l = std::get_if<LorentzNorm>(&spec)) c = std::min(c, l->weight.length() / n * uniform(rng, 0.5, 1.0));
    const FiniteAlgebra alg = FiniteAlgebra::matrix(n, c);

    std::vector<double> ly(n);
    for (auto& v : ly) v = gaussian(rng);
    std::sort(ly.begin(), ly.end(), std::greater<>());
    auto lx = ly;
    const int i = uniform_int(rng, 0, n - 2);
    const int j = uniform_int(rng, i + 1, n - 1);
    const double delta = uniform(rng, 0.0, 0.5) * (lx[i] - lx[j]);
    lx[i] -= delta;
    lx[j] += delta;
    const double shrink = uniform(rng, 0.5, 0.95);
    lx[uniform_int(rng, 0, n - 1)] += std::log(shrink);

    auto build = [&](const std::vector<double>& logs) {
        Matrix d = Matrix::Zero(n, n);
        for (int k = 0; k < n; ++k) d(k, k) = std::exp(logs[k]);
        return Operator(alg, {haar_unitary(rng, n) * d * haar_unitary(rng, n)});
    };
    return {build(lx), build(ly), -std::log(shrink)};
}

/// Randomized check of strict log-monotonicity.
inline NormCheckReport check_slm(const NormSpec& spec, int trials, std::uint64_t seed) {
    if (trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");
    validate(spec);
    const double tn = tol().norm;
    constexpr double tol_strict = 1e-12;
    NormCheckReport r;
    int attempts = 0;
    const int budget = 10 * trials;
    while (r.trials < trials) {
        if (attempts >= budget)
            throw Error(Errc::GenerationFailure, "no valid log-majorized pair after " + std::to_string(budget) + " attempts");
        auto rng = derive_rng(seed, "check_slm", static_cast<std::uint64_t>(attempts++));
        const auto pair = make_log_majorized_pair(rng, spec);
        const auto mx = mu(pair.x);
        const auto my = mu(pair.y);
        if (!log_submajorizes(mx, my).holds || approx_equal(mx, my, tol().maj)) continue;
        ++r.trials;
        const double nx = evaluate_norm(spec, mx);
        const double ny = evaluate_norm(spec, my);
        if (nx > ny * (1.0 + tn)) r.add({"log-monotone", "mu(x) <<_log mu(y) but ||x|| > ||y||", nx - ny, {pair.x, pair.y}});
        if (!(ny - nx > tol_strict * ny * pair.log_gap))
            r.add({"slm-strict", "strict gap not observed", ny - nx, {pair.x, pair.y}});
    }
    return r;
}

}  // namespace symiso
