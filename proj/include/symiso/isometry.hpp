#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jordan.hpp"
#include "majorization.hpp"
#include "norms.hpp"

namespace symiso {

struct CheckSummary {
    bool ok = true;
    int trials = 0;
    double worst = 0.0;
    std::vector<Operator> witness;  // inputs attaining `worst` when the check failed
};

/// Per-witness trace of the disjointness argument:
/// ||x-y|| = ||x+y||  =>  mu(Tx - Ty) = mu(Tx + Ty)  =>  Tx Ty = 0.
struct DisjointnessChain {
    int witnesses = 0;
    int norm_link_broken = 0;
    int mu_link_broken = 0;
    int product_link_broken = 0;
    double worst_norm_gap = 0.0;
    std::string first_broken;  // "norm", "mu", "product" or empty

    bool intact() const { return norm_link_broken == 0 && mu_link_broken == 0 && product_link_broken == 0; }
};

struct IsometryAnalysis {
    /// Sampling only: a pass is evidence, not a certificate of positivity.
    CheckSummary positive;
    CheckSummary isometric;
    CheckSummary disjointness;
    DisjointnessChain chain;
    Operator B;
    double commutation_residual = 0.0;
    std::optional<JordanMap> J;
    /// Outcome of verify_jordan on B^+ T, kept for diagnostics when J is absent.
    JordanVerification jordan_check;
    double factorization_residual = 0.0;
    /// max of ||J(e) - s(T(e))|| over projections e and ||s(T(x)) - J(s(x))|| over PSD x.
    double support_identity_residual = 0.0;
    std::string note;

    bool ok(double tolerance = tol().iso) const {
        return positive.ok && isometric.ok && disjointness.ok && J.has_value() && commutation_residual <= tolerance &&
               factorization_residual <= tolerance && support_identity_residual <= tolerance;
    }
};

namespace detail {

inline void keep_worst(CheckSummary& c, double residual, double limit, std::vector<Operator> witness) {
    ++c.trials;
    if (residual > c.worst) {
        c.worst = residual;
        if (residual > limit) c.witness = std::move(witness);
    }
    if (residual > limit) c.ok = false;
}

/// Disjoint PSD pair x, y (xy = 0) from complementary sets of eigenvectors
/// of a random hermitian, with random positive spectral weights.
inline std::pair<Operator, Operator> random_disjoint_pair(Rng& rng, const FiniteAlgebra& alg) {
    const auto sd = spectral_decompose(random_hermitian(rng, alg));
    auto x = Operator::zero(alg);
    auto y = Operator::zero(alg);
    for (std::size_t k = 0; k < sd.blocks.size(); ++k) {
        const auto& b = sd.blocks[k];
        for (Eigen::Index i = 0; i < b.eigenvalues.size(); ++i) {
            const Matrix pi = b.eigenvectors.col(i) * b.eigenvectors.col(i).adjoint();
            const int side = uniform_int(rng, 0, 2);  // 0: x, 1: y, 2: neither
            if (side == 0) x.block(k) += uniform(rng, 0.1, 2.0) * pi;
            else if (side == 1) y.block(k) += uniform(rng, 0.1, 2.0) * pi;
        }
    }
    return {x, y};
}

}  // namespace detail

/// Analyzes a candidate order-preserving isometry T : (M1, E) -> (M2, F) and
/// extracts T = B J with B = T(1) and J = B^+ T, where B^+ inverts B on its support.
inline IsometryAnalysis analyze(const LinearMap& T, const NormSpec& E, const NormSpec& F, int trials = 200,
                                std::uint64_t seed = 0) {
    validate(E);
    validate(F);
    const double ti = tol().iso;
    const auto& dom = T.domain();
    IsometryAnalysis out;

    // (1) positivity
    for (int t = 0; t < trials; ++t) {
        auto rng = derive_rng(seed, "analyze/positive", static_cast<std::uint64_t>(t));
        Operator x = Operator::zero(dom);
        if (t % 2 == 0) {
            const auto k = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(dom.num_blocks()) - 1));
            const Matrix v = gaussian_matrix(rng, dom.dim(k), 1);
            x.block(k) = v * v.adjoint();
        } else {
            x = random_psd(rng, dom, t % 4 == 1 ? 0.0 : 1e-3);
        }
        const auto tx = T.apply(x);
        const double scale = std::max(tx.norm_inf(), 1e-300);
        const double herm = (tx - tx.adjoint()).norm_inf() / scale;
        const double neg = std::max(0.0, -detail::min_eig_hermitian_part(tx)) / scale;
        detail::keep_worst(out.positive, std::max(herm, neg), ti, {x});
    }

    // (2) isometry: matrix units first, then random operators
    {
        std::vector<Operator> samples;
        for (int i = 0; i < dom.vector_dim() && static_cast<int>(samples.size()) < trials; ++i)
            samples.push_back(T.domain_basis(i));
        for (int t = 0; static_cast<int>(samples.size()) < trials; ++t) {
            auto rng = derive_rng(seed, "analyze/isometric", static_cast<std::uint64_t>(t));
            samples.push_back(uniform(rng, 0.1, 3.0) * random_operator(rng, dom));
        }
        for (const auto& x : samples) {
            const double nx = evaluate_norm(E, x);
            const double ntx = evaluate_norm(F, T.apply(x));
            detail::keep_worst(out.isometric, std::abs(ntx - nx) / std::max(1.0, nx), ti, {x});
        }
    }

    // (3) disjointness, tracing the norm, mu and product links
    for (int t = 0; t < trials; ++t) {
        auto rng = derive_rng(seed, "analyze/disjoint", static_cast<std::uint64_t>(t));
        const auto [x, y] = detail::random_disjoint_pair(rng, dom);
        const auto tx = T.apply(x);
        const auto ty = T.apply(y);
        const double prod = (tx * ty).norm_inf();
        const double limit = ti * (1.0 + tx.norm_inf() * ty.norm_inf());
        detail::keep_worst(out.disjointness, prod / (1.0 + tx.norm_inf() * ty.norm_inf()), ti, {x, y});

        auto& ch = out.chain;
        ++ch.witnesses;
        const double ndiff = evaluate_norm(E, x - y);
        const double nsum = evaluate_norm(E, x + y);
        const double gap = std::abs(ndiff - nsum) / std::max(1.0, nsum);
        ch.worst_norm_gap = std::max(ch.worst_norm_gap, gap);
        auto broke = [&ch](int& counter, const char* link) {
            ++counter;
            if (ch.first_broken.empty()) ch.first_broken = link;
        };
        if (gap > 1e-10) broke(ch.norm_link_broken, "norm");
        if (!approx_equal(mu(tx - ty), mu(tx + ty), ti)) broke(ch.mu_link_broken, "mu");
        if (prod > limit) broke(ch.product_link_broken, "product");
    }

    // (4) B = T(1) and its commutation with the range
    out.B = T.apply(Operator::identity(dom));
    for (int i = 0; i < dom.vector_dim(); ++i)
        out.commutation_residual =
            std::max(out.commutation_residual, commutator(out.B, T.apply(T.domain_basis(i))).norm_inf());

    // (5) J = B^+ T
    if (!out.B.is_hermitian()) {
        out.note = "T(1) is not hermitian; no Jordan part extracted";
        return out;
    }
    const double cut = rank_threshold(out.B);
    const auto b_pinv = functional_calculus(out.B, [cut](double t) { return t > cut ? 1.0 / t : 0.0; });
    const auto jmap = LinearMap::from_function(dom, T.codomain(), [&](const Operator& x) { return b_pinv * T.apply(x); });
    out.jordan_check = verify_jordan(jmap, seed);
    if (!out.jordan_check.passed) {
        out.note = "B^+ T is not a Jordan *-homomorphism (" + out.jordan_check.failed_check + ")";
    } else {
        JordanMap j = *out.jordan_check.jordan;
        try {
            j = with_split(std::move(j), seed);
        } catch (const Error& e) {
            out.note = std::string("split failed: ") + e.what();
        }
        out.J = std::move(j);
    }

    for (int t = 0; t < 50; ++t) {
        auto rng = derive_rng(seed, "analyze/support", static_cast<std::uint64_t>(t));
        const auto e = random_projection(rng, dom);
        out.support_identity_residual =
            std::max(out.support_identity_residual, (jmap.apply(e) - support_projection(T.apply(e))).norm_inf());
        const auto x = random_psd(rng, dom, t % 2 == 0 ? 0.0 : 1e-3);
        out.support_identity_residual = std::max(
            out.support_identity_residual, (support_projection(T.apply(x)) - jmap.apply(support_projection(x))).norm_inf());
    }

    auto factor_residual = [&](const Operator& x) {
        return (T.apply(x) - out.B * jmap.apply(x)).norm_inf() / std::max(1.0, x.norm_inf());
    };
    for (int i = 0; i < dom.vector_dim(); ++i)
        out.factorization_residual = std::max(out.factorization_residual, factor_residual(T.domain_basis(i)));
    for (int t = 0; t < trials; ++t) {
        auto rng = derive_rng(seed, "analyze/factor", static_cast<std::uint64_t>(t));
        out.factorization_residual = std::max(out.factorization_residual, factor_residual(random_operator(rng, dom)));
    }
    return out;
}

/// Recipe for T(x) = B J(x): a Jordan plan plus one scalar beta_k >= 0 per
/// codomain block (B = sum_k beta_k 1_k), and the norms of both sides.
struct SynthSpec {
    JordanPlan plan;
    std::vector<double> beta;
    NormSpec E = LpNorm{1.0};
    NormSpec F = LpNorm{1.0};
};

struct SynthesizedMap {
    LinearMap map;
    /// True when E = F = L_p and the calibration equations hold; other norm
    /// pairs are built but carry no isometry guarantee.
    bool calibrated = false;
};

inline std::optional<double> common_lp_exponent(const NormSpec& E, const NormSpec& F) {
    const auto* e = std::get_if<LpNorm>(&E);
    const auto* f = std::get_if<LpNorm>(&F);
    if (e && f && e->p == f->p) return e->p;
    return std::nullopt;
}

/// Calibration for L_p: for every source block j,
///   sum over entries with source j of  c'_target * beta_target^p  =  c_j.
/// Returns the worst relative violation and the block where it occurs.
inline std::pair<double, std::size_t> calibration_defect(const JordanPlan& plan, const std::vector<double>& beta,
                                                         double p) {
    std::vector<double> lhs(plan.domain.num_blocks(), 0.0);
    for (const auto& e : plan.entries) lhs[e.source] += plan.codomain.weight(e.target) * std::pow(beta[e.target], p);
    double worst = 0.0;
    std::size_t where = 0;
    for (std::size_t j = 0; j < lhs.size(); ++j) {
        const double d = std::abs(lhs[j] - plan.domain.weight(j)) / plan.domain.weight(j);
        if (d > worst) {
            worst = d;
            where = j;
        }
    }
    return {worst, where};
}

/// beta solving the L_p calibration, splitting each source's trace mass over
/// its targets in proportion to `shares` (one positive number per plan entry).
inline std::vector<double> calibrated_beta(const JordanPlan& plan, double p, const std::vector<double>& shares) {
    if (shares.size() != plan.entries.size()) throw Error(Errc::InvalidArgument, "one share per plan entry required");
    std::vector<double> total(plan.domain.num_blocks(), 0.0);
    for (std::size_t i = 0; i < shares.size(); ++i) total[plan.entries[i].source] += shares[i];
    std::vector<double> beta(plan.codomain.num_blocks(), 0.0);
    for (std::size_t i = 0; i < shares.size(); ++i) {
        const auto& e = plan.entries[i];
        const double mass = shares[i] / total[e.source] * plan.domain.weight(e.source);
        beta[e.target] = std::pow(mass / plan.codomain.weight(e.target), 1.0 / p);
    }
    return beta;
}

inline SynthesizedMap synthesize(const SynthSpec& spec, bool enforce_calibration = true) {
    validate_plan(spec.plan);
    validate(spec.E);
    validate(spec.F);
    const auto& cod = spec.plan.codomain;
    if (spec.beta.size() != cod.num_blocks()) throw Error(Errc::ShapeMismatch, "one beta per codomain block required");
    for (double b : spec.beta)
        if (!(b >= 0.0) || !std::isfinite(b)) throw Error(Errc::InvalidArgument, "beta must be finite and >= 0");

    SynthesizedMap out;
    if (const auto p = common_lp_exponent(spec.E, spec.F)) {
        const auto [defect, block] = calibration_defect(spec.plan, spec.beta, *p);
        out.calibrated = defect <= 1e-9;
        if (!out.calibrated && enforce_calibration)
            throw Error(Errc::CalibrationError, "source block " + std::to_string(block) + ": sum c' beta^p differs from c by " +
                                                    std::to_string(defect) + " (relative)");
    }
    const auto J = plan_map(spec.plan);
    auto b = Operator::zero(cod);
    for (std::size_t k = 0; k < cod.num_blocks(); ++k) b.block(k).setIdentity() *= spec.beta[k];
    out.map = LinearMap::from_function(spec.plan.domain, cod, [&](const Operator& x) { return b * J.apply(x); });
    return out;
}

struct ReflectionReport {
    bool passed = true;
    int trials = 0;
    double worst = 0.0;  // largest normalized violation of x >= 0
    std::optional<Operator> witness_y;
    std::optional<Operator> witness_x;
    bool f_log_monotone_checked = false;
    bool f_log_monotone = false;
};

/// For an invertible T: T(x) >= 0 must force x >= 0. Samples PSD y in the
/// codomain, solves T(x) = y, and checks x is hermitian with spectrum >= -tol.
/// When F is given, its log-monotonicity is sampled as well.
inline ReflectionReport check_surjective_reflection(const LinearMap& T, int trials, std::uint64_t seed,
                                                    const std::optional<NormSpec>& F = std::nullopt) {
    const Matrix& m = T.matrix();
    if (m.rows() != m.cols()) throw Error(Errc::Singular, "T is not square, so it cannot be invertible");
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) throw Error(Errc::Singular, "T is not invertible");

    const double ti = tol().iso;
    ReflectionReport r;
    for (int t = 0; t < trials; ++t) {
        auto rng = derive_rng(seed, "reflect", static_cast<std::uint64_t>(t));
        const auto y = detail::normalized(random_psd(rng, T.codomain(), t % 2 == 0 ? 0.0 : 1e-3));
        const auto x = Operator::from_vector(T.domain(), lu.solve(y.vectorize()));
        const double scale = std::max(1.0, x.norm_inf());
        const double herm = (x - x.adjoint()).norm_inf() / scale;
        const double neg = std::max(0.0, -detail::min_eig_hermitian_part(x)) / scale;
        const double v = std::max(herm, neg);
        ++r.trials;
        if (v > r.worst) r.worst = v;
        if (v > ti && r.passed) {
            r.passed = false;
            r.witness_y = y;
            r.witness_x = x;
        }
    }
    if (F) {
        r.f_log_monotone_checked = true;
        const auto rep = check_slm(*F, 20, seed);
        r.f_log_monotone = std::none_of(rep.violations.begin(), rep.violations.end(),
                                        [](const AxiomViolation& v) { return v.axiom == "log-monotone"; });
    }
    return r;
}

struct CentralBReport {
    bool applicable = false;
    bool central = false;
    bool factor = false;
    double alpha = 0.0;
    double residual = 0.0;
    bool passed = false;
    std::string note;
};

/// For onto maps with surjective J, B = T(1) is central in M2; when M2 is a
/// factor, B = alpha 1 and T = alpha J.
inline CentralBReport central_B_check(const IsometryAnalysis& a, bool onto) {
    if (!a.J) throw Error(Errc::JMissing, "central_B_check requires an extracted Jordan part");
    CentralBReport r;
    const auto& cod = a.J->codomain();
    const bool j_onto = matrix_rank(a.J->map.matrix()) == cod.vector_dim();
    if (!onto || !j_onto) {
        r.note = !onto ? "not applicable: map is not onto" : "not applicable: J is not surjective";
        return r;
    }
    r.applicable = true;
    const double ti = tol().iso;
    for (std::size_t k = 0; k < cod.num_blocks(); ++k)
        for (int i = 0; i < cod.dim(k); ++i)
            for (int j = 0; j < cod.dim(k); ++j)
                r.residual = std::max(r.residual, commutator(a.B, Operator::matrix_unit(cod, k, i, j)).norm_inf());
    r.central = r.residual <= ti;
    r.passed = r.central;
    if (cod.num_blocks() == 1) {
        r.factor = true;
        r.alpha = trace(a.B).real() / cod.total_trace();
        const double dev = (a.B - Operator::scalar(cod, r.alpha)).norm_inf();
        r.residual = std::max(r.residual, dev);
        r.passed = r.central && dev <= ti;
    }
    return r;
}

}  // namespace symiso
