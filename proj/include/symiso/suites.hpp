#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "isometry.hpp"
#include "jordan.hpp"
#include "json_io.hpp"
#include "majorization.hpp"
#include "norms.hpp"
#include "rearrangement.hpp"

namespace symiso {

struct SuiteOptions {
    std::uint64_t seed = 0;
    std::optional<int> trials;  // none: each suite's default count
    bool inject_calibration_fault = false;
};

struct SuiteResult {
    std::string name;
    bool passed = true;
    int trials = 0;
    int failures = 0;
    json metrics = json::object();
    json witness = nullptr;  // first failing trial

    void fail(json w) {
        ++failures;
        passed = false;
        if (witness.is_null()) witness = std::move(w);
    }
};

inline json to_json(const SuiteResult& r) {
    return {{"name", r.name},       {"passed", r.passed},   {"trials", r.trials},
            {"failures", r.failures}, {"metrics", r.metrics}, {"witness", r.witness}};
}

namespace suites {

// ---- generators ------------------------------------------------------------------

/// (a, b) with a >= 0 and -a <= b <= a: b = a^{1/2} h a^{1/2}, ||h|| <= 1.
inline std::pair<Operator, Operator> sandwich_pair(Rng& rng) {
    const auto alg = random_algebra(rng, 4, 4);
    const auto a = random_psd(rng, alg, uniform_int(rng, 0, 1) == 0 ? 0.0 : 1e-3);
    const auto h = random_hermitian_contraction(rng, alg);
    const auto ra = sqrt_psd(a);
    const auto b = ra * h * ra;
    return {a, 0.5 * (b + b.adjoint())};
}

inline std::pair<Operator, Operator> product_pair(Rng& rng) {
    const auto alg = random_algebra(rng, 4, 4);
    auto x = random_operator(rng, alg);
    auto y = random_operator(rng, alg);
    if (uniform_int(rng, 0, 3) == 0) x = random_projection(rng, alg) * x;
    if (uniform_int(rng, 0, 3) == 0) y = y * random_projection(rng, alg);
    return {x, y};
}

inline const StepFunction& lorentz_weight() {
    static const StepFunction w({{3.0, 2.0}, {2.0, 6.0}, {1.0, 24.0}, {0.5, 32.0}});
    return w;
}

inline std::vector<NormSpec> all_variants() {
    return {LpNorm{0.5},
            LpNorm{1.0},
            LpNorm{2.0},
            LpNorm{3.7},
            LorentzNorm{1.0, lorentz_weight()},
            LorentzNorm{0.5, lorentz_weight()},
            LorentzNorm{2.0, lorentz_weight()},
            LogNorm{}};
}

inline int count(const SuiteOptions& o, int default_trials) { return o.trials.value_or(default_trials); }

inline Rng trial_rng(const SuiteOptions& o, const char* stream, int t) {
    return derive_rng(o.seed, stream, static_cast<std::uint64_t>(t));
}

// ---- suites -----------------------------------------------------------------------

/// mu(t) against inf{s >= 0 : d(s) <= t}, computed by direct counting over
/// singular values, at every breakpoint and on a 10^4-point grid.
inline SuiteResult mu_oracle(const SuiteOptions& o) {
    SuiteResult r{"mu-oracle"};
    double dev_break = 0.0, dev_grid = 0.0;
    constexpr int kGrid = 10000;
    for (int t = 0; t < count(o, 500); ++t) {
        auto rng = trial_rng(o, "mu-oracle", t);
        const auto x = random_operator(rng, random_algebra(rng, 4, 5));
        const auto& alg = x.algebra();
        const double len = alg.total_trace();

        const auto svals = singular_values(x);
        std::vector<double> cand{0.0};
        for (const auto& s : svals) cand.insert(cand.end(), s.data(), s.data() + s.size());
        std::sort(cand.begin(), cand.end());
        std::vector<double> dist;
        for (double s : cand) {
            double d = 0.0;
            for (std::size_t k = 0; k < svals.size(); ++k)
                for (Eigen::Index i = 0; i < svals[k].size(); ++i)
                    if (svals[k](i) > s) d += alg.weight(k);
            dist.push_back(d);
        }
        auto oracle = [&](double tt) {
            for (std::size_t i = 0; i < cand.size(); ++i)
                if (dist[i] <= tt + 1e-12 * len) return cand[i];
            return cand.back();
        };

        const auto f = mu(x);
        double local_break = 0.0, local_grid = 0.0;
        auto bps = f.breakpoints();
        bps.pop_back();
        bps.insert(bps.begin(), 0.0);
        for (double tt : bps) local_break = std::max(local_break, std::abs(f.at(tt) - oracle(tt)));
        auto near_breakpoint = [&](double tt) {
            return std::any_of(bps.begin(), bps.end(), [&](double b) { return std::abs(tt - b) <= 1e-12 * len; });
        };
        for (int g = 0; g < kGrid; ++g) {
            const double tt = len * g / kGrid;
            if (near_breakpoint(tt)) continue;  // covered exactly above
            local_grid = std::max(local_grid, std::abs(f.at(tt) - oracle(tt)));
        }
        ++r.trials;
        dev_break = std::max(dev_break, local_break);
        dev_grid = std::max(dev_grid, local_grid);
        if (local_break != 0.0 || local_grid > 1e-9)
            r.fail({{"trial", t}, {"x", to_json(x)}, {"breakpoint_dev", local_break}, {"grid_dev", local_grid}});
    }
    r.metrics = {{"max_dev_breakpoints", dev_break}, {"max_dev_grid", dev_grid}};
    return r;
}

inline SuiteResult sandwich_logmaj(const SuiteOptions& o) {
    SuiteResult r{"sandwich-logmaj"};
    double min_slack = std::numeric_limits<double>::infinity();
    for (int t = 0; t < count(o, 1000); ++t) {
        auto rng = trial_rng(o, "sandwich", t);
        const auto [a, b] = sandwich_pair(rng);
        const auto v = log_submajorizes(mu(b), mu(a));
        ++r.trials;
        if (v.slack.is_finite()) min_slack = std::min(min_slack, v.slack.value());
        if (!v.holds || v.slack < ExtReal(-1e-8))
            r.fail({{"trial", t}, {"a", to_json(a)}, {"b", to_json(b)}, {"verdict", to_json(v)}});
    }
    r.metrics = {{"min_finite_slack", min_slack}};
    return r;
}

inline SuiteResult det_monotone(const SuiteOptions& o) {
    SuiteResult r{"det-monotone"};
    double worst_ratio = 0.0;
    for (int t = 0; t < count(o, 1000); ++t) {
        auto rng = trial_rng(o, "sandwich", t);
        const auto [a, b] = sandwich_pair(rng);
        const double da = fk_determinant(a);
        const double db = fk_determinant(b);
        ++r.trials;
        if (da > 0.0) worst_ratio = std::max(worst_ratio, db / da);
        if (db > da * (1.0 + 1e-8))
            r.fail({{"trial", t}, {"a", to_json(a)}, {"b", to_json(b)}, {"det_a", da}, {"det_b", db}});
    }
    r.metrics = {{"max_det_ratio", worst_ratio}};
    return r;
}

inline SuiteResult product_logmaj(const SuiteOptions& o) {
    SuiteResult r{"product-logmaj"};
    for (int t = 0; t < count(o, 1000); ++t) {
        auto rng = trial_rng(o, "product", t);
        const auto [x, y] = product_pair(rng);
        const auto v = log_submajorizes(mu(x * y), product(mu(x), mu(y)));
        ++r.trials;
        if (!v.holds) r.fail({{"trial", t}, {"x", to_json(x)}, {"y", to_json(y)}, {"verdict", to_json(v)}});
    }
    return r;
}

inline SuiteResult power_transfer(const SuiteOptions& o) {
    SuiteResult r{"power-transfer"};
    int applicable = 0;
    for (int t = 0; t < count(o, 500); ++t) {
        auto rng = trial_rng(o, "power-transfer", t);
        const auto [a, b] = sandwich_pair(rng);
        const auto [x, y] = product_pair(rng);
        const std::pair<StepFunction, StepFunction> cases[] = {{mu(b), mu(a)}, {mu(x * y), product(mu(x), mu(y))}};
        ++r.trials;
        for (const auto& [lo, hi] : cases) {
            if (!log_submajorizes(lo, hi).holds) continue;
            ++applicable;
            for (double p : {0.5, 1.0, 2.0, 3.7}) {
                const auto v = submajorizes(power(lo, p), power(hi, p));
                if (!v.holds) r.fail({{"trial", t}, {"p", p}, {"lhs", to_json(lo)}, {"rhs", to_json(hi)}, {"verdict", to_json(v)}});
            }
        }
    }
    r.metrics = {{"applicable_pairs", applicable}};
    return r;
}

inline SuiteResult convex_transfer(const SuiteOptions& o) {
    SuiteResult r{"convex-transfer"};
    const std::pair<const char*, std::function<double(double)>> phis[] = {
        {"max(t,0)", [](double v) { return std::max(v, 0.0); }},
        {"exp", [](double v) { return std::exp(v); }},
        {"square", [](double v) { return v * v; }},
    };
    int applicable = 0;
    for (int t = 0; t < count(o, 500); ++t) {
        auto rng = trial_rng(o, "convex-transfer", t);
        const auto [a, b] = sandwich_pair(rng);
        const auto [x, y] = product_pair(rng);
        const std::pair<StepFunction, StepFunction> cases[] = {{mu(b), mu(a)}, {mu(x * y), product(mu(x), mu(y))}};
        ++r.trials;
        for (const auto& [f, g] : cases) {
            if (!submajorizes(f, g).holds) continue;
            ++applicable;
            for (const auto& [name, phi] : phis) {
                const auto v = submajorizes(map_values(f, phi), map_values(g, phi));
                if (!v.holds) r.fail({{"trial", t}, {"phi", name}, {"f", to_json(f)}, {"g", to_json(g)}, {"verdict", to_json(v)}});
            }
        }
    }
    r.metrics = {{"applicable_pairs", applicable}};
    return r;
}

/// 0 <= b <= a with mu(b) = mu(a) forces b = a. Candidates: b = a, b = a - eps p
/// (p a spectral projection of a) and b = a^{1/2} h a^{1/2} with 0 <= h <= 1.
inline SuiteResult mu_rigidity(const SuiteOptions& o) {
    SuiteResult r{"mu-rigidity"};
    int equal_pairs = 0, perturbed_detected = 0, perturbed = 0;
    const double lim = 10.0 * tol().alg;
    for (int t = 0; t < count(o, 500); ++t) {
        auto rng = trial_rng(o, "mu-rigidity", t);
        const auto alg = random_algebra(rng, 3, 4);
        const auto a = random_psd(rng, alg, 1e-3);
        const auto sd = spectral_decompose(a);
        // p: eigenvectors of a with eigenvalue >= a random spectral level.
        const auto& blk = sd.blocks[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(alg.num_blocks()) - 1))];
        const double level = blk.eigenvalues(uniform_int(rng, 0, static_cast<int>(blk.eigenvalues.size()) - 1));
        const auto p = spectral_projection(sd, {level * (1.0 - 1e-9), std::numeric_limits<double>::infinity()});
        const double eps = uniform(rng, 0.1, 0.9) * level;
        const auto sdh = spectral_decompose(random_hermitian(rng, alg));
        const auto h = functional_calculus(sdh, [&rng](double) { return uniform(rng, 0.0, 1.0); });
        const auto ra = sqrt_psd(a);
        const Operator candidates[] = {a, a - eps * p, ra * h * ra};
        ++r.trials;
        const auto ma = mu(a);
        for (std::size_t c = 0; c < 3; ++c) {
            const auto& b = candidates[c];
            const bool equal = approx_equal(mu(b), ma, tol().maj);
            const double dist = (a - b).norm_inf();
            if (c == 0) equal_pairs += equal;
            else {
                ++perturbed;
                perturbed_detected += !equal;
            }
            if (equal && dist > lim * std::max(1.0, a.norm_inf()))
                r.fail({{"trial", t}, {"candidate", c}, {"a", to_json(a)}, {"b", to_json(b)}, {"distance", dist}});
            if (c == 0 && !equal) r.fail({{"trial", t}, {"reason", "mu(a) != mu(a)"}});
        }
    }
    r.metrics = {{"identical_pairs_equal", equal_pairs}, {"perturbed", perturbed}, {"perturbed_detected", perturbed_detected}};
    return r;
}

/// r = e^z(lambda, inf) satisfies mu(rzr) = mu(z) on (0, tau(r)); random
/// projections p != r with tau(p) = tau(r) do not.
inline SuiteResult projection_rigidity(const SuiteOptions& o) {
    SuiteResult r{"projection-rigidity"};
    int rejected = 0, probes = 0;
    for (int t = 0; t < count(o, 100); ++t) {
        auto rng = trial_rng(o, "projection-rigidity", t);
        const int n = uniform_int(rng, 2, 5);
        const auto alg = FiniteAlgebra::matrix(n, uniform(rng, 0.5, 2.0));
        const auto z = random_psd(rng, alg, 1e-3);
        const auto sd = spectral_decompose(z);
        const int k = uniform_int(rng, 1, n - 1);
        const auto& ev = sd.blocks[0].eigenvalues;
        const double level = 0.5 * (ev(k - 1) + ev(k));
        const auto proj = spectral_projection(sd, {level, std::numeric_limits<double>::infinity()});
        const double len = trace(proj).real();
        const auto mz = truncate(mu(z), len);
        ++r.trials;
        if (!approx_equal(truncate(mu(proj * z * proj), len), mz, tol().maj))
            r.fail({{"trial", t}, {"reason", "mu(rzr) != mu(z) on (0, tau(r))"}, {"z", to_json(z)}});
        for (int i = 0; i < 100; ++i) {
            const Matrix u = haar_unitary(rng, n);
            const Operator p(alg, {u.leftCols(k) * u.leftCols(k).adjoint()});
            ++probes;
            if (approx_equal(truncate(mu(p * z * p), len), mz, tol().maj)) {
                if ((p - proj).norm_inf() > 1e-6)
                    r.fail({{"trial", t}, {"reason", "mu(pzp) = mu(z) for p != r"}, {"z", to_json(z)}, {"p", to_json(p)}});
            } else {
                ++rejected;
            }
        }
    }
    r.metrics = {{"probes", probes}, {"rejected", rejected}};
    return r;
}

/// For x, y >= 0: xy = -yx forces xy = 0.
inline SuiteResult anticommute(const SuiteOptions& o) {
    SuiteResult r{"anticommute"};
    const double tj = tol().jordan;
    int near_anticommuting = 0;
    for (int t = 0; t < count(o, 500); ++t) {
        auto rng = trial_rng(o, "anticommute", t);
        const auto alg = random_algebra(rng, 3, 4);
        // Disjoint PSD pair: both products vanish.
        auto [x, y] = detail::random_disjoint_pair(rng, alg);
        ++r.trials;
        const double anti = (x * y + y * x).norm_inf();
        const double prod = (x * y).norm_inf();
        if (anti > tj || prod > tj) r.fail({{"trial", t}, {"x", to_json(x)}, {"y", to_json(y)}, {"anti", anti}, {"prod", prod}});
        // Generic PSD pair: whenever the anticommutator is small, so is the product.
        const auto a = random_psd(rng, alg, uniform_int(rng, 0, 1) == 0 ? 0.0 : 1e-3);
        const auto b = random_psd(rng, alg, uniform_int(rng, 0, 1) == 0 ? 0.0 : 1e-3);
        const double anti2 = (a * b + b * a).norm_inf();
        if (anti2 <= tj) {
            ++near_anticommuting;
            const double prod2 = (a * b).norm_inf();
            if (prod2 > 10.0 * tj) r.fail({{"trial", t}, {"a", to_json(a)}, {"b", to_json(b)}, {"anti", anti2}, {"prod", prod2}});
        }
    }
    r.metrics = {{"generic_pairs_below_tolerance", near_anticommuting}};
    return r;
}

/// mu(x - y) = mu(x + y) exactly for disjoint PSD pairs and never otherwise.
inline SuiteResult sum_diff(const SuiteOptions& o) {
    SuiteResult r{"sum-diff"};
    int violations = 0, disjoint_ok = 0, generic_checked = 0, generic_ok = 0;
    for (int t = 0; t < count(o, 500); ++t) {
        auto rng = trial_rng(o, "sum-diff", t);
        const auto alg = random_algebra(rng, 3, 4);
        const auto [x, y] = detail::random_disjoint_pair(rng, alg);
        const auto d1 = disjointness_from_mu_equality(x, y);
        // Generic pairs are redrawn until they overlap (ab != 0).
        Operator a, b;
        DisjointnessDiagnostic d2;
        for (int attempt = 0; attempt < 100; ++attempt) {
            a = random_psd(rng, alg, uniform_int(rng, 0, 1) == 0 ? 0.0 : 1e-3);
            b = random_psd(rng, alg, uniform_int(rng, 0, 1) == 0 ? 0.0 : 1e-3);
            d2 = disjointness_from_mu_equality(a, b);
            if (!d2.product_zero) break;
        }
        r.trials += 2;
        violations += d1.violation + d2.violation;
        if (!d1.mu_equal || !d1.product_zero)
            r.fail({{"trial", t}, {"case", "disjoint"}, {"x", to_json(x)}, {"y", to_json(y)}});
        if (d2.violation || (!d2.product_zero && d2.mu_equal))
            r.fail({{"trial", t}, {"case", "generic"}, {"x", to_json(a)}, {"y", to_json(b)}});
        if (d1.mu_equal && d1.product_zero) ++disjoint_ok;
        if (d2.product_zero) continue;
        ++generic_checked;
        if (d2.mu_equal) r.fail({{"trial", t}, {"case", "generic mu_equal"}, {"x", to_json(a)}, {"y", to_json(b)}});
        else ++generic_ok;
    }
    r.metrics = {{"lemma_violations", violations},
                 {"disjoint_pairs_equal", disjoint_ok},
                 {"generic_pairs_checked", generic_checked},
                 {"generic_pairs_distinct", generic_ok}};
    return r;
}

inline SuiteResult norm_axioms(const SuiteOptions& o) {
    SuiteResult r{"norm-axioms"};
    const int n = count(o, 200);
    json constants = json::object();
    int v = 0;
    for (const auto& spec : all_variants()) {
        const auto name = norm_name(spec);
        auto rng = derive_rng(o.seed, "norm-axioms/" + name, 0);
        auto alg = random_algebra(rng, 3, 4);
        while (alg.vector_dim() < 2) alg = random_algebra(rng, 3, 4);  // C has no disjoint pairs
        std::vector<Operator> samples{Operator::zero(alg)};
        for (int i = 0; i < n; ++i) samples.push_back(std::exp(gaussian(rng)) * random_operator(rng, alg));
        // Disjoint neighbours approach the extremal quasi-triangle ratio.
        for (int i = 0; i < std::max(1, n / 10); ++i) {
            const auto [x, y] = symiso::detail::random_disjoint_pair(rng, alg);
            samples.push_back(x);
            samples.push_back(y);
        }
        const auto rep = check_delta_axioms(spec, samples);
        const auto sym = check_symmetric(spec, n, o.seed + static_cast<std::uint64_t>(++v));
        r.trials += rep.trials + sym.trials;
        constants[name] = rep.observed_constant;
        if (!rep.passed) r.fail({{"norm", name}, {"report", to_json(rep)}});
        if (!sym.passed) r.fail({{"norm", name}, {"report", to_json(sym)}});
        if (!std::isfinite(rep.observed_constant)) r.fail({{"norm", name}, {"reason", "quasi-triangle constant not finite"}});
    }
    r.metrics = {{"observed_constants", constants}};
    return r;
}

inline SuiteResult slm_all_variants(const SuiteOptions& o) {
    SuiteResult r{"slm-all-variants"};
    const int n = count(o, 500);
    std::uint64_t v = 0;
    json per_variant = json::object();
    for (const auto& spec : all_variants()) {
        const auto rep = check_slm(spec, n, o.seed * 1315423911ULL + (++v));
        r.trials += rep.trials;
        per_variant[norm_name(spec)] = rep.trials;
        if (!rep.passed) r.fail({{"norm", norm_name(spec)}, {"report", to_json(rep)}});
    }
    r.metrics = {{"trials_per_variant", per_variant}};
    return r;
}

namespace detail {

/// Per-entry classification recovered by the split, compared with the plan.
inline bool split_matches_plan(const JordanPlan& plan, const StormerSplit& s) {
    auto in = [](const std::vector<std::size_t>& v, std::size_t k) { return std::find(v.begin(), v.end(), k) != v.end(); };
    for (const auto& e : plan.entries) {
        const bool hom = plan_expects_hom(plan, e);
        if (hom ? !in(s.hom_blocks, e.target) : !in(s.antihom_blocks, e.target)) return false;
    }
    return true;
}

}  // namespace detail

inline SuiteResult jordan_roundtrip(const SuiteOptions& o) {
    SuiteResult r{"jordan-roundtrip"};
    double worst_verify = 0.0, worst_abs = 0.0, worst_commuting = 0.0;
    for (int t = 0; t < count(o, 100); ++t) {
        auto rng = trial_rng(o, "jordan-roundtrip", t);
        const auto plan = random_plan(rng, 3, 3, true);
        const auto v = verify_jordan(plan_map(plan), static_cast<std::uint64_t>(t));
        ++r.trials;
        worst_verify = std::max(worst_verify, v.certificate.max_residual);
        if (!v.passed || v.certificate.max_residual > 1e-10) {
            r.fail({{"trial", t}, {"plan", to_json(plan)}, {"verification", to_json(v)}});
            continue;
        }
        const auto J = with_split(*v.jordan);
        const auto p = domain_hom_projection(J);
        for (int i = 0; i < 10; ++i) {
            const auto x = uniform(rng, 0.2, 3.0) * random_operator(rng, plan.domain);
            double res = jordan_abs_residual(J, x);
            if (p) res = std::max(res, jordan_abs_residual_domain(J, x, *p));
            worst_abs = std::max(worst_abs, res);
            if (res > 1e-9) r.fail({{"trial", t}, {"plan", to_json(plan)}, {"x", to_json(x)}, {"abs_residual", res}});
            if (J(x).norm_inf() > x.norm_inf() + tol().jordan)
                r.fail({{"trial", t}, {"reason", "not contractive"}, {"x", to_json(x)}});
        }
        const auto h = symiso::detail::normalized(random_hermitian(rng, plan.domain));
        const auto g = h * h - 0.5 * h + Operator::scalar(plan.domain, 0.3);
        const double comm =
            std::max((J(h * g) - J(h) * J(g)).norm_inf(), (J(h) * J(g) - J(g) * J(h)).norm_inf());
        worst_commuting = std::max(worst_commuting, comm);
        if (comm > 1e-8) r.fail({{"trial", t}, {"reason", "commuting multiplicativity"}, {"residual", comm}});
        const auto inj = check_injective(J);
        if (!inj.injective || !inj.rank_consistent) r.fail({{"trial", t}, {"reason", "injectivity"}, {"rank", inj.rank}});
        const auto ortho = ortho_extension_check(J.map, 10, static_cast<std::uint64_t>(t));
        if (!ortho.ortho_ok || !ortho.jordan_ok) r.fail({{"trial", t}, {"reason", "ortho extension"}, {"check", ortho.failed_check}});
    }
    r.metrics = {{"max_verify_residual", worst_verify},
                 {"max_abs_residual", worst_abs},
                 {"max_commuting_residual", worst_commuting}};
    return r;
}

inline SuiteResult stormer_roundtrip(const SuiteOptions& o) {
    SuiteResult r{"stormer-roundtrip"};
    int recovered = 0, nonvacuous = 0;
    for (int t = 0; t < count(o, 100); ++t) {
        auto rng = trial_rng(o, "stormer-roundtrip", t);
        const auto plan = random_plan(rng, 3, 3, true);
        const auto J = with_split(random_jordan(plan), static_cast<std::uint64_t>(t));
        const auto& s = *J.split;
        ++r.trials;
        if (detail::split_matches_plan(plan, s)) ++recovered;
        else r.fail({{"trial", t}, {"plan", to_json(plan)}, {"split", to_json(s)}});
        double central = 0.0;
        for (int i = 0; i < plan.domain.vector_dim(); ++i)
            central = std::max(central, commutator(s.z, J(J.map.domain_basis(i))).norm_inf());
        if (central > tol().jordan) r.fail({{"trial", t}, {"reason", "z not central"}, {"residual", central}});
        // The hom part of a transposed block of size >= 2 must fail multiplicativity.
        for (const auto& e : plan.entries) {
            if (!e.transpose || plan.codomain.dim(e.target) < 2) continue;
            const auto zt = Operator::block_identity(plan.codomain, e.target);
            const auto x = random_operator(rng, plan.domain);
            const auto y = random_operator(rng, plan.domain);
            const double hom = ((J(x * y) - J(x) * J(y)) * zt).norm_inf();
            if (hom > 1e-6) ++nonvacuous;
            else r.fail({{"trial", t}, {"reason", "transposed block passed hom test"}});
        }
    }
    r.metrics = {{"recovered", recovered}, {"nonvacuous_witnesses", nonvacuous}};
    return r;
}

inline SuiteResult isometry_roundtrip(const SuiteOptions& o) {
    SuiteResult r{"isometry-roundtrip"};
    double worst_factor = 0.0, worst_support = 0.0;
    const double ps[] = {0.5, 1.0, 2.0, 3.0};
    for (int t = 0; t < count(o, 100); ++t) {
        auto rng = trial_rng(o, "isometry-roundtrip", t);
        const double p = ps[t % 4];
        const auto plan = random_plan(rng, 3, 3, true);
        std::vector<double> shares;
        for (std::size_t i = 0; i < plan.entries.size(); ++i) shares.push_back(uniform(rng, 0.2, 1.0));
        SynthSpec spec{plan, calibrated_beta(plan, p, shares), LpNorm{p}, LpNorm{p}};
        if (o.inject_calibration_fault) spec = fixtures::break_calibration(spec);
        const auto T = synthesize(spec, !o.inject_calibration_fault).map;
        const auto a = analyze(T, spec.E, spec.F, 100, static_cast<std::uint64_t>(t));
        ++r.trials;
        worst_factor = std::max(worst_factor, a.factorization_residual);
        worst_support = std::max(worst_support, a.support_identity_residual);
        const bool split_ok = a.J && a.J->split && detail::split_matches_plan(plan, *a.J->split);
        if (!a.ok() || a.factorization_residual > 1e-8 || a.support_identity_residual > 1e-8 || !a.chain.intact() ||
            !split_ok) {
            json w = {{"trial", t}, {"spec", to_json(spec)}, {"ok", a.ok()}, {"split_ok", split_ok},
                      {"isometric", to_json(a.isometric)}, {"positive", to_json(a.positive)},
                      {"chain_intact", a.chain.intact()}, {"factorization_residual", a.factorization_residual},
                      {"support_identity_residual", a.support_identity_residual}, {"note", a.note}};
            r.fail(std::move(w));
        }
    }
    r.metrics = {{"max_factorization_residual", worst_factor}, {"max_support_identity_residual", worst_support},
                 {"fault_injected", o.inject_calibration_fault}};
    return r;
}

inline SuiteResult surjective_reflection(const SuiteOptions& o) {
    SuiteResult r{"surjective-reflection"};
    const double ps[] = {0.5, 1.0, 2.0, 3.0};
    for (int t = 0; t < count(o, 500); ++t) {
        auto rng = trial_rng(o, "surjective-reflection", t);
        const double p = ps[t % 4];
        const auto plan = random_plan(rng, 3, 3, false);
        const auto beta = calibrated_beta(plan, p, std::vector<double>(plan.entries.size(), 1.0));
        const auto T = synthesize({plan, beta, LpNorm{p}, LpNorm{p}}).map;
        const auto rep = check_surjective_reflection(T, 4, static_cast<std::uint64_t>(t));
        ++r.trials;
        if (!rep.passed) r.fail({{"trial", t}, {"plan", to_json(plan)}, {"report", to_json(rep)}});
    }
    const auto control = check_surjective_reflection(fixtures::negated_coefficient_map(), 20, o.seed);
    const bool detected = !control.passed && control.witness_x.has_value();
    if (!detected) r.fail({{"reason", "negated-coefficient control passed"}});
    r.metrics = {{"control_detected", detected}, {"control_worst", control.worst}};
    return r;
}

using SuiteFn = SuiteResult (*)(const SuiteOptions&);

struct SuiteEntry {
    const char* name;
    SuiteFn fn;
};

inline const std::vector<SuiteEntry>& registry() {
    static const std::vector<SuiteEntry> r = {
        {"mu-oracle", mu_oracle},
        {"sandwich-logmaj", sandwich_logmaj},
        {"det-monotone", det_monotone},
        {"product-logmaj", product_logmaj},
        {"power-transfer", power_transfer},
        {"convex-transfer", convex_transfer},
        {"mu-rigidity", mu_rigidity},
        {"projection-rigidity", projection_rigidity},
        {"anticommute", anticommute},
        {"sum-diff", sum_diff},
        {"norm-axioms", norm_axioms},
        {"slm-all-variants", slm_all_variants},
        {"jordan-roundtrip", jordan_roundtrip},
        {"stormer-roundtrip", stormer_roundtrip},
        {"isometry-roundtrip", isometry_roundtrip},
        {"surjective-reflection", surjective_reflection},
    };
    return r;
}

}  // namespace suites

struct SuiteRunConfig {
    SuiteOptions options;
    std::vector<std::string> only;  // empty: all suites
    int jobs = 1;
};

/// Runs the selected suites (up to `jobs` concurrently) and assembles the
/// report in registry order, so the output does not depend on scheduling.
inline json run_suites(const SuiteRunConfig& cfg, const std::function<void(const SuiteResult&)>& progress = {}) {
    std::vector<suites::SuiteEntry> selected;
    for (const auto& e : suites::registry())
        if (cfg.only.empty() || std::find(cfg.only.begin(), cfg.only.end(), e.name) != cfg.only.end()) selected.push_back(e);
    for (const auto& name : cfg.only) {
        const bool known = std::any_of(suites::registry().begin(), suites::registry().end(),
                                       [&](const suites::SuiteEntry& e) { return name == e.name; });
        if (!known) throw Error(Errc::InvalidArgument, "unknown suite '" + name + "'");
    }

    std::vector<SuiteResult> results(selected.size());
    const int jobs = std::max(1, cfg.jobs);
    for (std::size_t start = 0; start < selected.size(); start += static_cast<std::size_t>(jobs)) {
        std::vector<std::future<SuiteResult>> batch;
        const std::size_t end = std::min(selected.size(), start + static_cast<std::size_t>(jobs));
        for (std::size_t i = start; i < end; ++i)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                       [&, i] { return selected[i].fn(cfg.options); }));
        for (std::size_t i = start; i < end; ++i) {
            results[i] = batch[i - start].get();
            if (progress) progress(results[i]);
        }
    }

    json out = json::array();
    bool all = true;
    for (const auto& r : results) {
        out.push_back(to_json(r));
        all = all && r.passed;
    }
    json config = {{"seed", cfg.options.seed},
                   {"trials", cfg.options.trials ? json(*cfg.options.trials) : json(nullptr)},
                   {"only", cfg.only},
                   {"inject_calibration_fault", cfg.options.inject_calibration_fault}};
    const auto& t = tol();
    config["tolerances"] = {{"alg", t.alg}, {"maj", t.maj}, {"norm", t.norm}, {"jordan", t.jordan}, {"iso", t.iso}};
    return {{"version", kVersion}, {"config", config}, {"passed", all}, {"suites", out}};
}

}  // namespace symiso
