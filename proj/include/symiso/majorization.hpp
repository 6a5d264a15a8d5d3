#pragma once

#include <cmath>
#include <vector>

#include "algebra.hpp"
#include "ext_real.hpp"
#include "rearrangement.hpp"

namespace symiso {

struct MajorizationVerdict {
    bool holds = true;
    double worst_t = 0.0;
    /// min over checked t of RHS - LHS; may be infinite for log comparisons.
    ExtReal slack = ExtReal::pos_inf();
    std::vector<double> checked_points;
};

struct MajorizationOptions {
    bool pad = true;
    double tol = symiso::tol().maj;
};

namespace detail {

inline std::pair<StepFunction, StepFunction> align_lengths(const StepFunction& b, const StepFunction& a, bool pad) {
    const double lb = b.length();
    const double la = a.length();
    if (!pad && std::abs(lb - la) > 1e-12 * std::max(1.0, std::max(la, lb)))
        throw Error(Errc::ShapeMismatch, "functions have different lengths and padding is disabled");
    const double len = std::max(la, lb);
    return {pad_to(b, len), pad_to(a, len)};
}

inline void require_majorization_inputs(const StepFunction& f, const char* which) {
    if (!f.is_nonnegative()) throw Error(Errc::NegativeValue, std::string(which) + " has negative values");
}

}  // namespace detail

/// b << a: int_0^t b <= int_0^t a for every t. Both prefixes are piecewise
/// linear, so checking the union of breakpoints is exact.
inline MajorizationVerdict submajorizes(const StepFunction& b, const StepFunction& a, MajorizationOptions opt = {}) {
    detail::require_majorization_inputs(b, "b");
    detail::require_majorization_inputs(a, "a");
    const auto [bp, ap] = detail::align_lengths(b, a, opt.pad);
    MajorizationVerdict v;
    v.checked_points = union_breakpoints(bp, ap);
    for (double t : v.checked_points) {
        const double lhs = prefix_integral(bp, t);
        const double rhs = prefix_integral(ap, t);
        const double slack = rhs - lhs;
        if (ExtReal(slack) < v.slack) {
            v.slack = slack;
            v.worst_t = t;
        }
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (lhs > rhs + opt.tol * scale) v.holds = false;
    }
    return v;
}

/// b <<_log a: int_0^t log b <= int_0^t log a for every t, with -inf <= anything
/// and finite <= -inf false.
inline MajorizationVerdict log_submajorizes(const StepFunction& b, const StepFunction& a,
                                            MajorizationOptions opt = {}) {
    detail::require_majorization_inputs(b, "b");
    detail::require_majorization_inputs(a, "a");
    const auto [bp, ap] = detail::align_lengths(b, a, opt.pad);
    MajorizationVerdict v;
    v.checked_points = union_breakpoints(bp, ap);
    for (double t : v.checked_points) {
        const ExtReal lhs = log_prefix_integral(bp, t);
        const ExtReal rhs = log_prefix_integral(ap, t);
        ExtReal slack;
        if (lhs.is_neg_inf()) slack = ExtReal::pos_inf();
        else if (rhs.is_neg_inf()) slack = ExtReal::neg_inf();
        else slack = rhs.value() - lhs.value();
        if (slack < v.slack) {
            v.slack = slack;
            v.worst_t = t;
        }
        if (slack < ExtReal(-opt.tol)) v.holds = false;
    }
    return v;
}

/// Fuglede-Kadison determinant exp(int_0^{tau(1)} log mu(t; x) dt).
inline double fk_determinant(const Operator& x) {
    const auto m = mu(x);
    const auto l = log_prefix_integral(m, m.length());
    return l.is_neg_inf() ? 0.0 : std::exp(l.value());
}

struct DisjointnessDiagnostic {
    bool mu_equal = false;
    bool product_zero = false;
    /// mu(x - y) = mu(x + y) but xy != 0: contradicts sum-difference rigidity.
    bool violation = false;
    double product_norm = 0.0;
};

/// For 0 <= x, y: reports whether mu(x - y) = mu(x + y) and whether xy = 0.
inline DisjointnessDiagnostic disjointness_from_mu_equality(const Operator& x, const Operator& y) {
    if (!is_psd(x)) throw Error(Errc::NotPSD, "disjointness_from_mu_equality: x is not PSD");
    if (!is_psd(y)) throw Error(Errc::NotPSD, "disjointness_from_mu_equality: y is not PSD");
    DisjointnessDiagnostic d;
    d.mu_equal = approx_equal(mu(x - y), mu(x + y), tol().maj);
    d.product_norm = (x * y).norm_inf();
    d.product_zero = d.product_norm <= tol().alg * (1.0 + x.norm_inf() * y.norm_inf());
    d.violation = d.mu_equal && !d.product_zero;
    return d;
}

}  // namespace symiso
