#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "errors.hpp"
#include "ext_real.hpp"

namespace symiso {

struct Piece {
    double value = 0.0;
    double width = 0.0;

    friend bool operator==(const Piece&, const Piece&) = default;
};

/// Right-continuous step function on (0, L): piece i is constant on
/// [start_i, start_i + width_i). Stored in canonical form: adjacent pieces
/// whose values agree up to `merge_tol * max(1, |v|)` are fused into one
/// piece carrying their width-weighted mean.
class StepFunction {
public:
    StepFunction() = default;

    explicit StepFunction(std::vector<Piece> pieces, double merge_tol = tol().alg) {
        for (const auto& p : pieces) {
            if (!(p.width > 0.0) || !std::isfinite(p.width))
                throw Error(Errc::InvalidArgument, "step function widths must be finite and > 0");
            if (!std::isfinite(p.value)) throw Error(Errc::InvalidArgument, "step function values must be finite");
            if (!pieces_.empty()) {
                auto& last = pieces_.back();
                const double scale = std::max({1.0, std::abs(last.value), std::abs(p.value)});
                if (std::abs(last.value - p.value) <= merge_tol * scale) {
                    const double w = last.width + p.width;
                    last.value = last.value == p.value ? p.value : (last.value * last.width + p.value * p.width) / w;
                    last.width = w;
                    continue;
                }
            }
            pieces_.push_back(p);
        }
    }

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }

    double length() const {
        double l = 0.0;
        for (const auto& p : pieces_) l += p.width;
        return l;
    }

    bool is_decreasing() const {
        for (std::size_t i = 1; i < pieces_.size(); ++i)
            if (pieces_[i].value > pieces_[i - 1].value) return false;
        return true;
    }

    bool is_nonnegative() const {
        return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.value >= 0.0; });
    }

    /// Right end-points of the pieces (cumulative widths).
    std::vector<double> breakpoints() const {
        std::vector<double> b;
        double t = 0.0;
        for (const auto& p : pieces_) b.push_back(t += p.width);
        return b;
    }

    /// f(t) for 0 <= t < L.
    double at(double t) const {
        if (t < 0.0) throw Error(Errc::OutOfDomain, "at: t < 0");
        double start = 0.0;
        for (const auto& p : pieces_) {
            if (t < start + p.width) return p.value;
            start += p.width;
        }
        throw Error(Errc::OutOfDomain, "at: t >= L");
    }

    friend bool operator==(const StepFunction&, const StepFunction&) = default;

private:
    std::vector<Piece> pieces_;
};

namespace detail {

/// Accepts t up to L plus rounding slack.
inline double clamp_to_length(const StepFunction& f, double t, const char* who) {
    const double len = f.length();
    if (t < 0.0) throw Error(Errc::OutOfDomain, std::string(who) + ": t < 0");
    if (t > len * (1.0 + 1e-12) + 1e-300) throw Error(Errc::OutOfDomain, std::string(who) + ": t > L");
    return std::min(t, len);
}

}  // namespace detail

inline double prefix_integral(const StepFunction& f, double t) {
    t = detail::clamp_to_length(f, t, "prefix_integral");
    double acc = 0.0;
    double start = 0.0;
    for (const auto& p : f.pieces()) {
        if (start >= t) break;
        acc += p.value * (std::min(start + p.width, t) - start);
        start += p.width;
    }
    return acc;
}

/// int_0^t log f, or -inf when a zero piece meets (0, t) in positive measure.
inline ExtReal log_prefix_integral(const StepFunction& f, double t) {
    t = detail::clamp_to_length(f, t, "log_prefix_integral");
    if (!f.is_nonnegative()) throw Error(Errc::NegativeValue, "log_prefix_integral of a function with negative values");
    double acc = 0.0;
    double start = 0.0;
    for (const auto& p : f.pieces()) {
        if (start >= t) break;
        const double covered = std::min(start + p.width, t) - start;
        if (covered > 0.0) {
            if (p.value == 0.0) {
                // A sliver within breakpoint rounding of the support end does not count.
                if (covered <= 1e-12 * std::max(1.0, t)) break;
                return ExtReal::neg_inf();
            }
            acc += std::log(p.value) * covered;
        }
        start += p.width;
    }
    return acc;
}

/// Decreasing rearrangement of a nonnegative step function.
inline StepFunction rearrange(const StepFunction& f) {
    if (!f.is_nonnegative()) throw Error(Errc::NegativeValue, "rearrange of a function with negative values");
    auto pieces = f.pieces();
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.value > b.value; });
    return StepFunction(std::move(pieces));
}

/// Extends f by a zero piece up to length `len` (no-op if already long enough).
inline StepFunction pad_to(const StepFunction& f, double len) {
    auto pieces = f.pieces();
    const double l = f.length();
    if (len > l * (1.0 + 1e-12) + 1e-300) pieces.push_back({0.0, len - l});
    return StepFunction(std::move(pieces));
}

/// Restriction of f to (0, t).
inline StepFunction truncate(const StepFunction& f, double t) {
    t = detail::clamp_to_length(f, t, "truncate");
    std::vector<Piece> out;
    double start = 0.0;
    for (const auto& p : f.pieces()) {
        if (start >= t) break;
        const double w = std::min(start + p.width, t) - start;
        if (w > 0.0) out.push_back({p.value, w});
        start += p.width;
    }
    return StepFunction(std::move(out));
}

/// Union of breakpoints of f and g, sorted, near-duplicates removed.
inline std::vector<double> union_breakpoints(const StepFunction& f, const StepFunction& g) {
    auto a = f.breakpoints();
    const auto b = g.breakpoints();
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    std::vector<double> out;
    for (double t : a) {
        if (!out.empty() && t - out.back() <= 1e-12 * std::max(1.0, t)) {
            out.back() = std::max(out.back(), t);
            continue;
        }
        out.push_back(t);
    }
    return out;
}

/// Pointwise combination h(t) = op(f(t), g(t)) over the common refinement of
/// the partitions on (0, min(L_f, L_g)).
template <class Op>
StepFunction combine(const StepFunction& f, const StepFunction& g, Op&& op) {
    std::vector<Piece> out;
    const auto& fp = f.pieces();
    const auto& gp = g.pieces();
    std::size_t i = 0, j = 0;
    double fr = fp.empty() ? 0.0 : fp[0].width;  // remaining width in current piece
    double gr = gp.empty() ? 0.0 : gp[0].width;
    while (i < fp.size() && j < gp.size()) {
        const double w = std::min(fr, gr);
        if (w > 0.0) out.push_back({op(fp[i].value, gp[j].value), w});
        fr -= w;
        gr -= w;
        // Sub-femto slivers left over from rounding are absorbed by the next piece.
        if (fr <= 1e-14 * std::max(1.0, fp[i].width)) {
            if (++i < fp.size()) fr += fp[i].width;
        }
        if (gr <= 1e-14 * std::max(1.0, gp[j].width)) {
            if (++j < gp.size()) gr += gp[j].width;
        }
    }
    return StepFunction(std::move(out));
}

inline StepFunction product(const StepFunction& f, const StepFunction& g) {
    return combine(f, g, [](double a, double b) { return a * b; });
}

template <class F>
StepFunction map_values(const StepFunction& f, F&& fn) {
    std::vector<Piece> out;
    for (const auto& p : f.pieces()) out.push_back({fn(p.value), p.width});
    return StepFunction(std::move(out));
}

inline StepFunction power(const StepFunction& f, double p) {
    return map_values(f, [p](double v) { return std::pow(v, p); });
}

/// sup |f - g| / max(1, sup|f|, sup|g|) <= rel_tol on the common domain, with
/// the shorter function zero-padded.
inline bool approx_equal(const StepFunction& f, const StepFunction& g, double rel_tol) {
    const double len = std::max(f.length(), g.length());
    const auto fp = pad_to(f, len);
    const auto gp = pad_to(g, len);
    double scale = 1.0;
    for (const auto& p : fp.pieces()) scale = std::max(scale, std::abs(p.value));
    for (const auto& p : gp.pieces()) scale = std::max(scale, std::abs(p.value));
    const auto diff = combine(fp, gp, [](double a, double b) { return std::abs(a - b); });
    const double sliver = 1e-12 * std::max(1.0, len);
    for (const auto& p : diff.pieces())
        if (p.width > sliver && p.value > rel_tol * scale) return false;
    return true;
}

/// Generalised singular value function t -> mu(t; x) on (0, tau(1)).
///
/// Every singular value s of block k contributes a piece (s, c_k). Singular
/// values at or below the rank threshold are taken to be exactly zero.
inline StepFunction mu(const Operator& x) {
    const auto& alg = x.algebra();
    const auto svals = singular_values(x);
    double smax = 0.0;
    for (const auto& s : svals)
        if (s.size() > 0) smax = std::max(smax, s(0));
    const double cut = tol().alg * std::max(1.0, smax);
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k < svals.size(); ++k)
        for (Eigen::Index i = 0; i < svals[k].size(); ++i) {
            const double s = svals[k](i);
            pieces.push_back({s > cut ? s : 0.0, alg.weight(k)});
        }
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.value > b.value; });
    return pad_to(StepFunction(std::move(pieces)), alg.total_trace());
}

/// d_x(s) = tau(e^x(s, inf)) as a step function of s on (0, max(lambda_max, 0)).
/// Beyond the last breakpoint d vanishes. Requires hermitian x.
inline StepFunction distribution(const Operator& x) {
    const auto sd = spectral_decompose(x);
    std::vector<std::pair<double, double>> eig;  // (eigenvalue, weight)
    for (std::size_t k = 0; k < sd.blocks.size(); ++k)
        for (Eigen::Index i = 0; i < sd.blocks[k].eigenvalues.size(); ++i) {
            const double l = sd.blocks[k].eigenvalues(i);
            if (l > 0.0) eig.emplace_back(l, x.algebra().weight(k));
        }
    std::sort(eig.begin(), eig.end());
    // On [lambda_(i-1), lambda_i) the count of eigenvalues > s is the weight of eig[i..].
    std::vector<Piece> pieces;
    double prev = 0.0;
    double mass = 0.0;
    for (const auto& e : eig) mass += e.second;
    for (const auto& e : eig) {
        if (e.first > prev) pieces.push_back({mass, e.first - prev});
        prev = std::max(prev, e.first);
        mass -= e.second;
    }
    return StepFunction(std::move(pieces), 0.0);
}

/// d_x(s) at any s >= 0.
inline double distribution_at(const StepFunction& d, double s) {
    if (s < 0.0) throw Error(Errc::OutOfDomain, "distribution_at: s < 0");
    if (s >= d.length()) return 0.0;
    return d.at(s);
}

}  // namespace symiso
