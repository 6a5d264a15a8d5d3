#pragma once

#include <compare>
#include <limits>
#include <string>

#include "errors.hpp"

namespace symiso {

/// Real number extended by -inf and +inf as explicit states.
///
/// Arithmetic follows the usual conventions for the cases we need:
/// -inf + finite = -inf, +inf + finite = +inf. Adding -inf to +inf is
/// rejected. Comparisons are total; -inf == -inf.
class ExtReal {
public:
    enum class Kind { NegInf, Finite, PosInf };

    constexpr ExtReal() = default;
    constexpr ExtReal(double v) : value_(v) {}  // NOLINT: implicit from double is intended

    static constexpr ExtReal neg_inf() { return ExtReal(Kind::NegInf); }
    static constexpr ExtReal pos_inf() { return ExtReal(Kind::PosInf); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
    constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }

    double value() const {
        if (!is_finite()) throw Error(Errc::DomainError, "value() of an infinite ExtReal");
        return value_;
    }

    /// IEEE double view, for output only.
    constexpr double to_double() const {
        if (kind_ == Kind::NegInf) return -std::numeric_limits<double>::infinity();
        if (kind_ == Kind::PosInf) return std::numeric_limits<double>::infinity();
        return value_;
    }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if ((a.is_neg_inf() && b.is_pos_inf()) || (a.is_pos_inf() && b.is_neg_inf()))
            throw Error(Errc::DomainError, "-inf + +inf is undefined");
        if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
        if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
        return ExtReal(a.value_ + b.value_);
    }

    friend ExtReal operator-(ExtReal a) {
        if (a.is_neg_inf()) return pos_inf();
        if (a.is_pos_inf()) return neg_inf();
        return ExtReal(-a.value_);
    }

    friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

    friend constexpr bool operator==(ExtReal a, ExtReal b) {
        if (a.kind_ != b.kind_) return false;
        return !a.is_finite() || a.value_ == b.value_;
    }

    friend constexpr std::strong_ordering operator<=>(ExtReal a, ExtReal b) {
        if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
        if (!a.is_finite()) return std::strong_ordering::equal;
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (a.value_ > b.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        if (is_neg_inf()) return "-inf";
        if (is_pos_inf()) return "inf";
        return std::to_string(value_);
    }

private:
    explicit constexpr ExtReal(Kind k) : kind_(k) {}

    Kind kind_ = Kind::Finite;
    double value_ = 0.0;
};

}  // namespace symiso
