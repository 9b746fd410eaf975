#pragma once

#include <cmath>
#include <string>

namespace gexp {

/// A real number that may also be +inf or -inf. Infinities are carried as a
/// separate kind so that no finite value is ever reused as a marker.
class ExtReal {
public:
    enum class Kind { finite, plus_infinity, minus_infinity };

    constexpr ExtReal() = default;
    constexpr explicit ExtReal(double value) : value_(value) {}

    static constexpr ExtReal plus_infinity() { return ExtReal(Kind::plus_infinity); }
    static constexpr ExtReal minus_infinity() { return ExtReal(Kind::minus_infinity); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::finite; }
    constexpr bool is_plus_infinity() const { return kind_ == Kind::plus_infinity; }
    constexpr bool is_minus_infinity() const { return kind_ == Kind::minus_infinity; }

    /// Finite payload. Throws for infinite values.
    double value() const;

    /// IEEE view, for printing and comparisons in reports.
    double as_double() const
    {
        switch (kind_) {
        case Kind::plus_infinity: return HUGE_VAL;
        case Kind::minus_infinity: return -HUGE_VAL;
        default: return value_;
        }
    }

    std::string to_string() const;

    friend bool operator==(const ExtReal& a, const ExtReal& b)
    {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
    }

private:
    constexpr explicit ExtReal(Kind kind) : kind_(kind) {}

    Kind kind_ = Kind::finite;
    double value_ = 0.0;
};

}  // namespace gexp
