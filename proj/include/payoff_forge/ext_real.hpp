#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace payoff_forge {

// Extended real for growth rates and divergences: either a finite value or a
// distinguished +/- infinity. Raw floating-point infinities are rejected at
// construction so an infinite rate can never leak into ordinary arithmetic.
class ExtReal {
public:
    ExtReal(double v) : value_(v), kind_(Kind::finite) {
        if (!std::isfinite(v))
            throw std::invalid_argument("ExtReal: finite constructor requires a finite value");
    }

    static ExtReal plus_infinity() noexcept { return ExtReal(Kind::plus_inf); }
    static ExtReal minus_infinity() noexcept { return ExtReal(Kind::minus_inf); }

    bool is_finite() const noexcept { return kind_ == Kind::finite; }
    bool is_plus_infinity() const noexcept { return kind_ == Kind::plus_inf; }
    bool is_minus_infinity() const noexcept { return kind_ == Kind::minus_inf; }

    double value() const {
        if (!is_finite())
            throw std::logic_error("ExtReal: value() called on an infinite result");
        return value_;
    }

    friend bool operator==(const ExtReal& a, const ExtReal& b) noexcept {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ != Kind::finite || a.value_ == b.value_;
    }
    friend bool operator!=(const ExtReal& a, const ExtReal& b) noexcept { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
        switch (x.kind_) {
        case Kind::plus_inf: return os << "+inf";
        case Kind::minus_inf: return os << "-inf";
        default: return os << x.value_;
        }
    }

private:
    enum class Kind { finite, plus_inf, minus_inf };
    explicit ExtReal(Kind k) noexcept : value_(0.0), kind_(k) {}

    double value_;
    Kind kind_;
};

} // namespace payoff_forge
