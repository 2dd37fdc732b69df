#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace truncdim {

/// Extended-real exponent p in [1, inf].
///
/// Infinity is a first-class state, not a sentinel double: case dispatch
/// (sum vs. supremum, product vs. max) branches on is_infinite() and never
/// relies on IEEE infinity arithmetic.
class Exponent {
public:
    explicit Exponent(double value) {
        if (std::isnan(value)) {
            throw std::invalid_argument("Exponent: NaN is not a valid exponent");
        }
        if (std::isinf(value)) {
            if (value < 0) {
                throw std::invalid_argument("Exponent: exponent must lie in [1, inf]");
            }
            infinite_ = true;
            value_ = 0.0;
            return;
        }
        if (value < 1.0) {
            throw std::invalid_argument("Exponent: exponent must lie in [1, inf], got " +
                                        std::to_string(value));
        }
        infinite_ = false;
        value_ = value;
    }

    static Exponent infinity() noexcept {
        Exponent p;
        p.infinite_ = true;
        p.value_ = 0.0;
        return p;
    }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_one() const noexcept { return !infinite_ && value_ == 1.0; }

    /// Finite value, or IEEE +inf for the infinite state.
    double value() const noexcept {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    /// 1/p, with 1/inf = 0.
    double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / value_; }

    friend bool operator==(const Exponent& a, const Exponent& b) noexcept {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend bool operator!=(const Exponent& a, const Exponent& b) noexcept { return !(a == b); }
    friend bool operator<=(const Exponent& a, const Exponent& b) noexcept {
        if (a.infinite_) return b.infinite_;
        if (b.infinite_) return true;
        return a.value_ <= b.value_;
    }
    friend bool operator<(const Exponent& a, const Exponent& b) noexcept {
        return a <= b && a != b;
    }

    friend std::ostream& operator<<(std::ostream& os, const Exponent& p) {
        if (p.infinite_) return os << "inf";
        return os << p.value_;
    }

private:
    Exponent() : value_(0.0), infinite_(false) {}

    double value_;
    bool infinite_;
};

/// Conjugate exponent p* with 1/p + 1/p* = 1; conjugate(1) = inf exactly and
/// conjugate(inf) = 1 exactly.
inline Exponent conjugate(const Exponent& p) {
    if (p.is_infinite()) return Exponent(1.0);
    if (p.value() == 1.0) return Exponent::infinity();
    const double v = p.value();
    return Exponent(v / (v - 1.0));
}

}  // namespace truncdim
