#pragma once

#include <stdexcept>
#include <string>

namespace truncdim {

/// Base class for all library errors so CLI-level code can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An infinite weight sum was requested whose tail does not converge
/// (for the polynomial rule gamma_j = j^-alpha this means alpha*t <= 1).
class DivergentTail : public Error {
public:
    using Error::Error;
};

/// A truncation index k exceeds the number of variables s.
class InvalidIndex : public Error {
public:
    using Error::Error;
};

/// A subset enumeration was requested beyond the supported dimension cap.
class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

/// A product-weight closed form needs a nonincreasing gamma sequence and the
/// supplied one is not (and is too large to fall back to enumeration).
class NonMonotoneWeights : public Error {
public:
    using Error::Error;
};

/// The dimension search cannot reach the requested error demand.
class Unreachable : public Error {
public:
    using Error::Error;
};

/// Kernel, density and problem selections do not fit together.
class IncompatibleSpec : public Error {
public:
    using Error::Error;
};

/// A kernel norm integral fails the finiteness test.
class DivergentIntegral : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature exhausted its subdivision budget before reaching the
/// requested tolerance.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// An infinite-dimensional embedding product with a non-summable weight
/// sequence.
class DivergentProduct : public Error {
public:
    using Error::Error;
};

}  // namespace truncdim
