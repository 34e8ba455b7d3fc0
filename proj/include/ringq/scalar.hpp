#pragma once

// Arithmetic backends. Every quantity in the library is generic over a scalar
// type S which is either
//   * Rational (GMP mpq_class): closed under +,-,*,/ with no rounding, used
//     whenever an identity has to hold exactly, or
//   * double: used on performance paths; identity checks then carry explicit
//     tolerances.

#include <gmpxx.h>

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace ringq {

using Rational = mpq_class;

template <typename S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

// Eigen needs NumTraits to build matrices over mpq_class.
}  // namespace ringq

namespace Eigen {
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
    using Real = mpq_class;
    using NonInteger = mpq_class;
    using Nested = mpq_class;
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 0,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100
    };
};
}  // namespace Eigen

namespace ringq {

// num/den as an S; the exact backend keeps it exact.
template <typename S>
S frac(long num, long den = 1) {
    if (den == 0) throw std::domain_error("frac: zero denominator");
    if constexpr (is_exact_v<S>) {
        Rational r(num, den);
        r.canonicalize();
        return r;
    } else {
        return static_cast<S>(num) / static_cast<S>(den);
    }
}

inline double to_double(const Rational& x) { return x.get_d(); }
inline double to_double(double x) { return x; }

template <typename S>
S abs_val(const S& x) {
    return x < S(0) ? S(-x) : x;
}

// Division with an explicit error instead of a backend-dependent trap.
template <typename S>
S checked_div(const S& num, const S& den) {
    if (den == S(0)) throw std::domain_error("checked_div: zero denominator");
    return num / den;
}

// Integer power with the 0^0 = 1 convention; negative exponents divide.
template <typename S>
S pow_int(const S& x, long e) {
    if (e < 0) {
        if (x == S(0)) throw std::domain_error("pow_int: negative power of zero");
        return S(1) / pow_int(x, -e);
    }
    S r(1);
    S b = x;
    for (long k = e; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        b *= b;
    }
    return r;
}

// Parses "p/q", integers, or (float backend only) decimal literals.
template <typename S>
S parse_scalar(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        long num = std::stol(text.substr(0, slash));
        long den = std::stol(text.substr(slash + 1));
        return frac<S>(num, den);
    }
    if constexpr (is_exact_v<S>) {
        if (text.find('.') != std::string::npos || text.find('e') != std::string::npos ||
            text.find('E') != std::string::npos)
            throw std::domain_error("parse_scalar: exact mode needs integer or p/q, got " + text);
        return Rational(text);
    } else {
        return std::stod(text);
    }
}

inline std::string scalar_str(const Rational& x) { return x.get_str(); }
inline std::string scalar_str(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace ringq
