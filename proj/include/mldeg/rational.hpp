#pragma once

#include <gmpxx.h>

#include <string>

namespace mldeg {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, unsigned long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// "n" for integers, "n/d" otherwise (always canonical).
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

} // namespace mldeg
