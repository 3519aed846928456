#pragma once

#include <cstdint>
#include <string>

#include "mldeg/errors.hpp"
#include "mldeg/unipoly.hpp"

namespace mldeg {

namespace detail {

inline UniPoly exact_quotient(const UniPoly& numerator, const Rational& root) {
    auto [q, r] = numerator.divide_by_linear(root);
    if (r != 0) throw InternalError("division by (t - " + to_string(root) + ") left remainder " + to_string(r));
    return q;
}

/// B and S polynomials are homogeneous of degree n with u-degree at most d.
inline void require_valid_bipoly(const BiPoly& f, std::uint32_t n, std::uint32_t d, const char* which) {
    if (d > n) throw DomainError(std::string(which) + ": dimension d exceeds ambient n");
    if (f.is_zero()) return;
    if (f.homogeneous_degree() != static_cast<int>(n))
        throw DomainError(std::string(which) + "-polynomial is not homogeneous of degree " + std::to_string(n));
    if (f.u_degree() > static_cast<int>(d))
        throw DomainError(std::string(which) + "-polynomial has u-degree above d = " + std::to_string(d));
}

inline Rational sign_of_dimension(std::uint32_t d) { return Rational(d % 2 == 0 ? 1 : -1); }

} // namespace detail

/// Aluffi's involution I(p) = (t p(-t-1) + p(0)) / (t + 1).
/// The numerator always vanishes at t = -1; a nonzero remainder is an InternalError.
inline UniPoly aluffi_involution(const UniPoly& p) {
    const UniPoly shifted = p.compose_affine(Rational(-1), Rational(-1));
    const UniPoly numerator = UniPoly::monomial(1, Rational(1)) * shifted + UniPoly({p[0]});
    return detail::exact_quotient(numerator, Rational(-1));
}

/// S(p,u) = (u B(p, u+p) + p B(p, 0)) / (u + p), computed on B(1, u).
inline BiPoly s_from_b(const BiPoly& b, std::uint32_t n, std::uint32_t d) {
    detail::require_valid_bipoly(b, n, d, "B");
    const UniPoly q = b.dehomogenize();
    const UniPoly numerator = UniPoly::monomial(1, Rational(1)) * q.compose_affine(Rational(1), Rational(1)) +
                              UniPoly({q[0]});
    return BiPoly::homogenize(detail::exact_quotient(numerator, Rational(-1)), n);
}

/// B(p,u) = (u S(p, u-p) - p S(p, 0)) / (u - p), computed on S(1, u).
inline BiPoly b_from_s(const BiPoly& s, std::uint32_t n, std::uint32_t d) {
    detail::require_valid_bipoly(s, n, d, "S");
    const UniPoly q = s.dehomogenize();
    const UniPoly numerator = UniPoly::monomial(1, Rational(1)) * q.compose_affine(Rational(1), Rational(-1)) -
                              UniPoly({q[0]});
    return BiPoly::homogenize(detail::exact_quotient(numerator, Rational(1)), n);
}

/// Second route to S through Aluffi's involution:
///   gamma(t) = (-1)^d B(1, -t),  chi = I(gamma),  S(1, u) = (-1)^d chi(u).
inline BiPoly s_from_b_via_aluffi(const BiPoly& b, std::uint32_t n, std::uint32_t d) {
    detail::require_valid_bipoly(b, n, d, "B");
    const Rational sign = detail::sign_of_dimension(d);
    const UniPoly gamma = b.dehomogenize().compose_affine(Rational(-1), Rational(0)) * sign;
    return BiPoly::homogenize(aluffi_involution(gamma) * sign, n);
}

/// Inverse direction of s_from_b_via_aluffi (I is an involution).
inline BiPoly b_from_s_via_aluffi(const BiPoly& s, std::uint32_t n, std::uint32_t d) {
    detail::require_valid_bipoly(s, n, d, "S");
    const Rational sign = detail::sign_of_dimension(d);
    const UniPoly chi = s.dehomogenize() * sign;
    const UniPoly gamma = aluffi_involution(chi);
    return BiPoly::homogenize(gamma.compose_affine(Rational(-1), Rational(0)) * sign, n);
}

struct InvolutionReport {
    BiPoly b;
    BiPoly s;
    BiPoly s_from_b;
    BiPoly b_from_s;
    bool s_matches = false;
    bool b_matches = false;
    bool s_transform_ok = false; ///< B was a valid input and the division was exact
    bool b_transform_ok = false;
    bool leading_agree = false;  ///< b0 == s0
    bool degrees_ok = false;     ///< both have u-degree <= d
    std::string message;

    bool passed() const {
        return s_matches && b_matches && s_transform_ok && b_transform_ok && leading_agree && degrees_ok;
    }
};

/// Runs both transforms and compares exactly. Never throws for bad input;
/// problems land in the report.
inline InvolutionReport cross_check(const BiPoly& b, const BiPoly& s, std::uint32_t n, std::uint32_t d) {
    InvolutionReport r;
    r.b = b;
    r.s = s;
    try {
        r.s_from_b = s_from_b(b, n, d);
        r.s_transform_ok = true;
    } catch (const Error& e) {
        r.message += std::string(e.what()) + "; ";
    }
    try {
        r.b_from_s = b_from_s(s, n, d);
        r.b_transform_ok = true;
    } catch (const Error& e) {
        r.message += std::string(e.what()) + "; ";
    }
    r.s_matches = r.s_transform_ok && r.s_from_b == s;
    r.b_matches = r.b_transform_ok && r.b_from_s == b;
    r.leading_agree = b.coefficient(n, 0) == s.coefficient(n, 0);
    r.degrees_ok = b.u_degree() <= static_cast<int>(d) && s.u_degree() <= static_cast<int>(d);
    if (!r.s_matches && r.s_transform_ok) r.message += "S computed from B differs from S; ";
    if (!r.b_matches && r.b_transform_ok) r.message += "B computed from S differs from B; ";
    if (!r.leading_agree) r.message += "b0 != s0; ";
    if (!r.degrees_ok) r.message += "u-degree exceeds d; ";
    return r;
}

} // namespace mldeg
