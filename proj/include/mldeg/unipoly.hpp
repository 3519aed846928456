#pragma once

#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mldeg/errors.hpp"
#include "mldeg/poly.hpp"
#include "mldeg/rational.hpp"

namespace mldeg {

/// Dense univariate polynomial, coefficient index = degree. The leading
/// coefficient is nonzero unless the polynomial is zero (empty vector).
class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    static UniPoly monomial(std::size_t degree, const Rational& c) {
        std::vector<Rational> v(degree + 1, Rational(0));
        v[degree] = c;
        return UniPoly(std::move(v));
    }

    const std::vector<Rational>& coefficients() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    Rational operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

    Rational eval(const Rational& t) const {
        Rational acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
        return UniPoly(std::move(v));
    }

    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + b * Rational(-1); }

    friend UniPoly operator*(const UniPoly& a, const Rational& s) {
        std::vector<Rational> v = a.c_;
        for (auto& x : v) x *= s;
        return UniPoly(std::move(v));
    }

    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
        return UniPoly(std::move(v));
    }

    /// p(t) -> p(a*t + b), exact.
    UniPoly compose_affine(const Rational& a, const Rational& b) const {
        const UniPoly lin({b, a});
        UniPoly acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + UniPoly({*it});
        return acc;
    }

    /// Synthetic division by (t - root): returns {quotient, remainder}.
    std::pair<UniPoly, Rational> divide_by_linear(const Rational& root) const {
        if (c_.empty()) return {UniPoly(), Rational(0)};
        std::vector<Rational> q(c_.size() - 1, Rational(0));
        Rational carry(0);
        for (std::size_t k = c_.size(); k-- > 0;) {
            carry = carry * root + c_[k];
            if (k > 0) q[k - 1] = carry;
        }
        return {UniPoly(std::move(q)), carry};
    }

    std::string to_string(const std::string& var = "t") const {
        if (c_.empty()) return "0";
        std::vector<std::string> vars{var};
        Poly p(vars);
        for (std::size_t i = 0; i < c_.size(); ++i) p.add_term(Exponent{static_cast<std::uint32_t>(i)}, c_[i]);
        return p.to_string();
    }

    friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.c_ == b.c_; }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

/// Sparse bivariate polynomial in (p, u): (i, j) -> coefficient of p^i u^j.
class BiPoly {
public:
    using Key = std::pair<std::uint32_t, std::uint32_t>;

    BiPoly() = default;

    void add(std::uint32_t i, std::uint32_t j, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = c_.try_emplace(Key{i, j}, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) c_.erase(it);
        }
    }

    Rational coefficient(std::uint32_t i, std::uint32_t j) const {
        const auto it = c_.find(Key{i, j});
        return it == c_.end() ? Rational(0) : it->second;
    }

    const std::map<Key, Rational>& terms() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }

    /// Total degree if every term has the same total degree, -1 otherwise (or when zero).
    int homogeneous_degree() const {
        if (c_.empty()) return -1;
        const auto d = c_.begin()->first.first + c_.begin()->first.second;
        for (const auto& [k, v] : c_)
            if (k.first + k.second != d) return -1;
        return static_cast<int>(d);
    }

    int u_degree() const {
        int best = -1;
        for (const auto& [k, v] : c_) best = std::max(best, static_cast<int>(k.second));
        return best;
    }

    /// B(1, u) as a polynomial in u.
    UniPoly dehomogenize() const {
        std::vector<Rational> v;
        for (const auto& [k, c] : c_) {
            if (v.size() <= k.second) v.resize(k.second + 1, Rational(0));
            v[k.second] += c;
        }
        return UniPoly(std::move(v));
    }

    /// Homogenizes q(u) to total degree n: sum_j q_j p^(n-j) u^j.
    static BiPoly homogenize(const UniPoly& q, std::uint32_t n) {
        BiPoly out;
        const auto& cs = q.coefficients();
        if (cs.size() > n + 1) throw DomainError("polynomial degree exceeds homogenization degree");
        for (std::uint32_t j = 0; j < cs.size(); ++j) out.add(n - j, j, cs[j]);
        return out;
    }

    /// Human-readable and parseable form over variables (p, u).
    std::string to_string() const {
        Poly poly(std::vector<std::string>{"p", "u"});
        for (const auto& [k, c] : c_) poly.add_term(Exponent{k.first, k.second}, c);
        return poly.to_string();
    }

    /// Reads a polynomial over exactly the variables {p, u}.
    static BiPoly from_poly(const Poly& poly) {
        const auto pi = poly.index_of("p");
        const auto ui = poly.index_of("u");
        BiPoly out;
        for (const auto& [e, c] : poly.terms()) {
            for (std::size_t k = 0; k < e.size(); ++k) {
                if (e[k] != 0 && k != pi && k != ui)
                    throw DomainError("bivariate polynomial may only involve p and u");
            }
            out.add(pi ? e[*pi] : 0, ui ? e[*ui] : 0, c);
        }
        return out;
    }

    friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.c_ == b.c_; }

private:
    std::map<Key, Rational> c_;
};

} // namespace mldeg
