#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mldeg/errors.hpp"
#include "mldeg/random_source.hpp"
#include "mldeg/rational.hpp"

namespace mldeg {

using Exponent = std::vector<std::uint32_t>;
using Complex = std::complex<double>;

inline std::uint32_t total_degree(const Exponent& e) {
    return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
}

/// Graded lexicographic order with x1 > x2 > ... ; ascending, so the largest
/// monomial is the last element of a map ordered by it.
struct GradedLexOrder {
    bool operator()(const Exponent& a, const Exponent& b) const {
        const auto da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

/// Value of a floating evaluation together with sum_t |c_t| |z^a_t|, the
/// natural scale for backward-error style comparisons.
struct Evaluation {
    Complex value;
    double magnitude = 0.0;
};

/// Sparse multivariate polynomial with exact rational coefficients over an
/// ordered list of named variables. Zero coefficients are never stored.
class Poly {
public:
    using TermMap = std::map<Exponent, Rational, GradedLexOrder>;

    Poly() = default;
    explicit Poly(std::vector<std::string> variables) : vars_(std::move(variables)) {}

    static Poly constant(std::vector<std::string> variables, const Rational& c) {
        Poly p(std::move(variables));
        p.add_term(Exponent(p.vars_.size(), 0), c);
        return p;
    }

    static Poly variable(std::vector<std::string> variables, std::size_t index) {
        if (index >= variables.size()) throw DomainError("variable index out of range");
        Poly p(std::move(variables));
        Exponent e(p.vars_.size(), 0);
        e[index] = 1;
        p.add_term(std::move(e), Rational(1));
        return p;
    }

    static Poly variable(std::vector<std::string> variables, std::string_view name) {
        const auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end()) throw DomainError("unknown variable '" + std::string(name) + "'");
        const auto index = static_cast<std::size_t>(it - variables.begin());
        return variable(std::move(variables), index);
    }

    const std::vector<std::string>& variables() const noexcept { return vars_; }
    std::size_t num_variables() const noexcept { return vars_.size(); }
    const TermMap& terms() const noexcept { return terms_; }
    std::size_t num_terms() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        const auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - vars_.begin());
    }

    /// Total degree; -1 for the zero polynomial.
    int total_degree() const {
        if (terms_.empty()) return -1;
        return static_cast<int>(mldeg::total_degree(terms_.rbegin()->first));
    }

    /// Largest sum of exponents over the given variable indices.
    std::uint32_t degree_in(std::span<const std::size_t> indices) const {
        std::uint32_t best = 0;
        for (const auto& [e, c] : terms_) {
            std::uint32_t d = 0;
            for (auto i : indices) d += e[i];
            best = std::max(best, d);
        }
        return best;
    }

    Rational coefficient(const Exponent& e) const {
        const auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(Exponent e, const Rational& c) {
        if (e.size() != vars_.size()) throw DomainError("exponent length does not match variable count");
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        require_same_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        require_same_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    Poly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
    friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
    friend Poly operator-(Poly a) { return a *= Rational(-1); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.require_same_ring(b);
        Poly out(a.vars_);
        Exponent e(a.vars_.size());
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }

    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly pow(std::uint32_t k) const {
        Poly result = constant(vars_, Rational(1));
        Poly base = *this;
        while (k > 0) {
            if (k & 1U) result *= base;
            k >>= 1U;
            if (k > 0) base = base * base;
        }
        return result;
    }

    Poly differentiate(std::size_t index) const {
        if (index >= vars_.size()) throw DomainError("variable index out of range");
        Poly out(vars_);
        for (const auto& [e, c] : terms_) {
            if (e[index] == 0) continue;
            Exponent d = e;
            d[index] -= 1;
            out.add_term(std::move(d), c * e[index]);
        }
        return out;
    }

    Poly differentiate(std::string_view name) const {
        const auto idx = index_of(name);
        if (!idx) throw DomainError("unknown variable '" + std::string(name) + "'");
        return differentiate(*idx);
    }

    /// Re-express over a larger (or reordered) variable list. Every current
    /// variable that occurs in a term must appear in `target`.
    Poly with_variables(const std::vector<std::string>& target) const {
        std::vector<std::optional<std::size_t>> map(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            const auto it = std::find(target.begin(), target.end(), vars_[i]);
            if (it != target.end()) map[i] = static_cast<std::size_t>(it - target.begin());
        }
        Poly out(target);
        for (const auto& [e, c] : terms_) {
            Exponent ne(target.size(), 0);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (!map[i]) throw DomainError("variable '" + vars_[i] + "' missing from target ring");
                ne[*map[i]] = e[i];
            }
            out.add_term(std::move(ne), c);
        }
        return out;
    }

    /// Exact evaluation at a rational point.
    Rational eval_exact(std::span<const Rational> point) const {
        require_point_size(point.size());
        Rational sum(0);
        for (const auto& [e, c] : terms_) {
            Rational m = c;
            for (std::size_t i = 0; i < e.size(); ++i) {
                for (std::uint32_t k = 0; k < e[i]; ++k) m *= point[i];
            }
            sum += m;
        }
        return sum;
    }

    /// Floating evaluation with Neumaier-compensated summation of the terms.
    ///
    /// Each monomial costs at most deg-1 complex products, each with relative
    /// error at most sqrt(5)u, and the coefficient is rounded once, so with
    /// compensated summation
    ///   |computed - exact| <= (3 deg + 3) u * magnitude + O(u^2),
    /// where u = 2^-53 and magnitude = sum_t |c_t| |z^a_t|.
    Evaluation eval_complex_detailed(std::span<const Complex> point) const {
        require_point_size(point.size());
        double re = 0, re_comp = 0, im = 0, im_comp = 0, mag = 0;
        auto accumulate = [](double& sum, double& comp, double x) {
            const double t = sum + x;
            if (std::abs(sum) >= std::abs(x))
                comp += (sum - t) + x;
            else
                comp += (x - t) + sum;
            sum = t;
        };
        for (const auto& [e, c] : terms_) {
            Complex m(c.get_d(), 0.0);
            for (std::size_t i = 0; i < e.size(); ++i) {
                for (std::uint32_t k = 0; k < e[i]; ++k) m *= point[i];
            }
            accumulate(re, re_comp, m.real());
            accumulate(im, im_comp, m.imag());
            mag += std::abs(m);
        }
        return {Complex(re + re_comp, im + im_comp), mag};
    }

    Complex eval_complex(std::span<const Complex> point) const { return eval_complex_detailed(point).value; }

    /// Canonical text: terms in descending graded-lex order, parseable by parse_poly.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            const bool constant_term = mldeg::total_degree(e) == 0;
            Rational mag = abs(c);
            if (first) {
                if (c < 0) {
                    // A bare leading '-' is not part of the grammar; fold the sign into the literal.
                    os << '-' << mldeg::to_string(mag);
                    if (!constant_term) os << '*';
                } else if (mag != 1 || constant_term) {
                    os << mldeg::to_string(mag);
                    if (!constant_term) os << '*';
                }
            } else {
                os << (c < 0 ? " - " : " + ");
                if (mag != 1 || constant_term) {
                    os << mldeg::to_string(mag);
                    if (!constant_term) os << '*';
                }
            }
            bool first_factor = true;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (!first_factor) os << '*';
                os << vars_[i];
                if (e[i] > 1) os << '^' << e[i];
                first_factor = false;
            }
            first = false;
        }
        return os.str();
    }

    friend bool operator==(const Poly& a, const Poly& b) { return a.vars_ == b.vars_ && a.terms_ == b.terms_; }

private:
    void require_same_ring(const Poly& o) const {
        if (vars_ != o.vars_) throw DomainError("polynomials live in different rings");
    }

    void require_point_size(std::size_t n) const {
        if (n != vars_.size())
            throw DomainError("point has " + std::to_string(n) + " coordinates, expected " +
                              std::to_string(vars_.size()));
    }

    std::vector<std::string> vars_;
    TermMap terms_;
};

inline Poly differentiate(const Poly& p, std::string_view variable) { return p.differentiate(variable); }

/// Relative residual |p(z)| / max(sum_t |c_t z^a_t|, tiny); 0 for the zero polynomial.
inline double relative_residual(const Poly& p, std::span<const Complex> point) {
    if (p.is_zero()) return 0.0;
    const auto ev = p.eval_complex_detailed(point);
    return std::abs(ev.value) / std::max(ev.magnitude, 1e-300);
}

/// k random affine forms c0 + sum_i ci xi with exact rational coefficients
/// drawn from `rng` (see RandomSource::rational for the ranges).
inline std::vector<Poly> random_affine_forms(const std::vector<std::string>& variables, std::size_t count,
                                             RandomSource& rng) {
    std::vector<Poly> forms;
    forms.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Poly f(variables);
        f.add_term(Exponent(variables.size(), 0), rng.rational());
        for (std::size_t i = 0; i < variables.size(); ++i) {
            Exponent e(variables.size(), 0);
            e[i] = 1;
            f.add_term(std::move(e), rng.rational());
        }
        forms.push_back(std::move(f));
    }
    return forms;
}

} // namespace mldeg
