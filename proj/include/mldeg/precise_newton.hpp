#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mldeg/compiled_system.hpp"
#include "mldeg/errors.hpp"
#include "mldeg/poly.hpp"

namespace mldeg {

/// Complex number over GMP floats.
struct BigComplex {
    mpf_class re, im;

    BigComplex(mp_bitcnt_t bits = 256) : re(0, bits), im(0, bits) {}
    BigComplex(const mpf_class& r, const mpf_class& i) : re(r), im(i) {}

    BigComplex& operator+=(const BigComplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    BigComplex& operator-=(const BigComplex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        const auto p = a.re.get_prec();
        return {mpf_class(a.re * b.re - a.im * b.im, p), mpf_class(a.re * b.im + a.im * b.re, p)};
    }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
        const auto p = a.re.get_prec();
        return {mpf_class(a.re - b.re, p), mpf_class(a.im - b.im, p)};
    }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
        const auto p = a.re.get_prec();
        const mpf_class den(b.re * b.re + b.im * b.im, p);
        return {mpf_class((a.re * b.re + a.im * b.im) / den, p), mpf_class((a.im * b.re - a.re * b.im) / den, p)};
    }

    /// |re| + |im|, used for pivoting.
    mpf_class l1() const { return mpf_class(abs(re) + abs(im), re.get_prec()); }
    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    Complex to_complex() const { return {re.get_d(), im.get_d()}; }
    double abs_d() const { return std::abs(to_complex()); }
};

/// Exact-coefficient polynomial system evaluated in GMP floating point of a
/// fixed precision. Evaluation is const and allocation-local, so one instance
/// can be shared between threads.
class PreciseSystem {
public:
    explicit PreciseSystem(const std::vector<Poly>& polys, mp_bitcnt_t bits = 256) : bits_(bits) {
        nvars_ = polys.empty() ? 0 : polys.front().num_variables();
        for (const auto& p : polys) {
            if (p.num_variables() != nvars_) throw DomainError("polynomials in a system must share variables");
            std::vector<Term> terms;
            for (const auto& [e, c] : p.terms()) {
                Term t{mpf_class(c, bits_), {}, {}};
                for (std::size_t v = 0; v < nvars_; ++v) {
                    if (e[v] == 0) continue;
                    t.vars.push_back(v);
                    t.exps.push_back(e[v]);
                    top_ = std::max(top_, e[v]);
                }
                terms.push_back(std::move(t));
            }
            polys_.push_back(std::move(terms));
        }
    }

    std::size_t num_variables() const noexcept { return nvars_; }
    std::size_t num_polys() const noexcept { return polys_.size(); }
    mp_bitcnt_t precision() const noexcept { return bits_; }

    void evaluate(const std::vector<BigComplex>& x, std::vector<BigComplex>& f,
                  std::vector<std::vector<BigComplex>>& jac) const {
        // powers[v][k] = x_v^k
        std::vector<std::vector<BigComplex>> powers(nvars_);
        for (std::size_t v = 0; v < nvars_; ++v) {
            powers[v].reserve(top_ + 1);
            powers[v].emplace_back(mpf_class(1, bits_), mpf_class(0, bits_));
            for (std::uint32_t k = 1; k <= top_; ++k) powers[v].push_back(powers[v].back() * x[v]);
        }
        f.assign(polys_.size(), BigComplex(bits_));
        jac.assign(polys_.size(), std::vector<BigComplex>(nvars_, BigComplex(bits_)));
        for (std::size_t j = 0; j < polys_.size(); ++j) {
            for (const auto& t : polys_[j]) {
                const std::size_t k = t.vars.size();
                BigComplex mono(t.coeff, mpf_class(0, bits_));
                for (std::size_t a = 0; a < k; ++a) mono = mono * powers[t.vars[a]][t.exps[a]];
                f[j] += mono;
                for (std::size_t a = 0; a < k; ++a) {
                    BigComplex d(mpf_class(t.coeff * t.exps[a], bits_), mpf_class(0, bits_));
                    for (std::size_t b = 0; b < k; ++b) {
                        const auto e = b == a ? t.exps[b] - 1 : t.exps[b];
                        if (e != 0) d = d * powers[t.vars[b]][e];
                    }
                    jac[j][t.vars[a]] += d;
                }
            }
        }
    }

private:
    struct Term {
        mpf_class coeff;
        std::vector<std::size_t> vars; ///< variables with a nonzero exponent
        std::vector<std::uint32_t> exps;
    };

    mp_bitcnt_t bits_;
    std::uint32_t top_ = 1;
    std::size_t nvars_ = 0;
    std::vector<std::vector<Term>> polys_;
};

struct PreciseNewtonResult {
    std::vector<Complex> point;
    bool converged = false;
    int iterations = 0;
    /// max_v |dx_v| / (1 + |x_v|) of the last step.
    double last_step = std::numeric_limits<double>::infinity();
    /// After convergence: smallest singular value of the Jacobian with column v
    /// scaled by max(1, |x_v|) and unit rows, obtained as 1 / sigma_max of its
    /// inverse formed in extended precision.
    double min_singular_value = 0.0;
};

namespace detail {

/// Gaussian elimination with partial pivoting; false when a pivot vanishes.
inline bool solve_in_place(std::vector<std::vector<BigComplex>>& a, std::vector<BigComplex>& b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        mpf_class best = a[k][k].l1();
        for (std::size_t r = k + 1; r < n; ++r) {
            mpf_class m = a[r][k].l1();
            if (m > best) {
                best = m;
                piv = r;
            }
        }
        if (sgn(best) == 0) return false;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t r = k + 1; r < n; ++r) {
            if (a[r][k].is_zero()) continue;
            const BigComplex factor = a[r][k] / a[k][k];
            for (std::size_t c = k; c < n; ++c) a[r][c] -= factor * a[k][c];
            b[r] -= factor * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        BigComplex s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= a[k][c] * b[c];
        b[k] = s / a[k][k];
    }
    return true;
}

inline double min_singular_value(const PreciseSystem& system, const std::vector<BigComplex>& x) {
    const std::size_t n = x.size();
    if (n == 0) return 1.0;
    const auto bits = system.precision();
    std::vector<BigComplex> f;
    std::vector<std::vector<BigComplex>> jac;
    system.evaluate(x, f, jac);
    for (std::size_t v = 0; v < n; ++v) {
        mpf_class scale(sqrt(x[v].re * x[v].re + x[v].im * x[v].im), bits);
        if (scale < 1) scale = 1;
        for (std::size_t j = 0; j < n; ++j) {
            jac[j][v].re *= scale;
            jac[j][v].im *= scale;
        }
    }
    for (auto& row : jac) {
        mpf_class norm2(0, bits);
        for (const auto& z : row) norm2 += z.re * z.re + z.im * z.im;
        if (sgn(norm2) == 0) return 0.0;
        const mpf_class inv(1 / sqrt(norm2), bits);
        for (auto& z : row) {
            z.re *= inv;
            z.im *= inv;
        }
    }
    Eigen::MatrixXcd inverse(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) {
        auto a = jac;
        std::vector<BigComplex> e(n, BigComplex(bits));
        e[c].re = 1;
        if (!solve_in_place(a, e)) return 0.0;
        for (std::size_t r = 0; r < n; ++r)
            inverse(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = e[r].to_complex();
    }
    const double top = Eigen::JacobiSVD<Eigen::MatrixXcd>(inverse).singularValues()(0);
    return std::isfinite(top) && top > 0 ? 1.0 / top : 0.0;
}

} // namespace detail

/// Newton iteration in the precision of `system`, starting from a double
/// point. Converges when a step falls below `tolerance`. A root whose
/// Jacobian is singular is only approached linearly; the iteration gives up
/// after three consecutive small steps that each shrink by less than 4x, or
/// as soon as a step grows.
inline PreciseNewtonResult precise_newton(const PreciseSystem& system, std::span<const Complex> start,
                                          int max_iterations = 60, double tolerance = 1e-40) {
    const std::size_t n = system.num_variables();
    if (start.size() != n || system.num_polys() != n) throw DomainError("precise Newton needs a square system");
    const auto bits = system.precision();
    std::vector<BigComplex> x;
    for (const auto& z : start) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return {};
        x.emplace_back(mpf_class(z.real(), bits), mpf_class(z.imag(), bits));
    }
    PreciseNewtonResult out;
    std::vector<BigComplex> f;
    std::vector<std::vector<BigComplex>> jac;
    int slow = 0;
    for (int it = 0; it < max_iterations; ++it) {
        system.evaluate(x, f, jac);
        for (auto& v : f) {
            v.re = -v.re;
            v.im = -v.im;
        }
        if (!detail::solve_in_place(jac, f)) break;
        double step = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            x[v] += f[v];
            step = std::max(step, f[v].abs_d() / (1.0 + x[v].abs_d()));
        }
        out.iterations = it + 1;
        const double previous = out.last_step;
        out.last_step = step;
        if (!std::isfinite(step)) break;
        if (step <= tolerance) {
            out.converged = true;
            break;
        }
        if (it > 0 && step > 2 * previous) break;
        slow = step < 1e-6 && step > 0.25 * previous ? slow + 1 : 0;
        if (slow == 3) break;
    }
    for (const auto& z : x) {
        out.point.push_back(z.to_complex());
        if (!std::isfinite(std::abs(out.point.back()))) out.converged = false;
    }
    if (out.converged) out.min_singular_value = detail::min_singular_value(system, x);
    return out;
}

} // namespace mldeg
