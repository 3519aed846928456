#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mldeg/errors.hpp"
#include "mldeg/homotopy.hpp"
#include "mldeg/poly.hpp"
#include "mldeg/random_source.hpp"

namespace mldeg {

struct Tolerances {
    /// Minimum |x_i| of a valid solution; for likelihood problems also the
    /// minimum of |x_0| / max(1, |x_1|, ..., |x_n|). Nonsingular points are
    /// polished in extended precision, so genuine points close to a divisor
    /// survive a small threshold.
    double torus = 1e-12;
    /// Maximum relative residual of every original generator at a valid solution.
    double generator_residual = 1e-8;
    /// Singular-value threshold for the smooth-point rank test.
    double rank = 1e-8;
    TrackerConfig tracker;
};

/// Y in (C*)^n given by generators, with declared dimension `dim`.
struct ModelSpec {
    std::vector<std::string> variables;
    std::vector<Poly> generators;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    Tolerances tolerances;

    std::size_t n() const noexcept { return variables.size(); }
    std::size_t codim() const noexcept { return n() - dim; }

    void validate() const {
        if (variables.empty()) throw DomainError("model needs at least one variable");
        if (dim > n()) throw DomainError("declared dimension exceeds the number of variables");
        if (dim >= n() && !generators.empty())
            throw DomainError("declared dimension " + std::to_string(dim) + " leaves no room for generators");
        if (generators.size() < codim())
            throw DomainError("need at least n - d = " + std::to_string(codim()) + " generators, got " +
                              std::to_string(generators.size()));
        for (std::size_t j = 0; j < generators.size(); ++j) {
            if (generators[j].variables() != variables)
                throw DomainError("generator " + std::to_string(j) + " is not over the model variables");
            if (generators[j].is_zero()) throw DomainError("generator " + std::to_string(j) + " is zero");
        }
    }
};

enum class CriticalKind { likelihood, master };

/// A square Lagrange system whose valid nonsingular solutions are the points
/// counted by one ML (bi)degree or master-function bidegree.
///
/// Unknowns: x_1..x_n, multipliers lambda_1..lambda_c, data parameters s_1..s_k.
/// Equations: the c squared-up generators, the x-slices, and n critical equations
///   likelihood: u_i(s) x_0 - u_0(s) x_i - x_i sum_k lambda_k dg_k/dx_i
///   master:     w_i(s)                 - x_i sum_k lambda_k dg_k/dx_i
/// with x_0 = 1 - x_1 - ... - x_n. For the likelihood the multiplier absorbs
/// the factor x_0, which is nonzero on the torus part we count.
struct CriticalProblem {
    CriticalKind kind = CriticalKind::likelihood;
    ModelSpec model;
    std::vector<Poly> squared;                 ///< c equations cutting out Y (plus junk)
    std::vector<Poly> x_slices;                ///< affine conditions on x (bidegree mode)
    std::vector<Rational> data_anchor;         ///< u^0 (length n+1) or w^0 (length n)
    std::vector<std::vector<Rational>> data_directions;
    SquareSystem system;

    std::size_t n() const noexcept { return model.n(); }
    std::size_t codim() const noexcept { return squared.size(); }
    std::size_t data_dim() const noexcept { return data_directions.size(); }
};

namespace detail {

inline std::string fresh_name(const std::vector<std::string>& taken, std::string base) {
    while (std::find(taken.begin(), taken.end(), base) != taken.end()) base = "_" + base;
    return base;
}

/// Squares up the generators to `c` equations. Linear generators are kept;
/// the others are replaced by random exact combinations when there are too many.
inline std::vector<Poly> square_up(const std::vector<Poly>& gens, std::size_t c, RandomSource& rng) {
    if (gens.size() == c) return gens;
    std::vector<Poly> linear, other;
    for (const auto& g : gens) (g.total_degree() <= 1 ? linear : other).push_back(g);
    std::vector<Poly> out;
    std::vector<Poly> pool;
    if (linear.size() <= c) {
        out = linear;
        pool = other;
    } else {
        pool = gens;
    }
    const std::size_t need = c - out.size();
    if (pool.size() == need) {
        out.insert(out.end(), pool.begin(), pool.end());
        return out;
    }
    for (std::size_t k = 0; k < need; ++k) {
        Poly combo(pool.front().variables());
        for (const auto& f : pool) combo += f * rng.balanced_rational();
        out.push_back(std::move(combo));
    }
    return out;
}

/// Exact rescaling to largest absolute entry 1; critical points do not change.
inline std::vector<Rational> normalized(std::vector<Rational> v) {
    Rational biggest = 0;
    for (const auto& q : v) biggest = std::max<Rational>(biggest, abs(q));
    if (biggest != 0)
        for (auto& q : v) q /= biggest;
    return v;
}

inline std::vector<Rational> random_vector(std::size_t len, RandomSource& rng) {
    std::vector<Rational> v;
    for (std::size_t i = 0; i < len; ++i) v.push_back(rng.balanced_rational());
    return normalized(std::move(v));
}

/// Affine forms c0 + sum_i ci xi with balanced coefficients.
inline std::vector<Poly> balanced_affine_forms(const std::vector<std::string>& variables, std::size_t count,
                                               RandomSource& rng) {
    std::vector<Poly> forms;
    for (std::size_t k = 0; k < count; ++k) {
        Poly f = Poly::constant(variables, rng.balanced_rational());
        for (std::size_t i = 0; i < variables.size(); ++i) f += Poly::variable(variables, i) * rng.balanced_rational();
        forms.push_back(std::move(f));
    }
    return forms;
}

} // namespace detail

/// Builds `problem.system` from its ingredients.
inline void assemble(CriticalProblem& problem) {
    const std::size_t n = problem.n();
    const std::size_t c = problem.codim();
    const std::size_t k = problem.data_dim();

    std::vector<std::string> all = problem.model.variables;
    for (std::size_t i = 0; i < c; ++i) all.push_back(detail::fresh_name(all, "lambda" + std::to_string(i + 1)));
    for (std::size_t t = 0; t < k; ++t) all.push_back(detail::fresh_name(all, "s" + std::to_string(t + 1)));

    auto var = [&](std::size_t idx) { return Poly::variable(all, idx); };
    auto constant = [&](const Rational& q) { return Poly::constant(all, q); };

    std::vector<Poly> g;
    for (const auto& p : problem.squared) g.push_back(p.with_variables(all));

    // Data coordinate j as an affine function of the slice parameters.
    auto data = [&](std::size_t j) {
        Poly d = constant(problem.data_anchor[j]);
        for (std::size_t t = 0; t < k; ++t) d += var(n + c + t) * problem.data_directions[t][j];
        return d;
    };

    Poly x0 = constant(Rational(1));
    for (std::size_t i = 0; i < n; ++i) x0 -= var(i);

    SquareSystem sys;
    sys.variables = all;
    for (const auto& p : g) sys.polys.push_back(p);
    for (const auto& s : problem.x_slices) sys.polys.push_back(s.with_variables(all));
    for (std::size_t i = 0; i < n; ++i) {
        Poly lagrange(all);
        for (std::size_t j = 0; j < c; ++j) lagrange += var(n + j) * g[j].differentiate(i);
        Poly eq = problem.kind == CriticalKind::likelihood ? data(i + 1) * x0 - data(0) * var(i) : data(i);
        eq -= var(i) * lagrange;
        sys.polys.push_back(std::move(eq));
    }

    std::vector<std::size_t> xs, rest;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(i);
    for (std::size_t i = n; i < all.size(); ++i) rest.push_back(i);
    sys.variable_groups.push_back(std::move(xs));
    if (!rest.empty()) sys.variable_groups.push_back(std::move(rest));
    problem.system = std::move(sys);
}

namespace detail {

inline CriticalProblem make_problem(CriticalKind kind, const ModelSpec& model, std::vector<Rational> data,
                                    RandomSource& rng) {
    model.validate();
    CriticalProblem p;
    p.kind = kind;
    p.model = model;
    p.squared = square_up(model.generators, model.codim(), rng);
    p.data_anchor = normalized(std::move(data));
    assemble(p);
    return p;
}

} // namespace detail

/// Critical points of the likelihood x^u (1 - sum x)^u0 on Y, data u = (u_0, ..., u_n).
inline CriticalProblem build_likelihood_critical(const ModelSpec& model, std::vector<Rational> u, RandomSource& rng) {
    if (u.size() != model.n() + 1) throw DomainError("likelihood data must have n + 1 entries");
    return detail::make_problem(CriticalKind::likelihood, model, std::move(u), rng);
}

/// Critical points of the master function x^w on Z, w = (w_1, ..., w_n).
inline CriticalProblem build_master_critical(const ModelSpec& model, std::vector<Rational> w, RandomSource& rng) {
    if (w.size() != model.n()) throw DomainError("master weights must have n entries");
    return detail::make_problem(CriticalKind::master, model, std::move(w), rng);
}

enum class SliceMode { bidegree, sectional };

/// Bidegree mode: `x_codim` generic affine conditions on x, and the data vector
/// moves on a generic affine subspace of dimension `data_dim` (which must equal
/// x_codim for the system to stay square).
/// Sectional mode: `x_codim` generic affine forms join the generators, so the
/// model dimension drops by x_codim; `data_dim` must be 0.
inline CriticalProblem add_slices(const CriticalProblem& problem, SliceMode mode, std::size_t x_codim,
                                  std::size_t data_dim, RandomSource& rng) {
    if (x_codim > problem.model.dim)
        throw DomainError("cannot slice " + std::to_string(x_codim) + " times a model of dimension " +
                          std::to_string(problem.model.dim));
    CriticalProblem out = problem;
    auto forms = detail::balanced_affine_forms(problem.model.variables, x_codim, rng);
    if (mode == SliceMode::bidegree) {
        if (x_codim != data_dim) throw DomainError("bidegree slicing needs as many data directions as x-conditions");
        const std::size_t data_len = problem.data_anchor.size();
        if (problem.data_dim() + data_dim > data_len)
            throw DomainError("data subspace dimension exceeds the data space");
        for (auto& f : forms) out.x_slices.push_back(std::move(f));
        for (std::size_t t = 0; t < data_dim; ++t) out.data_directions.push_back(detail::random_vector(data_len, rng));
    } else {
        if (data_dim != 0) throw DomainError("sectional slicing keeps the data fixed");
        for (auto& f : forms) {
            out.model.generators.push_back(f);
            out.squared.push_back(std::move(f));
        }
        out.model.dim -= x_codim;
    }
    assemble(out);
    return out;
}

/// Why a solution was rejected; all true means valid.
struct Validity {
    bool in_torus = true;
    bool off_hyperplane = true;
    bool on_generators = true;
    bool smooth = true;

    bool valid() const noexcept { return in_torus && off_hyperplane && on_generators && smooth; }
};

/// Validity predicates for a point of `problem.system` (only the x part is used).
inline Validity check_solution(const CriticalProblem& problem, std::span<const Complex> point) {
    const auto& tol = problem.model.tolerances;
    const std::size_t n = problem.n();
    const std::span<const Complex> x = point.first(n);
    Validity v;
    Complex x0 = 1.0;
    double size = 1.0;
    for (const auto& xi : x) {
        if (std::abs(xi) <= tol.torus) v.in_torus = false;
        x0 -= xi;
        size = std::max(size, std::abs(xi));
    }
    if (problem.kind == CriticalKind::likelihood && std::abs(x0) <= tol.torus * size) v.off_hyperplane = false;

    const auto& gens = problem.model.generators;
    for (const auto& f : gens)
        if (relative_residual(f, x) >= tol.generator_residual) v.on_generators = false;

    // Rank of the generator Jacobian in log coordinates, rows normalized.
    const std::size_t c = problem.model.codim();
    if (!gens.empty() && c > 0) {
        MatrixXc jac(static_cast<Eigen::Index>(gens.size()), static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < gens.size(); ++j)
            for (std::size_t i = 0; i < n; ++i)
                jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                    gens[j].differentiate(i).eval_complex(x) * x[i];
        for (Eigen::Index j = 0; j < jac.rows(); ++j) {
            const double nrm = jac.row(j).norm();
            if (nrm > 0) jac.row(j) /= nrm;
        }
        Eigen::JacobiSVD<MatrixXc> svd(jac);
        const auto& sv = svd.singularValues();
        if (static_cast<std::size_t>(sv.size()) < c || sv[static_cast<Eigen::Index>(c) - 1] <= tol.rank) v.smooth = false;
        if (static_cast<std::size_t>(sv.size()) > c && sv[static_cast<Eigen::Index>(c)] >= tol.rank) v.smooth = false;
    }
    return v;
}

struct SolveOutcome {
    SolutionSet solutions;
    std::size_t valid = 0;
};

/// Tracks the problem's system and counts valid nonsingular solutions.
inline SolveOutcome solve_and_count(const CriticalProblem& problem, const TrackerConfig& cfg, RandomSource rng) {
    SolveOutcome out;
    out.solutions = track_all(problem.system, cfg, rng);
    for (const auto* s : out.solutions.nonsingular_solutions())
        if (check_solution(problem, s->point).valid()) ++out.valid;
    return out;
}

/// Square system (squared-up generators + `dim` generic affine forms) whose
/// valid solutions are the points of Y on a generic codim-dim affine subspace.
inline CriticalProblem build_degree_problem(const ModelSpec& model, RandomSource& rng) {
    model.validate();
    CriticalProblem p;
    p.kind = CriticalKind::master; // no hyperplane condition
    p.model = model;
    p.squared = detail::square_up(model.generators, model.codim(), rng);
    SquareSystem sys;
    sys.variables = model.variables;
    sys.polys = p.squared;
    for (auto& f : detail::balanced_affine_forms(model.variables, model.dim, rng)) {
        p.x_slices.push_back(f);
        sys.polys.push_back(std::move(f));
    }
    p.system = std::move(sys);
    return p;
}

} // namespace mldeg
