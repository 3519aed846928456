#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mldeg/compiled_system.hpp"
#include "mldeg/errors.hpp"
#include "mldeg/poly.hpp"
#include "mldeg/precise_newton.hpp"
#include "mldeg/random_source.hpp"

namespace mldeg {

/// Square polynomial system: as many equations as unknowns.
///
/// `variable_groups`, when non-empty, partitions the unknowns; track_all then
/// starts from a multihomogeneous linear-product system built on that
/// partition instead of the total-degree start system.
struct SquareSystem {
    std::vector<std::string> variables;
    std::vector<Poly> polys;
    std::vector<std::vector<std::size_t>> variable_groups;

    std::size_t size() const noexcept { return variables.size(); }

    void validate() const {
        if (polys.size() != variables.size())
            throw DomainError("system is not square: " + std::to_string(polys.size()) + " equations in " +
                              std::to_string(variables.size()) + " unknowns");
        for (std::size_t j = 0; j < polys.size(); ++j) {
            if (polys[j].variables() != variables)
                throw DomainError("equation " + std::to_string(j) + " is not over the system variables");
            if (polys[j].is_zero()) throw DomainError("equation " + std::to_string(j) + " is the zero polynomial");
        }
        if (!variable_groups.empty()) {
            std::vector<int> seen(variables.size(), 0);
            for (const auto& g : variable_groups) {
                for (auto v : g) {
                    if (v >= variables.size()) throw DomainError("variable group index out of range");
                    ++seen[v];
                }
            }
            for (auto s : seen)
                if (s != 1) throw DomainError("variable groups must partition the unknowns");
        }
    }
};

/// Product of the total degrees of the equations (saturating).
inline std::uint64_t bezout_bound(const SquareSystem& system) {
    std::uint64_t product = 1;
    for (const auto& p : system.polys) {
        const auto d = static_cast<std::uint64_t>(std::max(p.total_degree(), 0));
        if (d != 0 && product > std::numeric_limits<std::uint64_t>::max() / d)
            return std::numeric_limits<std::uint64_t>::max();
        product *= d;
    }
    return product;
}

/// Multihomogeneous Bezout number for `system.variable_groups`: the number of
/// start solutions of the linear-product start system.
inline std::uint64_t multihomogeneous_bound(const SquareSystem& system) {
    system.validate();
    const auto& groups = system.variable_groups;
    if (groups.empty()) return bezout_bound(system);
    const std::size_t ng = groups.size();
    std::vector<std::vector<std::uint32_t>> deg(system.polys.size(), std::vector<std::uint32_t>(ng));
    for (std::size_t j = 0; j < system.polys.size(); ++j)
        for (std::size_t g = 0; g < ng; ++g) deg[j][g] = system.polys[j].degree_in(groups[g]);

    // Count assignments of equations to groups (group g receives |g| equations),
    // weighted by the product of the chosen degrees.
    std::map<std::vector<std::size_t>, std::uint64_t> states;
    std::vector<std::size_t> caps(ng);
    for (std::size_t g = 0; g < ng; ++g) caps[g] = groups[g].size();
    states[caps] = 1;
    for (std::size_t j = 0; j < system.polys.size(); ++j) {
        std::map<std::vector<std::size_t>, std::uint64_t> next;
        for (const auto& [cap, count] : states) {
            for (std::size_t g = 0; g < ng; ++g) {
                if (cap[g] == 0 || deg[j][g] == 0) continue;
                auto c2 = cap;
                --c2[g];
                next[c2] += count * deg[j][g];
            }
        }
        states = std::move(next);
    }
    const auto it = states.find(std::vector<std::size_t>(ng, 0));
    return it == states.end() ? 0 : it->second;
}

enum class StartKind { automatic, total_degree, linear_product };

struct TrackerConfig {
    double initial_step = 0.02;
    double min_step = 1e-13;
    double max_step = 0.1;
    double corrector_tolerance = 1e-8;
    int max_corrector_iterations = 3;
    double divergence_bound = 1e12;
    double endgame_start = 0.9;
    double final_tolerance = 1e-12;
    double dedup_distance = 1e-6;
    double rank_threshold = 1e-14;
    int max_refine_iterations = 16;
    std::size_t max_steps_per_path = 20000;
    /// Paths that collide at a nonsingular endpoint or fail are re-tracked this
    /// many times with 4x smaller steps.
    int retrack_rounds = 2;
    unsigned threads = 1;
    StartKind start = StartKind::automatic;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0)) throw ConfigError(std::string(name) + " must be positive");
        };
        positive(initial_step, "initial_step");
        positive(min_step, "min_step");
        positive(max_step, "max_step");
        positive(corrector_tolerance, "corrector_tolerance");
        positive(divergence_bound, "divergence_bound");
        positive(endgame_start, "endgame_start");
        positive(final_tolerance, "final_tolerance");
        positive(dedup_distance, "dedup_distance");
        positive(rank_threshold, "rank_threshold");
        if (max_corrector_iterations <= 0) throw ConfigError("max_corrector_iterations must be positive");
        if (max_refine_iterations <= 0) throw ConfigError("max_refine_iterations must be positive");
        if (max_steps_per_path == 0) throw ConfigError("max_steps_per_path must be positive");
        if (!(min_step < initial_step)) throw ConfigError("min_step must be smaller than initial_step");
        if (!(initial_step <= max_step)) throw ConfigError("initial_step must not exceed max_step");
        if (!(endgame_start < 1.0)) throw ConfigError("endgame_start must be below 1");
        if (!(dedup_distance > final_tolerance)) throw ConfigError("dedup_distance must exceed final_tolerance");
        if (threads == 0) throw ConfigError("threads must be positive");
        if (retrack_rounds < 0) throw ConfigError("retrack_rounds must be non-negative");
    }
};

enum class PathStatus { nonsingular, singular, diverged, failed };

inline const char* to_string(PathStatus s) {
    switch (s) {
    case PathStatus::nonsingular: return "nonsingular";
    case PathStatus::singular: return "singular";
    case PathStatus::diverged: return "diverged";
    case PathStatus::failed: return "failed";
    }
    return "?";
}

/// A path endpoint. `residual` is the largest relative residual
/// |f_j(x)| / sum_t |c_t x^a_t| over the equations; `min_singular_value` is the
/// smallest singular value of the Jacobian after scaling column v by
/// max(1, |x_v|) and normalizing every row to unit length. A nonsingular point
/// also needs Newton to converge quadratically (see refine).
struct TrackedSolution {
    std::vector<Complex> point;
    double residual = std::numeric_limits<double>::infinity();
    double min_singular_value = 0.0;
    PathStatus status = PathStatus::failed;
    std::size_t path = 0;
    std::size_t steps = 0;
};

struct SolutionSet {
    /// Distinct nonsingular solutions first, then the remaining path endpoints;
    /// each part in canonical order.
    std::vector<TrackedSolution> solutions;
    std::size_t nonsingular = 0;
    std::size_t singular = 0;
    std::size_t diverged = 0;
    std::size_t failed = 0;
    /// Paths whose nonsingular endpoint coincided with another path's.
    std::size_t duplicates = 0;
    std::size_t retracked = 0;
    std::uint64_t bezout = 0;
    std::uint64_t paths = 0;

    std::vector<const TrackedSolution*> nonsingular_solutions() const {
        std::vector<const TrackedSolution*> out;
        for (const auto& s : solutions)
            if (s.status == PathStatus::nonsingular) out.push_back(&s);
        return out;
    }
};

namespace detail {

inline double inf_norm(const VectorXc& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// max_i |dx_i| / (1 + |x_i|)
inline double scaled_norm(const VectorXc& dx, const VectorXc& x) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < dx.size(); ++i) worst = std::max(worst, std::abs(dx[i]) / (1.0 + std::abs(x[i])));
    return worst;
}

inline bool all_finite(const VectorXc& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
    return true;
}

class StartFunction {
public:
    virtual ~StartFunction() = default;
    virtual void evaluate(const VectorXc& x, VectorXc& g, MatrixXc& jac) const = 0;
    virtual std::unique_ptr<StartFunction> clone() const = 0;
};

class PolynomialStart final : public StartFunction {
public:
    explicit PolynomialStart(const std::vector<Poly>& polys) : system_(polys) {}
    void evaluate(const VectorXc& x, VectorXc& g, MatrixXc& jac) const override { system_.evaluate(x, g, &jac); }
    std::unique_ptr<StartFunction> clone() const override { return std::make_unique<PolynomialStart>(*this); }

private:
    CompiledSystem system_;
};

/// Equation j is a product of random affine forms; deg_j(g) of them involve
/// only the variables of group g. With homogenizing coordinates h_g the
/// constant of each form is multiplied by h_g.
class LinearProductStart final : public StartFunction {
public:
    struct Factor {
        std::size_t group;
        Complex constant;
        std::vector<Complex> coeffs; // aligned with groups[group]
    };

    LinearProductStart(const SquareSystem& system, RandomSource& rng, std::vector<std::size_t> homogenizers = {})
        : n_(system.size()), groups_(system.variable_groups), hom_(std::move(homogenizers)),
          factors_(system.size()) {
        if (!hom_.empty() && hom_.size() != groups_.size())
            throw InternalError("one homogenizing coordinate per group required");
        for (std::size_t j = 0; j < system.polys.size(); ++j) {
            for (std::size_t g = 0; g < groups_.size(); ++g) {
                const auto d = system.polys[j].degree_in(groups_[g]);
                for (std::uint32_t k = 0; k < d; ++k) {
                    Factor f{g, rng.complex_box(), {}};
                    for (std::size_t i = 0; i < groups_[g].size(); ++i) f.coeffs.push_back(rng.complex_box());
                    factors_[j].push_back(std::move(f));
                }
            }
        }
    }

    void evaluate(const VectorXc& x, VectorXc& g, MatrixXc& jac) const override {
        g.resize(static_cast<Eigen::Index>(n_));
        jac.setZero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_ + hom_.size()));
        std::vector<Complex> vals, prefix, suffix;
        for (std::size_t j = 0; j < n_; ++j) {
            const auto& fs = factors_[j];
            const std::size_t k = fs.size();
            vals.resize(k);
            for (std::size_t i = 0; i < k; ++i) vals[i] = value(fs[i], x);
            prefix.assign(k + 1, 1.0);
            suffix.assign(k + 1, 1.0);
            for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * vals[i];
            for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * vals[i];
            g[static_cast<Eigen::Index>(j)] = prefix[k];
            for (std::size_t i = 0; i < k; ++i) {
                const Complex others = prefix[i] * suffix[i + 1];
                const auto& grp = groups_[fs[i].group];
                for (std::size_t v = 0; v < grp.size(); ++v)
                    jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(grp[v])) += others * fs[i].coeffs[v];
                if (!hom_.empty())
                    jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(hom_[fs[i].group])) +=
                        others * fs[i].constant;
            }
        }
    }

    std::unique_ptr<StartFunction> clone() const override { return std::make_unique<LinearProductStart>(*this); }

    /// All affine start solutions (h_g = 1): pick one factor per equation so that group g gets
    /// exactly |g| factors, then solve the resulting linear systems.
    std::vector<VectorXc> start_points() const {
        std::vector<VectorXc> out;
        std::vector<std::size_t> caps;
        for (const auto& g : groups_) caps.push_back(g.size());
        std::vector<const Factor*> chosen(n_, nullptr);
        std::function<void(std::size_t)> recurse = [&](std::size_t j) {
            if (j == n_) {
                if (auto pt = solve_choice(chosen)) out.push_back(std::move(*pt));
                return;
            }
            for (const auto& f : factors_[j]) {
                if (caps[f.group] == 0) continue;
                --caps[f.group];
                chosen[j] = &f;
                recurse(j + 1);
                ++caps[f.group];
            }
        };
        recurse(0);
        return out;
    }

private:
    Complex value(const Factor& f, const VectorXc& x) const {
        const auto& grp = groups_[f.group];
        Complex s = hom_.empty() ? f.constant : f.constant * x[static_cast<Eigen::Index>(hom_[f.group])];
        for (std::size_t v = 0; v < grp.size(); ++v) s += f.coeffs[v] * x[static_cast<Eigen::Index>(grp[v])];
        return s;
    }

    std::optional<VectorXc> solve_choice(const std::vector<const Factor*>& chosen) const {
        VectorXc x(static_cast<Eigen::Index>(n_));
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            const auto& grp = groups_[g];
            const auto m = static_cast<Eigen::Index>(grp.size());
            if (m == 0) continue;
            MatrixXc a(m, m);
            VectorXc b(m);
            Eigen::Index row = 0;
            for (const auto* f : chosen) {
                if (f->group != g) continue;
                for (Eigen::Index c = 0; c < m; ++c) a(row, c) = f->coeffs[static_cast<std::size_t>(c)];
                b[row] = -f->constant;
                ++row;
            }
            const VectorXc sol = a.fullPivLu().solve(b);
            if (!all_finite(sol)) return std::nullopt;
            for (Eigen::Index c = 0; c < m; ++c) x[static_cast<Eigen::Index>(grp[static_cast<std::size_t>(c)])] = sol[c];
        }
        return x;
    }

    std::size_t n_;
    std::vector<std::vector<std::size_t>> groups_;
    std::vector<std::size_t> hom_;
    std::vector<std::vector<Factor>> factors_;
};

/// Multihomogenized polynomials followed by one affine patch row
/// sum_v a_v y_v - 1 per group (the row involves the group and its h_g).
struct PatchedSystem {
    CompiledSystem polys;
    MatrixXc patch;

    std::size_t num_variables() const noexcept { return polys.num_variables(); }

    void evaluate(const VectorXc& x, VectorXc& f, MatrixXc* jac, Eigen::VectorXd* magnitude = nullptr) const {
        VectorXc fp;
        MatrixXc jp;
        Eigen::VectorXd mp;
        polys.evaluate(x, fp, jac ? &jp : nullptr, magnitude ? &mp : nullptr);
        const Eigen::Index m = fp.size(), k = patch.rows();
        f.resize(m + k);
        f.head(m) = fp;
        f.tail(k) = patch * x - VectorXc::Ones(k);
        if (jac) {
            jac->resize(m + k, x.size());
            jac->topRows(m) = jp;
            jac->bottomRows(k) = patch;
        }
        if (magnitude) {
            magnitude->resize(m + k);
            magnitude->head(m) = mp;
            for (Eigen::Index r = 0; r < k; ++r)
                (*magnitude)[m + r] = 1.0 + (patch.row(r).transpose().cwiseProduct(x)).cwiseAbs().sum();
        }
    }
};

/// H(x, t) = (1 - t) gamma G(x) + t F(x), with the patch rows of the target
/// appended unchanged.
class Homotopy {
public:
    Homotopy(const PatchedSystem& target, std::unique_ptr<StartFunction> start, Complex gamma)
        : target_(target), start_(std::move(start)), gamma_(gamma) {}

    Homotopy(const Homotopy& o) : target_(o.target_), start_(o.start_->clone()), gamma_(o.gamma_) {}

    std::size_t size() const noexcept { return target_.num_variables(); }
    const PatchedSystem& target() const noexcept { return target_; }

    /// H, dH/dx and dH/dt at (x, t).
    void evaluate(const VectorXc& x, double t, VectorXc& h, MatrixXc& hx, VectorXc& ht) {
        target_.evaluate(x, f_, &jf_);
        start_->evaluate(x, g_, jg_);
        const Eigen::Index m = g_.size();
        const Complex a = (1.0 - t) * gamma_;
        h = f_;
        hx = jf_;
        h.head(m) = a * g_ + t * f_.head(m);
        hx.topRows(m) = a * jg_ + t * jf_.topRows(m);
        ht = VectorXc::Zero(f_.size());
        ht.head(m) = f_.head(m) - gamma_ * g_;
    }

private:
    PatchedSystem target_;
    std::unique_ptr<StartFunction> start_;
    Complex gamma_;
    VectorXc f_, g_;
    MatrixXc jf_, jg_;
};

struct PathEnd {
    VectorXc x;
    double t = 0.0;
    enum class Kind { reached, endgame, diverged, failed } kind = Kind::failed;
    std::size_t steps = 0;
};

class PathTracker {
public:
    PathTracker(Homotopy homotopy, const TrackerConfig& cfg) : hom_(std::move(homotopy)), cfg_(cfg) {}

    Homotopy& homotopy() { return hom_; }

    /// Adaptive RK4 predictor with Newton corrector from t = 0 towards t = 1.
    PathEnd track(VectorXc x, double step_scale) {
        PathEnd end;
        double t = 0.0;
        double h = cfg_.initial_step * step_scale;
        const double hmax = cfg_.max_step * step_scale;
        int streak = 0;
        for (;;) {
            if (end.steps >= cfg_.max_steps_per_path) {
                end.kind = PathEnd::Kind::failed;
                break;
            }
            ++end.steps;
            const bool last = h >= 1.0 - t;
            if (last) h = 1.0 - t;
            const double t_next = last ? 1.0 : t + h;
            VectorXc xp;
            bool ok = predict(x, t, h, xp) && correct(xp, t_next, cfg_.corrector_tolerance);
            if (ok) {
                x = xp;
                t = t_next;
                if (inf_norm(x) > cfg_.divergence_bound) {
                    end.kind = PathEnd::Kind::diverged;
                    break;
                }
                if (last) {
                    end.kind = PathEnd::Kind::reached;
                    break;
                }
                if (++streak >= 3) {
                    h = std::min(2.0 * h, hmax);
                    streak = 0;
                }
            } else {
                h *= 0.5;
                streak = 0;
                if (h < cfg_.min_step) {
                    end.kind = t >= cfg_.endgame_start ? PathEnd::Kind::endgame : PathEnd::Kind::failed;
                    break;
                }
            }
        }
        end.x = std::move(x);
        end.t = t;
        return end;
    }

private:
    bool velocity(const VectorXc& x, double t, VectorXc& v) {
        hom_.evaluate(x, t, h_, hx_, ht_);
        lu_.compute(hx_);
        v = lu_.solve(-ht_);
        return all_finite(v);
    }

    bool predict(const VectorXc& x, double t, double h, VectorXc& out) {
        VectorXc k1, k2, k3, k4;
        if (!velocity(x, t, k1)) return false;
        if (!velocity(x + 0.5 * h * k1, t + 0.5 * h, k2)) return false;
        if (!velocity(x + 0.5 * h * k2, t + 0.5 * h, k3)) return false;
        if (!velocity(x + h * k3, t + h, k4)) return false;
        out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        return all_finite(out);
    }

    bool correct(VectorXc& x, double t, double tol) {
        double previous = std::numeric_limits<double>::infinity();
        for (int it = 0; it < cfg_.max_corrector_iterations; ++it) {
            hom_.evaluate(x, t, h_, hx_, ht_);
            lu_.compute(hx_);
            const VectorXc dx = lu_.solve(-h_);
            if (!all_finite(dx)) return false;
            x += dx;
            const double nd = scaled_norm(dx, x);
            if (nd <= tol) return true;
            if (nd > 0.5 * previous) return false;
            previous = nd;
        }
        return false;
    }

    Homotopy hom_;
    TrackerConfig cfg_;
    VectorXc h_, ht_;
    MatrixXc hx_;
    Eigen::PartialPivLU<MatrixXc> lu_;
};

/// Smallest scaled singular value above which a double-precision Newton fixed
/// point is accepted without extended-precision polishing.
inline constexpr double well_conditioned = 1e-6;

/// Newton polishing followed by classification. With `precise`, a candidate
/// root that is not plainly well conditioned is polished again in extended
/// precision and counts as converged only if that iteration converges;
/// singular roots are approached linearly and fail it.
template <typename System>
TrackedSolution refine(const System& system, VectorXc x, const TrackerConfig& cfg,
                       const PreciseSystem* precise = nullptr) {
    TrackedSolution sol;
    VectorXc f;
    MatrixXc jac;
    Eigen::VectorXd mag;
    bool finite = all_finite(x);
    bool converged = false;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; finite && it < cfg.max_refine_iterations; ++it) {
        system.evaluate(x, f, &jac, &mag);
        // Equilibrated step: rows by their magnitudes, columns by max(1, |x_v|).
        Eigen::VectorXd cols(x.size());
        for (Eigen::Index v = 0; v < x.size(); ++v) cols[v] = std::max(1.0, std::abs(x[v]));
        for (Eigen::Index j = 0; j < f.size(); ++j) {
            const double r = 1.0 / std::max(mag[j], 1e-300);
            f[j] *= r;
            jac.row(j) *= r;
        }
        const MatrixXc scaled = jac * cols.asDiagonal();
        const VectorXc dx = cols.asDiagonal() * scaled.fullPivLu().solve(-f);
        if (!all_finite(dx)) {
            finite = false;
            break;
        }
        x += dx;
        const double step = scaled_norm(dx, x);
        last_step = step;
        converged = step <= std::sqrt(cfg.final_tolerance);
        if (step <= cfg.final_tolerance * 1e-2) break;
    }
    sol.point.assign(x.data(), x.data() + x.size());
    if (!finite || !all_finite(x)) {
        sol.status = PathStatus::failed;
        return sol;
    }
    auto relative_residual = [&] {
        system.evaluate(x, f, &jac, &mag);
        double r = 0.0;
        for (Eigen::Index j = 0; j < f.size(); ++j) r = std::max(r, std::abs(f[j]) / std::max(mag[j], 1e-300));
        return r;
    };
    double residual = relative_residual();
    auto double_sigma = [&] {
        MatrixXc scaled = jac;
        for (Eigen::Index v = 0; v < scaled.cols(); ++v) scaled.col(v) *= std::max(1.0, std::abs(x[v]));
        for (Eigen::Index j = 0; j < scaled.rows(); ++j) {
            const double nrm = scaled.row(j).norm();
            if (nrm > 0) scaled.row(j) /= nrm;
        }
        return scaled.size() > 0 ? Eigen::JacobiSVD<MatrixXc>(scaled).singularValues().minCoeff() : 1.0;
    };
    sol.min_singular_value = double_sigma();
    // Well-conditioned points settle in double precision; the others are
    // polished in extended precision, where only quadratic convergence counts.
    const bool settled = last_step <= cfg.final_tolerance && residual < cfg.final_tolerance &&
                         sol.min_singular_value > well_conditioned;
    if (precise && !settled && residual < std::sqrt(cfg.final_tolerance)) {
        const auto polished = precise_newton(*precise, std::span<const Complex>(x.data(), static_cast<std::size_t>(x.size())));
        converged = polished.converged;
        if (converged) {
            for (Eigen::Index v = 0; v < x.size(); ++v) x[v] = polished.point[static_cast<std::size_t>(v)];
            sol.point = polished.point;
            residual = relative_residual();
            sol.min_singular_value = polished.min_singular_value;
        }
    }
    sol.residual = residual;

    if (converged && residual < cfg.final_tolerance && sol.min_singular_value > cfg.rank_threshold)
        sol.status = PathStatus::nonsingular;
    else if (residual < std::sqrt(cfg.final_tolerance))
        sol.status = PathStatus::singular;
    else
        sol.status = PathStatus::failed;
    return sol;
}

inline double relative_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max({1.0, std::abs(a[i]), std::abs(b[i])}));
    return worst;
}

/// Lexicographic on coordinates rounded to a 1e-6 grid, then path index.
inline bool canonical_less(const TrackedSolution& a, const TrackedSolution& b) {
    auto key = [](double v) { return std::llround(std::clamp(v, -1e12, 1e12) * 1e6); };
    for (std::size_t i = 0; i < std::min(a.point.size(), b.point.size()); ++i) {
        const auto ar = key(a.point[i].real()), br = key(b.point[i].real());
        if (ar != br) return ar < br;
        const auto ai = key(a.point[i].imag()), bi = key(b.point[i].imag());
        if (ai != bi) return ai < bi;
    }
    return a.path < b.path;
}

/// Multihomogenization: group g receives the coordinate at index
/// variables.size() + g, and each polynomial keeps its degree in every group.
inline std::vector<Poly> homogenize(const std::vector<Poly>& polys, const std::vector<std::vector<std::size_t>>& groups) {
    std::vector<Poly> out;
    if (polys.empty()) return out;
    std::vector<std::string> names = polys.front().variables();
    const std::size_t n = names.size();
    for (std::size_t g = 0; g < groups.size(); ++g) names.push_back("#h" + std::to_string(g));
    for (const auto& p : polys) {
        std::vector<std::uint32_t> top;
        for (const auto& grp : groups) top.push_back(p.degree_in(grp));
        Poly h(names);
        for (const auto& [e, c] : p.terms()) {
            Exponent ne(names.size(), 0);
            std::copy(e.begin(), e.end(), ne.begin());
            for (std::size_t g = 0; g < groups.size(); ++g) {
                std::uint32_t d = 0;
                for (auto v : groups[g]) d += e[v];
                ne[n + g] = top[g] - d;
            }
            h.add_term(std::move(ne), c);
        }
        out.push_back(std::move(h));
    }
    return out;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(0U, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = next++; i < count; i = next++) fn(w, i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

/// Start system x_i^{d_i} - c_i together with its closed-form solutions.
struct StartSystem {
    SquareSystem system;
    std::vector<std::vector<Complex>> points;
};

/// Total-degree start system with the given constants c_i (nonzero).
inline StartSystem total_degree_start(const SquareSystem& target, const std::vector<Rational>& constants) {
    target.validate();
    if (constants.size() != target.size()) throw DomainError("one constant per equation required");
    StartSystem out;
    out.system.variables = target.variables;
    std::vector<std::uint32_t> degrees;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const auto d = static_cast<std::uint32_t>(target.polys[i].total_degree());
        if (constants[i] == 0) throw DomainError("start constants must be nonzero");
        degrees.push_back(d);
        Poly g = Poly::variable(target.variables, i).pow(d) - Poly::constant(target.variables, constants[i]);
        out.system.polys.push_back(std::move(g));
    }
    // Cartesian product of the scaled roots of unity.
    std::vector<std::vector<Complex>> roots(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = static_cast<double>(degrees[i]);
        const Complex base = std::pow(Complex(constants[i].get_d(), 0.0), 1.0 / d);
        for (std::uint32_t k = 0; k < degrees[i]; ++k)
            roots[i].push_back(base * std::polar(1.0, 2.0 * std::numbers::pi * k / d));
    }
    std::vector<Complex> current(target.size());
    std::function<void(std::size_t)> recurse = [&](std::size_t i) {
        if (i == target.size()) {
            out.points.push_back(current);
            return;
        }
        for (const auto& r : roots[i]) {
            current[i] = r;
            recurse(i + 1);
        }
    };
    if (bezout_bound(target) > 0) recurse(0);
    return out;
}

/// Total-degree start system with random constants c_i = a/1000, a uniform in [500, 2000].
inline StartSystem total_degree_start(const SquareSystem& target, RandomSource& rng) {
    std::vector<Rational> constants;
    for (std::size_t i = 0; i < target.size(); ++i)
        constants.push_back(make_rational(static_cast<long>(rng.uniform_int(500, 2000)), 1000));
    return total_degree_start(target, constants);
}

/// Newton refinement at a point; classification as in TrackedSolution.
/// Never throws for numerical failure: a singular step yields status failed.
inline TrackedSolution newton_refine(const SquareSystem& system, std::span<const Complex> point,
                                     const TrackerConfig& cfg) {
    system.validate();
    if (point.size() != system.size()) throw DomainError("point dimension does not match system size");
    const CompiledSystem compiled(system.polys);
    const PreciseSystem precise(system.polys);
    VectorXc x(static_cast<Eigen::Index>(point.size()));
    for (std::size_t i = 0; i < point.size(); ++i) x[static_cast<Eigen::Index>(i)] = point[i];
    return detail::refine(compiled, std::move(x), cfg, &precise);
}

/// Solves a square system by coefficient-parameter continuation from a start
/// system (gamma trick). Every path ends in one of the four statuses; the
/// returned set is independent of the number of threads.
inline SolutionSet track_all(const SquareSystem& target, const TrackerConfig& cfg, RandomSource rng) {
    cfg.validate();
    target.validate();
    SolutionSet result;
    result.bezout = bezout_bound(target);

    RandomSource gamma_rng = rng.derive(1);
    RandomSource start_rng = rng.derive(2);
    const Complex gamma = gamma_rng.unit_complex();

    const bool use_product = cfg.start == StartKind::linear_product ||
                             (cfg.start == StartKind::automatic && !target.variable_groups.empty());
    const std::size_t n = target.size();
    std::vector<std::vector<std::size_t>> groups = use_product ? target.variable_groups
                                                               : std::vector<std::vector<std::size_t>>{};
    if (groups.empty()) {
        groups.emplace_back();
        for (std::size_t i = 0; i < n; ++i) groups.back().push_back(i);
    }
    const std::size_t ng = groups.size();
    std::vector<std::size_t> hom(ng);
    for (std::size_t g = 0; g < ng; ++g) hom[g] = n + g;

    // Tracking happens in P^{n_1} x ... x P^{n_k}, each factor on a random affine patch.
    detail::PatchedSystem patched;
    patched.polys = CompiledSystem(detail::homogenize(target.polys, groups), /*normalize_rows=*/true);
    patched.patch = MatrixXc::Zero(static_cast<Eigen::Index>(ng), static_cast<Eigen::Index>(n + ng));
    RandomSource patch_rng = rng.derive(3);
    for (std::size_t g = 0; g < ng; ++g) {
        const auto r = static_cast<Eigen::Index>(g);
        for (auto v : groups[g]) patched.patch(r, static_cast<Eigen::Index>(v)) = patch_rng.complex_box();
        patched.patch(r, static_cast<Eigen::Index>(hom[g])) = patch_rng.complex_box();
    }

    std::unique_ptr<detail::StartFunction> start;
    std::vector<VectorXc> affine_starts;
    if (use_product) {
        SquareSystem grouped = target;
        grouped.variable_groups = groups;
        auto lp = std::make_unique<detail::LinearProductStart>(grouped, start_rng, hom);
        affine_starts = lp->start_points();
        start = std::move(lp);
    } else {
        const StartSystem ss = total_degree_start(target, start_rng);
        for (const auto& p : ss.points) {
            VectorXc v(static_cast<Eigen::Index>(p.size()));
            for (std::size_t i = 0; i < p.size(); ++i) v[static_cast<Eigen::Index>(i)] = p[i];
            affine_starts.push_back(std::move(v));
        }
        start = std::make_unique<detail::PolynomialStart>(detail::homogenize(ss.system.polys, groups));
    }
    // (x, 1) rescaled per group onto the patch.
    auto to_patch = [&](const VectorXc& a) {
        VectorXc y(static_cast<Eigen::Index>(n + ng));
        y.head(static_cast<Eigen::Index>(n)) = a;
        for (std::size_t g = 0; g < ng; ++g) {
            const auto r = static_cast<Eigen::Index>(g);
            y[static_cast<Eigen::Index>(hom[g])] = 1.0;
            Complex s = 0.0;
            for (auto v : groups[g]) s += patched.patch(r, static_cast<Eigen::Index>(v)) * y[static_cast<Eigen::Index>(v)];
            s += patched.patch(r, static_cast<Eigen::Index>(hom[g]));
            for (auto v : groups[g]) y[static_cast<Eigen::Index>(v)] /= s;
            y[static_cast<Eigen::Index>(hom[g])] /= s;
        }
        return y;
    };
    std::vector<VectorXc> starts;
    for (const auto& a : affine_starts) starts.push_back(to_patch(a));
    result.paths = starts.size();

    const std::vector<CompiledSystem> affine(std::max(1U, cfg.threads), CompiledSystem(target.polys, true));
    const PreciseSystem precise(target.polys);
    const detail::Homotopy prototype(patched, std::move(start), gamma);
    std::vector<detail::PathTracker> trackers;
    for (unsigned w = 0; w < std::max(1U, cfg.threads); ++w) trackers.emplace_back(prototype, cfg);

    // Endpoints at h_g = 0 lie at infinity; the others are reported in affine coordinates.
    auto at_infinity = [&](const VectorXc& y) {
        for (std::size_t g = 0; g < ng; ++g) {
            double scale = 0.0;
            for (auto v : groups[g]) scale = std::max(scale, std::abs(y[static_cast<Eigen::Index>(v)]));
            if (std::abs(y[static_cast<Eigen::Index>(hom[g])]) * cfg.divergence_bound <= scale) return true;
        }
        return false;
    };
    auto dehomogenize = [&](const VectorXc& y) {
        std::vector<Complex> x(n);
        for (std::size_t g = 0; g < ng; ++g) {
            const Complex h = y[static_cast<Eigen::Index>(hom[g])];
            for (auto v : groups[g]) x[v] = h == 0.0 ? y[static_cast<Eigen::Index>(v)] : y[static_cast<Eigen::Index>(v)] / h;
        }
        return x;
    };

    std::vector<TrackedSolution> ends(starts.size());
    std::vector<std::vector<Complex>> projective(starts.size());
    auto run = [&](const std::vector<std::size_t>& indices, double scale) {
        detail::parallel_for(indices.size(), cfg.threads, [&](unsigned w, std::size_t k) {
            const std::size_t path = indices[k];
            auto& tracker = trackers[w];
            const detail::PathEnd end = tracker.track(starts[path], scale);
            TrackedSolution sol;
            VectorXc y = end.x;
            if (end.kind == detail::PathEnd::Kind::diverged) {
                sol.status = PathStatus::diverged;
            } else if (end.kind == detail::PathEnd::Kind::failed) {
                sol.status = PathStatus::failed;
            } else {
                sol = detail::refine(tracker.homotopy().target(), end.x, cfg);
                y = Eigen::Map<const VectorXc>(sol.point.data(), static_cast<Eigen::Index>(sol.point.size()));
                if (at_infinity(y)) {
                    sol.status = PathStatus::diverged;
                } else if (sol.status != PathStatus::failed) {
                    const auto x = dehomogenize(y);
                    sol = detail::refine(affine[w], Eigen::Map<const VectorXc>(x.data(), static_cast<Eigen::Index>(n)), cfg,
                                         &precise);
                    if (sol.status != PathStatus::failed)
                        y = to_patch(Eigen::Map<const VectorXc>(sol.point.data(), static_cast<Eigen::Index>(n)));
                }
            }
            projective[path].assign(y.data(), y.data() + y.size());
            if (sol.point.size() != n) sol.point = dehomogenize(y);
            sol.path = path;
            sol.steps = end.steps;
            ends[path] = std::move(sol);
        });
    };

    std::vector<std::size_t> all(starts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    run(all, 1.0);

    // Nonsingular endpoints shared by several paths indicate path jumping.
    auto suspects = [&]() {
        std::vector<std::size_t> ns, out;
        for (std::size_t i = 0; i < ends.size(); ++i) {
            if (ends[i].status == PathStatus::nonsingular)
                ns.push_back(i);
            else if (ends[i].status == PathStatus::failed)
                out.push_back(i);
        }
        std::sort(ns.begin(), ns.end(), [&](auto a, auto b) { return detail::canonical_less(ends[a], ends[b]); });
        std::vector<char> flagged(ends.size(), 0);
        for (std::size_t a = 0; a < ns.size(); ++a) {
            for (std::size_t b = a + 1; b < ns.size(); ++b) {
                if (detail::relative_distance(projective[ns[a]], projective[ns[b]]) < cfg.dedup_distance) {
                    flagged[ns[a]] = flagged[ns[b]] = 1;
                }
            }
        }
        for (std::size_t i = 0; i < ends.size(); ++i)
            if (flagged[i]) out.push_back(i);
        std::sort(out.begin(), out.end());
        return out;
    };
    double scale = 1.0;
    for (int round = 0; round < cfg.retrack_rounds; ++round) {
        const auto again = suspects();
        if (again.empty()) break;
        scale *= 0.25;
        result.retracked += again.size();
        run(again, scale);
    }

    std::vector<TrackedSolution> distinct, others;
    std::vector<std::size_t> kept;
    for (auto& e : ends) {
        if (e.status != PathStatus::nonsingular) {
            others.push_back(std::move(e));
            continue;
        }
        bool dup = false;
        for (auto d : kept) {
            if (detail::relative_distance(projective[d], projective[e.path]) < cfg.dedup_distance) {
                dup = true;
                break;
            }
        }
        if (dup) {
            ++result.duplicates;
        } else {
            kept.push_back(e.path);
            distinct.push_back(std::move(e));
        }
    }
    std::sort(distinct.begin(), distinct.end(), detail::canonical_less);
    std::sort(others.begin(), others.end(), detail::canonical_less);
    result.nonsingular = distinct.size();
    for (const auto& o : others) {
        if (o.status == PathStatus::singular) ++result.singular;
        if (o.status == PathStatus::diverged) ++result.diverged;
        if (o.status == PathStatus::failed) ++result.failed;
    }
    result.solutions = std::move(distinct);
    result.solutions.insert(result.solutions.end(), std::make_move_iterator(others.begin()),
                            std::make_move_iterator(others.end()));
    return result;
}

} // namespace mldeg
