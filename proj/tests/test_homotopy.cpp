#include <gtest/gtest.h>

#include <algorithm>

#include "mldeg/homotopy.hpp"
#include "mldeg/parser.hpp"

using namespace mldeg;

namespace {

SquareSystem make_system(std::vector<std::string> vars, const std::vector<std::string>& eqs) {
    SquareSystem s;
    s.variables = std::move(vars);
    for (const auto& e : eqs) s.polys.push_back(parse_poly(e, s.variables));
    return s;
}

/// Dense polynomial of total degree `deg` with random rational coefficients.
Poly dense_random(const std::vector<std::string>& vars, std::uint32_t deg, RandomSource& rng) {
    Poly p(vars);
    std::vector<Exponent> monomials{Exponent(vars.size(), 0)};
    for (std::uint32_t d = 0; d < deg; ++d) {
        std::vector<Exponent> next;
        for (const auto& m : monomials) {
            for (std::size_t i = 0; i < vars.size(); ++i) {
                Exponent e = m;
                ++e[i];
                next.push_back(e);
            }
        }
        monomials.insert(monomials.end(), next.begin(), next.end());
        std::sort(monomials.begin(), monomials.end());
        monomials.erase(std::unique(monomials.begin(), monomials.end()), monomials.end());
    }
    for (const auto& m : monomials)
        if (total_degree(m) <= deg) p.add_term(m, rng.rational());
    return p;
}

} // namespace

TEST(Bezout, ProductOfDegrees) {
    EXPECT_EQ(bezout_bound(make_system({"x", "y"}, {"x^2 + y", "x*y^2 + 1"})), 6u);
    EXPECT_EQ(bezout_bound(make_system({"x", "y", "z"}, {"x + 1", "y - z", "x + y + z"})), 1u);
}

TEST(Bezout, MultihomogeneousCount) {
    auto s = make_system({"x", "y", "l"}, {"x^2 + y^2 - 1", "l*x - 1", "l*y - 2"});
    s.variable_groups = {{0, 1}, {2}};
    // Coefficient of a^2 b in (2a)(a+b)(a+b): 2 * 2 = 4.
    EXPECT_EQ(multihomogeneous_bound(s), 4u);
}

TEST(TotalDegreeStart, Examples) {
    const auto one = make_system({"x"}, {"x^2 - 5"});
    const auto ss = total_degree_start(one, std::vector<Rational>{Rational(1)});
    ASSERT_EQ(ss.points.size(), 2u);
    EXPECT_NEAR(std::abs(ss.points[0][0] - Complex(1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ss.points[1][0] - Complex(-1)), 0.0, 1e-15);

    const auto two = make_system({"x", "y"}, {"x^2 + y", "x*y^2 + 1"});
    RandomSource rng(3);
    const auto s2 = total_degree_start(two, rng);
    ASSERT_EQ(s2.points.size(), 6u);
    for (std::size_t a = 0; a < s2.points.size(); ++a) {
        for (const auto& g : s2.system.polys) EXPECT_LT(std::abs(g.eval_complex(s2.points[a])), 1e-12);
        for (std::size_t b = a + 1; b < s2.points.size(); ++b)
            EXPECT_GT(detail::relative_distance(s2.points[a], s2.points[b]), 1e-3);
    }
}

TEST(NewtonRefine, Examples) {
    const auto s = make_system({"x"}, {"x^2 - 1"});
    TrackerConfig cfg;
    const std::vector<Complex> near{1.01};
    const auto sol = newton_refine(s, near, cfg);
    EXPECT_EQ(sol.status, PathStatus::nonsingular);
    EXPECT_NEAR(std::abs(sol.point[0] - Complex(1)), 0.0, 1e-12);

    const std::vector<Complex> zero{0.0};
    const auto bad = newton_refine(s, zero, cfg);
    EXPECT_EQ(bad.status, PathStatus::failed);

    const std::vector<Complex> exact{-1.0};
    const auto same = newton_refine(s, exact, cfg);
    EXPECT_EQ(same.status, PathStatus::nonsingular);
    EXPECT_LT(same.residual, 1e-12);
    EXPECT_EQ(same.point[0], Complex(-1.0));

    EXPECT_THROW(newton_refine(s, std::vector<Complex>{1.0, 2.0}, cfg), DomainError);
}

TEST(TrackerConfig, Validation) {
    TrackerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.min_step = cfg.initial_step * 2;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = TrackerConfig{};
    cfg.dedup_distance = 1e-14;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = TrackerConfig{};
    cfg.corrector_tolerance = -1;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(TrackAll, SquareRoots) {
    const auto s = make_system({"x"}, {"x^2 - 1"});
    const auto set = track_all(s, TrackerConfig{}, RandomSource(11));
    ASSERT_EQ(set.nonsingular, 2u);
    EXPECT_NEAR(set.solutions[0].point[0].real(), -1.0, 1e-12);
    EXPECT_NEAR(set.solutions[1].point[0].real(), 1.0, 1e-12);
}

TEST(TrackAll, DenseSystemsReachBezoutNumber) {
    const std::vector<std::vector<std::uint32_t>> profiles{{2, 2}, {2, 3}, {3, 3}, {2, 2, 2}};
    RandomSource rng(500);
    for (const auto& degs : profiles) {
        for (int rep = 0; rep < 3; ++rep) {
            SquareSystem s;
            for (std::size_t i = 0; i < degs.size(); ++i) s.variables.push_back("z" + std::to_string(i + 1));
            for (auto d : degs) s.polys.push_back(dense_random(s.variables, d, rng));
            const auto set = track_all(s, TrackerConfig{}, rng.derive(static_cast<std::uint64_t>(rep)));
            EXPECT_EQ(set.nonsingular, bezout_bound(s));
            for (const auto* sol : set.nonsingular_solutions()) {
                for (const auto& p : s.polys) EXPECT_LT(relative_residual(p, sol->point), 1e-12);
            }
        }
    }
}

TEST(TrackAll, LinearProductStartAgrees) {
    auto s = make_system({"x", "y", "l"}, {"x^2 + 3*y^2 - 1", "l*x - 1 + y", "l*y - 2 + x"});
    const auto total = track_all(s, TrackerConfig{}, RandomSource(4));
    s.variable_groups = {{0, 1}, {2}};
    const auto product = track_all(s, TrackerConfig{}, RandomSource(4));
    EXPECT_EQ(product.paths, multihomogeneous_bound(s));
    EXPECT_LT(product.paths, total.paths);
    ASSERT_EQ(total.nonsingular, product.nonsingular);
    for (std::size_t i = 0; i < total.nonsingular; ++i)
        EXPECT_LT(detail::relative_distance(total.solutions[i].point, product.solutions[i].point), 1e-8);
}

TEST(TrackAll, ThreadCountDoesNotChangeResult) {
    RandomSource rng(8);
    SquareSystem s;
    s.variables = {"a", "b", "c"};
    for (int i = 0; i < 3; ++i) s.polys.push_back(dense_random(s.variables, 2, rng));
    TrackerConfig one, many;
    many.threads = 4;
    const auto r1 = track_all(s, one, RandomSource(1));
    const auto r4 = track_all(s, many, RandomSource(1));
    ASSERT_EQ(r1.solutions.size(), r4.solutions.size());
    for (std::size_t i = 0; i < r1.solutions.size(); ++i) {
        EXPECT_EQ(r1.solutions[i].point, r4.solutions[i].point);
        EXPECT_EQ(r1.solutions[i].status, r4.solutions[i].status);
    }
}

TEST(TrackAll, InconsistentSystemHasNoSolutions) {
    const auto s = make_system({"x", "y"}, {"x + y - 1", "x + y - 2"});
    const auto set = track_all(s, TrackerConfig{}, RandomSource(2));
    EXPECT_EQ(set.nonsingular, 0u);
    EXPECT_EQ(set.paths, 1u);
}
