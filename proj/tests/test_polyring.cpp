#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <fstream>
#include <sstream>
#include <tuple>

#include "mldeg/parser.hpp"
#include "mldeg/poly.hpp"
#include "mldeg/random_source.hpp"

using namespace mldeg;

namespace {

std::vector<std::string> vars(std::initializer_list<const char*> names) { return {names.begin(), names.end()}; }

const auto X4 = vars({"x1", "x2", "x3", "x4"});
const auto X5 = vars({"x1", "x2", "x3", "x4", "x5"});

Poly random_poly(const std::vector<std::string>& v, RandomSource& rng, int max_deg, int terms, int coeff_bound) {
    Poly p(v);
    for (int k = 0; k < terms; ++k) {
        Exponent e(v.size(), 0);
        int budget = static_cast<int>(rng.uniform_int(0, max_deg));
        while (budget-- > 0) e[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(v.size()) - 1))]++;
        const auto num = rng.uniform_int(-coeff_bound, coeff_bound);
        const auto den = rng.uniform_int(1, 7);
        p.add_term(e, make_rational(static_cast<long>(num), static_cast<unsigned long>(den)));
    }
    return p;
}

std::vector<Complex> random_point(std::size_t n, RandomSource& rng) {
    std::vector<Complex> z;
    for (std::size_t i = 0; i < n; ++i) z.push_back(rng.complex_box() * 1.5);
    return z;
}

} // namespace

TEST(Parse, BinomialMinor) {
    const Poly p = parse_poly("x1*x4 - x2*x3", X4);
    ASSERT_EQ(p.num_terms(), 2u);
    EXPECT_EQ(p.coefficient({1, 0, 0, 1}), 1);
    EXPECT_EQ(p.coefficient({0, 1, 1, 0}), -1);
}

TEST(Parse, SquareOfSum) {
    const auto v = vars({"x1", "x2"});
    const Poly p = parse_poly("(x1+x2)^2", v);
    EXPECT_EQ(p.num_terms(), 3u);
    EXPECT_EQ(p.coefficient({2, 0}), 1);
    EXPECT_EQ(p.coefficient({1, 1}), 2);
    EXPECT_EQ(p.coefficient({0, 2}), 1);
}

TEST(Parse, CubicMatchesSymbolicExpansion) {
    // Term list from an independent symbolic expansion (sympy).
    const std::vector<std::pair<Exponent, int>> expected = {
        {{3, 0, 0, 0, 0}, -1}, {{2, 1, 0, 0, 0}, -2}, {{2, 0, 1, 0, 0}, -2}, {{2, 0, 0, 1, 0}, -2},
        {{1, 2, 0, 0, 0}, -1}, {{1, 1, 1, 0, 0}, -2}, {{1, 1, 0, 1, 0}, -2}, {{1, 0, 2, 0, 0}, -1},
        {{1, 0, 1, 1, 0}, -2}, {{1, 0, 0, 2, 0}, -1}, {{0, 3, 0, 0, 0}, 1},  {{0, 2, 1, 0, 0}, 3},
        {{0, 2, 0, 1, 0}, 3},  {{0, 2, 0, 0, 1}, 3},  {{0, 1, 2, 0, 0}, 3},  {{0, 1, 1, 1, 0}, 6},
        {{0, 1, 1, 0, 1}, 6},  {{0, 1, 0, 2, 0}, 3},  {{0, 1, 0, 1, 1}, 6},  {{0, 1, 0, 0, 2}, 3},
        {{0, 0, 3, 0, 0}, 1},  {{0, 0, 2, 1, 0}, 3},  {{0, 0, 2, 0, 1}, 3},  {{0, 0, 1, 2, 0}, 3},
        {{0, 0, 1, 1, 1}, 6},  {{0, 0, 1, 0, 2}, 3},  {{0, 0, 0, 3, 0}, 1},  {{0, 0, 0, 2, 1}, 3},
        {{0, 0, 0, 1, 2}, 3},  {{0, 0, 0, 0, 3}, 1}};
    const Poly p = parse_poly("(x2+x3+x4+x5)^3 - (x1)*(x1+x2+x3+x4)^2", X5);
    ASSERT_EQ(p.num_terms(), expected.size());
    for (const auto& [e, c] : expected) EXPECT_EQ(p.coefficient(e), c);
}

TEST(Parse, RationalLiteralsAndWhitespace) {
    const auto v = vars({"a", "b"});
    const Poly p = parse_poly("  3/6 * a ^ 2 - -2/4*b + 7 ", v);
    EXPECT_EQ(p.coefficient({2, 0}), make_rational(1, 2));
    EXPECT_EQ(p.coefficient({0, 1}), make_rational(1, 2));
    EXPECT_EQ(p.coefficient({0, 0}), 7);
}

TEST(Parse, Errors) {
    const auto v = vars({"x", "y"});
    auto position_of = [&](const char* text) -> std::size_t {
        try {
            parse_poly(text, v);
        } catch (const ParseError& e) {
            return e.position();
        }
        ADD_FAILURE() << "no error for " << text;
        return 0;
    };
    EXPECT_EQ(position_of("x + z"), 4u);       // unknown identifier
    EXPECT_EQ(position_of("x^-2"), 2u);        // negative exponent
    EXPECT_EQ(position_of("x^1.5"), 2u);       // non-integer exponent
    EXPECT_EQ(position_of("(x + y"), 6u);      // missing ')'
    EXPECT_EQ(position_of("x y"), 2u);         // implicit multiplication
    EXPECT_EQ(position_of("x + "), 4u);        // dangling operator
    EXPECT_EQ(position_of("1/0"), 2u);         // zero denominator
    EXPECT_THROW(parse_poly("x^y", v), ParseError);
    EXPECT_THROW(parse_poly("", v), ParseError);
}

TEST(Differentiate, Examples) {
    const auto v = vars({"x1", "x2"});
    EXPECT_EQ(differentiate(parse_poly("x1^2*x2", v), "x1"), parse_poly("2*x1*x2", v));
    EXPECT_TRUE(differentiate(parse_poly("17/3", v), "x1").is_zero());
    EXPECT_EQ(differentiate(parse_poly("x1*x4 - x2*x3", X4), "x4"), parse_poly("x1", X4));
    EXPECT_THROW(differentiate(parse_poly("x1", v), "q"), DomainError);
}

TEST(EvalComplex, Examples) {
    const Poly minor = parse_poly("x1*x4 - x2*x3", X4);
    const std::vector<Complex> rank_one{1, 2, 3, 6};
    EXPECT_EQ(minor.eval_complex(rank_one), Complex(0));

    const auto v = vars({"x1", "x2"});
    const std::vector<Complex> half{0.5, 0.5};
    EXPECT_EQ(parse_poly("x1+x2-1", v).eval_complex(half), Complex(0));

    const Poly f2 = parse_poly("(x2+x3+x4+x5)^3 - (x1)*(x1+x2+x3+x4)^2", X5);
    const std::vector<Complex> ones(5, 1.0);
    EXPECT_EQ(f2.eval_complex(ones), Complex(48));

    EXPECT_THROW(minor.eval_complex(half), DomainError);
}

TEST(RandomAffineForms, EmptyRequest) {
    RandomSource rng(1);
    EXPECT_TRUE(random_affine_forms(vars({"x1", "x2", "x3"}), 0, rng).empty());
}

TEST(RandomAffineForms, GoldenSeed) {
    RandomSource rng(42, 7);
    const auto forms = random_affine_forms(vars({"x1", "x2", "x3"}), 2, rng);
    std::ostringstream os;
    for (const auto& f : forms) os << f.to_string() << '\n';
    std::ifstream golden(MLDEG_GOLDEN_DIR "/affine_forms_seed42_stream7.txt");
    ASSERT_TRUE(golden.good());
    std::stringstream expected;
    expected << golden.rdbuf();
    EXPECT_EQ(os.str(), expected.str());

    RandomSource again(42, 7);
    const auto forms2 = random_affine_forms(vars({"x1", "x2", "x3"}), 2, again);
    EXPECT_EQ(forms, forms2);
}

TEST(RandomAffineForms, GeneralPosition) {
    const auto v = vars({"x1", "x2", "x3", "x4"});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomSource rng(seed);
        const auto forms = random_affine_forms(v, v.size() + 1, rng);
        Eigen::MatrixXd a(static_cast<Eigen::Index>(forms.size()), static_cast<Eigen::Index>(v.size()));
        for (std::size_t k = 0; k < forms.size(); ++k) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                Exponent e(v.size(), 0);
                e[i] = 1;
                const Rational c = forms[k].coefficient(e);
                EXPECT_LE(abs(c.get_num()), kNumeratorBound);
                EXPECT_GE(c.get_den(), 1);
                EXPECT_LE(c.get_den(), kDenominatorBound);
                a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = c.get_d();
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        EXPECT_EQ(lu.rank(), static_cast<Eigen::Index>(v.size())) << "seed " << seed;
    }
}

TEST(RandomSource, StreamsAreReproducibleAndDistinct) {
    RandomSource a(5, 1), b(5, 1), c(5, 2);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        (void)c;
    }
    RandomSource d(5, 1), e(5, 2);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += d.next_u64() == e.next_u64();
    EXPECT_EQ(same, 0);
    RandomSource f(9);
    for (int i = 0; i < 10000; ++i) {
        const auto k = f.uniform_int(-3, 3);
        ASSERT_GE(k, -3);
        ASSERT_LE(k, 3);
    }
}

TEST(PolyProperties, RingAxiomsAndLeibniz) {
    RandomSource rng(2024);
    const auto v = vars({"a", "b", "c"});
    for (int trial = 0; trial < 60; ++trial) {
        const Poly p = random_poly(v, rng, 4, 5, 9);
        const Poly q = random_poly(v, rng, 4, 5, 9);
        const Poly r = random_poly(v, rng, 3, 4, 9);
        EXPECT_EQ((p + q) * r, p * r + q * r);
        EXPECT_EQ(p * q, q * p);
        EXPECT_TRUE((p - p).is_zero());
        for (const auto& name : v) {
            EXPECT_EQ(differentiate(p + q, name), differentiate(p, name) + differentiate(q, name));
            EXPECT_EQ(differentiate(p * q, name), differentiate(p, name) * q + p * differentiate(q, name));
        }
    }
}

TEST(PolyProperties, SerializeParseFixedPoint) {
    RandomSource rng(77);
    const auto v = vars({"x1", "x2", "y_3"});
    for (int trial = 0; trial < 100; ++trial) {
        const Poly p = random_poly(v, rng, 5, 6, 50);
        const std::string text = p.to_string();
        const Poly back = parse_poly(text, v);
        EXPECT_EQ(back, p) << text;
        EXPECT_EQ(back.to_string(), text);
    }
}

TEST(PolyProperties, EvaluationIsMultiplicative) {
    RandomSource rng(31);
    const auto v = vars({"a", "b", "c"});
    for (int trial = 0; trial < 100; ++trial) {
        const Poly p = random_poly(v, rng, 4, 5, 20);
        const Poly q = random_poly(v, rng, 4, 5, 20);
        const auto z = random_point(v.size(), rng);
        const auto ep = p.eval_complex_detailed(z), eq = q.eval_complex_detailed(z);
        const auto epq = (p * q).eval_complex(z);
        // Both sides carry errors bounded by (3 deg + 3) u times the magnitudes.
        const double scale = ep.magnitude * eq.magnitude;
        EXPECT_LE(std::abs(epq - ep.value * eq.value), 1e-13 * std::max(scale, 1e-300));
    }
}

TEST(PolyProperties, ExactVersusFloatingAgreement) {
    // Dyadic points are exact in binary floating point, so the only error is evaluation error.
    RandomSource rng(99);
    const auto v = vars({"a", "b", "c", "d"});
    for (int trial = 0; trial < 200; ++trial) {
        const Poly p = random_poly(v, rng, 8, 8, 1000);
        std::vector<Rational> exact;
        std::vector<Complex> floating;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto k = rng.uniform_int(-512, 512);
            exact.push_back(make_rational(static_cast<long>(k), 256));
            floating.emplace_back(static_cast<double>(k) / 256.0, 0.0);
        }
        const Rational value = p.eval_exact(exact);
        const auto ev = p.eval_complex_detailed(floating);
        const double err = std::abs(ev.value - Complex(value.get_d(), 0.0));
        EXPECT_LE(err, 1e-12 * std::max(std::abs(value.get_d()), ev.magnitude)) << p.to_string();
    }
}
