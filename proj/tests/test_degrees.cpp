#include <gtest/gtest.h>

#include "mldeg/degrees.hpp"
#include "mldeg/parser.hpp"

using namespace mldeg;

namespace {

BiPoly bipoly(const std::string& text) { return BiPoly::from_poly(parse_poly(text, {"p", "u"})); }

ModelSpec model_of(std::vector<std::string> vars, const std::vector<std::string>& gens, std::size_t dim) {
    ModelSpec m;
    m.variables = std::move(vars);
    for (const auto& g : gens) m.generators.push_back(parse_poly(g, m.variables));
    m.dim = dim;
    return m;
}

ModelSpec y2() { return model_of({"x1", "x2", "x3"}, {"(1 - x1 - x2 - x3)*x3 - x1*x2"}, 2); }

using Counts = std::vector<std::size_t>;

} // namespace

TEST(Assemble, PlacesCoefficientsByUDegree) {
    EXPECT_EQ(assemble_B({1, 2, 2}, 3, 2), bipoly("p^3 + 2*p^2*u + 2*p*u^2"));
    EXPECT_EQ(assemble_S({1, 4, 2}, 3, 2), bipoly("p^3 + 4*p^2*u + 2*p*u^2"));
    EXPECT_EQ(assemble_B({5, 5, 5, 3}, 4, 3), bipoly("5*p^4 + 5*p^3*u + 5*p^2*u^2 + 3*p*u^3"));
    EXPECT_EQ(assemble_B({0, 0, 0, 1}, 3, 3), bipoly("u^3"));
    EXPECT_EQ(assemble_B({0, 0}, 2, 1), BiPoly());
}

TEST(Assemble, RejectsBadShapes) {
    EXPECT_THROW(assemble_B({1, 2}, 3, 2), DomainError);
    EXPECT_THROW(assemble_S({1, 2, 3, 4}, 2, 3), DomainError);
}

TEST(ConjecturedTensor, SmallOrders) {
    EXPECT_EQ(conjectured_B_tensor(1), bipoly("p + u"));
    EXPECT_EQ(conjectured_B_tensor(2), bipoly("p^3 + 2*p^2*u + 2*p*u^2"));
    EXPECT_EQ(conjectured_B_tensor(3), bipoly("p^7 + 3*p^6*u + 6*p^5*u^2 + 6*p^4*u^3"));
    EXPECT_EQ(conjectured_B_tensor(4), bipoly("p^15 + 4*p^14*u + 12*p^13*u^2 + 24*p^12*u^3 + 24*p^11*u^4"));
    EXPECT_THROW(conjectured_B_tensor(0), DomainError);
}

TEST(ConjecturedTensor, TransformsToIntegerS) {
    const auto s3 = s_from_b(conjectured_B_tensor(3), 7, 3);
    EXPECT_EQ(s3, bipoly("p^7 + 15*p^6*u + 18*p^5*u^2 + 6*p^4*u^3"));
    const auto s4 = s_from_b(conjectured_B_tensor(4), 15, 4);
    EXPECT_EQ(s4, bipoly("p^15 + 64*p^14*u + 132*p^13*u^2 + 96*p^12*u^3 + 24*p^11*u^4"));
}

TEST(ChernMather, SignAlternatesFromTheTop) {
    EXPECT_EQ(chern_mather_from_master({0, 0, 0, 1}), (std::vector<long long>{0, 0, 0, 1}));
    EXPECT_EQ(chern_mather_from_master({1}), (std::vector<long long>{1}));
    EXPECT_EQ(chern_mather_from_master({1, 1}), (std::vector<long long>{-1, 1}));
    EXPECT_EQ(chern_mather_from_master({3, 4, 2}), (std::vector<long long>{3, -4, 2}));
    EXPECT_TRUE(chern_mather_from_master({}).empty());
}

TEST(Counts, IndependenceSurface) {
    EXPECT_EQ(ml_degree(y2()), 1u);
    EXPECT_EQ(ml_bidegrees(y2()), (Counts{1, 2, 2}));
    EXPECT_EQ(sectional_ml_degrees(y2()), (Counts{1, 4, 2}));
    EXPECT_EQ(degree_of_variety(y2()), 2u);
}

TEST(Counts, ComputeDegreesAssemblesBothPolynomials) {
    const auto rep = compute_degrees(y2(), DegreeRequest{true, true, true});
    ASSERT_TRUE(rep.B && rep.S && rep.degree);
    EXPECT_EQ(*rep.B, bipoly("p^3 + 2*p^2*u + 2*p*u^2"));
    EXPECT_EQ(*rep.S, bipoly("p^3 + 4*p^2*u + 2*p*u^2"));
    EXPECT_EQ(*rep.degree, 2u);
    EXPECT_EQ(rep.records.size(), 7u);
    for (const auto& r : rep.records) {
        EXPECT_TRUE(r.agreed);
        EXPECT_EQ(r.runs.size(), 3u);
    }
}

TEST(MasterBidegrees, TorusPointLine) {
    const auto torus = master_bidegrees(model_of({"x1", "x2", "x3"}, {}, 3));
    EXPECT_EQ(torus.v, (Counts{0, 0, 0, 1}));
    EXPECT_EQ(torus.cMa, (std::vector<long long>{0, 0, 0, 1}));

    const auto point = master_bidegrees(model_of({"x1", "x2", "x3"}, {"x1 - 2", "x2 - 3", "x3 - 5"}, 0));
    EXPECT_EQ(point.v, (Counts{1}));

    // On x2 = 1 - x1 the master function x1^w1 (1 - x1)^w2 has one critical
    // point, and a generic slice meets the line once.
    const auto line = master_bidegrees(model_of({"x1", "x2"}, {"x1 + x2 - 1"}, 1));
    EXPECT_EQ(line.v, (Counts{1, 1}));
    EXPECT_EQ(line.cMa, (std::vector<long long>{-1, 1}));
}

TEST(Agreement, RecordsEverySeed) {
    auto m = y2();
    m.seed = 40;
    const auto rec = count_with_agreement(m, Quantity::sectional, 1, ComputeOptions{4, 1});
    ASSERT_EQ(rec.runs.size(), 4u);
    for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(rec.runs[r].seed, 40 + r);
    EXPECT_TRUE(rec.agreed);
    EXPECT_EQ(rec.value, 4u);
    EXPECT_THROW(count_with_agreement(m, Quantity::sectional, 1, ComputeOptions{0, 1}), ConfigError);
}

TEST(Agreement, DisagreementNamesTheCount) {
    CountRecord r;
    r.quantity = Quantity::ml_bidegree;
    r.index = 2;
    r.agreed = false;
    r.runs.resize(2);
    r.runs[0].count = 7;
    r.runs[1].count = 6;
    try {
        require_agreement({r});
        FAIL() << "expected SeedDisagreement";
    } catch (const SeedDisagreement& e) {
        EXPECT_NE(std::string(e.what()).find("ml_bidegree[2] counts 7 6"), std::string::npos);
        EXPECT_EQ(e.records().size(), 1u);
    }
}

TEST(Determinism, ThreadCountDoesNotChangeDiagnostics) {
    for (std::size_t i = 0; i <= 2; ++i) {
        const auto one = run_count(y2(), Quantity::sectional, i, 9, 1);
        const auto three = run_count(y2(), Quantity::sectional, i, 9, 3);
        EXPECT_EQ(one.count, three.count);
        EXPECT_EQ(one.nonsingular, three.nonsingular);
        EXPECT_EQ(one.singular, three.singular);
        EXPECT_EQ(one.failed, three.failed);
        EXPECT_EQ(one.duplicates, three.duplicates);
        EXPECT_EQ(one.retracked, three.retracked);
    }
}
