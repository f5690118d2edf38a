#include "sopkit/parser.hpp"
#include "sopkit/structure.hpp"
#include "sopkit/instance.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sopkit;

namespace {

FiniteStructure chain(int n)
{
    FiniteStructure M(Signature::dlo());
    for (int i = 0; i < n; ++i)
        M.add_element(i);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            M.add_fact(0, {i, j});
    return M;
}

} // namespace

TEST(Parser, AtomicTemplate)
{
    auto t = parse_formula("E(x0,y0) ; vars x0 | y0", Signature::equivalence());
    EXPECT_EQ(t->object_arity(), 1);
    EXPECT_EQ(t->param_arity(), 1);
    EXPECT_EQ(t->matrix().kind, Formula::Kind::Atom);
}

TEST(Parser, InfixConjunction)
{
    auto t = parse_formula("y0 < x0 & x0 < y1 ; vars x0 | y0 y1", Signature::dlo());
    EXPECT_EQ(t->object_arity(), 1);
    EXPECT_EQ(t->param_arity(), 2);
    ASSERT_EQ(t->matrix().kind, Formula::Kind::And);
    EXPECT_EQ(t->matrix().children.size(), 2u);
}

TEST(Parser, SyntaxErrorOffset)
{
    try {
        parse_formula("E(x0,", Signature::equivalence());
        FAIL() << "expected a parse error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
        EXPECT_EQ(e.offset(), 5u);
    }
}

TEST(Parser, UnknownSymbolAndArity)
{
    try {
        parse_formula("S(x0,y0)", Signature::equivalence());
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::UnknownSymbol);
    }
    try {
        parse_formula("E(x0,y0,y1)", Signature::equivalence());
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::Arity);
        EXPECT_EQ(e.offset(), 0u);
    }
}

TEST(Parser, DefaultBlocksByPrefix)
{
    auto t = parse_formula("y10 < x0 & y2 < x0", Signature::dlo());
    ASSERT_EQ(t->param_vars().size(), 2u);
    EXPECT_EQ(t->param_vars()[0], "y2");
    EXPECT_EQ(t->param_vars()[1], "y10");
}

TEST(Parser, ExistsBlock)
{
    auto t = parse_formula("exists u . E(x0,u) & R(u,y0)", Signature::feq());
    EXPECT_TRUE(t->has_exists());
    EXPECT_EQ(t->bound_count(), 1);
    EXPECT_THROW(parse_formula("E(x0,y0) & exists u . R(u,y0)", Signature::feq()), ParseError);
}

// Random templates over the T_feq signature (relations, a partial function,
// equality and definedness), normalized once by parsing.
namespace {

Term random_term(std::mt19937 &rng, int nvars, int depth)
{
    std::uniform_int_distribution<int> coin(0, 3);
    if (depth > 0 && coin(rng) == 0)
        return Term::apply(0, {random_term(rng, nvars, depth - 1), random_term(rng, nvars, depth - 1)});
    return Term::variable(std::uniform_int_distribution<int>(0, nvars - 1)(rng));
}

Formula random_formula(std::mt19937 &rng, int nvars, int depth)
{
    const int pick = std::uniform_int_distribution<int>(0, depth > 0 ? 8 : 4)(rng);
    switch (pick) {
    case 0: return Formula::atom(0, {random_term(rng, nvars, 1)});
    case 1: return Formula::atom(2, {random_term(rng, nvars, 1), random_term(rng, nvars, 1)});
    case 2: return Formula::atom(3, {random_term(rng, nvars, 1), random_term(rng, nvars, 1)});
    case 3: return Formula::equal(random_term(rng, nvars, 1), random_term(rng, nvars, 1));
    case 4: return Formula::defined(random_term(rng, nvars, 1));
    case 5: return Formula::negation(random_formula(rng, nvars, depth - 1));
    case 6:
    case 7: {
        std::vector<Formula> kids;
        const int n = std::uniform_int_distribution<int>(2, 3)(rng);
        for (int i = 0; i < n; ++i)
            kids.push_back(random_formula(rng, nvars, depth - 1));
        return pick == 6 ? Formula::conjunction(std::move(kids)) : Formula::disjunction(std::move(kids));
    }
    default: return pick % 2 ? Formula::truth() : Formula::falsity();
    }
}

} // namespace

TEST(Parser, PrintParseRoundTripRandom)
{
    std::mt19937 rng(11);
    const auto sig = Signature::feq();
    for (int i = 0; i < 400; ++i) {
        const int depth = i % 5;
        const bool with_exists = i % 3 == 0;
        std::vector<std::string> bound;
        if (with_exists)
            bound = {"u0"};
        const int nvars = 3 + (with_exists ? 1 : 0);
        auto raw = std::make_shared<FormulaTemplate>(sig, std::vector<std::string>{"x0"},
                                                     std::vector<std::string>{"y0", "y1"}, bound,
                                                     random_formula(rng, nvars, depth));
        auto normal = parse_formula(raw->text(), sig);
        auto again = parse_formula(normal->text(), sig);
        EXPECT_EQ(*again, *normal) << raw->text();
        EXPECT_EQ(again->text(), normal->text());
        EXPECT_EQ(normal->object_vars(), raw->object_vars());
        EXPECT_EQ(normal->param_vars(), raw->param_vars());
    }
}

TEST(Evaluate, LinearOrder)
{
    FiniteStructure M = chain(2);
    auto f = parse_formula("x0 < y0", Signature::dlo());
    const std::vector<Element> ab{0, 1}, ba{1, 0};
    EXPECT_TRUE(evaluate(M, *f, ab));
    EXPECT_FALSE(evaluate(M, *f, ba));
    const std::vector<Element> short_assignment{0};
    EXPECT_THROW(evaluate(M, *f, short_assignment), std::exception);
}

TEST(Evaluate, PartialFunctionIsDefinedAndEqual)
{
    FiniteStructure M(Signature::feq());
    M.add_element(0);
    M.add_element(1);
    M.add_element(2);
    M.add_fact(0, {0}); // Q
    M.add_fact(0, {2});
    M.add_fact(1, {1}); // P
    M.add_fact(2, {0, 0});
    M.add_fact(2, {2, 2});
    M.add_fact(3, {0, 1});
    M.set_value(0, {0, 1}, 0);
    auto eq = parse_formula("F(x0,y0) = x0", Signature::feq());
    auto neq = parse_formula("!(F(x0,y0) = x0) ; vars x0 | y0", Signature::feq());
    auto def = parse_formula("def(F(x0,y0))", Signature::feq());
    const std::vector<Element> defined{0, 1}, undefined{2, 1};
    EXPECT_TRUE(evaluate(M, *eq, defined));
    EXPECT_TRUE(evaluate(M, *def, defined));
    EXPECT_FALSE(evaluate(M, *eq, undefined));
    EXPECT_FALSE(evaluate(M, *def, undefined));
    // An undefined side makes the atom false, so its negation holds.
    EXPECT_TRUE(evaluate(M, *neq, undefined));
}

// Hand enumeration of witnesses for an existential over a 3-element T_feq model.
TEST(Evaluate, ExistentialAgainstHandEnumeration)
{
    FiniteStructure M(Signature::feq());
    for (int i = 0; i < 3; ++i)
        M.add_element(i);
    M.add_fact(0, {0});
    M.add_fact(0, {1});
    M.add_fact(1, {2});
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {0, 1}, {1, 0}})
        M.add_fact(2, {a, b});
    M.add_fact(3, {1, 2});
    auto f = parse_formula("exists u . E(x0,u) & R(u,y0)", Signature::feq());
    for (Element x : M.universe())
        for (Element y : M.universe()) {
            bool expected = false;
            for (Element u : M.universe())
                expected = expected || (M.holds(2, std::vector<Element>{x, u}) && M.holds(3, std::vector<Element>{u, y}));
            const std::vector<Element> xy{x, y};
            EXPECT_EQ(evaluate(M, *f, xy), expected) << x << "," << y;
        }
}

// Existential-positive formulas survive passing to a superstructure.
TEST(Evaluate, ExistentialPositiveMonotone)
{
    std::mt19937 rng(3);
    const auto sig = Signature::random_graph();
    const std::vector<std::string> forms = {"exists u . R(x0,u) & R(u,y0)", "R(x0,y0) | x0 = y0",
                                            "exists u v . R(x0,u) & R(u,v) & R(v,y0)"};
    for (int trial = 0; trial < 200; ++trial) {
        FiniteStructure N(sig);
        const int n = 5;
        for (int i = 0; i < n; ++i)
            N.add_element(i);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng() % 2) {
                    N.add_fact(0, {i, j});
                    N.add_fact(0, {j, i});
                }
        const FiniteStructure M = N.restrict_to({0, 1, 2});
        for (const auto &text : forms) {
            auto f = parse_formula(text, sig);
            ASSERT_TRUE(is_existential_positive(f->matrix()));
            for (Element x : M.universe())
                for (Element y : M.universe()) {
                    const std::vector<Element> xy{x, y};
                    if (evaluate(M, *f, xy))
                        EXPECT_TRUE(evaluate(N, *f, xy)) << text;
                }
        }
    }
}

TEST(Substitute, Shapes)
{
    auto phi = parse_formula("E(x0,y0)", Signature::equivalence());
    auto a = substitute(phi, {7});
    EXPECT_FALSE(a.negated);
    EXPECT_EQ(a.shape, FormulaInstance::Shape::Plain);
    EXPECT_EQ(a.object_arity(), 1);
    auto na = substitute(phi, {7}, false);
    EXPECT_TRUE(na.negated);
    auto pair = pair_instance(phi, {7});
    EXPECT_TRUE(pair.is_pair());
    EXPECT_EQ(pair.object_arity(), phi->param_arity());
    EXPECT_EQ(a, substitute(phi, {7}));
    EXPECT_EQ(a.tmpl.get(), phi.get());
    EXPECT_THROW(substitute(phi, {1, 2}), std::exception);
}

TEST(Structure, JsonRoundTrip)
{
    FiniteStructure M(Signature::feq());
    M.add_element(0);
    M.add_element(4);
    M.add_fact(0, {0});
    M.add_fact(1, {4});
    M.add_fact(2, {0, 0});
    M.add_fact(3, {0, 4});
    M.set_value(0, {0, 4}, 0);
    auto back = FiniteStructure::from_json(M.to_json(), Signature::feq());
    EXPECT_EQ(back, M);
    EXPECT_EQ(M.to_json()["functions"]["F"][0], nlohmann::json({0, 4, 0}));
}
