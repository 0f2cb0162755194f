#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sentinel/dlgp.hpp"

using namespace sentinel;

TEST(Dlgp, ParsesARuleWithAnExistential) {
    auto doc = parse_dlgp("[r1] typeA(X,U), typeA(U,X) :- typeB(X,Y).");
    ASSERT_EQ(doc.rules.size(), 1u);
    const Rule& r = doc.rules[0];
    EXPECT_EQ(r.label(), "r1");
    EXPECT_EQ(r.head().size(), 2u);
    ASSERT_EQ(r.existentials().size(), 1u);
    EXPECT_EQ(base_name(r.existentials()[0].name()), "U");
}

TEST(Dlgp, ParsesAFact) {
    auto doc = parse_dlgp("typeB(t,r).");
    ASSERT_EQ(doc.facts.size(), 1u);
    EXPECT_EQ(doc.facts[0], Atom("typeB", {Term::constant("t"), Term::constant("r")}));
    EXPECT_TRUE(doc.rules.empty());
}

TEST(Dlgp, EmptyDocument) {
    auto doc = parse_dlgp("");
    EXPECT_TRUE(doc.facts.empty());
    EXPECT_TRUE(doc.rules.empty());
    EXPECT_EQ(serialize_dlgp(doc), "");
}

TEST(Dlgp, CommentsAndMultiAtomFacts) {
    auto doc = parse_dlgp("% header\np(a,b), p(b,c). % trailing\n[r] q(X) :- p(X,Y).\n");
    EXPECT_EQ(doc.facts.size(), 2u);
    EXPECT_EQ(doc.rules.size(), 1u);
    ASSERT_EQ(doc.rule_lines.size(), 1u);
    EXPECT_EQ(doc.rule_lines[0], 3u);
}

TEST(Dlgp, UnlabelledRulesAreNumbered) {
    auto doc = parse_dlgp("q(X) :- p(X).\nr(X) :- q(X).\n");
    ASSERT_EQ(doc.rules.size(), 2u);
    EXPECT_NE(doc.rules[0].label(), doc.rules[1].label());
}

TEST(Dlgp, RulesAreStandardizedApart) {
    auto doc = parse_dlgp("[a] q(X) :- p(X).\n[b] r(X) :- q(X).\n");
    EXPECT_NE(doc.rules[0].universals()[0], doc.rules[1].universals()[0]);
    EXPECT_EQ(base_name(doc.rules[1].universals()[0].name()), "X");
}

TEST(Dlgp, DigitsStartConstants) {
    auto doc = parse_dlgp("p(1,a2).");
    EXPECT_TRUE(doc.facts[0].args[0].is_constant());
}

TEST(Dlgp, ArityConflictReportsTheLine) {
    try {
        parse_dlgp("p(a).\n\n[r] q(X) :- p(X,Y).\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Dlgp, VariableInAFactIsAnError) {
    try {
        parse_dlgp("p(a).\np(X).\n");
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Dlgp, UnterminatedStatementIsAnError) {
    EXPECT_THROW(parse_dlgp("p(a)"), ParseError);
    EXPECT_THROW(parse_dlgp("[r] q(X) :- p(X)"), ParseError);
    EXPECT_THROW(parse_dlgp("[r] q(X) :- ."), ParseError);
    EXPECT_THROW(parse_dlgp("p(a"), ParseError);
}

TEST(Dlgp, SerializesOneFact) {
    auto doc = parse_dlgp("typeB(t,r).");
    EXPECT_EQ(serialize_dlgp(doc), "typeB(t,r).\n");
}

TEST(Dlgp, RegressionSetsRoundTrip) {
    for (const auto& name : oracle::regression_sets()) {
        auto doc = oracle::load(name);
        std::string text = serialize_dlgp(doc);
        auto back = parse_dlgp(text);
        EXPECT_EQ(back.facts, doc.facts) << name;
        ASSERT_EQ(back.rules.size(), doc.rules.size()) << name;
        for (std::size_t i = 0; i < doc.rules.size(); ++i) EXPECT_EQ(back.rules[i].str(), doc.rules[i].str()) << name;
    }
}

TEST(Dlgp, R1SerializesToTwoLabelledLines) {
    std::string text = serialize_dlgp(oracle::load("r1"));
    EXPECT_EQ(text,
              "[r1] typeA(X,U), typeA(U,X) :- typeB(X,Y).\n"
              "[r2] typeB(Z,V) :- typeB(X,Y), typeA(X,Z), typeA(Z,X).\n");
}

TEST(Dlgp, MissingFileIsReported) { EXPECT_ANY_THROW(parse_dlgp_file("/nonexistent/x.dlgp")); }
