#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sentinel/dlgp.hpp"
#include "sentinel/hom.hpp"

using namespace sentinel;

namespace {

Term c(const char* n) { return Term::constant(n); }

Substitution subst(const Rule& r, std::initializer_list<std::pair<const char*, Term>> binds) {
    Substitution h;
    for (const auto& [name, t] : binds)
        for (Term v : r.universals())
            if (base_name(v.name()) == name) h.bind(v, t);
    return h;
}

}  // namespace

TEST(Hom, TriangleHasThreeRotations) {
    auto doc = oracle::load("triangle");
    const Rule& r = doc.rules[0];
    Instance I = doc.database();
    auto hs = all_homomorphisms(r.body(), I);
    ASSERT_EQ(hs.size(), 3u);
    std::set<std::string> got;
    for (const auto& h : hs) got.insert(h.apply(r.body()[0]).str());
    EXPECT_EQ(got, (std::set<std::string>{"p(a,b)", "p(b,c)", "p(c,a)"}));
}

TEST(Hom, TriangleTriggerActiveness) {
    auto doc = oracle::load("triangle");
    const Rule& r = doc.rules[0];
    Instance I = doc.database();
    EXPECT_FALSE(is_active_trigger(r, subst(r, {{"X", c("a")}, {"Y", c("b")}, {"Z", c("c")}}), I));
    EXPECT_TRUE(is_active_trigger(r, subst(r, {{"X", c("c")}, {"Y", c("a")}, {"Z", c("b")}}), I));
}

TEST(Hom, SingleAtom) {
    Instance I;
    I.add(Atom("p", {c("a")}));
    auto hs = all_homomorphisms(std::vector<Atom>{Atom("p", {Term::variable("X")})}, I);
    ASSERT_EQ(hs.size(), 1u);
    EXPECT_EQ(hs[0].apply(Term::variable("X")), c("a"));
}

TEST(Hom, RepeatedVariableNeedsEqualTerms) {
    Instance I;
    I.add(Atom("t", {c("a"), c("b")}));
    Term x = Term::variable("X");
    EXPECT_TRUE(all_homomorphisms(std::vector<Atom>{Atom("t", {x, x})}, I).empty());
    I.add(Atom("t", {c("b"), c("b")}));
    EXPECT_EQ(all_homomorphisms(std::vector<Atom>{Atom("t", {x, x})}, I).size(), 1u);
}

TEST(Hom, DatalogTriggerWithPresentHeadIsInactive) {
    auto doc = parse_dlgp("[r] q(X) :- p(X).\np(a). q(a).");
    const Rule& r = doc.rules[0];
    EXPECT_FALSE(is_active_trigger(r, subst(r, {{"X", c("a")}}), doc.database()));
}

TEST(Hom, ApplyTriggerAddsSkolemAtoms) {
    auto doc = oracle::load("r1");
    const Rule& r1 = oracle::rule(doc, "r1");
    Instance I;
    I.add(Atom("typeB", {c("t"), c("r")}));
    auto added = apply_trigger(r1, subst(r1, {{"X", c("t")}, {"Y", c("r")}}), I, 1);
    ASSERT_EQ(added.size(), 2u);
    Term fu = Term::skolem("f_u^r1", {c("t")});
    EXPECT_EQ(I.atom(added[0]), Atom("typeA", {c("t"), fu}));
    EXPECT_EQ(I.atom(added[1]), Atom("typeA", {fu, c("t")}));
    EXPECT_EQ(I.first_derived_at(added[0]), 1);
    EXPECT_TRUE(apply_trigger(r1, subst(r1, {{"X", c("t")}, {"Y", c("r")}}), I, 2).empty());
    EXPECT_EQ(I.first_derived_at(added[0]), 1);
}

TEST(Hom, AccessControlDerivationStep) {
    auto doc = oracle::load("access_control");
    const Rule& r2 = oracle::rule(doc, "r2");
    Term fu = Term::skolem("f_u^r2", {c("a"), c("b")});
    Term fv = Term::skolem("f_v^r3", {c("a"), fu});
    Instance I;
    I.add(Atom("hasKey", {c("a"), fv}));
    auto added = apply_trigger(r2, subst(r2, {{"X", c("a")}, {"Y", fv}}), I, 3);
    Term top = Term::skolem("f_u^r2", {c("a"), fv});
    ASSERT_EQ(added.size(), 2u);
    EXPECT_EQ(I.atom(added[0]), Atom("enters", {c("a"), top}));
    EXPECT_EQ(I.atom(added[1]), Atom("keyOpens", {fv, top}));
}

TEST(Hom, TriggerRecordsTriggeringSteps) {
    auto doc = oracle::load("r1");
    const Rule& r2 = oracle::rule(doc, "r2");
    Instance I;
    I.add(Atom("typeB", {c("a"), c("b")}));
    I.add(Atom("typeA", {c("a"), c("c")}), 1);
    I.add(Atom("typeA", {c("c"), c("a")}), 2);
    auto ts = find_triggers(r2, I);
    ASSERT_EQ(ts.size(), 1u);
    EXPECT_TRUE(is_active_trigger(ts[0], I));
    EXPECT_EQ(ts[0].triggering_steps, (std::vector<int>{0, 1, 2}));
}

TEST(Hom, InactiveStaysInactiveAsTheInstanceGrows) {
    std::mt19937_64 rng(11);
    std::size_t checked = 0;
    for (int round = 0; round < 300; ++round) {
        auto doc = oracle::random_rules(rng, {});
        Instance I = oracle::random_database(rng, doc.rules, 3, 6);
        Instance J = I;
        Instance more = oracle::random_database(rng, doc.rules, 3, 6);
        for (const Atom& a : more.atoms()) J.add(a);
        for (const Rule& r : doc.rules)
            for (const auto& h : all_homomorphisms(r.body(), I)) {
                bool on_i = is_active_trigger(r, h, I);
                EXPECT_EQ(on_i, !oracle::head_satisfied(r, h, I));
                if (!on_i) {
                    EXPECT_FALSE(is_active_trigger(r, h, J));
                    ++checked;
                }
            }
    }
    EXPECT_GT(checked, 50u);
}

TEST(Hom, ProbeBudgetMarksTheSearchExhausted) {
    Instance I;
    for (int i = 0; i < 20; ++i) I.add(Atom("e", {Term::constant("n" + std::to_string(i)), c("m")}));
    SearchStats stats;
    SearchOptions o;
    o.stats = &stats;
    o.max_probes = 5;
    Term x = Term::variable("X"), y = Term::variable("Y");
    all_homomorphisms(std::vector<Atom>{Atom("e", {x, c("m")}), Atom("e", {y, c("m")})}, I, o);
    EXPECT_TRUE(stats.exhausted);
}
