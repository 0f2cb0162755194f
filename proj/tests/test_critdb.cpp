#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sentinel/critdb.hpp"

using namespace sentinel;

namespace {

std::set<std::string> strs(const Instance& I) {
    std::set<std::string> out;
    for (const Atom& a : I.atoms()) out.insert(a.str());
    return out;
}

}  // namespace

TEST(CritDB, SkolemCriticalDatabaseUsesRuleConstants) {
    auto R = parse_dlgp("[a] q(X,c) :- p(X).\n").rules;
    EXPECT_EQ(strs(skolem_critical_db(R)), (std::set<std::string>{"p(*)", "p(c)", "q(*,*)", "q(*,c)", "q(c,*)",
                                                                   "q(c,c)"}));
}

TEST(CritDB, RestrictedCriticalDatabaseIndexesEachStep) {
    auto doc = oracle::load("counter2");
    auto db = restricted_critical_db(oracle::path(doc, {"r1", "r2", "r3"}));
    EXPECT_EQ(strs(db.atoms), (std::set<std::string>{"p(x__1,y__1)", "r(x__2,y__2)", "q(x__3,y__3)", "t(x__3,y__3)"}));
    EXPECT_EQ(db.indexed_constants.size(), 6u);
}

TEST(CritDB, RepeatedRulesGetDistinctCopies) {
    auto doc = oracle::load("erule");
    auto db = restricted_critical_db(oracle::path(doc, {"r", "r"}));
    EXPECT_EQ(strs(db.atoms), (std::set<std::string>{"e(x1__1,x2__1)", "e(x1__2,x2__2)"}));
}

TEST(CritDB, RenamingMustLowerTheIndex) {
    RenamingFunction rn;
    EXPECT_THROW(rn.map(Term::indexed("x", 1), Term::indexed("x", 2)), ContractViolation);
    EXPECT_THROW(rn.map(Term::indexed("x", 1), Term::indexed("y", 1)), ContractViolation);
    rn.map(Term::indexed("z", 3), Term::indexed("z", 1));
    EXPECT_EQ(rn.apply(Term::indexed("z", 3)), Term::indexed("z", 1));
    EXPECT_EQ(rn.apply(Term::constant("a")), Term::constant("a"));
    EXPECT_TRUE(rn.valid());
}

TEST(CritDB, RenamingApplication) {
    auto doc = oracle::load("counter3");
    auto db = restricted_critical_db(oracle::path(doc, {"r3", "r2", "r1"}));
    auto named = [&](const std::string& s) {
        for (Term t : db.indexed_constants)
            if (t.str() == s) return t;
        throw std::runtime_error(s);
    };
    RenamingFunction rn;
    rn.map(named("z__3"), named("z__1"));
    auto I = apply_renaming(rn, db);
    EXPECT_TRUE(strs(I).count("p(x__3,y__3,z__1)"));
    EXPECT_TRUE(strs(I).count("k(z__1)"));
    EXPECT_EQ(I.size(), db.atoms.size());
}

TEST(CritDB, RealizablePartitions) {
    std::vector<Term> cs{Term::indexed("x", 1), Term::indexed("y", 1), Term::indexed("x", 2)};
    std::vector<std::string> keys;
    enumerate_renamings(cs, [&](const RenamingPartition& p) {
        EXPECT_TRUE(p.renaming().has_value());
        keys.push_back(p.key());
        return true;
    });
    // identity, x__2 onto x__1, x__2 onto y__1
    EXPECT_EQ(keys.size(), 3u);
    std::vector<Term> distinct{Term::indexed("a", 1), Term::indexed("b", 2), Term::indexed("c", 3)};
    std::size_t n = 0;
    enumerate_renamings(distinct, [&](const RenamingPartition&) { return ++n, true; });
    EXPECT_EQ(n, 5u);
}

TEST(CritDB, SameIndexConstantsCannotBeMerged) {
    RenamingPartition p({Term::indexed("x", 1), Term::indexed("y", 1)});
    EXPECT_FALSE(p.merged({Term::indexed("x", 1), Term::indexed("y", 1)}).renaming().has_value());
}

TEST(CritDB, ProposedMergesResolveTheConflict) {
    RenamingPartition p({Term::indexed("x", 1), Term::indexed("z", 1), Term::indexed("z", 3)});
    MergeConflict m;
    m.pairs = {{Term::indexed("z", 3), Term::indexed("z", 1)}};
    auto out = propose_merges(m, p);
    ASSERT_FALSE(out.empty());
    auto rn = out.front().renaming();
    ASSERT_TRUE(rn.has_value());
    EXPECT_EQ(rn->apply(Term::indexed("z", 3)), Term::indexed("z", 1));
    EXPECT_EQ(out.front().merged_count(), 1u);
}

TEST(CritDB, CompositionLowersTwice) {
    RenamingFunction first, second;
    first.map(Term::indexed("x", 3), Term::indexed("x", 2));
    second.map(Term::indexed("x", 2), Term::indexed("x", 1));
    EXPECT_EQ(second.compose_after(first).apply(Term::indexed("x", 3)), Term::indexed("x", 1));
}
