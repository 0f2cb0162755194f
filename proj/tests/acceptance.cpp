#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "sentinel/bounded.hpp"
#include "sentinel/critdb.hpp"

using namespace sentinel;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
    std::ostringstream notes;
    bool ok = true;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes << (notes.tellp() > 0 ? "; " : "") << what;
        }
    }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

KSafeResult analyze(const RuleSet& R, std::size_t k, Condition c, bool df = false) {
    KSafeOptions o;
    o.datalog_first = df;
    o.jobs = default_jobs();
    return k_safe(R, k, CycleFunction(c), o);
}

std::vector<std::string> labels(const std::vector<const Rule*>& p) {
    std::vector<std::string> out;
    for (const Rule* r : p) out.push_back(r->label());
    return out;
}

bool replays(const std::optional<ChainWitness>& w) {
    return w && replay_witness(*w) && oracle::check_witness(*w).empty();
}

void c1(Check& c) {
    auto R = oracle::load("r1").rules;
    auto t = Clock::now();
    auto one = analyze(R, 1, Condition::WA);
    auto zero = analyze(R, 0, Condition::WA);
    double s = seconds_since(t);
    c.expect(one.verdict == Verdict::Terminating, "k=1 gave " + to_string(one.verdict));
    c.expect(zero.verdict == Verdict::NotProven, "k=0 gave " + to_string(zero.verdict));
    c.expect(s < 1.0, "took " + std::to_string(s) + " s");
}

void c2(Check& c) {
    auto R = oracle::load("r2").rules;
    auto t = Clock::now();
    auto one = analyze(R, 1, Condition::WA);
    c.expect(one.verdict == Verdict::NotProven, "k=1 gave " + to_string(one.verdict));
    c.expect(replays(one.witness), "k=1 witness does not replay");
    if (one.witness) {
        std::vector<const Rule*> seq;
        for (const auto& s : one.witness->trace.steps) seq.push_back(s.rule);
        auto l = labels(seq);
        std::vector<std::string> want{"r3", "r4", "r3", "r4"};
        bool prefix = l.size() >= want.size() && std::equal(want.begin(), want.end(), l.begin());
        c.expect(prefix, "k=1 witness runs " + one.witness_cycle->str(R) + ", not the (r3,r4,r3,r4) prefix");
    }
    for (auto cond : {Condition::WA, Condition::AGRD}) {
        auto two = analyze(R, 2, cond);
        std::string detail = "k=2 " + to_string(cond) + " gave " + to_string(two.verdict);
        if (two.witness_cycle) detail += " via active " + two.witness_cycle->str(R);
        c.expect(two.verdict == Verdict::Terminating, detail);
    }
    double s = seconds_since(t);
    c.expect(s < 5.0, "took " + std::to_string(s) + " s");
}

void c3(Check& c) {
    auto doc = oracle::load("erule");
    for (std::size_t k = 1; k <= 3; ++k) {
        auto r = analyze(doc.rules, k, Condition::WA);
        c.expect(r.verdict == Verdict::NotProven, "k=" + std::to_string(k) + " gave " + to_string(r.verdict));
    }
    auto p = oracle::path(doc, {"r", "r"});
    auto v = is_active_wrt(p, restricted_critical_db(p).atoms);
    c.expect(v.status == SafetyStatus::ActiveWitness && replays(v.witness), "no replayable witness from I^(r,r)");
    Instance crit = skolem_critical_db(doc.rules);
    c.expect(crit.size() == 1 && crit.atoms()[0].str() == "e(*,*)", "critical database is " + crit.str());
    auto t = restricted_chase(crit, doc.rules, {});
    c.expect(t.outcome == ChaseOutcome::Saturated && t.steps.empty(),
             "restricted chase on it ran " + std::to_string(t.steps.size()) + " steps");
}

void c4(Check& c) {
    auto R = oracle::load("counter").rules;
    auto g = dependency_graph(R);
    std::vector<std::size_t> rr{0, 0};
    c.expect(!is_relevant(g, rr), "(r,r) is relevant");
    c.expect(is_agrd(R), "{r} is not aGRD");
    auto t = Clock::now();
    auto r = analyze(R, 1, Condition::AGRD);
    double s = seconds_since(t);
    c.expect(r.verdict == Verdict::Terminating, "k=1 gave " + to_string(r.verdict));
    c.expect(s < 0.1, "took " + std::to_string(s) + " s");
}

void c5(Check& c) {
    auto doc = oracle::load("counter2");
    auto p1 = oracle::path(doc, {"r1", "r2", "r3"});
    auto p2 = oracle::path(doc, {"r3", "r2", "r1"});
    auto v1 = is_active_wrt(p1, restricted_critical_db(p1).atoms);
    auto v2 = is_active_wrt(p2, restricted_critical_db(p2).atoms);
    c.expect(v1.status == SafetyStatus::Safe, "pi1 is " + to_string(v1.status));
    c.expect(v2.status == SafetyStatus::ActiveWitness && replays(v2.witness), "pi2 is " + to_string(v2.status));
    auto r = analyze(doc.rules, 1, Condition::WA);
    c.expect(r.verdict == Verdict::NotProven, "k=1 gave " + to_string(r.verdict));
    auto cyc = is_path_active(oracle::path(doc, {"r3", "r2", "r1", "r3"}));
    c.expect(cyc.status == SafetyStatus::ActiveWitness && replays(cyc.witness),
             "(r3,r2,r1,r3) is " + to_string(cyc.status));
}

void c6(Check& c) {
    auto doc = oracle::load("counter3");
    const std::vector<std::vector<std::string>> perms{{"r1", "r2", "r3", "r1"}, {"r1", "r3", "r2", "r1"},
                                                      {"r2", "r1", "r3", "r2"}, {"r2", "r3", "r1", "r2"},
                                                      {"r3", "r1", "r2", "r3"}, {"r3", "r2", "r1", "r3"}};
    for (const auto& l : perms) {
        auto p = oracle::path(doc, l);
        auto v = is_active_wrt(p, restricted_critical_db(p).atoms);
        c.expect(v.status == SafetyStatus::Safe, l[0] + l[1] + l[2] + " is " + to_string(v.status));
    }
    auto v = is_path_active(oracle::path(doc, {"r3", "r2", "r1"}));
    bool lowered = false;
    if (v.witness)
        for (const auto& [from, to] : v.witness->renaming.mapping())
            if (from.index() == 3 && to.index() == 1) lowered = true;
    c.expect(v.status == SafetyStatus::ActiveWitness && replays(v.witness), "renamed path is " + to_string(v.status));
    c.expect(lowered, "witness renaming " + (v.witness ? v.witness->renaming.str() : std::string("none")) +
                          " has no index-3 to index-1 map");
    auto r = analyze(doc.rules, 1, Condition::WA);
    c.expect(r.verdict == Verdict::NotProven, "k=1 gave " + to_string(r.verdict));
}

void c7(Check& c) {
    auto doc = oracle::load("access_control");
    Instance key;
    key.add(Atom("hasKey", {Term::constant("a"), Term::constant("b")}));
    auto v = is_active_wrt(oracle::path(doc, {"r2", "r3", "r2"}), key);
    c.expect(v.status == SafetyStatus::Safe, "(r2,r3,r2) is " + to_string(v.status));
    auto keys = skolem_chase(key, oracle::load("access_keys").rules, {}, true);
    c.expect(keys.outcome == ChaseOutcome::CyclicTermFound, "{r2,r3} chase ended " + to_string(keys.outcome));
    auto grants = skolem_chase(key, oracle::load("access_grants").rules, {});
    c.expect(grants.outcome == ChaseOutcome::Saturated && grants.steps.size() == 2,
             "{r4,r5} ran " + std::to_string(grants.steps.size()) + " applications");
}

void c8(Check& c) {
    auto R = oracle::load("fairness").rules;
    auto df = analyze(R, 1, Condition::WA, true);
    auto plain = analyze(R, 1, Condition::WA, false);
    c.expect(df.verdict == Verdict::Terminating, "Datalog-first gave " + to_string(df.verdict));
    c.expect(plain.verdict == Verdict::NotProven, "plain gave " + to_string(plain.verdict));
}

void c9(Check& c) {
    auto R1 = oracle::load("r1").rules;
    auto three = memb_check(R1, BoundFunction::constant(3));
    c.expect(three.result == MembResult::T, "delta=3 gave " + to_string(three.result));
    auto two = memb_check(R1, BoundFunction::constant(2));
    c.expect(two.result == MembResult::F, "delta=2 gave " + to_string(two.result));
    c.expect(two.witness && two.witness->trace.final.height() == 3 && replays(two.witness),
             "delta=2 witness missing or not of height 3");
    auto dl = memb_check(oracle::load("reachability").rules, BoundFunction::constant(1));
    c.expect(dl.result == MembResult::T && dl.phase == 1, "Datalog set gave " + to_string(dl.result) + " in phase " +
                                                              std::to_string(dl.phase));
}

void c10(Check& c) {
    auto t = Clock::now();
    for (const auto& r : oracle::all_properties(200, 42)) {
        c.expect(r.cases >= 200, r.name + " ran " + std::to_string(r.cases) + " cases");
        c.expect(r.failures == 0, r.name + ": " + r.first_failure);
    }
    double s = seconds_since(t);
    c.expect(s < 120.0, "took " + std::to_string(s) + " s");
}

void c11(Check& c) {
    std::mt19937_64 rng(11);
    std::size_t sets = 0;
    for (const auto& name : oracle::regression_sets()) {
        auto R = oracle::load(name).rules;
        for (bool df : {false, true}) {
            bool done = false;
            for (std::size_t k = 0; k <= 2 && !done; ++k)
                for (auto cond : {Condition::WA, Condition::JA, Condition::AGRD, Condition::MFA}) {
                    auto o = oracle::quick_options();
                    o.datalog_first = df;
                    if (k_safe(R, k, CycleFunction(cond), o).verdict != Verdict::Terminating) continue;
                    ++sets;
                    auto why = oracle::smoke(R, k, df, rng, 5);
                    c.expect(why.empty(), name + ": " + why);
                    done = true;
                    break;
                }
        }
    }
    std::size_t generated = 0;
    for (std::size_t drawn = 0; generated < 50 && drawn < 5000; ++drawn) {
        auto doc = oracle::random_rules(rng, {});
        if (k_safe(doc.rules, 1, CycleFunction(Condition::WA), oracle::quick_options()).verdict != Verdict::Terminating)
            continue;
        ++generated;
        auto why = oracle::smoke(doc.rules, 1, false, rng, 5);
        c.expect(why.empty(), doc.rules.str() + ": " + why);
    }
    c.expect(generated == 50, "only " + std::to_string(generated) + " generated sets terminate");
    c.notes << (c.notes.tellp() > 0 ? "; " : "") << sets << " regression and " << generated << " generated sets";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"R1 1-safe under WA, not 0-safe", c1},
        {"R2 witness at k=1, Terminating at k=2", c2},
        {"E-rule never proven, critical database saturates", c3},
        {"single counter rule pruned and aGRD", c4},
        {"rotation order decides activeness", c5},
        {"renaming exposes an active cycle", c6},
        {"access control key loop and grants", c7},
        {"fairness needs the Datalog-first chase", c8},
        {"boundedness of R1 and Datalog sets", c9},
        {"property suites", c10},
        {"soundness smoke on terminating sets", c11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        auto t = Clock::now();
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " ("
                  << static_cast<long>(seconds_since(t) * 1000) << " ms)";
        if (c.notes.tellp() > 0) std::cout << ": " << c.notes.str();
        std::cout << std::endl;
        if (!c.ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
