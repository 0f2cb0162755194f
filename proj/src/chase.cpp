#include "sentinel/chase.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace sentinel {

std::string to_string(ChaseOutcome o) {
    switch (o) {
        case ChaseOutcome::Saturated: return "Saturated";
        case ChaseOutcome::BudgetExhausted: return "BudgetExhausted";
        case ChaseOutcome::CyclicTermFound: return "CyclicTermFound";
    }
    return {};
}

std::string to_string(BudgetKind b) {
    switch (b) {
        case BudgetKind::None: return "none";
        case BudgetKind::Steps: return "steps";
        case BudgetKind::Height: return "height";
        case BudgetKind::Atoms: return "atoms";
        case BudgetKind::WallClock: return "wallclock";
    }
    return {};
}

bool replay(const ChaseTrace& trace, std::string* why) {
    Instance I = trace.initial;
    int step = 0;
    for (const ChaseStep& s : trace.steps) {
        ++step;
        for (const Atom& a : s.rule->body()) {
            if (!I.contains(s.h.apply(a))) {
                if (why) *why = "step " + std::to_string(step) + ": body atom missing";
                return false;
            }
        }
        auto added = apply_trigger(*s.rule, s.h, I, step);
        std::vector<Atom> got;
        for (auto i : added) got.push_back(I.atom(i));
        if (got != s.added) {
            if (why) *why = "step " + std::to_string(step) + ": added atoms differ";
            return false;
        }
    }
    if (I.atom_set() != trace.final.atom_set()) {
        if (why) *why = "final instance differs";
        return false;
    }
    return true;
}

namespace {

using Clock = std::chrono::steady_clock;

bool timed_out(Clock::time_point start, std::chrono::milliseconds limit) {
    return limit.count() > 0 && Clock::now() - start > limit;
}

// Binds the pattern atom to a ground atom; fails on inconsistent repeated variables.
std::optional<Substitution> match_atom(const Atom& pattern, const Atom& ground) {
    if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size()) return std::nullopt;
    Substitution s;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        Term p = pattern.args[i];
        Term g = ground.args[i];
        if (p.is_variable()) {
            auto b = s.get(p);
            if (b && *b != g) return std::nullopt;
            if (!b) s.bind(p, g);
        } else if (p != g) {
            return std::nullopt;
        }
    }
    return s;
}

// Triggers of r on I that use at least one atom with index >= delta_start.
void delta_triggers(const Rule& r, const Instance& I, std::size_t delta_start,
                    std::set<Substitution>& out) {
    const auto& body = r.body();
    if (delta_start == 0) {
        for (auto& h : all_homomorphisms(body, I)) out.insert(std::move(h));
        return;
    }
    for (std::size_t p = 0; p < body.size(); ++p) {
        std::vector<Atom> rest;
        for (std::size_t q = 0; q < body.size(); ++q)
            if (q != p) rest.push_back(body[q]);
        for (auto idx : I.with_predicate(body[p].predicate)) {
            if (idx < delta_start) continue;
            auto seed = match_atom(body[p], I.atom(idx));
            if (!seed) continue;
            if (rest.empty()) {
                out.insert(*seed);
                continue;
            }
            SearchOptions o;
            o.seed = &*seed;
            find_homomorphisms(rest, I, [&](const Substitution& h) {
                out.insert(h);
                return true;
            }, o);
        }
    }
}

}  // namespace

ChaseTrace skolem_chase(const Instance& I0, const RuleSet& R, const ChaseBudget& budget, bool detect_cyclic_terms) {
    auto start = Clock::now();
    ChaseTrace trace;
    trace.initial = I0;
    trace.final = I0;
    Instance& I = trace.final;
    std::vector<std::set<Substitution>> applied(R.size());
    std::size_t delta_start = 0;
    bool height_blocked = false;
    auto stop = [&](BudgetKind kind) {
        trace.outcome = ChaseOutcome::BudgetExhausted;
        trace.exhausted = kind;
        return trace;
    };
    while (true) {
        std::size_t round_end = I.size();
        std::vector<std::pair<std::size_t, Substitution>> round;
        for (std::size_t ri = 0; ri < R.size(); ++ri) {
            std::set<Substitution> found;
            delta_triggers(R[ri], I, delta_start, found);
            for (const auto& h : found)
                if (!applied[ri].count(h)) round.emplace_back(ri, h);
        }
        if (round.empty()) break;
        for (auto& [ri, h] : round) {
            if (!applied[ri].insert(h).second) continue;
            const Rule& r = R[ri];
            if (budget.max_height != kUnlimited) {
                bool too_high = false;
                for (const Atom& a : r.instantiate_head(h))
                    for (Term t : a.args)
                        if (static_cast<std::uint64_t>(t.height()) > budget.max_height) too_high = true;
                if (too_high) {
                    height_blocked = true;
                    continue;
                }
            }
            if (trace.steps.size() >= budget.max_steps) return stop(BudgetKind::Steps);
            if (timed_out(start, budget.wall_clock)) return stop(BudgetKind::WallClock);
            int step = static_cast<int>(trace.steps.size()) + 1;
            auto added = apply_trigger(r, h, I, step);
            ChaseStep s{&r, h, {}};
            for (auto i : added) s.added.push_back(I.atom(i));
            trace.steps.push_back(std::move(s));
            if (detect_cyclic_terms) {
                for (auto i : added) {
                    for (Term t : I.atom(i).args) {
                        if (t.is_cyclic()) {
                            trace.outcome = ChaseOutcome::CyclicTermFound;
                            trace.cyclic_term = t;
                            return trace;
                        }
                    }
                }
            }
            if (I.size() > budget.max_atoms) return stop(BudgetKind::Atoms);
        }
        delta_start = round_end;
    }
    if (height_blocked) return stop(BudgetKind::Height);
    trace.outcome = ChaseOutcome::Saturated;
    return trace;
}

ChaseTrace restricted_chase(const Instance& I0, const RuleSet& R, const ChaseBudget& budget, bool datalog_first) {
    auto start = Clock::now();
    ChaseTrace trace;
    trace.initial = I0;
    trace.final = I0;
    Instance& I = trace.final;
    std::vector<const Rule*> datalog;
    if (datalog_first)
        for (const Rule& r : R)
            if (r.is_datalog()) datalog.push_back(&r);
    bool height_blocked = false;
    std::optional<BudgetKind> exhausted;

    // Applies (r, h) when still active; false when a budget stops the run.
    auto fire = [&](const Rule& r, const Substitution& h) {
        if (!is_active_trigger(r, h, I)) return true;
        if (budget.max_height != kUnlimited) {
            for (const Atom& a : r.instantiate_head(h))
                for (Term t : a.args)
                    if (static_cast<std::uint64_t>(t.height()) > budget.max_height) {
                        height_blocked = true;
                        return true;
                    }
        }
        if (trace.steps.size() >= budget.max_steps) return exhausted = BudgetKind::Steps, false;
        if (timed_out(start, budget.wall_clock)) return exhausted = BudgetKind::WallClock, false;
        auto added = apply_trigger(r, h, I, static_cast<int>(trace.steps.size()) + 1);
        ChaseStep s{&r, h, {}};
        for (auto i : added) s.added.push_back(I.atom(i));
        trace.steps.push_back(std::move(s));
        if (I.size() > budget.max_atoms) return exhausted = BudgetKind::Atoms, false;
        return true;
    };
    auto saturate = [&]() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Rule* r : datalog) {
                for (const auto& h : all_homomorphisms(r->body(), I)) {
                    std::size_t before = trace.steps.size();
                    if (!fire(*r, h)) return false;
                    changed = changed || trace.steps.size() != before;
                }
            }
        }
        return true;
    };

    while (true) {
        if (datalog_first && !saturate()) break;
        std::size_t steps_before = trace.steps.size();
        std::vector<std::pair<const Rule*, Substitution>> round;
        for (const Rule& r : R) {
            if (datalog_first && r.is_datalog()) continue;
            for (auto& h : all_homomorphisms(r.body(), I)) round.emplace_back(&r, std::move(h));
        }
        bool stopped = false;
        for (const auto& [r, h] : round) {
            if (datalog_first && !r->is_datalog() && !saturate()) {
                stopped = true;
                break;
            }
            if (!fire(*r, h)) {
                stopped = true;
                break;
            }
        }
        if (stopped || trace.steps.size() == steps_before) break;
    }
    if (exhausted) {
        trace.outcome = ChaseOutcome::BudgetExhausted;
        trace.exhausted = *exhausted;
    } else if (height_blocked) {
        trace.outcome = ChaseOutcome::BudgetExhausted;
        trace.exhausted = BudgetKind::Height;
    } else {
        trace.outcome = ChaseOutcome::Saturated;
    }
    return trace;
}

std::variant<ChaseTrace, PathFailure> run_path(const Instance& I0, const std::vector<const Rule*>& path, PathMode mode,
                                               const Chooser& chooser) {
    if (path.empty()) throw ContractViolation("run_path needs a non-empty path");
    ChaseTrace trace;
    trace.initial = I0;
    trace.final = I0;
    Instance& I = trace.final;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Rule& r = *path[i];
        auto homs = all_homomorphisms(r.body(), I);
        if (homs.empty()) return PathFailure{i + 1, PathFailureReason::NoTrigger};
        if (mode == PathMode::Restricted) {
            std::erase_if(homs, [&](const Substitution& h) { return !is_active_trigger(r, h, I); });
            if (homs.empty()) return PathFailure{i + 1, PathFailureReason::NoActiveTrigger};
        }
        std::size_t pick = chooser ? chooser(r, homs) : 0;
        if (pick >= homs.size()) throw ContractViolation("chooser returned an out-of-range index");
        auto added = apply_trigger(r, homs[pick], I, static_cast<int>(i + 1));
        ChaseStep s{&r, homs[pick], {}};
        for (auto a : added) s.added.push_back(I.atom(a));
        trace.steps.push_back(std::move(s));
    }
    trace.outcome = ChaseOutcome::Saturated;
    return trace;
}

namespace {

std::vector<std::pair<const Rule*, Substitution>> active_triggers(const RuleSet& R, const Instance& I) {
    std::vector<std::pair<const Rule*, Substitution>> out;
    for (const Rule& r : R)
        for (auto& h : all_homomorphisms(r.body(), I))
            if (is_active_trigger(r, h, I)) out.emplace_back(&r, std::move(h));
    return out;
}

void exhaustive(const RuleSet& R, Instance& I, std::vector<ChaseStep>& steps, const ChaseTrace& base,
                const ChaseBudget& budget, std::size_t max_traces, std::vector<ChaseTrace>& out) {
    if (out.size() >= max_traces) return;
    auto triggers = active_triggers(R, I);
    auto emit = [&](ChaseOutcome o, BudgetKind b) {
        ChaseTrace t;
        t.initial = base.initial;
        t.final = I;
        t.steps = steps;
        t.outcome = o;
        t.exhausted = b;
        out.push_back(std::move(t));
    };
    if (triggers.empty()) return emit(ChaseOutcome::Saturated, BudgetKind::None);
    if (steps.size() >= budget.max_steps) return emit(ChaseOutcome::BudgetExhausted, BudgetKind::Steps);
    for (auto& [r, h] : triggers) {
        std::size_t mark = I.mark();
        auto added = apply_trigger(*r, h, I, static_cast<int>(steps.size() + 1));
        ChaseStep s{r, h, {}};
        for (auto a : added) s.added.push_back(I.atom(a));
        steps.push_back(std::move(s));
        exhaustive(R, I, steps, base, budget, max_traces, out);
        steps.pop_back();
        I.rollback(mark);
        if (out.size() >= max_traces) return;
    }
}

std::string state_key(const Instance& I) {
    std::vector<const Atom*> atoms;
    for (const Atom& a : I.atoms()) atoms.push_back(&a);
    std::sort(atoms.begin(), atoms.end(), [](const Atom* a, const Atom* b) { return *a < *b; });
    std::string key;
    for (const Atom* a : atoms) {
        key.append(reinterpret_cast<const char*>(&a->predicate), sizeof a->predicate);
        for (Term t : a->args) {
            TermId id = t.id();
            key.append(reinterpret_cast<const char*>(&id), sizeof id);
        }
        key.push_back('|');
    }
    return key;
}

struct ProbeState {
    const RuleSet& R;
    std::size_t max_steps;
    std::size_t max_states;
    std::unordered_map<std::string, std::size_t> best_depth;
    TerminationProbe result;
    std::vector<ChaseStep> steps;
};

void probe(ProbeState& st, Instance& I) {
    if (!st.result.all_saturated) return;
    std::size_t depth = st.steps.size();
    auto key = state_key(I);
    auto it = st.best_depth.find(key);
    if (it != st.best_depth.end() && it->second <= depth) return;
    st.best_depth[key] = depth;
    ++st.result.states;
    st.result.longest = std::max(st.result.longest, depth);
    auto triggers = active_triggers(st.R, I);
    if (triggers.empty()) return;
    if (depth >= st.max_steps || st.result.states > st.max_states) {
        st.result.all_saturated = false;
        st.result.truncated = depth < st.max_steps;
        st.result.counterexample = st.steps;
        return;
    }
    for (auto& [r, h] : triggers) {
        std::size_t mark = I.mark();
        auto added = apply_trigger(*r, h, I, static_cast<int>(depth + 1));
        ChaseStep s{r, h, {}};
        for (auto a : added) s.added.push_back(I.atom(a));
        st.steps.push_back(std::move(s));
        probe(st, I);
        st.steps.pop_back();
        I.rollback(mark);
        if (!st.result.all_saturated) return;
    }
}

}  // namespace

std::vector<ChaseTrace> restricted_chase_exhaustive(const Instance& I0, const RuleSet& R, const ChaseBudget& budget,
                                                    std::size_t max_traces) {
    std::vector<ChaseTrace> out;
    ChaseTrace base;
    base.initial = I0;
    Instance I = I0;
    std::vector<ChaseStep> steps;
    exhaustive(R, I, steps, base, budget, max_traces, out);
    return out;
}

TerminationProbe restricted_chase_all_terminate(const Instance& I0, const RuleSet& R, std::size_t max_steps,
                                                std::size_t max_states) {
    ProbeState st{R, max_steps, max_states, {}, {}, {}};
    Instance I = I0;
    probe(st, I);
    return st.result;
}

bool datalog_first_filter(const std::vector<const Rule*>& path) {
    bool seen_generating = false;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!path[i]->is_datalog())
            seen_generating = true;
        else if (seen_generating)
            return false;
    }
    return true;
}

void saturate_datalog(Instance& I, const std::vector<const Rule*>& datalog_rules, int step,
                      const std::function<void(const Rule&, const Substitution&,
                                               const std::vector<Instance::AtomIndex>&)>& on_apply) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule* r : datalog_rules) {
            for (auto& h : all_homomorphisms(r->body(), I)) {
                if (!is_active_trigger(*r, h, I)) continue;
                auto added = apply_trigger(*r, h, I, step);
                if (added.empty()) continue;
                changed = true;
                if (on_apply) on_apply(*r, h, added);
            }
        }
    }
}

}  // namespace sentinel
