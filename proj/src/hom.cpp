#include "sentinel/hom.hpp"

#include <algorithm>
#include <limits>

namespace sentinel {

namespace {

constexpr std::uint32_t kGround = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kMaxRecordedConflicts = 4096;

struct PatternAtom {
    SymbolId predicate;
    std::vector<std::uint32_t> slots;  // variable slot or kGround
    std::vector<Term> ground;
};

// Structural comparison that tolerates differences between indexed constants.
bool mergeable(Term a, Term b, std::vector<std::pair<Term, Term>>& pairs) {
    if (a == b) return true;
    if (a.is_indexed() && b.is_indexed()) {
        pairs.emplace_back(a, b);
        return true;
    }
    if (a.is_skolem() && b.is_skolem() && a.name() == b.name() && a.args().size() == b.args().size()) {
        for (std::size_t i = 0; i < a.args().size(); ++i)
            if (!mergeable(a.args()[i], b.args()[i], pairs)) return false;
        return true;
    }
    return false;
}

class Search {
public:
    Search(std::span<const Atom> conj, const Instance& I, const SearchOptions& opts,
           const std::function<bool(const Substitution&)>& visit)
        : I_(I), opts_(opts), visit_(visit) {
        for (const Atom& a : conj) {
            PatternAtom p{a.predicate, {}, {}};
            for (Term t : a.args) {
                if (t.is_variable()) {
                    auto it = std::find(vars_.begin(), vars_.end(), t);
                    std::uint32_t slot = static_cast<std::uint32_t>(it - vars_.begin());
                    if (it == vars_.end()) vars_.push_back(t);
                    p.slots.push_back(slot);
                    p.ground.push_back(Term());
                } else {
                    p.slots.push_back(kGround);
                    p.ground.push_back(t);
                }
            }
            atoms_.push_back(std::move(p));
        }
        binding_.assign(vars_.size(), Term());
        if (opts.seed) {
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (auto v = opts.seed->get(vars_[i])) binding_[i] = *v;
        }
        matched_.assign(atoms_.size(), 0);
    }

    void run() { descend(0); }

private:
    Term value(const PatternAtom& p, std::size_t i) const {
        return p.slots[i] == kGround ? p.ground[i] : binding_[p.slots[i]];
    }

    const std::vector<Instance::AtomIndex>& candidates(const PatternAtom& p) const {
        const std::vector<Instance::AtomIndex>* best = &I_.with_predicate(p.predicate);
        if (opts_.conflicts) return *best;
        for (std::size_t i = 0; i < p.slots.size(); ++i) {
            Term v = value(p, i);
            if (!v.valid()) continue;
            const auto& list = I_.with_term_at(p.predicate, i, v);
            if (list.size() < best->size()) best = &list;
        }
        return *best;
    }

    // Returns false when the whole search must stop.
    bool descend(std::size_t depth) {
        if (depth == atoms_.size()) {
            Substitution s;
            if (opts_.seed) s = *opts_.seed;
            for (std::size_t i = 0; i < vars_.size(); ++i) s.bind(vars_[i], binding_[i]);
            return visit_(s);
        }
        std::size_t chosen = atoms_.size();
        const std::vector<Instance::AtomIndex>* list = nullptr;
        for (std::size_t a = 0; a < atoms_.size(); ++a) {
            if (matched_[a]) continue;
            const auto& l = candidates(atoms_[a]);
            if (!list || l.size() < list->size()) {
                list = &l;
                chosen = a;
            }
        }
        const PatternAtom& p = atoms_[chosen];
        matched_[chosen] = 1;
        bool keep_going = true;
        std::size_t n = list->size();
        for (std::size_t k = 0; k < n && keep_going; ++k) {
            Instance::AtomIndex c = opts_.newest_first ? (*list)[n - 1 - k] : (*list)[k];
            if (opts_.allowed && c < opts_.allowed->size() && !(*opts_.allowed)[c]) continue;
            if (opts_.stats) ++opts_.stats->probes;
            if (opts_.max_probes && opts_.stats && opts_.stats->probes > opts_.max_probes) {
                opts_.stats->exhausted = true;
                keep_going = false;
                break;
            }
            keep_going = try_candidate(p, c, depth);
        }
        matched_[chosen] = 0;
        return keep_going;
    }

    bool is_derived(Instance::AtomIndex c) const {
        if (opts_.conflict_atoms) return c < opts_.conflict_atoms->size() && (*opts_.conflict_atoms)[c];
        return I_.first_derived_at(c) > 0;
    }

    bool try_candidate(const PatternAtom& p, Instance::AtomIndex c, std::size_t depth) {
        const Atom& atom = I_.atom(c);
        std::vector<std::uint32_t> bound_here;
        bool exact = true;
        bool hard_fail = false;
        std::vector<std::pair<Term, Term>> pairs;
        for (std::size_t i = 0; i < p.slots.size(); ++i) {
            Term want = value(p, i);
            Term got = atom.args[i];
            if (!want.valid()) {
                binding_[p.slots[i]] = got;
                bound_here.push_back(p.slots[i]);
                continue;
            }
            if (want == got) continue;
            exact = false;
            if (!opts_.conflicts || !mergeable(want, got, pairs)) {
                hard_fail = true;
                break;
            }
        }
        bool keep_going = true;
        if (exact) {
            bool derived = is_derived(c);
            derived_matched_ += derived;
            keep_going = descend(depth + 1);
            derived_matched_ -= derived;
        } else if (!hard_fail && !pairs.empty() && (is_derived(c) || derived_matched_ > 0) &&
                   opts_.conflicts->size() < kMaxRecordedConflicts) {
            MergeConflict m;
            for (auto [a, b] : pairs) m.pairs.emplace_back(std::min(a, b), std::max(a, b));
            std::sort(m.pairs.begin(), m.pairs.end());
            m.pairs.erase(std::unique(m.pairs.begin(), m.pairs.end()), m.pairs.end());
            opts_.conflicts->push_back(std::move(m));
        }
        for (std::uint32_t s : bound_here) binding_[s] = Term();
        return keep_going;
    }

    const Instance& I_;
    const SearchOptions& opts_;
    const std::function<bool(const Substitution&)>& visit_;
    std::vector<PatternAtom> atoms_;
    std::vector<Term> vars_;
    std::vector<Term> binding_;
    std::vector<char> matched_;
    int derived_matched_ = 0;
};

}  // namespace

void find_homomorphisms(std::span<const Atom> conj, const Instance& I,
                        const std::function<bool(const Substitution&)>& visit, const SearchOptions& opts) {
    if (conj.empty()) throw ContractViolation("find_homomorphisms needs a non-empty conjunction");
    Search(conj, I, opts, visit).run();
}

std::vector<Substitution> all_homomorphisms(std::span<const Atom> conj, const Instance& I, const SearchOptions& opts) {
    std::vector<Substitution> out;
    find_homomorphisms(conj, I, [&](const Substitution& s) {
        out.push_back(s);
        return true;
    }, opts);
    return out;
}

std::optional<Substitution> first_homomorphism(std::span<const Atom> conj, const Instance& I,
                                               const SearchOptions& opts) {
    std::optional<Substitution> out;
    find_homomorphisms(conj, I, [&](const Substitution& s) {
        out = s;
        return false;
    }, opts);
    return out;
}

Trigger make_trigger(const Rule& r, Substitution h, const Instance& I) {
    Trigger t;
    t.rule = &r;
    for (const Atom& a : r.body()) {
        auto idx = I.find(h.apply(a));
        if (!idx) throw ContractViolation("trigger body not in instance for rule " + r.label());
        t.triggering_steps.push_back(I.first_derived_at(*idx));
    }
    t.h = std::move(h);
    return t;
}

std::vector<Trigger> find_triggers(const Rule& r, const Instance& I, const SearchOptions& opts) {
    std::vector<Trigger> out;
    for (auto& h : all_homomorphisms(r.body(), I, opts)) out.push_back(make_trigger(r, std::move(h), I));
    return out;
}

bool is_active_trigger(const Rule& r, const Substitution& h, const Instance& I, SearchStats* stats) {
    Substitution seed = h.restricted_to(r.frontier());
    if (r.is_datalog()) {
        for (const Atom& a : r.head()) {
            if (stats) ++stats->probes;
            if (!I.contains(seed.apply(a))) return true;
        }
        return false;
    }
    SearchOptions o;
    o.seed = &seed;
    o.stats = stats;
    return !first_homomorphism(r.head(), I, o).has_value();
}

bool is_active_trigger(const Trigger& t, const Instance& I) { return is_active_trigger(*t.rule, t.h, I); }

std::vector<Instance::AtomIndex> apply_trigger(const Rule& r, const Substitution& h, Instance& I, int step) {
    std::vector<Instance::AtomIndex> added;
    for (const Atom& a : r.instantiate_head(h)) {
        auto [idx, fresh] = I.add(a, step);
        if (fresh) added.push_back(idx);
    }
    return added;
}

std::vector<Instance::AtomIndex> apply_trigger(const Trigger& t, Instance& I, int step) {
    return apply_trigger(*t.rule, t.h, I, step);
}

}  // namespace sentinel
