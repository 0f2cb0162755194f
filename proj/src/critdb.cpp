#include "sentinel/critdb.hpp"

#include <algorithm>
#include <set>

namespace sentinel {

Instance skolem_critical_db(const RuleSet& R) {
    std::vector<Term> domain;
    for (const auto& c : R.constants()) domain.push_back(Term::constant(c));
    domain.push_back(Term::constant(kStar));
    Instance I;
    for (const auto& [pred, arity] : R.schema()) {
        std::vector<std::size_t> digits(arity, 0);
        while (true) {
            std::vector<Term> args;
            for (auto d : digits) args.push_back(domain[d]);
            I.add(Atom(pred, std::move(args)), 0);
            std::size_t pos = 0;
            while (pos < arity && ++digits[pos] == domain.size()) digits[pos++] = 0;
            if (pos == arity) break;
        }
    }
    return I;
}

RestrictedCriticalDB restricted_critical_db(const std::vector<const Rule*>& path) {
    if (path.empty()) throw ContractViolation("restricted critical database needs a non-empty path");
    RestrictedCriticalDB db;
    db.path = path;
    std::set<Term> seen;
    for (std::size_t i = 0; i < path.size(); ++i) {
        Substitution e;
        for (Term v : path[i]->universals()) e.bind(v, Term::indexed(v.name(), static_cast<int>(i + 1)));
        for (const Atom& a : path[i]->body()) {
            Atom g = e.apply(a);
            for (Term t : g.args)
                if (t.is_indexed() && seen.insert(t).second) db.indexed_constants.push_back(t);
            db.atoms.add(g, 0);
        }
    }
    return db;
}

void RenamingFunction::map(Term from, Term to) {
    if (!from.is_indexed() || !to.is_indexed()) throw ContractViolation("renaming maps indexed constants only");
    if (from == to) return;
    if (to.index() >= from.index())
        throw ContractViolation("renaming must lower the index: " + from.str() + " -> " + to.str());
    mapping_[from] = to;
}

Term RenamingFunction::apply(Term t) const {
    auto it = mapping_.find(t);
    if (it != mapping_.end()) return it->second;
    if (t.is_skolem()) {
        std::vector<Term> args;
        for (Term a : t.args()) args.push_back(apply(a));
        return Term::skolem(t.name(), args);
    }
    return t;
}

Atom RenamingFunction::apply(const Atom& a) const {
    Atom out = a;
    for (Term& t : out.args) t = apply(t);
    return out;
}

bool RenamingFunction::valid() const {
    return std::all_of(mapping_.begin(), mapping_.end(), [](const auto& kv) {
        return kv.first.is_indexed() && kv.second.is_indexed() && kv.second.index() < kv.first.index();
    });
}

RenamingFunction RenamingFunction::compose_after(const RenamingFunction& first) const {
    RenamingFunction out;
    std::set<Term> domain;
    for (const auto& kv : first.mapping_) domain.insert(kv.first);
    for (const auto& kv : mapping_) domain.insert(kv.first);
    for (Term t : domain) {
        Term r = apply(first.apply(t));
        if (r != t) out.map(t, r);
    }
    return out;
}

std::string RenamingFunction::str() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [from, to] : mapping_) {
        if (!first) s += ", ";
        first = false;
        s += from.str() + "/" + to.str();
    }
    return s + "}";
}

Instance apply_renaming(const RenamingFunction& rn, const RestrictedCriticalDB& db) {
    if (!rn.valid()) throw ContractViolation("renaming is not index-lowering");
    Instance out;
    for (const Atom& a : db.atoms.atoms()) out.add(rn.apply(a), 0);
    return out;
}

RenamingPartition::RenamingPartition(std::vector<Term> constants) : constants_(std::move(constants)) {
    for (std::size_t i = 0; i < constants_.size(); ++i) label_.push_back(i);
}

std::size_t RenamingPartition::class_of(Term t) const {
    auto it = std::find(constants_.begin(), constants_.end(), t);
    if (it == constants_.end()) throw ContractViolation("unknown indexed constant " + t.str());
    return label_[it - constants_.begin()];
}

std::vector<std::vector<Term>> RenamingPartition::classes() const {
    std::vector<std::vector<Term>> out;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < constants_.size(); ++i) {
        auto it = std::find(labels.begin(), labels.end(), label_[i]);
        if (it == labels.end()) {
            labels.push_back(label_[i]);
            out.push_back({constants_[i]});
        } else {
            out[it - labels.begin()].push_back(constants_[i]);
        }
    }
    return out;
}

RenamingPartition RenamingPartition::merged(const std::vector<Term>& group) const {
    RenamingPartition out = *this;
    std::set<std::size_t> labels;
    for (Term t : group) labels.insert(class_of(t));
    if (labels.empty()) return out;
    std::size_t target = *labels.begin();
    for (auto& l : out.label_)
        if (labels.count(l)) l = target;
    return out;
}

std::size_t RenamingPartition::merged_count() const { return constants_.size() - classes().size(); }

std::optional<RenamingFunction> RenamingPartition::renaming() const {
    auto cls = classes();
    // Candidate names per class: its unique minimum-index member, or any constant of smaller index.
    std::vector<std::vector<Term>> options(cls.size());
    for (std::size_t c = 0; c < cls.size(); ++c) {
        int lo = cls[c][0].index();
        for (Term t : cls[c]) lo = std::min(lo, t.index());
        int at_lo = 0;
        Term min_member;
        for (Term t : cls[c])
            if (t.index() == lo) {
                ++at_lo;
                min_member = t;
            }
        if (at_lo == 1) options[c].push_back(min_member);
        for (Term t : constants_)
            if (t.index() < lo) options[c].push_back(t);
        if (options[c].empty()) return std::nullopt;
    }
    std::vector<std::size_t> order(cls.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return options[a].size() < options[b].size(); });
    std::vector<Term> name(cls.size());
    std::set<Term> used;
    std::function<bool(std::size_t)> assign = [&](std::size_t k) {
        if (k == order.size()) return true;
        std::size_t c = order[k];
        for (Term t : options[c]) {
            if (used.count(t)) continue;
            used.insert(t);
            name[c] = t;
            if (assign(k + 1)) return true;
            used.erase(t);
        }
        return false;
    };
    if (!assign(0)) return std::nullopt;
    RenamingFunction rn;
    for (std::size_t c = 0; c < cls.size(); ++c)
        for (Term t : cls[c])
            if (t != name[c]) rn.map(t, name[c]);
    return rn;
}

std::string RenamingPartition::key() const {
    std::string k;
    for (auto l : label_) k += std::to_string(l) + ",";
    return k;
}

std::vector<RenamingPartition> propose_merges(const MergeConflict& failure, const RenamingPartition& current) {
    std::vector<RenamingPartition> out;
    if (failure.pairs.empty()) return out;
    const auto& known = current.constants();
    RenamingPartition next = current;
    std::set<Term> touched;
    for (auto [a, b] : failure.pairs) {
        if (std::find(known.begin(), known.end(), a) == known.end() ||
            std::find(known.begin(), known.end(), b) == known.end())
            return out;
        next = next.merged({a, b});
        touched.insert(a);
    }
    if (next.renaming()) return {next};
    std::vector<RenamingPartition> candidates;
    // A merged class without a unique lowest index needs a constant of smaller index to be named after.
    for (Term t : touched) {
        auto cls = next.classes()[0];
        for (const auto& c : next.classes())
            if (std::find(c.begin(), c.end(), t) != c.end()) cls = c;
        int lo = cls[0].index();
        for (Term u : cls) lo = std::min(lo, u.index());
        for (Term d : known)
            if (d.index() < lo) candidates.push_back(next.merged({t, d}));
    }
    std::set<std::string> keys{current.key()};
    for (auto& p : candidates)
        if (p.renaming() && keys.insert(p.key()).second) out.push_back(std::move(p));
    std::stable_sort(out.begin(), out.end(), [](const RenamingPartition& a, const RenamingPartition& b) {
        return a.merged_count() < b.merged_count();
    });
    return out;
}

void enumerate_renamings(const std::vector<Term>& constants, const std::function<bool(const RenamingPartition&)>& visit) {
    std::size_t n = constants.size();
    RenamingPartition base(constants);
    std::vector<std::size_t> rgs(n, 0);  // restricted growth string
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t blocks) {
        if (i == n) {
            RenamingPartition p = base;
            std::vector<std::vector<Term>> groups(blocks);
            for (std::size_t j = 0; j < n; ++j) groups[rgs[j]].push_back(constants[j]);
            for (const auto& g : groups) p = p.merged(g);
            if (!p.renaming()) return true;
            return visit(p);
        }
        for (std::size_t b = 0; b <= blocks && b < n; ++b) {
            rgs[i] = b;
            if (!rec(i + 1, std::max(blocks, b + 1))) return false;
        }
        return true;
    };
    if (n == 0) {
        visit(base);
        return;
    }
    rec(0, 0);
}

}  // namespace sentinel
