#include "sentinel/core.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace sentinel {

namespace {

// Chunked storage whose elements never move, so readers need no lock once they hold an id.
template <class T>
class StableStore {
public:
    static constexpr std::size_t kChunkBits = 12;
    static constexpr std::size_t kChunk = std::size_t{1} << kChunkBits;
    static constexpr std::size_t kMaxChunks = std::size_t{1} << 14;

    StableStore() : chunks_(kMaxChunks) {}

    const T& operator[](std::uint32_t i) const { return chunks_[i >> kChunkBits][i & (kChunk - 1)]; }

    std::uint32_t push(T value) {
        std::size_t c = size_ >> kChunkBits;
        if (c >= kMaxChunks) throw std::length_error("intern table full");
        if (!chunks_[c]) chunks_[c] = std::make_unique<T[]>(kChunk);
        chunks_[c][size_ & (kChunk - 1)] = std::move(value);
        return static_cast<std::uint32_t>(size_++);
    }

private:
    std::vector<std::unique_ptr<T[]>> chunks_;
    std::size_t size_ = 0;
};

struct SymbolTable {
    std::shared_mutex mutex;
    StableStore<std::string> names;
    std::unordered_map<std::string, SymbolId> ids;

    SymbolTable() { names.push(""); }
};

SymbolTable& symbols() {
    static SymbolTable table;
    return table;
}

struct TermRecord {
    TermKind kind = TermKind::Invalid;
    std::string name;
    std::vector<Term> args;
    int index = 0;
    int height = 1;
    bool ground = true;
    bool cyclic = false;
    std::vector<SymbolId> symbols;  // skolem symbols occurring in the term, sorted
};

struct TermTable {
    std::shared_mutex mutex;
    StableStore<TermRecord> records;
    std::unordered_map<std::string, TermId> ids;

    TermTable() { records.push(TermRecord{}); }
};

TermTable& terms() {
    static TermTable table;
    return table;
}

std::string term_key(TermKind kind, std::string_view name, const std::vector<Term>& args, int index) {
    std::string key;
    key.reserve(name.size() + args.size() * 4 + 8);
    key.push_back(static_cast<char>(kind));
    key.append(name);
    key.push_back('\0');
    for (Term a : args) {
        TermId id = a.id();
        key.append(reinterpret_cast<const char*>(&id), sizeof id);
    }
    key.append(reinterpret_cast<const char*>(&index), sizeof index);
    return key;
}

const TermRecord& record(TermId id) { return terms().records[id]; }

Term intern(TermRecord rec) {
    auto& table = terms();
    std::string key = term_key(rec.kind, rec.name, rec.args, rec.index);
    {
        std::shared_lock lock(table.mutex);
        auto it = table.ids.find(key);
        if (it != table.ids.end()) return Term::from_id(it->second);
    }
    std::unique_lock lock(table.mutex);
    auto it = table.ids.find(key);
    if (it != table.ids.end()) return Term::from_id(it->second);
    TermId id = table.records.push(std::move(rec));
    table.ids.emplace(std::move(key), id);
    return Term::from_id(id);
}

std::string lower_first(std::string s) {
    if (!s.empty() && s[0] >= 'A' && s[0] <= 'Z') s[0] = static_cast<char>(s[0] - 'A' + 'a');
    return s;
}

}  // namespace

SymbolId intern_symbol(std::string_view name) {
    auto& table = symbols();
    std::string key(name);
    {
        std::shared_lock lock(table.mutex);
        auto it = table.ids.find(key);
        if (it != table.ids.end()) return it->second;
    }
    std::unique_lock lock(table.mutex);
    auto it = table.ids.find(key);
    if (it != table.ids.end()) return it->second;
    SymbolId id = table.names.push(key);
    table.ids.emplace(std::move(key), id);
    return id;
}

const std::string& symbol_name(SymbolId id) { return symbols().names[id]; }

Term Term::constant(std::string_view name) {
    TermRecord r;
    r.kind = TermKind::Constant;
    r.name = name;
    return intern(std::move(r));
}

Term Term::variable(std::string_view name) {
    TermRecord r;
    r.kind = TermKind::Variable;
    r.name = name;
    r.ground = false;
    return intern(std::move(r));
}

Term Term::skolem(std::string_view fn, const std::vector<Term>& args) {
    TermRecord r;
    r.kind = TermKind::Skolem;
    r.name = fn;
    r.args = args;
    SymbolId self = intern_symbol(fn);
    int h = 0;
    for (Term a : args) {
        const TermRecord& ar = record(a.id());
        if (!ar.ground) throw ContractViolation("skolem term over a variable: " + a.str());
        h = std::max(h, ar.height);
        r.cyclic = r.cyclic || ar.cyclic;
        r.symbols.insert(r.symbols.end(), ar.symbols.begin(), ar.symbols.end());
    }
    std::sort(r.symbols.begin(), r.symbols.end());
    r.symbols.erase(std::unique(r.symbols.begin(), r.symbols.end()), r.symbols.end());
    if (std::binary_search(r.symbols.begin(), r.symbols.end(), self)) r.cyclic = true;
    r.symbols.insert(std::lower_bound(r.symbols.begin(), r.symbols.end(), self), self);
    r.height = 1 + h;
    if (args.empty()) r.height = 1;
    return intern(std::move(r));
}

Term Term::indexed(std::string_view var, int index) {
    if (index < 1) throw ContractViolation("indexed constant needs index >= 1");
    TermRecord r;
    r.kind = TermKind::Indexed;
    r.name = var;
    r.index = index;
    return intern(std::move(r));
}

TermKind Term::kind() const { return record(id_).kind; }
const std::string& Term::name() const { return record(id_).name; }
int Term::index() const { return record(id_).index; }
const std::vector<Term>& Term::args() const { return record(id_).args; }
int Term::height() const { return record(id_).height; }
bool Term::is_ground() const { return record(id_).ground; }
bool Term::is_cyclic() const { return record(id_).cyclic; }

std::string Term::str() const {
    const TermRecord& r = record(id_);
    switch (r.kind) {
        case TermKind::Invalid: return "<invalid>";
        case TermKind::Constant: return r.name;
        case TermKind::Variable: return base_name(r.name);
        case TermKind::Indexed: return lower_first(base_name(r.name)) + "__" + std::to_string(r.index);
        case TermKind::Skolem: {
            std::string s = r.name + "(";
            for (std::size_t i = 0; i < r.args.size(); ++i) {
                if (i) s += ",";
                s += r.args[i].str();
            }
            return s + ")";
        }
    }
    return {};
}

std::string base_name(std::string_view var) {
    auto pos = var.find('#');
    return std::string(var.substr(0, pos));
}

std::size_t term_height(Term t) {
    if (!t.is_ground()) throw ContractViolation("height of a non-ground term: " + t.str());
    return static_cast<std::size_t>(t.height());
}

bool Atom::is_ground() const {
    return std::all_of(args.begin(), args.end(), [](Term t) { return t.is_ground(); });
}

std::string Atom::str() const {
    std::string s = predicate_name() + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) s += ",";
        s += args[i].str();
    }
    return s + ")";
}

std::size_t AtomHash::operator()(const Atom& a) const noexcept {
    std::size_t h = std::hash<SymbolId>{}(a.predicate);
    for (Term t : a.args) h = h * 1000003u ^ std::hash<TermId>{}(t.id());
    return h;
}

std::string atoms_str(std::span<const Atom> atoms) {
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) s += ", ";
        s += atoms[i].str();
    }
    return s;
}

void Substitution::bind(Term var, Term value) {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), var,
                               [](const auto& b, Term v) { return b.first < v; });
    if (it != bindings_.end() && it->first == var)
        it->second = value;
    else
        bindings_.insert(it, {var, value});
}

std::optional<Term> Substitution::get(Term var) const {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), var,
                               [](const auto& b, Term v) { return b.first < v; });
    if (it != bindings_.end() && it->first == var) return it->second;
    return std::nullopt;
}

Term Substitution::apply(Term t) const {
    if (!t.is_variable()) return t;
    auto v = get(t);
    return v ? *v : t;
}

Atom Substitution::apply(const Atom& a) const {
    Atom out;
    out.predicate = a.predicate;
    out.args.reserve(a.args.size());
    for (Term t : a.args) out.args.push_back(apply(t));
    return out;
}

std::vector<Atom> Substitution::apply(std::span<const Atom> atoms) const {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) out.push_back(apply(a));
    return out;
}

Substitution Substitution::restricted_to(std::span<const Term> vars) const {
    Substitution s;
    for (Term v : vars)
        if (auto t = get(v)) s.bind(v, *t);
    return s;
}

std::string Substitution::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < bindings_.size(); ++i) {
        if (i) s += ", ";
        s += bindings_[i].first.str() + "/" + bindings_[i].second.str();
    }
    return s + "}";
}

std::string SkolemizedRule::str() const {
    auto render = [&](Term t) {
        for (const auto& f : functions) {
            if (t != f.variable) continue;
            std::string s = f.symbol + "(";
            for (std::size_t i = 0; i < f.args.size(); ++i) s += (i ? "," : "") + f.args[i].str();
            return s + ")";
        }
        return t.str();
    };
    std::string s;
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (i) s += ", ";
        s += head[i].predicate_name() + "(";
        for (std::size_t j = 0; j < head[i].args.size(); ++j) s += (j ? "," : "") + render(head[i].args[j]);
        s += ")";
    }
    return s;
}

namespace {

void collect_vars(const std::vector<Atom>& atoms, std::vector<Term>& out) {
    for (const Atom& a : atoms)
        for (Term t : a.args)
            if (t.is_variable() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
}

bool contains(const std::vector<Term>& v, Term t) { return std::find(v.begin(), v.end(), t) != v.end(); }

}  // namespace

Rule::Rule(std::string label, std::vector<Atom> body, std::vector<Atom> head)
    : label_(std::move(label)), body_(std::move(body)), head_(std::move(head)) {
    if (body_.empty()) throw std::invalid_argument("rule " + label_ + " has an empty body");
    if (head_.empty()) throw std::invalid_argument("rule " + label_ + " has an empty head");
    for (const auto* side : {&body_, &head_})
        for (const Atom& a : *side)
            for (Term t : a.args)
                if (!t.is_variable() && !t.is_constant())
                    throw std::invalid_argument("rule " + label_ + " contains a non-source term " + t.str());
    collect_vars(body_, universals_);
    std::vector<Term> head_vars;
    collect_vars(head_, head_vars);
    for (Term v : head_vars) {
        if (contains(universals_, v))
            frontier_.push_back(v);
        else
            existentials_.push_back(v);
    }
    for (Term z : existentials_) {
        SkolemFunction f;
        f.variable = z;
        f.symbol = "f_" + lower_first(base_name(z.name())) + "^" + label_;
        f.args = frontier_;
        skolems_.push_back(std::move(f));
    }
}

bool Rule::is_existential(Term v) const { return contains(existentials_, v); }

std::vector<Term> Rule::variables() const {
    std::vector<Term> out = universals_;
    out.insert(out.end(), existentials_.begin(), existentials_.end());
    return out;
}

std::vector<Atom> Rule::instantiate_head(const Substitution& h) const {
    Substitution full = h.restricted_to(frontier_);
    for (Term x : frontier_)
        if (!full.contains(x)) throw ContractViolation("unbound frontier variable " + x.str());
    for (const auto& f : skolems_) {
        std::vector<Term> args;
        args.reserve(f.args.size());
        for (Term x : f.args) args.push_back(full.apply(x));
        full.bind(f.variable, Term::skolem(f.symbol, args));
    }
    return full.apply(head_);
}

std::string Rule::str() const {
    return "[" + label_ + "] " + atoms_str(head_) + " :- " + atoms_str(body_) + ".";
}

SkolemizedRule skolemize_rule(const Rule& r) { return {r.head(), r.skolem_functions()}; }

namespace {

Rule rename_with(const Rule& r, const std::function<std::string(Term)>& fn) {
    Substitution s;
    for (Term v : r.variables()) s.bind(v, Term::variable(fn(v)));
    return Rule(r.label(), s.apply(r.body()), s.apply(r.head()));
}

}  // namespace

Rule standardize(const Rule& r, std::string_view suffix) {
    return rename_with(r, [&](Term v) { return base_name(v.name()) + "#" + std::string(suffix); });
}

Rule rename_variables(const Rule& r, std::string_view tag) {
    return rename_with(r, [&](Term v) { return v.name() + std::string(tag); });
}

RuleSet::RuleSet(std::vector<Rule> rules) {
    for (auto& r : rules) add(std::move(r));
}

void RuleSet::add(Rule r) {
    std::vector<Term> vars = r.variables();
    for (const Rule& other : rules_)
        for (Term v : other.variables())
            if (contains(vars, v))
                throw std::invalid_argument("rules " + other.label() + " and " + r.label() +
                                            " share variable " + v.name());
    for (const auto* side : {&r.body(), &r.head()}) {
        for (const Atom& a : *side) {
            auto [it, inserted] = schema_.emplace(a.predicate_name(), a.arity());
            if (!inserted && it->second != a.arity())
                throw std::invalid_argument("arity conflict for " + a.predicate_name());
            for (Term t : a.args)
                if (t.is_constant()) constants_.insert(t.name());
        }
    }
    rules_.push_back(std::move(r));
}

std::optional<std::size_t> RuleSet::find(std::string_view label) const {
    for (std::size_t i = 0; i < rules_.size(); ++i)
        if (rules_[i].label() == label) return i;
    return std::nullopt;
}

RuleSet RuleSet::subset(std::span<const std::size_t> indices) const {
    RuleSet out;
    for (std::size_t i : indices) out.add(rules_.at(i));
    return out;
}

std::string RuleSet::str() const {
    std::string s;
    for (const Rule& r : rules_) s += r.str() + "\n";
    return s;
}

std::size_t rule_set_size(const RuleSet& R) {
    std::size_t n = 0;
    for (const Rule& r : R) {
        for (const Atom& a : r.body()) n += a.arity();
        for (const Atom& a : r.head()) n += a.arity();
    }
    return n;
}

Instance::Instance(std::span<const Atom> atoms) {
    for (const Atom& a : atoms) add(a, 0);
}

std::uint64_t Instance::position_key(SymbolId p, std::size_t slot, Term t) {
    return (std::uint64_t{p} << 40) ^ (std::uint64_t{slot & 0xff} << 32) ^ t.id();
}

std::pair<Instance::AtomIndex, bool> Instance::add(const Atom& a, int step) {
    auto it = index_.find(a);
    if (it != index_.end()) return {it->second, false};
    if (!a.is_ground()) throw ContractViolation("instance atoms must be ground: " + a.str());
    auto id = static_cast<AtomIndex>(atoms_.size());
    atoms_.push_back(a);
    steps_.push_back(step);
    std::size_t h = height_prefix_.empty() ? 1 : height_prefix_.back();
    for (Term t : a.args) h = std::max<std::size_t>(h, t.height());
    height_prefix_.push_back(h);
    index_.emplace(a, id);
    by_predicate_[a.predicate].push_back(id);
    for (std::size_t i = 0; i < a.args.size(); ++i) by_position_[position_key(a.predicate, i, a.args[i])].push_back(id);
    return {id, true};
}

std::optional<Instance::AtomIndex> Instance::find(const Atom& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int Instance::first_derived_at(const Atom& a) const {
    auto i = find(a);
    if (!i) throw ContractViolation("atom not in instance: " + a.str());
    return steps_[*i];
}

const std::vector<Instance::AtomIndex>& Instance::with_predicate(SymbolId p) const {
    static const std::vector<AtomIndex> empty;
    auto it = by_predicate_.find(p);
    return it == by_predicate_.end() ? empty : it->second;
}

const std::vector<Instance::AtomIndex>& Instance::with_term_at(SymbolId p, std::size_t slot, Term t) const {
    static const std::vector<AtomIndex> empty;
    auto it = by_position_.find(position_key(p, slot, t));
    return it == by_position_.end() ? empty : it->second;
}

void Instance::rollback(std::size_t mark) {
    while (atoms_.size() > mark) {
        const Atom& a = atoms_.back();
        by_predicate_[a.predicate].pop_back();
        for (std::size_t i = 0; i < a.args.size(); ++i) by_position_[position_key(a.predicate, i, a.args[i])].pop_back();
        index_.erase(a);
        atoms_.pop_back();
        steps_.pop_back();
        height_prefix_.pop_back();
    }
}

std::size_t Instance::height() const { return height_prefix_.empty() ? 1 : height_prefix_.back(); }

std::vector<Term> Instance::terms() const {
    std::vector<Term> out;
    std::set<Term> seen;
    for (const Atom& a : atoms_)
        for (Term t : a.args)
            if (seen.insert(t).second) out.push_back(t);
    return out;
}

bool Instance::subset_of(const Instance& other) const {
    return std::all_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) { return other.contains(a); });
}

std::string Instance::str() const { return "{" + atoms_str(atoms_) + "}"; }

}  // namespace sentinel
