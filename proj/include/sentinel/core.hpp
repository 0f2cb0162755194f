#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sentinel {

using TermId = std::uint32_t;
using SymbolId = std::uint32_t;

// Thrown when a documented precondition does not hold.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

SymbolId intern_symbol(std::string_view name);
const std::string& symbol_name(SymbolId id);

enum class TermKind : std::uint8_t { Invalid, Constant, Variable, Skolem, Indexed };

// Interned term handle. Structurally equal terms share one id.
class Term {
public:
    constexpr Term() = default;

    static Term constant(std::string_view name);
    static Term variable(std::string_view name);
    static Term skolem(std::string_view fn, const std::vector<Term>& args);
    static Term indexed(std::string_view var, int index);
    static Term from_id(TermId id) { Term t; t.id_ = id; return t; }

    TermId id() const { return id_; }
    bool valid() const { return id_ != 0; }
    TermKind kind() const;
    bool is_constant() const { return kind() == TermKind::Constant; }
    bool is_variable() const { return kind() == TermKind::Variable; }
    bool is_skolem() const { return kind() == TermKind::Skolem; }
    bool is_indexed() const { return kind() == TermKind::Indexed; }

    // Constant or variable name, skolem symbol, or the variable an indexed constant was built from.
    const std::string& name() const;
    int index() const;
    const std::vector<Term>& args() const;
    int height() const;
    bool is_ground() const;
    // True when some skolem symbol occurs twice on one nesting path.
    bool is_cyclic() const;
    std::string str() const;

    friend bool operator==(Term a, Term b) { return a.id_ == b.id_; }
    friend bool operator!=(Term a, Term b) { return a.id_ != b.id_; }
    friend bool operator<(Term a, Term b) { return a.id_ < b.id_; }

private:
    TermId id_ = 0;
};

struct TermHash {
    std::size_t operator()(Term t) const noexcept { return std::hash<TermId>{}(t.id()); }
};

// Variable name without the standardization suffix.
std::string base_name(std::string_view var);

std::size_t term_height(Term t);

struct Atom {
    SymbolId predicate = 0;
    std::vector<Term> args;

    Atom() = default;
    Atom(SymbolId p, std::vector<Term> a) : predicate(p), args(std::move(a)) {}
    Atom(std::string_view p, std::vector<Term> a) : predicate(intern_symbol(p)), args(std::move(a)) {}

    const std::string& predicate_name() const { return symbol_name(predicate); }
    std::size_t arity() const { return args.size(); }
    bool is_ground() const;
    std::string str() const;

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.predicate == b.predicate && a.args == b.args;
    }
    friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
    friend bool operator<(const Atom& a, const Atom& b) {
        if (a.predicate != b.predicate) return a.predicate < b.predicate;
        return a.args < b.args;
    }
};

struct AtomHash {
    std::size_t operator()(const Atom& a) const noexcept;
};

std::string atoms_str(std::span<const Atom> atoms);

// A finite map from variables to terms. Terms that are not bound map to themselves.
class Substitution {
public:
    Substitution() = default;

    void bind(Term var, Term value);
    std::optional<Term> get(Term var) const;
    bool contains(Term var) const { return get(var).has_value(); }
    Term apply(Term t) const;
    Atom apply(const Atom& a) const;
    std::vector<Atom> apply(std::span<const Atom> atoms) const;
    Substitution restricted_to(std::span<const Term> vars) const;

    const std::vector<std::pair<Term, Term>>& bindings() const { return bindings_; }
    std::size_t size() const { return bindings_.size(); }
    bool empty() const { return bindings_.empty(); }
    std::string str() const;

    friend bool operator==(const Substitution& a, const Substitution& b) { return a.bindings_ == b.bindings_; }
    friend bool operator<(const Substitution& a, const Substitution& b) { return a.bindings_ < b.bindings_; }

private:
    std::vector<std::pair<Term, Term>> bindings_;  // sorted by variable id
};

struct SkolemFunction {
    Term variable;
    std::string symbol;
    std::vector<Term> args;  // frontier variables
};

struct SkolemizedRule {
    std::vector<Atom> head;
    std::vector<SkolemFunction> functions;
    std::string str() const;
};

class Rule {
public:
    Rule() = default;
    Rule(std::string label, std::vector<Atom> body, std::vector<Atom> head);

    const std::string& label() const { return label_; }
    const std::vector<Atom>& body() const { return body_; }
    const std::vector<Atom>& head() const { return head_; }
    const std::vector<Term>& universals() const { return universals_; }
    const std::vector<Term>& frontier() const { return frontier_; }
    const std::vector<Term>& existentials() const { return existentials_; }
    const std::vector<SkolemFunction>& skolem_functions() const { return skolems_; }
    bool is_datalog() const { return existentials_.empty(); }
    bool is_existential(Term v) const;
    std::vector<Term> variables() const;

    // Ground head atoms h(sk(head)). Every universal variable must be bound by h.
    std::vector<Atom> instantiate_head(const Substitution& h) const;
    std::string str() const;

private:
    std::string label_;
    std::vector<Atom> body_;
    std::vector<Atom> head_;
    std::vector<Term> universals_;
    std::vector<Term> frontier_;
    std::vector<Term> existentials_;
    std::vector<SkolemFunction> skolems_;
};

SkolemizedRule skolemize_rule(const Rule& r);

// Copy of r with every variable renamed to base#suffix.
Rule standardize(const Rule& r, std::string_view suffix);
// Copy of r with every variable renamed by appending tag.
Rule rename_variables(const Rule& r, std::string_view tag);

class RuleSet {
public:
    RuleSet() = default;
    explicit RuleSet(std::vector<Rule> rules);

    // Throws std::invalid_argument on arity conflicts or shared variables.
    void add(Rule r);

    const std::vector<Rule>& rules() const { return rules_; }
    const Rule& operator[](std::size_t i) const { return rules_[i]; }
    std::size_t size() const { return rules_.size(); }
    bool empty() const { return rules_.empty(); }
    auto begin() const { return rules_.begin(); }
    auto end() const { return rules_.end(); }

    const std::map<std::string, std::size_t>& schema() const { return schema_; }
    const std::set<std::string>& constants() const { return constants_; }
    std::optional<std::size_t> find(std::string_view label) const;
    RuleSet subset(std::span<const std::size_t> indices) const;
    std::string str() const;

private:
    std::vector<Rule> rules_;
    std::map<std::string, std::size_t> schema_;
    std::set<std::string> constants_;
};

std::size_t rule_set_size(const RuleSet& R);

// Append-only set of ground atoms with lookup indexes. Supports rollback to an earlier size.
class Instance {
public:
    using AtomIndex = std::uint32_t;

    Instance() = default;
    explicit Instance(std::span<const Atom> atoms);

    // Returns the index of the atom and whether it was newly inserted.
    std::pair<AtomIndex, bool> add(const Atom& a, int step = 0);
    bool contains(const Atom& a) const { return index_.count(a) != 0; }
    std::optional<AtomIndex> find(const Atom& a) const;

    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    const Atom& atom(AtomIndex i) const { return atoms_[i]; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    int first_derived_at(AtomIndex i) const { return steps_[i]; }
    int first_derived_at(const Atom& a) const;

    const std::vector<AtomIndex>& with_predicate(SymbolId p) const;
    const std::vector<AtomIndex>& with_term_at(SymbolId p, std::size_t slot, Term t) const;

    std::size_t mark() const { return atoms_.size(); }
    void rollback(std::size_t mark);

    std::size_t height() const;
    std::vector<Term> terms() const;
    bool subset_of(const Instance& other) const;
    std::set<Atom> atom_set() const { return {atoms_.begin(), atoms_.end()}; }
    std::string str() const;

private:
    static std::uint64_t position_key(SymbolId p, std::size_t slot, Term t);

    std::vector<Atom> atoms_;
    std::vector<int> steps_;
    std::vector<std::size_t> height_prefix_;
    std::unordered_map<Atom, AtomIndex, AtomHash> index_;
    std::unordered_map<SymbolId, std::vector<AtomIndex>> by_predicate_;
    std::unordered_map<std::uint64_t, std::vector<AtomIndex>> by_position_;
};

}  // namespace sentinel
