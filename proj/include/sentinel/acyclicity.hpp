#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/chase.hpp"
#include "sentinel/core.hpp"
#include "sentinel/deps.hpp"

namespace sentinel {

enum class Condition { WA, JA, AGRD, MFA };
enum class Tri { True, False, Unknown };

std::optional<Condition> parse_condition(std::string_view name);
std::string to_string(Condition c);
std::string to_string(Tri t);

struct Position {
    SymbolId predicate = 0;
    std::size_t slot = 0;  // 1-based
    std::string str() const;
    friend bool operator==(const Position& a, const Position& b) = default;
    friend auto operator<=>(const Position& a, const Position& b) = default;
};

struct PositionGraph {
    std::vector<Position> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> normal;
    std::vector<std::pair<std::size_t, std::size_t>> special;
    std::size_t node(const Position& p) const;
};

PositionGraph position_graph(const RuleSet& R);

struct WAResult {
    bool acyclic = true;
    std::vector<Position> cycle;  // closed walk through a special edge, first position repeated at the end
};

WAResult weak_acyclicity(const RuleSet& R);
bool is_wa(const RuleSet& R);

// Move(y) for every existential variable y.
std::map<Term, std::set<Position>> move_sets(const RuleSet& R);

struct JAResult {
    bool acyclic = true;
    std::vector<Term> cycle;  // existential variables, first repeated at the end
};

JAResult joint_acyclicity(const RuleSet& R);
bool is_ja(const RuleSet& R);

// A dependency cycle as rule indexes, first repeated at the end.
std::optional<std::vector<std::size_t>> dependency_cycle(const DependencyGraph& g);
bool is_agrd(const RuleSet& R);

struct MFAResult {
    Tri verdict = Tri::Unknown;
    Term cyclic_term;
    ChaseOutcome outcome = ChaseOutcome::Saturated;
    BudgetKind exhausted = BudgetKind::None;
};

ChaseBudget default_mfa_budget();
MFAResult model_faithful_acyclicity(const RuleSet& R, const ChaseBudget& budget = default_mfa_budget());
Tri is_mfa(const RuleSet& R, const ChaseBudget& budget = default_mfa_budget());

// Strongly connected components, each sorted, ordered by smallest member.
std::vector<std::vector<std::size_t>> strongly_connected_components(const DependencyGraph& g);

// Δ holds for R. MFA's unknown counts as false.
bool check_condition(Condition c, const RuleSet& R, const ChaseBudget& mfa_budget = default_mfa_budget());

// Φ_Δ: T iff Δ holds for the rules of the cycle. Memoized on the rule subset; safe to share across threads.
class CycleFunction {
public:
    explicit CycleFunction(Condition c, ChaseBudget mfa_budget = default_mfa_budget());

    Condition condition() const { return condition_; }
    bool operator()(const RuleSet& R, std::span<const std::size_t> cycle) const;
    bool operator()(const RuleSet& R, std::span<const Rule* const> cycle) const;
    std::size_t evaluations() const;

private:
    Condition condition_;
    ChaseBudget budget_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<const RuleSet*, std::vector<std::size_t>>, bool> memo_;
    mutable std::size_t evaluations_ = 0;
};

}  // namespace sentinel
