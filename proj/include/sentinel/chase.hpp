#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sentinel/core.hpp"
#include "sentinel/hom.hpp"

namespace sentinel {

inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

struct ChaseBudget {
    std::uint64_t max_steps = kUnlimited;
    std::uint64_t max_height = kUnlimited;
    std::uint64_t max_atoms = kUnlimited;
    std::chrono::milliseconds wall_clock{0};  // zero means unlimited
};

enum class ChaseOutcome { Saturated, BudgetExhausted, CyclicTermFound };
enum class BudgetKind { None, Steps, Height, Atoms, WallClock };

std::string to_string(ChaseOutcome o);
std::string to_string(BudgetKind b);

struct ChaseStep {
    const Rule* rule = nullptr;
    Substitution h;
    std::vector<Atom> added;
};

struct ChaseTrace {
    Instance initial;
    Instance final;
    std::vector<ChaseStep> steps;
    ChaseOutcome outcome = ChaseOutcome::Saturated;
    BudgetKind exhausted = BudgetKind::None;
    Term cyclic_term;
    // For every derived atom of `final`, the step (1-based) whose trigger produced it.
    // Atom indexes of `final` map to steps through final.first_derived_at.
};

// Replays the steps from the initial instance; true when the final instance is reproduced exactly.
bool replay(const ChaseTrace& trace, std::string* why = nullptr);

// Breadth-first skolem chase: each round applies all triggers of the previous round's instance.
ChaseTrace skolem_chase(const Instance& I0, const RuleSet& R, const ChaseBudget& budget,
                        bool detect_cyclic_terms = false);

// Breadth-first restricted chase: each round applies the triggers of the round's instance that are still active.
// With datalog_first, Datalog rules are saturated before every generating application.
ChaseTrace restricted_chase(const Instance& I0, const RuleSet& R, const ChaseBudget& budget, bool datalog_first = false);

enum class PathMode { Skolem, Restricted };
enum class PathFailureReason { NoTrigger, NoActiveTrigger };

struct PathFailure {
    std::size_t step;  // 1-based
    PathFailureReason reason;
};

// Picks one homomorphism out of the candidates.
using Chooser = std::function<std::size_t(const Rule&, const std::vector<Substitution>&)>;

std::variant<ChaseTrace, PathFailure> run_path(const Instance& I0, const std::vector<const Rule*>& path,
                                               PathMode mode, const Chooser& chooser = {});

// All restricted chase sequences (every active-trigger choice at every step) up to budget.max_steps.
std::vector<ChaseTrace> restricted_chase_exhaustive(const Instance& I0, const RuleSet& R, const ChaseBudget& budget,
                                                    std::size_t max_traces = 100000);

struct TerminationProbe {
    bool all_saturated = true;
    std::size_t states = 0;
    std::size_t longest = 0;
    bool truncated = false;                 // stopped on max_states rather than on the step limit
    std::vector<ChaseStep> counterexample;  // a sequence that was still active at the step limit
};

// Explores every restricted chase sequence from I0, sharing work between sequences that reach the same
// instance. all_saturated is false when some sequence still has an active trigger after max_steps steps.
TerminationProbe restricted_chase_all_terminate(const Instance& I0, const RuleSet& R, std::size_t max_steps,
                                                std::size_t max_states = 2000000);

// True iff no Datalog rule follows a generating rule, ignoring the last element.
bool datalog_first_filter(const std::vector<const Rule*>& path);

// Applies Datalog rules to a fixpoint. The callback sees every application.
void saturate_datalog(Instance& I, const std::vector<const Rule*>& datalog_rules, int step,
                      const std::function<void(const Rule&, const Substitution&,
                                               const std::vector<Instance::AtomIndex>&)>& on_apply = {});

}  // namespace sentinel
