#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/acyclicity.hpp"
#include "sentinel/chase.hpp"
#include "sentinel/core.hpp"
#include "sentinel/critdb.hpp"
#include "sentinel/cycles.hpp"

namespace sentinel {

struct ChainWitness {
    std::vector<const Rule*> path;
    ChaseTrace trace;
    std::vector<std::size_t> path_steps;  // trace step (1-based) of each path element
    std::vector<std::size_t> chain;       // trace steps 1 = i_1 < ... < i_m = n, linked by consumed atoms
    RenamingFunction renaming;            // applied to I^π before the run; identity for a given database
};

enum class SafetyStatus { Safe, ActiveWitness, Inconclusive };
std::string to_string(SafetyStatus s);

struct SafetyVerdict {
    SafetyStatus status = SafetyStatus::Safe;
    std::optional<ChainWitness> witness;
    std::string reason;
    std::uint64_t probes = 0;
    std::size_t renamings_tried = 0;
    std::size_t peak_atoms = 0;
};

enum class RenamingMode { None, Demand, Exhaustive, Auto };

struct ActivenessOptions {
    std::uint64_t max_probes = 1000000;
    std::chrono::milliseconds wall_clock{60000};
    std::size_t max_atoms = 100000;
    std::size_t max_renamings = 100000;
    RenamingMode renaming = RenamingMode::Auto;
    std::size_t exhaustive_limit = 8;  // Auto falls back to full enumeration up to this many indexed constants
    // Datalog-first: saturate these rules before each generating step.
    bool datalog_first = false;
    std::vector<const Rule*> datalog_rules;
    // Accept only runs whose final instance reaches this height.
    std::size_t min_height = 0;
    // Search databases rn(U) for U ⊆ I^π built from the copy atoms that steps use, instead of all of rn(I^π).
    // A step then matches derived atoms and its own copy only.
    bool sub_database = false;
    std::function<bool()> cancelled;
};

// Searches for a chained restricted chase sequence for the path starting at I0.
SafetyVerdict is_active_wrt(const std::vector<const Rule*>& path, const Instance& I0,
                            const ActivenessOptions& opts = {});

// Activeness w.r.t. I^π and its index-lowering renamings.
SafetyVerdict is_path_active(const std::vector<const Rule*>& path, const ActivenessOptions& opts = {});

// Re-executes the trace and re-checks activeness of every step, the path order and the chain links.
bool replay_witness(const ChainWitness& w, std::string* why = nullptr);

enum class Verdict { Terminating, NotProven, ResourceExhausted };
std::string to_string(Verdict v);
int exit_code(Verdict v);

struct KSafeOptions {
    CycleShape shape = CycleShape::Paths;
    bool datalog_first = false;
    bool relevance_filter = true;
    std::uint64_t max_cycles = 1000000;
    std::size_t jobs = 1;
    ActivenessOptions activeness;
};

struct KSafeResult {
    Verdict verdict = Verdict::Terminating;
    std::size_t k = 0;
    Condition condition = Condition::WA;
    std::optional<KCycle> witness_cycle;
    std::optional<ChainWitness> witness;
    std::string reason;
    std::uint64_t cycles_enumerated = 0;
    std::uint64_t cycles_pruned = 0;  // irrelevant, mapped to T, or not Datalog-first admissible
    std::uint64_t cycles_checked = 0;
    std::uint64_t renamings_tried = 0;
    std::uint64_t probes = 0;
    std::size_t peak_atoms = 0;
    bool truncated = false;
    std::chrono::milliseconds elapsed{0};
};

// Algorithm 1. k = 0 checks Δ on the whole rule set.
KSafeResult k_safe(const RuleSet& R, std::size_t k, const CycleFunction& phi, const KSafeOptions& opts = {});

// Worker count from CHASE_SENTINEL_JOBS, falling back to the hardware concurrency.
std::size_t default_jobs();

}  // namespace sentinel
