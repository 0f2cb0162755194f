#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sentinel/core.hpp"

namespace sentinel {

struct SearchStats {
    std::uint64_t probes = 0;
    bool exhausted = false;  // probe limit reached, results incomplete
};

// Indexed constants that would have to coincide for a candidate atom to match.
struct MergeConflict {
    std::vector<std::pair<Term, Term>> pairs;
    friend bool operator<(const MergeConflict& a, const MergeConflict& b) { return a.pairs < b.pairs; }
    friend bool operator==(const MergeConflict& a, const MergeConflict& b) { return a.pairs == b.pairs; }
};

struct SearchOptions {
    const Substitution* seed = nullptr;  // bindings fixed before the search starts
    bool newest_first = false;           // visit later-inserted atoms first
    std::uint64_t max_probes = 0;        // 0 means unlimited
    SearchStats* stats = nullptr;
    // When set, near misses that differ only in indexed constants are recorded here, provided the
    // partial match involves a derived atom (first_derived_at > 0).
    std::vector<MergeConflict>* conflicts = nullptr;
    // Overrides which atoms count as derived for conflict recording.
    const std::vector<char>* conflict_atoms = nullptr;
    // Atoms whose flag is 0 are never matched; atoms past the end are allowed.
    const std::vector<char>* allowed = nullptr;
};

// Enumerates every h over vars(conj) with h(conj) ⊆ I, each once. The visitor returns false to stop.
void find_homomorphisms(std::span<const Atom> conj, const Instance& I,
                        const std::function<bool(const Substitution&)>& visit, const SearchOptions& opts = {});
std::vector<Substitution> all_homomorphisms(std::span<const Atom> conj, const Instance& I,
                                            const SearchOptions& opts = {});
std::optional<Substitution> first_homomorphism(std::span<const Atom> conj, const Instance& I,
                                               const SearchOptions& opts = {});

enum class Activeness { Yes, No, Unknown };

struct Trigger {
    const Rule* rule = nullptr;
    Substitution h;
    Activeness active = Activeness::Unknown;
    std::vector<int> triggering_steps;
};

Trigger make_trigger(const Rule& r, Substitution h, const Instance& I);
std::vector<Trigger> find_triggers(const Rule& r, const Instance& I, const SearchOptions& opts = {});

// True iff no extension of h to the existential variables maps head(r) into I.
bool is_active_trigger(const Rule& r, const Substitution& h, const Instance& I, SearchStats* stats = nullptr);
bool is_active_trigger(const Trigger& t, const Instance& I);

// Adds h(sk(head)) to I. New atoms get first_derived_at = step. Returns the indexes of new atoms.
std::vector<Instance::AtomIndex> apply_trigger(const Trigger& t, Instance& I, int step);
std::vector<Instance::AtomIndex> apply_trigger(const Rule& r, const Substitution& h, Instance& I, int step);

}  // namespace sentinel
