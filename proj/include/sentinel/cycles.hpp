#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/acyclicity.hpp"
#include "sentinel/core.hpp"
#include "sentinel/deps.hpp"

namespace sentinel {

// Paths: any rule sequence inside a component. Edges: consecutive rules must be dependency edges.
enum class CycleShape { Paths, Edges };

struct KCycle {
    std::vector<std::size_t> rules;  // indexes into the rule set, first == last

    std::vector<const Rule*> path(const RuleSet& R) const;
    std::string str(const RuleSet& R) const;
    friend bool operator==(const KCycle& a, const KCycle& b) = default;
    friend auto operator<=>(const KCycle& a, const KCycle& b) = default;
};

// First equals last, length >= 2, some rule occurs exactly k+1 times and none more often.
bool is_k_cycle(std::span<const std::size_t> seq, std::size_t k);

// A dependency chain 1 = i_1 < ... < i_m = n runs through the sequence.
bool is_relevant(const DependencyGraph& g, std::span<const std::size_t> seq);

struct CycleEnumOptions {
    CycleShape shape = CycleShape::Paths;
    std::uint64_t max_cycles = 1000000;
    std::chrono::milliseconds wall_clock{0};
    // Components whose rules satisfy Φ are skipped.
    const CycleFunction* skip_satisfying = nullptr;
};

struct CycleEnumStats {
    std::uint64_t enumerated = 0;
    bool truncated = false;
    std::size_t components = 0;
    std::size_t components_skipped = 0;
};

// Calls visit on every k-cycle inside one strongly connected component at a time. visit returns false to stop.
CycleEnumStats enumerate_k_cycles(const RuleSet& R, std::size_t k, const DependencyGraph& g,
                                  const CycleEnumOptions& opts, const std::function<bool(const KCycle&)>& visit);
std::vector<KCycle> k_cycles(const RuleSet& R, std::size_t k, const DependencyGraph& g,
                             const CycleEnumOptions& opts = {}, CycleEnumStats* stats = nullptr);

}  // namespace sentinel
