#include "sentinel/cycles.hpp"

#include <algorithm>
#include <map>

namespace sentinel {

std::vector<const Rule*> KCycle::path(const RuleSet& R) const {
    std::vector<const Rule*> out;
    for (auto i : rules) out.push_back(&R[i]);
    return out;
}

std::string KCycle::str(const RuleSet& R) const {
    std::string s = "(";
    for (std::size_t i = 0; i < rules.size(); ++i) s += (i ? "," : "") + R[rules[i]].label();
    return s + ")";
}

bool is_k_cycle(std::span<const std::size_t> seq, std::size_t k) {
    if (seq.size() < 2 || seq.front() != seq.back()) return false;
    std::map<std::size_t, std::size_t> count;
    for (auto r : seq) ++count[r];
    std::size_t most = 0;
    for (const auto& [_, c] : count) most = std::max(most, c);
    return most == k + 1;
}

bool is_relevant(const DependencyGraph& g, std::span<const std::size_t> seq) {
    if (seq.empty()) return false;
    std::vector<char> reach(seq.size(), 0);
    reach[0] = 1;
    for (std::size_t j = 1; j < seq.size(); ++j)
        for (std::size_t i = 0; i < j && !reach[j]; ++i)
            if (reach[i] && g.has_edge(seq[i], seq[j])) reach[j] = 1;
    return reach.back() != 0;
}

CycleEnumStats enumerate_k_cycles(const RuleSet& R, std::size_t k, const DependencyGraph& g,
                                  const CycleEnumOptions& opts, const std::function<bool(const KCycle&)>& visit) {
    if (k == 0) throw ContractViolation("k-cycles need k >= 1");
    auto start = std::chrono::steady_clock::now();
    CycleEnumStats stats;
    bool stop = false;
    auto comps = strongly_connected_components(g);
    stats.components = comps.size();
    for (const auto& comp : comps) {
        if (stop) break;
        bool internal = comp.size() > 1 || g.has_edge(comp[0], comp[0]);
        if (!internal || (opts.skip_satisfying && (*opts.skip_satisfying)(R, std::span<const std::size_t>(comp)))) {
            ++stats.components_skipped;
            continue;
        }
        std::map<std::size_t, std::size_t> count;
        KCycle current;
        std::size_t top = 0;  // occurrences of the most frequent rule
        std::function<void()> extend = [&]() {
            if (stop) return;
            std::size_t last = current.rules.back();
            for (std::size_t next : comp) {
                if (stop) return;
                if (opts.shape == CycleShape::Edges && !g.has_edge(last, next)) continue;
                if (count[next] == k + 1) continue;
                std::size_t saved_top = top;
                current.rules.push_back(next);
                top = std::max(top, ++count[next]);
                if (next == current.rules.front() && top == k + 1) {
                    if (stats.enumerated >= opts.max_cycles ||
                        (opts.wall_clock.count() > 0 && std::chrono::steady_clock::now() - start > opts.wall_clock)) {
                        stats.truncated = true;
                        stop = true;
                    } else {
                        ++stats.enumerated;
                        if (!visit(current)) stop = true;
                    }
                }
                extend();
                --count[next];
                current.rules.pop_back();
                top = saved_top;
            }
        };
        for (std::size_t s : comp) {
            if (stop) break;
            count.clear();
            current.rules = {s};
            count[s] = 1;
            top = 1;
            extend();
        }
    }
    return stats;
}

std::vector<KCycle> k_cycles(const RuleSet& R, std::size_t k, const DependencyGraph& g, const CycleEnumOptions& opts,
                             CycleEnumStats* stats) {
    std::vector<KCycle> out;
    auto s = enumerate_k_cycles(R, k, g, opts, [&](const KCycle& c) {
        out.push_back(c);
        return true;
    });
    if (stats) *stats = s;
    return out;
}

}  // namespace sentinel
