#include "sentinel/acyclicity.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include "sentinel/critdb.hpp"

namespace sentinel {

namespace {

using Digraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;

std::vector<int> component_labels(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    Digraph g(n);
    for (auto [u, v] : edges) boost::add_edge(u, v, g);
    std::vector<int> comp(n, 0);
    if (n > 0) boost::strong_components(g, comp.data());
    return comp;
}

// Shortest path from `from` to `to`, both included.
std::vector<std::size_t> bfs_path(const std::vector<std::vector<std::size_t>>& adj, std::size_t from, std::size_t to) {
    std::vector<std::ptrdiff_t> parent(adj.size(), -1);
    std::deque<std::size_t> queue{from};
    parent[from] = static_cast<std::ptrdiff_t>(from);
    while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        if (u == to) break;
        for (std::size_t v : adj[u])
            if (parent[v] < 0) {
                parent[v] = static_cast<std::ptrdiff_t>(u);
                queue.push_back(v);
            }
    }
    if (parent[to] < 0) return {};
    std::vector<std::size_t> path{to};
    while (path.back() != from) path.push_back(static_cast<std::size_t>(parent[path.back()]));
    std::reverse(path.begin(), path.end());
    return path;
}

// Some directed cycle, first node repeated at the end.
std::optional<std::vector<std::size_t>> find_cycle(const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t u = 0; u < adj.size(); ++u)
        for (std::size_t v : adj[u]) {
            if (u == v) return std::vector<std::size_t>{u, u};
            edges.emplace_back(u, v);
        }
    auto comp = component_labels(adj.size(), edges);
    for (auto [u, v] : edges) {
        if (comp[u] != comp[v]) continue;
        auto back = bfs_path(adj, v, u);
        std::vector<std::size_t> cycle{u};
        cycle.insert(cycle.end(), back.begin(), back.end());
        return cycle;
    }
    return std::nullopt;
}

std::vector<Position> positions_of(const std::vector<Atom>& atoms, Term v) {
    std::vector<Position> out;
    for (const Atom& a : atoms)
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (a.args[i] == v) out.push_back({a.predicate, i + 1});
    return out;
}

}  // namespace

std::optional<Condition> parse_condition(std::string_view name) {
    if (name == "wa" || name == "WA") return Condition::WA;
    if (name == "ja" || name == "JA") return Condition::JA;
    if (name == "agrd" || name == "aGRD" || name == "AGRD") return Condition::AGRD;
    if (name == "mfa" || name == "MFA") return Condition::MFA;
    return std::nullopt;
}

std::string to_string(Condition c) {
    switch (c) {
        case Condition::WA: return "wa";
        case Condition::JA: return "ja";
        case Condition::AGRD: return "agrd";
        case Condition::MFA: return "mfa";
    }
    return {};
}

std::string to_string(Tri t) {
    switch (t) {
        case Tri::True: return "true";
        case Tri::False: return "false";
        case Tri::Unknown: return "unknown";
    }
    return {};
}

std::string Position::str() const { return symbol_name(predicate) + "[" + std::to_string(slot) + "]"; }

std::size_t PositionGraph::node(const Position& p) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), p);
    if (it == nodes.end() || *it != p) throw ContractViolation("unknown position " + p.str());
    return static_cast<std::size_t>(it - nodes.begin());
}

PositionGraph position_graph(const RuleSet& R) {
    PositionGraph g;
    for (const auto& [pred, arity] : R.schema())
        for (std::size_t i = 1; i <= arity; ++i) g.nodes.push_back({intern_symbol(pred), i});
    std::sort(g.nodes.begin(), g.nodes.end());
    std::set<std::pair<std::size_t, std::size_t>> normal, special;
    for (const Rule& r : R) {
        for (Term x : r.frontier()) {
            for (const Position& from : positions_of(r.body(), x)) {
                std::size_t u = g.node(from);
                for (const Position& to : positions_of(r.head(), x)) normal.insert({u, g.node(to)});
                for (Term z : r.existentials())
                    for (const Position& to : positions_of(r.head(), z)) special.insert({u, g.node(to)});
            }
        }
    }
    g.normal.assign(normal.begin(), normal.end());
    g.special.assign(special.begin(), special.end());
    return g;
}

WAResult weak_acyclicity(const RuleSet& R) {
    PositionGraph g = position_graph(R);
    std::vector<std::vector<std::size_t>> adj(g.nodes.size());
    auto edges = g.normal;
    edges.insert(edges.end(), g.special.begin(), g.special.end());
    for (auto [u, v] : edges) adj[u].push_back(v);
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    auto comp = component_labels(g.nodes.size(), edges);
    WAResult res;
    for (auto [u, v] : g.special) {
        if (comp[u] != comp[v]) continue;
        res.acyclic = false;
        res.cycle.push_back(g.nodes[u]);
        for (std::size_t n : bfs_path(adj, v, u)) res.cycle.push_back(g.nodes[n]);
        break;
    }
    return res;
}

bool is_wa(const RuleSet& R) { return weak_acyclicity(R).acyclic; }

std::map<Term, std::set<Position>> move_sets(const RuleSet& R) {
    std::map<Term, std::set<Position>> out;
    for (const Rule& r : R) {
        for (Term y : r.existentials()) {
            auto& move = out[y];
            for (const Position& p : positions_of(r.head(), y)) move.insert(p);
            bool changed = true;
            while (changed) {
                changed = false;
                for (const Rule& s : R) {
                    for (Term x : s.universals()) {
                        auto body = positions_of(s.body(), x);
                        if (!std::all_of(body.begin(), body.end(), [&](const Position& p) { return move.count(p); }))
                            continue;
                        for (const Position& p : positions_of(s.head(), x)) changed = move.insert(p).second || changed;
                    }
                }
            }
        }
    }
    return out;
}

JAResult joint_acyclicity(const RuleSet& R) {
    auto moves = move_sets(R);
    std::vector<Term> nodes;
    std::vector<const Rule*> owner;
    for (const Rule& r : R)
        for (Term y : r.existentials()) {
            nodes.push_back(y);
            owner.push_back(&r);
        }
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        const auto& move = moves[nodes[a]];
        for (std::size_t b = 0; b < nodes.size(); ++b) {
            const Rule& r = *owner[b];
            for (Term x : r.universals()) {
                if (positions_of(r.head(), x).empty()) continue;
                auto body = positions_of(r.body(), x);
                if (std::all_of(body.begin(), body.end(), [&](const Position& p) { return move.count(p); })) {
                    adj[a].push_back(b);
                    break;
                }
            }
        }
    }
    JAResult res;
    if (auto cyc = find_cycle(adj)) {
        res.acyclic = false;
        for (auto n : *cyc) res.cycle.push_back(nodes[n]);
    }
    return res;
}

bool is_ja(const RuleSet& R) { return joint_acyclicity(R).acyclic; }

std::optional<std::vector<std::size_t>> dependency_cycle(const DependencyGraph& g) {
    std::vector<std::vector<std::size_t>> adj(g.nodes);
    for (std::size_t u = 0; u < g.nodes; ++u) adj[u] = g.successors(u);
    return find_cycle(adj);
}

bool is_agrd(const RuleSet& R) { return !dependency_cycle(dependency_graph(R)).has_value(); }

ChaseBudget default_mfa_budget() {
    ChaseBudget b;
    b.max_atoms = 100000;
    b.wall_clock = std::chrono::milliseconds(60000);
    return b;
}

MFAResult model_faithful_acyclicity(const RuleSet& R, const ChaseBudget& budget) {
    ChaseTrace t = skolem_chase(skolem_critical_db(R), R, budget, true);
    MFAResult res;
    res.outcome = t.outcome;
    res.exhausted = t.exhausted;
    switch (t.outcome) {
        case ChaseOutcome::Saturated: res.verdict = Tri::True; break;
        case ChaseOutcome::CyclicTermFound:
            res.verdict = Tri::False;
            res.cyclic_term = t.cyclic_term;
            break;
        case ChaseOutcome::BudgetExhausted: res.verdict = Tri::Unknown; break;
    }
    return res;
}

Tri is_mfa(const RuleSet& R, const ChaseBudget& budget) { return model_faithful_acyclicity(R, budget).verdict; }

std::vector<std::vector<std::size_t>> strongly_connected_components(const DependencyGraph& g) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& e : g.edges) edges.emplace_back(e.from, e.to);
    auto comp = component_labels(g.nodes, edges);
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < g.nodes; ++i) groups[comp[i]].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [_, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

bool check_condition(Condition c, const RuleSet& R, const ChaseBudget& mfa_budget) {
    switch (c) {
        case Condition::WA: return is_wa(R);
        case Condition::JA: return is_ja(R);
        case Condition::AGRD: return is_agrd(R);
        case Condition::MFA: return is_mfa(R, mfa_budget) == Tri::True;
    }
    return false;
}

CycleFunction::CycleFunction(Condition c, ChaseBudget mfa_budget) : condition_(c), budget_(mfa_budget) {}

bool CycleFunction::operator()(const RuleSet& R, std::span<const std::size_t> cycle) const {
    std::vector<std::size_t> key(cycle.begin(), cycle.end());
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    {
        std::lock_guard lock(mutex_);
        auto it = memo_.find({&R, key});
        if (it != memo_.end()) return it->second;
    }
    bool value = check_condition(condition_, R.subset(key), budget_);
    std::lock_guard lock(mutex_);
    ++evaluations_;
    memo_.emplace(std::make_pair(&R, key), value);
    return value;
}

bool CycleFunction::operator()(const RuleSet& R, std::span<const Rule* const> cycle) const {
    std::vector<std::size_t> idx;
    for (const Rule* r : cycle) {
        if (r < R.rules().data() || r >= R.rules().data() + R.size())
            throw ContractViolation("cycle rule does not belong to the rule set");
        idx.push_back(static_cast<std::size_t>(r - R.rules().data()));
    }
    return (*this)(R, std::span<const std::size_t>(idx));
}

std::size_t CycleFunction::evaluations() const {
    std::lock_guard lock(mutex_);
    return evaluations_;
}

}  // namespace sentinel
