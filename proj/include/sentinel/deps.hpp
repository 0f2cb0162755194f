#pragma once

#include <string>
#include <vector>

#include "sentinel/core.hpp"

namespace sentinel {

// Unifier of B ⊆ body(r2) with H ⊆ head(r1). Atom positions are indexes into the rule's body or head.
struct PieceUnifier {
    std::vector<std::size_t> body_atoms;
    std::vector<std::size_t> head_atoms;
    Substitution theta;  // variables of both rules mapped to their class representative
    std::string str() const;
};

// All piece-unifiers of body(r2) with head(r1). r2 is renamed apart first when it shares variables with r1.
std::vector<PieceUnifier> piece_unifiers(const Rule& r1, const Rule& r2);

bool is_atom_erasing(const PieceUnifier& u, const Rule& r1, const Rule& r2);
bool is_productive(const PieceUnifier& u, const Rule& r1, const Rule& r2);

// r2 depends on r1: some piece-unifier is atom-erasing and productive.
bool depends_on(const Rule& r2, const Rule& r1, PieceUnifier* witness = nullptr);

// r2 depends on r1 w.r.t. I: some h with h(body(r1)) ⊆ I and g: body(r2) → I ∪ h(sk(head(r1))) with g(body(r2)) ⊄ I.
bool depends_on_wrt(const Rule& r2, const Rule& r1, const Instance& I);

struct DependencyEdge {
    std::size_t from;
    std::size_t to;
    PieceUnifier witness;
};

struct DependencyGraph {
    std::size_t nodes = 0;
    std::vector<DependencyEdge> edges;
    std::vector<std::vector<char>> adjacency;

    bool has_edge(std::size_t from, std::size_t to) const { return adjacency[from][to] != 0; }
    std::vector<std::size_t> successors(std::size_t from) const;
    std::string to_dot(const RuleSet& R) const;
};

DependencyGraph dependency_graph(const RuleSet& R);

}  // namespace sentinel
