#include "sentinel/deps.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sentinel/hom.hpp"

namespace sentinel {

namespace {

class UnionFind {
public:
    Term find(Term t) {
        auto it = parent_.find(t);
        if (it == parent_.end() || it->second == t) return t;
        Term root = find(it->second);
        parent_[t] = root;
        return root;
    }

    // Constants are rigid: a class may hold at most one of them.
    bool unite(Term a, Term b) {
        a = find(a);
        b = find(b);
        if (a == b) return true;
        if (!a.is_variable() && !b.is_variable()) return false;
        if (!a.is_variable()) std::swap(a, b);
        parent_[a] = b;
        return true;
    }

private:
    std::map<Term, Term> parent_;
};

bool shares_variables(const Rule& a, const Rule& b) {
    auto va = a.variables();
    for (Term v : b.variables())
        if (std::find(va.begin(), va.end(), v) != va.end()) return true;
    return false;
}

std::vector<Term> atom_vars(const std::vector<Atom>& atoms, const std::vector<std::size_t>& pick) {
    std::vector<Term> out;
    for (std::size_t i : pick)
        for (Term t : atoms[i].args)
            if (t.is_variable() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return out;
}

std::vector<std::size_t> bits(unsigned mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; mask; ++i, mask >>= 1)
        if (mask & 1) out.push_back(i);
    return out;
}

std::set<Atom> image(const Substitution& theta, const std::vector<Atom>& atoms) {
    auto v = theta.apply(atoms);
    return {v.begin(), v.end()};
}

std::vector<PieceUnifier> unifiers_apart(const Rule& r1, const Rule& r2) {
    const auto& head = r1.head();
    const auto& body = r2.body();
    if (head.size() > 16 || body.size() > 16) throw ContractViolation("rule too large for piece-unification");
    std::vector<PieceUnifier> out;
    std::set<std::pair<std::pair<unsigned, unsigned>, Substitution>> seen;
    for (unsigned bmask = 1; bmask < (1u << body.size()); ++bmask) {
        auto B = bits(bmask);
        std::set<SymbolId> bpreds;
        for (auto i : B) bpreds.insert(body[i].predicate);
        for (unsigned hmask = 1; hmask < (1u << head.size()); ++hmask) {
            auto H = bits(hmask);
            std::set<SymbolId> hpreds;
            for (auto i : H) hpreds.insert(head[i].predicate);
            if (bpreds != hpreds) continue;
            // Every atom of B is sent to some atom of H, covering H, so θ(B) = θ(H).
            std::vector<std::size_t> choice(B.size(), 0);
            while (true) {
                std::vector<char> hit(H.size(), 0);
                for (auto c : choice) hit[c] = 1;
                bool covers = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
                UnionFind uf;
                bool ok = covers;
                for (std::size_t i = 0; ok && i < B.size(); ++i) {
                    const Atom& b = body[B[i]];
                    const Atom& h = head[H[choice[i]]];
                    if (b.predicate != h.predicate || b.arity() != h.arity()) {
                        ok = false;
                        break;
                    }
                    for (std::size_t j = 0; ok && j < b.arity(); ++j) ok = uf.unite(b.args[j], h.args[j]);
                }
                if (ok) {
                    // Existentials of H may only meet variables of B that do not occur in body(r2) \ B.
                    std::vector<std::size_t> rest;
                    for (std::size_t i = 0; i < body.size(); ++i)
                        if (!(bmask >> i & 1)) rest.push_back(i);
                    auto bvars = atom_vars(body, B);
                    auto rest_vars = atom_vars(body, rest);
                    auto hvars = atom_vars(head, H);
                    std::vector<Term> all = bvars;
                    all.insert(all.end(), hvars.begin(), hvars.end());
                    for (Term z : hvars) {
                        if (!ok) break;
                        if (!r1.is_existential(z)) continue;
                        Term root = uf.find(z);
                        if (!root.is_variable()) ok = false;
                        for (Term other : all) {
                            if (other == z || uf.find(other) != root) continue;
                            bool in_b = std::find(bvars.begin(), bvars.end(), other) != bvars.end();
                            bool in_rest = std::find(rest_vars.begin(), rest_vars.end(), other) != rest_vars.end();
                            if (!in_b || in_rest) ok = false;
                        }
                    }
                    if (ok) {
                        PieceUnifier u;
                        u.body_atoms = B;
                        u.head_atoms = H;
                        for (Term v : all) {
                            Term root = uf.find(v);
                            if (root != v) u.theta.bind(v, root);
                        }
                        if (seen.insert({{bmask, hmask}, u.theta}).second) out.push_back(std::move(u));
                    }
                }
                std::size_t pos = 0;
                while (pos < choice.size() && ++choice[pos] == H.size()) choice[pos++] = 0;
                if (pos == choice.size()) break;
            }
        }
    }
    return out;
}

const Rule& apart(const Rule& r1, const Rule& r2, Rule& storage) {
    if (!shares_variables(r1, r2)) return r2;
    storage = rename_variables(r2, "'");
    return storage;
}

}  // namespace

std::string PieceUnifier::str() const {
    std::string s = "B={";
    for (std::size_t i = 0; i < body_atoms.size(); ++i) s += (i ? "," : "") + std::to_string(body_atoms[i] + 1);
    s += "} H={";
    for (std::size_t i = 0; i < head_atoms.size(); ++i) s += (i ? "," : "") + std::to_string(head_atoms[i] + 1);
    return s + "} theta=" + theta.str();
}

std::vector<PieceUnifier> piece_unifiers(const Rule& r1, const Rule& r2) {
    Rule storage;
    return unifiers_apart(r1, apart(r1, r2, storage));
}

bool is_atom_erasing(const PieceUnifier& u, const Rule& r1, const Rule& r2) {
    auto b2 = image(u.theta, r2.body());
    auto b1 = image(u.theta, r1.body());
    return !std::includes(b1.begin(), b1.end(), b2.begin(), b2.end());
}

bool is_productive(const PieceUnifier& u, const Rule& r1, const Rule& r2) {
    auto h2 = image(u.theta, r2.head());
    auto pool = image(u.theta, r1.body());
    for (const auto& part : {image(u.theta, r1.head()), image(u.theta, r2.body())}) pool.insert(part.begin(), part.end());
    return !std::includes(pool.begin(), pool.end(), h2.begin(), h2.end());
}

bool depends_on(const Rule& r2, const Rule& r1, PieceUnifier* witness) {
    Rule storage;
    const Rule& other = apart(r1, r2, storage);
    for (auto& u : unifiers_apart(r1, other)) {
        if (is_atom_erasing(u, r1, other) && is_productive(u, r1, other)) {
            if (witness) *witness = u;
            return true;
        }
    }
    return false;
}

bool depends_on_wrt(const Rule& r2, const Rule& r1, const Instance& I) {
    bool found = false;
    find_homomorphisms(r1.body(), I, [&](const Substitution& h) {
        Instance J = I;
        bool grew = false;
        for (const Atom& a : r1.instantiate_head(h)) grew = J.add(a, 1).second || grew;
        if (!grew) return true;
        find_homomorphisms(r2.body(), J, [&](const Substitution& g) {
            for (const Atom& a : r2.body()) {
                if (!I.contains(g.apply(a))) {
                    found = true;
                    return false;
                }
            }
            return true;
        });
        return !found;
    });
    return found;
}

std::vector<std::size_t> DependencyGraph::successors(std::size_t from) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < nodes; ++j)
        if (adjacency[from][j]) out.push_back(j);
    return out;
}

std::string DependencyGraph::to_dot(const RuleSet& R) const {
    std::string s = "digraph dependencies {\n";
    for (std::size_t i = 0; i < nodes; ++i) s += "  \"" + R[i].label() + "\";\n";
    for (const auto& e : edges) s += "  \"" + R[e.from].label() + "\" -> \"" + R[e.to].label() + "\";\n";
    return s + "}\n";
}

DependencyGraph dependency_graph(const RuleSet& R) {
    DependencyGraph g;
    g.nodes = R.size();
    g.adjacency.assign(R.size(), std::vector<char>(R.size(), 0));
    for (std::size_t i = 0; i < R.size(); ++i) {
        for (std::size_t j = 0; j < R.size(); ++j) {
            PieceUnifier w;
            if (depends_on(R[j], R[i], &w)) {
                g.adjacency[i][j] = 1;
                g.edges.push_back({i, j, std::move(w)});
            }
        }
    }
    return g;
}

}  // namespace sentinel
