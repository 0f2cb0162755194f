#include "sentinel/gen.hpp"

#include <random>

namespace sentinel {

std::optional<GenParams> preset(std::string_view name) {
    GenParams p;
    if (name == "chained") return p;
    if (name == "discrete") {
        p.shape = HeadShape::Discrete;
        return p;
    }
    return std::nullopt;
}

RuleSet generate(const GenParams& p) {
    if (p.predicate_pool == 0 || p.arity == 0 || p.max_repeated == 0 || p.body_atoms == 0 || p.head_atoms == 0)
        throw GenerationError("generator parameters must be positive");
    if (p.body_atoms + p.head_atoms > p.predicate_pool * p.max_repeated)
        throw GenerationError("cannot place " + std::to_string(p.body_atoms + p.head_atoms) + " atoms over " +
                              std::to_string(p.predicate_pool) + " predicates with at most " +
                              std::to_string(p.max_repeated) + " repeats each");
    std::mt19937_64 rng(p.seed);
    RuleSet out;
    for (std::size_t n = 1; n <= p.count; ++n) {
        std::string suffix = "#" + std::to_string(n);
        std::size_t fresh = 0;
        auto var = [&](char base) { return Term::variable(std::string(1, base) + std::to_string(++fresh) + suffix); };
        std::vector<std::size_t> used(p.predicate_pool, 0);
        auto pick = [&]() {
            std::vector<std::size_t> open;
            for (std::size_t i = 0; i < p.predicate_pool; ++i)
                if (used[i] < p.max_repeated) open.push_back(i);
            std::uniform_int_distribution<std::size_t> d(0, open.size() - 1);
            std::size_t chosen = open[d(rng)];
            ++used[chosen];
            return "p" + std::to_string(chosen);
        };

        std::vector<Atom> body;
        std::vector<Term> body_vars;
        for (std::size_t b = 0; b < p.body_atoms; ++b) {
            std::vector<Term> args;
            for (std::size_t s = 0; s < p.arity; ++s) {
                Term t = (s == 0 && b > 0) ? body.back().args.back() : var('X');
                args.push_back(t);
                if (s > 0 || b == 0) body_vars.push_back(t);
            }
            body.emplace_back(pick(), std::move(args));
        }

        std::vector<Atom> head;
        std::bernoulli_distribution coin(0.5);
        std::uniform_int_distribution<std::size_t> any_body(0, body_vars.size() - 1);
        std::vector<Term> first;
        bool frontier = false;
        for (std::size_t s = 0; s < p.arity; ++s) {
            if (coin(rng)) {
                first.push_back(body_vars[any_body(rng)]);
                frontier = true;
            } else {
                first.push_back(var('Z'));
            }
        }
        if (!frontier) first[std::uniform_int_distribution<std::size_t>(0, p.arity - 1)(rng)] = body_vars[any_body(rng)];
        head.emplace_back(pick(), std::move(first));
        for (std::size_t h = 1; h < p.head_atoms; ++h) {
            std::vector<Term> args;
            for (std::size_t s = 0; s < p.arity; ++s) {
                if (s == 0 && p.shape == HeadShape::Chained)
                    args.push_back(head.back().args.back());
                else
                    args.push_back(var('Z'));
            }
            head.emplace_back(pick(), std::move(args));
        }
        out.add(Rule("r" + std::to_string(n), std::move(body), std::move(head)));
    }
    return out;
}

}  // namespace sentinel
