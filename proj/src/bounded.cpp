#include "sentinel/bounded.hpp"

#include <charconv>
#include <limits>
#include <set>
#include <stdexcept>

#include "sentinel/critdb.hpp"

namespace sentinel {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kMax / a) return kMax;
    return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return b > kMax - a ? kMax : a + b; }

std::uint64_t parse_number(std::string_view s) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

BoundFunction BoundFunction::constant(std::uint64_t c) {
    if (c == 0) throw std::invalid_argument("bound functions are positive");
    BoundFunction f;
    f.kind_ = Kind::Constant;
    f.a_ = c;
    return f;
}

BoundFunction BoundFunction::linear(std::uint64_t a, std::uint64_t b) {
    if (a == 0 && b == 0) throw std::invalid_argument("bound functions are positive");
    BoundFunction f;
    f.kind_ = Kind::Linear;
    f.a_ = a;
    f.b_ = b;
    return f;
}

BoundFunction BoundFunction::exp_tower(std::uint64_t kappa) {
    BoundFunction f;
    f.kind_ = Kind::ExpTower;
    f.a_ = kappa;
    return f;
}

BoundFunction BoundFunction::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("expected kind:value, got '" + std::string(text) + "'");
    auto kind = text.substr(0, colon);
    auto rest = text.substr(colon + 1);
    if (kind == "const") return constant(parse_number(rest));
    if (kind == "exptower") return exp_tower(parse_number(rest));
    if (kind == "linear") {
        auto comma = rest.find(',');
        if (comma == std::string_view::npos) throw std::invalid_argument("linear needs a,b");
        return linear(parse_number(rest.substr(0, comma)), parse_number(rest.substr(comma + 1)));
    }
    throw std::invalid_argument("unknown bound kind '" + std::string(kind) + "'");
}

std::uint64_t BoundFunction::evaluate(std::uint64_t n) const {
    switch (kind_) {
        case Kind::Constant: return a_;
        case Kind::Linear: return std::max<std::uint64_t>(1, sat_add(sat_mul(a_, n), b_));
        case Kind::ExpTower: {
            std::uint64_t v = std::max<std::uint64_t>(n, 1);
            for (std::uint64_t i = 0; i < a_; ++i) {
                if (v >= 64) return kMax;
                v = std::uint64_t{1} << v;
            }
            return v;
        }
    }
    return a_;
}

std::string BoundFunction::str() const {
    switch (kind_) {
        case Kind::Constant: return "const:" + std::to_string(a_);
        case Kind::Linear: return "linear:" + std::to_string(a_) + "," + std::to_string(b_);
        case Kind::ExpTower: return "exptower:" + std::to_string(a_);
    }
    return {};
}

std::string to_string(MembResult r) {
    switch (r) {
        case MembResult::T: return "T";
        case MembResult::F: return "F";
        case MembResult::ResourceExhausted: return "ResourceExhausted";
    }
    return {};
}

std::vector<const Rule*> support_path(const ChaseTrace& trace, const Atom& target) {
    const Instance& I = trace.final;
    std::set<std::size_t> steps;
    std::vector<Atom> todo{target};
    while (!todo.empty()) {
        Atom a = std::move(todo.back());
        todo.pop_back();
        int s = I.first_derived_at(a);
        if (s <= 0 || !steps.insert(static_cast<std::size_t>(s)).second) continue;
        const ChaseStep& st = trace.steps[static_cast<std::size_t>(s) - 1];
        for (const Atom& b : st.rule->body()) todo.push_back(st.h.apply(b));
    }
    std::vector<const Rule*> out;
    for (auto s : steps) out.push_back(trace.steps[s - 1].rule);
    return out;
}

MembReport memb_check(const RuleSet& R, const BoundFunction& delta, const MembOptions& opts) {
    MembReport rep;
    rep.bound = delta.evaluate(rule_set_size(R));
    for (const Rule& r : R)
        if (r.head().size() > 1) {
            rep.caveat = "rule set has multi-atom heads: a T verdict is sound, an F verdict may be spurious";
            break;
        }
    ChaseBudget budget = opts.chase;
    std::uint64_t limit = rep.bound == kUnlimited ? kUnlimited : rep.bound + 1;
    budget.max_height = std::min(budget.max_height, limit);
    ChaseTrace trace = skolem_chase(skolem_critical_db(R), R, budget);
    bool saturated = trace.outcome == ChaseOutcome::Saturated ||
                     (trace.outcome == ChaseOutcome::BudgetExhausted && trace.exhausted == BudgetKind::Height);
    if (!saturated) {
        rep.result = MembResult::ResourceExhausted;
        rep.reason = "skolem chase stopped on the " + to_string(trace.exhausted) + " budget";
        return rep;
    }
    if (trace.final.height() <= rep.bound) return rep;

    rep.phase = 2;
    std::set<std::vector<const Rule*>> seen;
    for (const Atom& a : trace.final.atoms()) {
        std::size_t h = 0;
        for (Term t : a.args) h = std::max<std::size_t>(h, static_cast<std::size_t>(t.height()));
        if (h < limit) continue;
        auto path = support_path(trace, a);
        if (path.empty() || !seen.insert(path).second) continue;
        if (seen.size() > opts.max_paths) {
            rep.result = MembResult::ResourceExhausted;
            rep.reason = "too many support paths";
            return rep;
        }
        rep.paths.push_back(path);
    }
    ActivenessOptions ao = opts.activeness;
    ao.min_height = limit;
    bool inconclusive = false;
    for (const auto& path : rep.paths) {
        ++rep.paths_checked;
        SafetyVerdict v = is_path_active(path, ao);
        if (v.status == SafetyStatus::ActiveWitness) {
            rep.result = MembResult::F;
            rep.witness = std::move(v.witness);
            return rep;
        }
        if (v.status == SafetyStatus::Inconclusive) {
            inconclusive = true;
            rep.reason = v.reason;
        }
    }
    rep.result = inconclusive ? MembResult::ResourceExhausted : MembResult::T;
    return rep;
}

}  // namespace sentinel
