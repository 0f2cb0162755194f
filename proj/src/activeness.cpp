#include "sentinel/activeness.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace sentinel {

namespace {

using Clock = std::chrono::steady_clock;

class PathSearch {
public:
    PathSearch(const std::vector<const Rule*>& path, const ActivenessOptions& opts, Clock::time_point start,
               SearchStats& stats)
        : path_(path), opts_(opts), start_(start), stats_(stats) {}

    // Runs the backtracking search from I0. Returns the witness when one is found.
    std::optional<ChainWitness> run(const Instance& I0) {
        db_ = nullptr;
        merging_ = false;
        reset(I0);
        dfs(0);
        return std::move(found_);
    }

    // Runs over rn(I^π) and coarsens the partition whenever a step only matches after identifying constants.
    std::optional<ChainWitness> run_merging(const RestrictedCriticalDB& db, const RenamingPartition& p) {
        merging_ = true;
        part_ = p;
        return start(db, *p.renaming());
    }

    // Runs over rn(I^π) without further merging.
    std::optional<ChainWitness> run_renamed(const RestrictedCriticalDB& db, const RenamingFunction& rn) {
        merging_ = false;
        return start(db, rn);
    }

    std::size_t renamings() const { return renamings_; }
    std::size_t peak_atoms() const { return peak_; }
    bool capped() const { return capped_; }
    bool exhausted() const { return exhausted_ || stats_.exhausted; }
    std::string reason() const { return reason_.empty() && stats_.exhausted ? "probe budget" : reason_; }

private:
    std::optional<ChainWitness> start(const RestrictedCriticalDB& db, const RenamingFunction& rn) {
        db_ = &db;
        rn_ = rn;
        used_.clear();
        visited_.clear();
        reset(base());
        dfs(0);
        if (found_) found_->renaming = rn_;
        return std::move(found_);
    }

    bool lazy() const { return db_ && opts_.sub_database; }

    // The database of the current world: rn(U), or all of rn(I^π).
    Instance base() const {
        if (!lazy()) return apply_renaming(rn_, *db_);
        Instance I;
        for (const Atom& a : used_) I.add(rn_.apply(a));
        return I;
    }

    bool out_of_budget() {
        if (opts_.cancelled && opts_.cancelled()) return stop("cancelled");
        if (stats_.exhausted) return stop("probe budget");
        if (opts_.wall_clock.count() > 0 && Clock::now() - start_ > opts_.wall_clock) return stop("wall clock");
        if (I_.size() > opts_.max_atoms) return stop("atom budget");
        return false;
    }

    void reset(const Instance& I0) {
        initial_ = I0;
        I_ = I0;
        peak_ = std::max(peak_, I_.size());
        taint_.assign(I_.size(), 0);
        steps_.clear();
        pred_.assign(1, 0);
        reach_.assign(1, 0);
        path_steps_.clear();
        found_.reset();
    }

    bool stop(const char* why) {
        exhausted_ = true;
        if (reason_.empty()) reason_ = why;
        return true;
    }

    // Applies one trigger as a new trace step and propagates the chain taint.
    void apply(const Rule& r, const Substitution& h, bool path_start) {
        std::size_t step = steps_.size() + 1;
        bool reach = path_start;
        std::size_t pred = 0;
        if (!path_start) {
            int best = -1;
            for (const Atom& a : r.body()) {
                auto idx = I_.find(h.apply(a));
                if (idx && taint_[*idx] && I_.first_derived_at(*idx) > best) best = I_.first_derived_at(*idx);
            }
            if (best > 0) {
                reach = true;
                pred = static_cast<std::size_t>(best);
            }
        }
        auto added = apply_trigger(r, h, I_, static_cast<int>(step));
        peak_ = std::max(peak_, I_.size());
        taint_.resize(I_.size(), reach ? 1 : 0);
        ChaseStep s{&r, h, {}};
        for (auto i : added) s.added.push_back(I_.atom(i));
        steps_.push_back(std::move(s));
        pred_.push_back(pred);
        reach_.push_back(reach ? 1 : 0);
    }

    void undo(std::size_t atoms, std::size_t steps) {
        I_.rollback(atoms);
        taint_.resize(atoms);
        steps_.resize(steps);
        pred_.resize(steps + 1);
        reach_.resize(steps + 1);
    }

    std::vector<Substitution> homs(const Rule& r, bool record_conflicts, const std::vector<char>* allowed = nullptr) {
        SearchOptions o;
        o.allowed = allowed;
        o.stats = &stats_;
        o.max_probes = opts_.max_probes;
        if (record_conflicts) {
            o.conflicts = &conflicts_;
            o.conflict_atoms = &taint_;
        }
        return all_homomorphisms(r.body(), I_, o);
    }

    void saturate() {
        bool changed = true;
        while (changed && !out_of_budget()) {
            changed = false;
            for (const Rule* r : opts_.datalog_rules) {
                for (const auto& h : homs(*r, false)) {
                    if (!is_active_trigger(*r, h, I_, &stats_)) continue;
                    apply(*r, h, false);
                    changed = true;
                }
            }
        }
    }

    int rank(const Rule& r, const Substitution& h) const {
        bool tainted = false, derived = false;
        for (const Atom& a : r.body()) {
            auto idx = I_.find(h.apply(a));
            if (!idx) continue;
            tainted = tainted || taint_[*idx];
            derived = derived || I_.first_derived_at(*idx) > 0;
        }
        return tainted ? 0 : derived ? 1 : 2;
    }

    // e_j(body(r_j)) over I^π constants.
    std::vector<Atom> own_copy(std::size_t j) const {
        Substitution e;
        for (Term v : path_[j]->universals()) e.bind(v, Term::indexed(v.name(), static_cast<int>(j + 1)));
        std::vector<Atom> copy;
        for (const Atom& a : path_[j]->body()) copy.push_back(e.apply(a));
        return copy;
    }

    struct Candidate {
        int rank;
        Substitution h;
        std::vector<Atom> needed;  // own-copy atoms outside U
    };

    bool dfs(std::size_t j) {
        if (out_of_budget()) return false;
        if (j == path_.size()) {
            if (!reach_[path_steps_.back()]) return false;
            if (opts_.min_height && I_.height() < opts_.min_height) return false;
            found_ = witness();
            return true;
        }
        std::size_t atoms = I_.size(), steps = steps_.size();
        const Rule& r = *path_[j];
        if (opts_.datalog_first && !r.is_datalog()) saturate();
        std::size_t mark = I_.size(), saturated = steps_.size();

        // Own-copy atoms outside U join temporarily; a step matches derived atoms and its own copy only.
        std::vector<Atom> copy, source;
        std::vector<char> mask;
        if (lazy()) {
            copy = own_copy(j);
            for (const Atom& a : copy)
                if (I_.add(rn_.apply(a)).second) source.push_back(a);
            taint_.resize(I_.size(), 0);
            mask.assign(I_.size(), 0);
            for (std::size_t i = 0; i < I_.size(); ++i) mask[i] = i >= mark || I_.first_derived_at(i) > 0;
            for (const Atom& a : copy)
                if (auto idx = I_.find(rn_.apply(a))) mask[*idx] = 1;
        }
        conflicts_.clear();
        auto found = homs(r, merging_, mask.empty() ? nullptr : &mask);
        std::vector<MergeConflict> conflicts = std::move(conflicts_);
        std::vector<Candidate> candidates;
        for (auto& h : found) {
            Candidate c{rank(r, h), std::move(h), {}};
            for (const Atom& a : r.body()) {
                auto idx = I_.find(c.h.apply(a));
                if (*idx >= mark && std::find(c.needed.begin(), c.needed.end(), source[*idx - mark]) == c.needed.end())
                    c.needed.push_back(source[*idx - mark]);
            }
            candidates.push_back(std::move(c));
        }
        I_.rollback(mark);
        taint_.resize(mark);
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const auto& a, const auto& b) { return a.rank < b.rank; });

        for (const auto& c : candidates) {
            if (!c.needed.empty() || !is_active_trigger(r, c.h, I_, &stats_)) continue;
            apply(r, c.h, j == 0);
            path_steps_.push_back(steps_.size());
            if (dfs(j + 1)) return true;
            path_steps_.pop_back();
            undo(mark, saturated);
            if (exhausted_) break;
        }
        undo(atoms, steps);
        for (const auto& c : candidates) {
            if (c.needed.empty() || exhausted_) continue;
            std::vector<Atom> used = used_;
            used.insert(used.end(), c.needed.begin(), c.needed.end());
            std::sort(used.begin(), used.end());
            auto prefix = prefix_bindings(j, {});
            prefix.push_back(c.h);
            if (retry(part_, std::move(used), std::move(prefix))) return true;
        }
        if (merging_ && !exhausted_ && merge(j, conflicts)) return true;
        return false;
    }

    struct Snapshot {
        Instance initial, I;
        std::vector<char> taint;
        std::vector<ChaseStep> steps;
        std::vector<std::size_t> pred;
        std::vector<char> reach;
        std::vector<std::size_t> path_steps;
        RenamingPartition part;
        RenamingFunction rn;
        std::vector<Atom> used;
    };

    // Continues the search in another world: partition p, used copy atoms U, and the given path prefix.
    bool retry(const RenamingPartition& p, std::vector<Atom> used, std::vector<Substitution> prefix) {
        Snapshot snap{initial_, I_, taint_, steps_, pred_, reach_, path_steps_, part_, rn_, used_};
        if (rebuild(p, std::move(used), prefix) && dfs(prefix.size())) return true;
        initial_ = std::move(snap.initial);
        I_ = std::move(snap.I);
        taint_ = std::move(snap.taint);
        steps_ = std::move(snap.steps);
        pred_ = std::move(snap.pred);
        reach_ = std::move(snap.reach);
        path_steps_ = std::move(snap.path_steps);
        part_ = std::move(snap.part);
        rn_ = std::move(snap.rn);
        used_ = std::move(snap.used);
        return false;
    }

    bool merge(std::size_t j, std::vector<MergeConflict>& conflicts) {
        std::sort(conflicts.begin(), conflicts.end());
        conflicts.erase(std::unique(conflicts.begin(), conflicts.end()), conflicts.end());
        for (const auto& c : conflicts) {
            for (auto& next : propose_merges(c, part_)) {
                if (renamings_ >= opts_.max_renamings) {
                    capped_ = true;
                    stop("renaming budget");
                    return false;
                }
                ++renamings_;
                auto rn = next.renaming();
                if (!rn) continue;
                std::map<Term, Term> m;
                for (Term t : db_->indexed_constants) {
                    Term from = rn_.apply(t), to = rn->apply(t);
                    if (from != to) m[from] = to;
                }
                if (retry(next, used_, prefix_bindings(j, m))) return true;
                if (exhausted_) return false;
            }
        }
        return false;
    }

    static Term map_term(Term t, const std::map<Term, Term>& m) {
        if (auto it = m.find(t); it != m.end()) return it->second;
        if (!t.is_skolem()) return t;
        std::vector<Term> args;
        for (Term a : t.args()) args.push_back(map_term(a, m));
        return Term::skolem(t.name(), args);
    }

    // Triggers of the first j path steps with constants moved through m.
    std::vector<Substitution> prefix_bindings(std::size_t j, const std::map<Term, Term>& m) const {
        std::vector<Substitution> hs;
        for (std::size_t i = 0; i < j; ++i) {
            Substitution h;
            for (const auto& [v, t] : steps_[path_steps_[i] - 1].h.bindings()) h.bind(v, map_term(t, m));
            hs.push_back(std::move(h));
        }
        return hs;
    }

    // Replays the prefix from the new world's database; fails when a step stops being active.
    bool rebuild(const RenamingPartition& p, std::vector<Atom> used, const std::vector<Substitution>& prefix) {
        auto rn = merging_ ? p.renaming() : std::optional<RenamingFunction>(rn_);
        if (!rn) return false;
        std::string key = p.key() + "#";
        for (const Atom& a : used) key += a.str() + ",";
        for (const auto& h : prefix) key += "|" + h.str();
        if (!visited_.insert(key).second) return false;
        part_ = p;
        rn_ = *rn;
        used_ = std::move(used);
        reset(base());
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            const Rule& r = *path_[i];
            if (opts_.datalog_first && !r.is_datalog()) saturate();
            for (const Atom& a : r.body())
                if (!I_.contains(prefix[i].apply(a))) return false;
            if (!is_active_trigger(r, prefix[i], I_, &stats_)) return false;
            apply(r, prefix[i], i == 0);
            path_steps_.push_back(steps_.size());
        }
        return !out_of_budget();
    }

    ChainWitness witness() const {
        ChainWitness w;
        w.path = path_;
        w.trace.initial = initial_;
        w.trace.final = I_;
        w.trace.steps = steps_;
        w.trace.outcome = ChaseOutcome::Saturated;
        w.path_steps = path_steps_;
        std::size_t t = path_steps_.back();
        while (true) {
            w.chain.push_back(t);
            if (t == path_steps_.front()) break;
            t = pred_[t];
        }
        std::reverse(w.chain.begin(), w.chain.end());
        return w;
    }

    const std::vector<const Rule*>& path_;
    const ActivenessOptions& opts_;
    Clock::time_point start_;
    SearchStats& stats_;
    std::vector<MergeConflict> conflicts_;
    const RestrictedCriticalDB* db_ = nullptr;
    bool merging_ = false;
    std::size_t peak_ = 0;
    RenamingPartition part_;
    RenamingFunction rn_;
    std::vector<Atom> used_;  // copy atoms of I^π that some step has matched
    std::set<std::string> visited_;
    std::size_t renamings_ = 0;
    bool capped_ = false;
    Instance initial_;
    Instance I_;
    std::vector<char> taint_;
    std::vector<ChaseStep> steps_;
    std::vector<std::size_t> pred_;  // per trace step, the step whose atom it consumed on the chain
    std::vector<char> reach_;        // per trace step, on some chain from the first path step
    std::vector<std::size_t> path_steps_;
    std::optional<ChainWitness> found_;
    bool exhausted_ = false;
    std::string reason_;
};

}  // namespace

std::string to_string(SafetyStatus s) {
    switch (s) {
        case SafetyStatus::Safe: return "Safe";
        case SafetyStatus::ActiveWitness: return "ActiveWitness";
        case SafetyStatus::Inconclusive: return "Inconclusive";
    }
    return {};
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Terminating: return "Terminating";
        case Verdict::NotProven: return "NotProven";
        case Verdict::ResourceExhausted: return "ResourceExhausted";
    }
    return {};
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::Terminating: return 0;
        case Verdict::NotProven: return 1;
        case Verdict::ResourceExhausted: return 2;
    }
    return 3;
}

SafetyVerdict is_active_wrt(const std::vector<const Rule*>& path, const Instance& I0, const ActivenessOptions& opts) {
    if (path.empty()) throw ContractViolation("activeness needs a non-empty path");
    SearchStats stats;
    PathSearch search(path, opts, Clock::now(), stats);
    SafetyVerdict v;
    v.witness = search.run(I0);
    v.probes = stats.probes;
    v.peak_atoms = search.peak_atoms();
    if (v.witness) {
        v.status = SafetyStatus::ActiveWitness;
    } else if (search.exhausted()) {
        v.status = SafetyStatus::Inconclusive;
        v.reason = search.reason();
    }
    return v;
}

SafetyVerdict is_path_active(const std::vector<const Rule*>& path, const ActivenessOptions& opts) {
    if (path.empty()) throw ContractViolation("activeness needs a non-empty path");
    auto start = Clock::now();
    SearchStats stats;
    RestrictedCriticalDB db = restricted_critical_db(path);
    RenamingPartition identity(db.indexed_constants);
    SafetyVerdict v;

    auto finish = [&](const PathSearch& search) {
        v.probes = stats.probes;
        v.peak_atoms = std::max(v.peak_atoms, search.peak_atoms());
        if (v.witness) {
            v.status = SafetyStatus::ActiveWitness;
        } else if (search.exhausted()) {
            v.status = SafetyStatus::Inconclusive;
            v.reason = search.reason();
        } else {
            v.status = SafetyStatus::Safe;
            v.reason.clear();
        }
        return v;
    };

    if (opts.renaming == RenamingMode::None) {
        PathSearch search(path, opts, start, stats);
        v.renamings_tried = 1;
        v.witness = search.run_renamed(db, RenamingFunction{});
        return finish(search);
    }
    bool exhaustive = opts.renaming == RenamingMode::Exhaustive;
    if (!exhaustive) {
        PathSearch search(path, opts, start, stats);
        v.witness = search.run_merging(db, identity);
        v.renamings_tried = 1 + search.renamings();
        bool fallback = opts.renaming == RenamingMode::Auto && search.capped() && !stats.exhausted &&
                        db.indexed_constants.size() <= opts.exhaustive_limit;
        if (v.witness || !fallback) return finish(search);
        v.peak_atoms = search.peak_atoms();
    } else if (db.indexed_constants.size() > opts.exhaustive_limit) {
        v.status = SafetyStatus::Inconclusive;
        v.reason = "too many indexed constants for exhaustive renaming";
        return v;
    }
    PathSearch search(path, opts, start, stats);
    enumerate_renamings(db.indexed_constants, [&](const RenamingPartition& p) {
        ++v.renamings_tried;
        auto rn = p.renaming();
        if (!rn) return true;
        auto w = search.run_renamed(db, *rn);
        if (w) {
            v.witness = std::move(w);
            return false;
        }
        return !search.exhausted();
    });
    return finish(search);
}

bool replay_witness(const ChainWitness& w, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const auto& steps = w.trace.steps;
    if (w.path_steps.size() != w.path.size()) return fail("path length mismatch");
    Instance I = w.trace.initial;
    std::size_t next_path = 0;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const ChaseStep& st = steps[s];
        for (const Atom& a : st.rule->body())
            if (!I.contains(st.h.apply(a))) return fail("step " + std::to_string(s + 1) + ": body atom missing");
        if (!is_active_trigger(*st.rule, st.h, I)) return fail("step " + std::to_string(s + 1) + ": trigger not active");
        if (next_path < w.path_steps.size() && w.path_steps[next_path] == s + 1) {
            if (st.rule != w.path[next_path]) return fail("step " + std::to_string(s + 1) + ": rule off the path");
            ++next_path;
        }
        auto added = apply_trigger(*st.rule, st.h, I, static_cast<int>(s + 1));
        std::vector<Atom> got;
        for (auto i : added) got.push_back(I.atom(i));
        if (got != st.added) return fail("step " + std::to_string(s + 1) + ": added atoms differ");
    }
    if (next_path != w.path.size()) return fail("path steps not in order");
    if (I.atom_set() != w.trace.final.atom_set()) return fail("final instance differs");
    if (w.chain.empty() || w.chain.front() != w.path_steps.front() || w.chain.back() != w.path_steps.back())
        return fail("chain does not connect the path end points");
    for (std::size_t a = 0; a + 1 < w.chain.size(); ++a) {
        std::size_t from = w.chain[a], to = w.chain[a + 1];
        if (from >= to) return fail("chain not increasing");
        const ChaseStep& st = steps[to - 1];
        bool linked = false;
        for (const Atom& b : st.rule->body()) {
            auto idx = I.find(st.h.apply(b));
            if (idx && static_cast<std::size_t>(I.first_derived_at(*idx)) == from) linked = true;
        }
        if (!linked) return fail("chain link " + std::to_string(from) + "->" + std::to_string(to) + " not consumed");
    }
    return true;
}

std::size_t default_jobs() {
    if (const char* env = std::getenv("CHASE_SENTINEL_JOBS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

KSafeResult k_safe(const RuleSet& R, std::size_t k, const CycleFunction& phi, const KSafeOptions& opts) {
    auto start = Clock::now();
    KSafeResult res;
    res.k = k;
    res.condition = phi.condition();
    auto done = [&]() {
        res.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
        return res;
    };
    if (k == 0) {
        if (phi.condition() == Condition::MFA) {
            Tri t = is_mfa(R);
            res.verdict = t == Tri::True ? Verdict::Terminating
                          : t == Tri::False ? Verdict::NotProven
                                            : Verdict::ResourceExhausted;
        } else {
            res.verdict = check_condition(phi.condition(), R) ? Verdict::Terminating : Verdict::NotProven;
        }
        if (res.verdict != Verdict::Terminating) res.reason = to_string(phi.condition()) + " does not hold";
        return done();
    }

    DependencyGraph g = dependency_graph(R);
    CycleEnumOptions eo;
    eo.shape = opts.shape;
    eo.max_cycles = opts.max_cycles;
    eo.skip_satisfying = &phi;
    std::vector<KCycle> todo;
    auto es = enumerate_k_cycles(R, k, g, eo, [&](const KCycle& c) {
        auto path = c.path(R);
        if ((opts.relevance_filter && !is_relevant(g, c.rules)) || phi(R, std::span<const std::size_t>(c.rules)) ||
            (opts.datalog_first && !datalog_first_filter(path))) {
            ++res.cycles_pruned;
            return true;
        }
        todo.push_back(c);
        return true;
    });
    res.cycles_enumerated = es.enumerated;
    res.truncated = es.truncated;

    ActivenessOptions base = opts.activeness;
    base.datalog_first = opts.datalog_first;
    base.datalog_rules.clear();
    if (opts.datalog_first)
        for (const Rule& r : R)
            if (r.is_datalog()) base.datalog_rules.push_back(&r);

    std::vector<SafetyVerdict> verdicts(todo.size());
    std::vector<char> ran(todo.size(), 0);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> best{todo.size()};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            if (best.load() < i) continue;
            ActivenessOptions o = base;
            o.cancelled = [&best, i]() { return best.load() < i; };
            verdicts[i] = is_path_active(todo[i].path(R), o);
            ran[i] = 1;
            if (verdicts[i].status == SafetyStatus::ActiveWitness) {
                std::size_t cur = best.load();
                while (i < cur && !best.compare_exchange_weak(cur, i)) {}
            }
        }
    };
    std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, todo.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    bool inconclusive = false;
    std::size_t cut = best.load();
    for (std::size_t i = 0; i < todo.size() && i <= cut; ++i) {
        if (!ran[i]) continue;
        ++res.cycles_checked;
        res.renamings_tried += verdicts[i].renamings_tried;
        res.probes += verdicts[i].probes;
        res.peak_atoms = std::max(res.peak_atoms, verdicts[i].peak_atoms);
        if (i < cut && verdicts[i].status == SafetyStatus::Inconclusive) {
            inconclusive = true;
            if (res.reason.empty()) res.reason = todo[i].str(R) + ": " + verdicts[i].reason;
        }
    }
    if (cut < todo.size()) {
        res.verdict = Verdict::NotProven;
        res.witness_cycle = todo[cut];
        res.witness = std::move(verdicts[cut].witness);
        res.reason = "active cycle " + todo[cut].str(R);
    } else if (inconclusive || res.truncated) {
        res.verdict = Verdict::ResourceExhausted;
        if (res.reason.empty()) res.reason = "cycle enumeration truncated";
    } else {
        res.verdict = Verdict::Terminating;
    }
    return done();
}

}  // namespace sentinel
