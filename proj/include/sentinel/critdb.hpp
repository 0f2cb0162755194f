#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sentinel/core.hpp"
#include "sentinel/hom.hpp"

namespace sentinel {

inline const char* const kStar = "*";

// Every predicate of sch(R) filled with all tuples over constants(R) ∪ {*}.
Instance skolem_critical_db(const RuleSet& R);

struct RestrictedCriticalDB {
    std::vector<const Rule*> path;
    Instance atoms;
    std::vector<Term> indexed_constants;  // in order of first appearance
};

// I^π: the union of e_i(body(r_i)) with e_i(v) = <v,i>.
RestrictedCriticalDB restricted_critical_db(const std::vector<const Rule*>& path);

// Index-lowering map between indexed constants; identity elsewhere.
class RenamingFunction {
public:
    RenamingFunction() = default;

    // Throws ContractViolation unless the target has a strictly smaller index.
    void map(Term from, Term to);
    Term apply(Term t) const;
    Atom apply(const Atom& a) const;
    bool is_identity() const { return mapping_.empty(); }
    bool valid() const;
    const std::map<Term, Term>& mapping() const { return mapping_; }
    RenamingFunction compose_after(const RenamingFunction& first) const;  // this ∘ first
    std::string str() const;

private:
    std::map<Term, Term> mapping_;
};

Instance apply_renaming(const RenamingFunction& rn, const RestrictedCriticalDB& db);

// A partition of indexed constants into classes that a renaming collapses.
class RenamingPartition {
public:
    RenamingPartition() = default;
    explicit RenamingPartition(std::vector<Term> constants);

    const std::vector<Term>& constants() const { return constants_; }
    std::size_t class_of(Term t) const;
    std::vector<std::vector<Term>> classes() const;
    RenamingPartition merged(const std::vector<Term>& group) const;
    std::size_t merged_count() const;  // constants that are not their class's name
    // An index-lowering renaming whose kernel is this partition, if one exists.
    std::optional<RenamingFunction> renaming() const;
    std::string key() const;

private:
    std::vector<Term> constants_;
    std::vector<std::size_t> label_;
};

// Minimal achievable partitions resolving a recorded match failure, ordered by the number of merged constants.
std::vector<RenamingPartition> propose_merges(const MergeConflict& failure, const RenamingPartition& current);

// Every partition of the constants that some index-lowering renaming realizes.
void enumerate_renamings(const std::vector<Term>& constants, const std::function<bool(const RenamingPartition&)>& visit);

}  // namespace sentinel
