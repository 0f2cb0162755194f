#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/activeness.hpp"
#include "sentinel/chase.hpp"
#include "sentinel/core.hpp"

namespace sentinel {

// const:c, linear:a,b (a*n+b) or exptower:k. Arithmetic saturates at UINT64_MAX.
class BoundFunction {
public:
    enum class Kind { Constant, Linear, ExpTower };

    static BoundFunction constant(std::uint64_t c);
    static BoundFunction linear(std::uint64_t a, std::uint64_t b);
    static BoundFunction exp_tower(std::uint64_t kappa);
    // Throws std::invalid_argument on malformed text.
    static BoundFunction parse(std::string_view text);

    Kind kind() const { return kind_; }
    std::uint64_t evaluate(std::uint64_t n) const;
    std::string str() const;

private:
    Kind kind_ = Kind::Constant;
    std::uint64_t a_ = 1;
    std::uint64_t b_ = 0;
};

enum class MembResult { T, F, ResourceExhausted };
std::string to_string(MembResult r);

struct MembOptions {
    ChaseBudget chase = {kUnlimited, kUnlimited, 100000, std::chrono::milliseconds(60000)};
    ActivenessOptions activeness;
    std::size_t max_paths = 10000;
};

struct MembReport {
    MembResult result = MembResult::T;
    int phase = 1;
    std::uint64_t bound = 0;  // δ(||R||)
    std::size_t paths_checked = 0;
    std::vector<std::vector<const Rule*>> paths;
    std::optional<ChainWitness> witness;
    std::string reason;
    std::string caveat;  // set for rule sets with multi-atom heads
};

// Rule sequence of the derivation support of atom `target` in the trace, in step order.
std::vector<const Rule*> support_path(const ChaseTrace& trace, const Atom& target);

MembReport memb_check(const RuleSet& R, const BoundFunction& delta, const MembOptions& opts = {});

}  // namespace sentinel
