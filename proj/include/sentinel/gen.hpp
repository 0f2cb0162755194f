#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sentinel/core.hpp"

namespace sentinel {

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class HeadShape { Chained, Discrete };

struct GenParams {
    std::size_t count = 10;
    std::size_t predicate_pool = 20;
    std::size_t arity = 4;
    std::size_t max_repeated = 3;
    std::size_t body_atoms = 1;
    std::size_t head_atoms = 3;
    HeadShape shape = HeadShape::Chained;
    std::uint64_t seed = 1;
};

// Linear rules with arity 4 over a pool of 20 predicates; "chained" or "discrete" heads.
std::optional<GenParams> preset(std::string_view name);

// Predicates p0..p{pool-1}. Body atoms are joined last-to-first; the first head atom takes body variables
// in random slots (at least one) and fresh existentials elsewhere.
RuleSet generate(const GenParams& p);

}  // namespace sentinel
