#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "sentinel/activeness.hpp"
#include "sentinel/chase.hpp"

namespace sentinel {

inline constexpr int kReportVersion = 1;
inline constexpr int kExitUsage = 3;

// Runs the chase-sentinel command line. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// SHA-256 of the bytes, lowercase hex.
std::string sha256_hex(const std::string& bytes);

nlohmann::ordered_json step_json(std::size_t step, const ChaseStep& s);
nlohmann::ordered_json witness_json(const ChainWitness& w);
nlohmann::ordered_json analysis_json(const KSafeResult& r, const RuleSet& R, const std::string& path,
                                     const std::string& digest, bool datalog_first);

}  // namespace sentinel
