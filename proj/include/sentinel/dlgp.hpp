#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/core.hpp"

namespace sentinel {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct SourceDocument {
    std::vector<Atom> facts;
    RuleSet rules;
    std::string path;
    std::vector<std::size_t> fact_lines;
    std::vector<std::size_t> rule_lines;

    Instance database() const { return Instance(facts); }
};

// Grammar: statements are either "atom, ..., atom." facts or "[label] head :- body." rules.
// Variables start with an uppercase letter, constants with a lowercase letter or digit; "%" starts a comment.
// Rule variables are standardized apart by suffixing them with the rule ordinal.
SourceDocument parse_dlgp(std::string_view text, std::string path = {});
SourceDocument parse_dlgp_file(const std::string& path);

std::string serialize_dlgp(const SourceDocument& doc);
std::string serialize_facts(std::span<const Atom> facts);
std::string serialize_term(Term t);

}  // namespace sentinel
