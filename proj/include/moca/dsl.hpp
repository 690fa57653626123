#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "moca/model.hpp"

namespace moca::dsl {

/// A `#` line comment. `text` is everything after the `#`, verbatim.
struct Comment {
    std::string text;

    friend bool operator==(const Comment&, const Comment&) = default;
};

using Entity = std::variant<Comment, ImpactCondition, ImpactRule>;

struct Declaration {
    Entity entity;
    int line = 0;  ///< 1-based source line; 0 for documents built in memory.
};

/// Ordered contents of one `.moca` file.
///
/// Equality compares entities in order and ignores source lines, so a
/// document equals its own re-parse even when blank lines were dropped.
struct RuleDocument {
    std::vector<Declaration> declarations;

    void add(Entity e, int line = 0) { declarations.push_back({std::move(e), line}); }

    friend bool operator==(const RuleDocument& a, const RuleDocument& b);
};

struct ParseError {
    int line = 0;
    int column = 0;  ///< 1-based byte column.
    std::string message;
    std::vector<std::string> expected;
};

/// Either a document or a non-empty list of errors.
struct ParseResult {
    RuleDocument document;
    std::vector<ParseError> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Parse `.moca` text. Never throws on malformed input; every bad line
/// produces one positioned error and parsing resumes on the next line.
ParseResult parse(std::string_view source);

/// Canonical text: one declaration per line, single spaces, LF endings.
std::string serialize(const RuleDocument& doc);

/// Render a single rule/condition the way serialize() writes it (no newline).
std::string to_source(const ImpactRule& rule);
std::string to_source(const ImpactCondition& condition);

/// Reserved words of the rule language; never valid as identifiers.
bool is_keyword(std::string_view word) noexcept;

std::string format_error(const ParseError& e);

}  // namespace moca::dsl
