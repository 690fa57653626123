#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "moca/dsl.hpp"
#include "moca/model.hpp"

namespace moca {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s) noexcept;

struct SourceLocation {
    std::string file;
    int line = 0;    ///< 0 when unknown.
    int column = 0;  ///< 0 when unknown.

    friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

struct Finding {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    std::string entity_id;
    std::optional<SourceLocation> location;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
    std::vector<Finding> findings;
    /// Set by validate_completeness when a manifest is present.
    std::optional<std::size_t> matrix_domain;

    bool has_errors() const noexcept;
    std::size_t count(Severity s) const noexcept;
    /// True if any Error is an I/O failure (unreadable input).
    bool has_io_errors() const noexcept;

    void error(std::string code, std::string message, std::string entity_id,
               std::optional<SourceLocation> where = std::nullopt);
    void warning(std::string code, std::string message, std::string entity_id,
                 std::optional<SourceLocation> where = std::nullopt);
    void append(const ValidationReport& other);

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Declared sizes of a complete model; checked by validate_completeness.
struct ExpectedCounts {
    int metrics = 0;
    int practices = 0;
    int roles = 0;
    int practice_categories = 0;

    friend bool operator==(const ExpectedCounts&, const ExpectedCounts&) = default;
};

/// Raw, unresolved contents of one or more input files.
struct KbSources {
    std::vector<CulturalMetric> metrics;
    std::vector<AgileElement> elements;
    std::vector<ImpactCondition> conditions;
    std::vector<ImpactRule> rules;
    std::vector<CulturalProfile> profiles;
    std::optional<ExpectedCounts> manifest;

    /// Where each entity was declared, keyed by "<class>:<id>" (e.g.
    /// "rule:H4"). Duplicate declarations append further locations.
    std::map<std::string, std::vector<SourceLocation>> origins;

    void note_origin(std::string_view entity_class, std::string_view id, SourceLocation where);
};

class KnowledgeBase;

/// Either a resolved knowledge base or a report containing at least one Error.
using LoadResult = std::variant<KnowledgeBase, ValidationReport>;

/// A resolved, immutable knowledge base.
///
/// Metrics keep declaration order (rows of the impact matrix). Elements,
/// conditions, rules and profiles are held sorted by id, so the result does
/// not depend on the order entities or files were supplied in.
class KnowledgeBase {
public:
    const std::vector<CulturalMetric>& metrics() const noexcept { return metrics_; }
    const std::vector<AgileElement>& elements() const noexcept { return elements_; }
    const std::vector<ImpactCondition>& conditions() const noexcept { return conditions_; }
    const std::vector<ImpactRule>& rules() const noexcept { return rules_; }
    const std::vector<CulturalProfile>& profiles() const noexcept { return profiles_; }
    const std::optional<ExpectedCounts>& manifest() const noexcept { return manifest_; }
    /// Non-fatal findings produced while assembling (e.g. ineligible targets).
    const ValidationReport& warnings() const noexcept { return warnings_; }

    const CulturalMetric* find_metric(std::string_view id) const noexcept;
    const AgileElement* find_element(std::string_view id) const noexcept;
    const ImpactCondition* find_condition(std::string_view id) const noexcept;
    const ImpactRule* find_rule(std::string_view id) const noexcept;
    const CulturalProfile* find_profile(std::string_view name) const noexcept;

    /// Lookup variants that throw LookupError.
    const AgileElement& element(std::string_view id) const;
    const ImpactRule& rule(std::string_view id) const;
    const CulturalProfile& profile(std::string_view name) const;

    /// Practices and roles, sorted by id: the columns of the impact matrix.
    std::vector<const AgileElement*> rule_eligible_elements() const;
    /// Rules targeting `element_id`, sorted by rule id.
    std::vector<const ImpactRule*> rules_for(std::string_view element_id) const;

    /// |metrics| x |practices + roles|, independent of rules.
    std::size_t matrix_domain_size() const noexcept;

    /// Resolve and validate in-memory sources.
    static LoadResult assemble(KbSources sources);

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

private:
    KnowledgeBase() = default;

    std::vector<CulturalMetric> metrics_;
    std::vector<AgileElement> elements_;
    std::vector<ImpactCondition> conditions_;
    std::vector<ImpactRule> rules_;
    std::vector<CulturalProfile> profiles_;
    std::optional<ExpectedCounts> manifest_;
    ValidationReport warnings_;
};

/// Read files (and directories, non-recursively: *.json and *.moca) into
/// sources. Problems are appended to `report`. Paths are processed in sorted
/// order, so the outcome does not depend on argument order.
KbSources read_sources(const std::vector<std::filesystem::path>& paths, ValidationReport& report);

/// read_sources + assemble.
LoadResult load(const std::vector<std::filesystem::path>& paths);

/// Read a profiles file and check it against `kb`'s metrics.
std::variant<std::vector<CulturalProfile>, ValidationReport> load_profiles(const std::filesystem::path& path,
                                                                           const KnowledgeBase& kb);

/// Manifest-gated count checks and uncovered-cell warnings.
ValidationReport validate_completeness(const KnowledgeBase& kb);

}  // namespace moca
