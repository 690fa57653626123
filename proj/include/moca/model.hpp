#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace moca {

/// Raised for invalid run configuration (thresholds, out-of-range values).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an id does not resolve against a knowledge base.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// ---------------------------------------------------------------------------
// Cultural dimension
// ---------------------------------------------------------------------------

enum class CultureLevel { National, Organizational };
enum class MetricSource { Hofstede, CVM };

struct CulturalMetric {
    std::string id;
    std::string name;
    CultureLevel level = CultureLevel::National;
    std::string low_pole;
    std::string high_pole;
    MetricSource source = MetricSource::Hofstede;

    friend bool operator==(const CulturalMetric&, const CulturalMetric&) = default;
};

/// A measured value on the 0..100 scale. Construction enforces the range.
class MetricValue {
public:
    explicit MetricValue(int value);

    int value() const noexcept { return value_; }

    friend auto operator<=>(const MetricValue&, const MetricValue&) = default;

private:
    int value_;
};

/// Discretized metric value. Ordered Low < Medium < High.
enum class Level { Low = 0, Medium = 1, High = 2 };

/// The two levels a rule or predicate may state. Medium is never stated.
enum class StatedLevel { Low, High };

constexpr Level to_level(StatedLevel s) noexcept {
    return s == StatedLevel::High ? Level::High : Level::Low;
}

/// Cut points for level_of. Valid iff 0 < low < high < 100.
class Thresholds {
public:
    Thresholds() = default;
    Thresholds(int low, int high);

    int low() const noexcept { return low_; }
    int high() const noexcept { return high_; }

    friend bool operator==(const Thresholds&, const Thresholds&) = default;

private:
    int low_ = 33;
    int high_ = 67;
};

/// value <= low -> Low, value >= high -> High, otherwise Medium.
Level level_of(MetricValue value, const Thresholds& thresholds);

struct CulturalProfile {
    std::string name;
    std::map<std::string, MetricValue> values;

    std::optional<MetricValue> value_of(std::string_view metric_id) const;

    friend bool operator==(const CulturalProfile&, const CulturalProfile&) = default;
};

// ---------------------------------------------------------------------------
// Agile elements dimension
// ---------------------------------------------------------------------------

enum class ElementKind { Practice, Role, Artifact, Technique, Tool };

struct AgileElement {
    std::string id;
    std::string name;
    ElementKind kind = ElementKind::Practice;
    std::optional<std::string> category;
    std::vector<std::string> source_methods;

    friend bool operator==(const AgileElement&, const AgileElement&) = default;
};

/// Practices and roles span the impact matrix; other kinds are taxonomy only.
constexpr bool is_rule_eligible(ElementKind kind) noexcept {
    return kind == ElementKind::Practice || kind == ElementKind::Role;
}

// ---------------------------------------------------------------------------
// Causal model
// ---------------------------------------------------------------------------

struct ContextFlag {
    std::string flag;

    friend bool operator==(const ContextFlag&, const ContextFlag&) = default;
};

struct MetricPredicate {
    std::string metric;
    StatedLevel level = StatedLevel::High;

    friend bool operator==(const MetricPredicate&, const MetricPredicate&) = default;
};

using ConditionTerm = std::variant<ContextFlag, MetricPredicate>;

/// Conjunction of terms gating one or more rules.
struct ImpactCondition {
    std::string id;
    std::string description;
    std::vector<ConditionTerm> terms;

    friend bool operator==(const ImpactCondition&, const ImpactCondition&) = default;
};

enum class Sign { Positive, Negative };

/// One causal relation as authored: "IF (condition) THEN level metric -> (sign) element".
struct ImpactRule {
    std::string id;
    std::string title;
    std::optional<std::string> condition;
    std::string metric;
    StatedLevel stated_level = StatedLevel::High;
    Sign sign = Sign::Positive;
    std::string element;
    std::string rationale;

    friend bool operator==(const ImpactRule&, const ImpactRule&) = default;
};

/// A rule rewritten so that polarity is the contribution at a High value.
struct NormalizedRule {
    std::string rule_id;
    std::string metric;
    int polarity = +1;
    std::optional<std::string> condition;
    std::string element;

    friend bool operator==(const NormalizedRule&, const NormalizedRule&) = default;
};

NormalizedRule normalize(const ImpactRule& rule);

/// Contribution of a rule at a concrete level: polarity * (+1 High, -1 Low, 0 Medium).
int contribution_at(const NormalizedRule& rule, Level level) noexcept;

/// `letter { letter | digit | '_' }`, ASCII only.
bool is_identifier(std::string_view s) noexcept;

/// `[A-Z][A-Z0-9_]*`
bool is_metric_id(std::string_view s) noexcept;

// ---------------------------------------------------------------------------
// Names used in files and reports
// ---------------------------------------------------------------------------

std::string_view to_string(CultureLevel v) noexcept;
std::string_view to_string(MetricSource v) noexcept;
std::string_view to_string(Level v) noexcept;
std::string_view to_string(StatedLevel v) noexcept;
std::string_view to_string(ElementKind v) noexcept;
std::string_view to_string(Sign v) noexcept;

std::optional<CultureLevel> parse_culture_level(std::string_view s) noexcept;
std::optional<MetricSource> parse_metric_source(std::string_view s) noexcept;
std::optional<ElementKind> parse_element_kind(std::string_view s) noexcept;

}  // namespace moca
