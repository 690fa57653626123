#include "moca/model.hpp"

#include <string>

namespace moca {

MetricValue::MetricValue(int value) : value_(value) {
    if (value < 0 || value > 100) {
        throw ConfigError("metric value " + std::to_string(value) + " outside [0, 100]");
    }
}

Thresholds::Thresholds(int low, int high) : low_(low), high_(high) {
    if (!(0 < low && low < high && high < 100)) {
        throw ConfigError("invalid thresholds " + std::to_string(low) + "," + std::to_string(high) +
                          ": require 0 < low < high < 100");
    }
}

Level level_of(MetricValue value, const Thresholds& thresholds) {
    if (value.value() <= thresholds.low()) return Level::Low;
    if (value.value() >= thresholds.high()) return Level::High;
    return Level::Medium;
}

std::optional<MetricValue> CulturalProfile::value_of(std::string_view metric_id) const {
    if (auto it = values.find(std::string(metric_id)); it != values.end()) return it->second;
    return std::nullopt;
}

NormalizedRule normalize(const ImpactRule& rule) {
    const bool high = rule.stated_level == StatedLevel::High;
    const bool positive = rule.sign == Sign::Positive;
    return NormalizedRule{
        .rule_id = rule.id,
        .metric = rule.metric,
        .polarity = (high == positive) ? +1 : -1,
        .condition = rule.condition,
        .element = rule.element,
    };
}

int contribution_at(const NormalizedRule& rule, Level level) noexcept {
    switch (level) {
        case Level::High: return rule.polarity;
        case Level::Low: return -rule.polarity;
        case Level::Medium: return 0;
    }
    return 0;
}

namespace {

constexpr bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }
constexpr bool is_lower(char c) noexcept { return c >= 'a' && c <= 'z'; }
constexpr bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

}  // namespace

bool is_identifier(std::string_view s) noexcept {
    if (s.empty() || !(is_upper(s[0]) || is_lower(s[0]))) return false;
    for (char c : s) {
        if (!(is_upper(c) || is_lower(c) || is_digit(c) || c == '_')) return false;
    }
    return true;
}

bool is_metric_id(std::string_view s) noexcept {
    if (s.empty() || !is_upper(s[0])) return false;
    for (char c : s) {
        if (!(is_upper(c) || is_digit(c) || c == '_')) return false;
    }
    return true;
}

std::string_view to_string(CultureLevel v) noexcept {
    return v == CultureLevel::National ? "National" : "Organizational";
}

std::string_view to_string(MetricSource v) noexcept {
    return v == MetricSource::Hofstede ? "Hofstede" : "CVM";
}

std::string_view to_string(Level v) noexcept {
    switch (v) {
        case Level::Low: return "LOW";
        case Level::Medium: return "MEDIUM";
        case Level::High: return "HIGH";
    }
    return "?";
}

std::string_view to_string(StatedLevel v) noexcept {
    return v == StatedLevel::High ? "HIGH" : "LOW";
}

std::string_view to_string(ElementKind v) noexcept {
    switch (v) {
        case ElementKind::Practice: return "Practice";
        case ElementKind::Role: return "Role";
        case ElementKind::Artifact: return "Artifact";
        case ElementKind::Technique: return "Technique";
        case ElementKind::Tool: return "Tool";
    }
    return "?";
}

std::string_view to_string(Sign v) noexcept {
    return v == Sign::Positive ? "POSITIVE" : "NEGATIVE";
}

std::optional<CultureLevel> parse_culture_level(std::string_view s) noexcept {
    if (s == "National") return CultureLevel::National;
    if (s == "Organizational") return CultureLevel::Organizational;
    return std::nullopt;
}

std::optional<MetricSource> parse_metric_source(std::string_view s) noexcept {
    if (s == "Hofstede") return MetricSource::Hofstede;
    if (s == "CVM") return MetricSource::CVM;
    return std::nullopt;
}

std::optional<ElementKind> parse_element_kind(std::string_view s) noexcept {
    if (s == "Practice") return ElementKind::Practice;
    if (s == "Role") return ElementKind::Role;
    if (s == "Artifact") return ElementKind::Artifact;
    if (s == "Technique") return ElementKind::Technique;
    if (s == "Tool") return ElementKind::Tool;
    return std::nullopt;
}

}  // namespace moca
