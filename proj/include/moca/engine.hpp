#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "moca/kb.hpp"
#include "moca/model.hpp"

namespace moca {

struct EvaluationContext {
    CulturalProfile profile;
    std::set<std::string> flags;
    Thresholds thresholds;
    std::optional<std::set<std::string>> element_selection;
};

enum class ConditionStatus { Satisfied, NotApplicable };

struct Contribution {
    std::string rule_id;
    int value = 0;  ///< -1 or +1
    StatedLevel fired_level = StatedLevel::High;
    ConditionStatus condition_status = ConditionStatus::NotApplicable;

    friend bool operator==(const Contribution&, const Contribution&) = default;
};

enum class ImpactLabel { StronglyNegative, Negative, Neutral, Positive, StronglyPositive };

/// <= -2, -1, 0, +1, >= +2
ImpactLabel label_for(int score) noexcept;

struct Assessment {
    std::string element_id;
    std::vector<Contribution> contributions;
    int score = 0;
    ImpactLabel label = ImpactLabel::Neutral;
    std::vector<std::string> indeterminate_rules;  ///< metric value missing
    std::vector<std::string> gated_rules;          ///< condition not satisfied

    friend bool operator==(const Assessment&, const Assessment&) = default;
};

/// How one rule behaved in one evaluation.
enum class RuleOutcome { Fired, Dormant, Gated, Indeterminate };

struct RuleTrace {
    std::string rule_id;
    RuleOutcome outcome = RuleOutcome::Dormant;
    int value = 0;

    friend bool operator==(const RuleTrace&, const RuleTrace&) = default;
};

/// True iff every term of `condition` holds for the context. A metric
/// predicate over a missing metric does not hold.
bool condition_satisfied(const ImpactCondition& condition, const EvaluationContext& ctx);

/// Outcome of a single rule against a context (rule references must resolve in `kb`).
RuleTrace trace_rule(const KnowledgeBase& kb, const EvaluationContext& ctx, const ImpactRule& rule);

/// Throws LookupError for an unknown element.
Assessment evaluate_element(const KnowledgeBase& kb, const EvaluationContext& ctx, std::string_view element_id);

/// One assessment per selected element (default: all practices and roles), by element id.
std::vector<Assessment> evaluate(const KnowledgeBase& kb, const EvaluationContext& ctx);

struct ElementDiff {
    std::string element_id;
    int score_a = 0;
    int score_b = 0;
    int delta = 0;  ///< score_b - score_a
    std::vector<std::string> rules_changed;

    bool changed() const noexcept { return delta != 0 || !rules_changed.empty(); }

    friend bool operator==(const ElementDiff&, const ElementDiff&) = default;
};

/// Element set is the union of both contexts' selections.
std::vector<ElementDiff> diff(const KnowledgeBase& kb, const EvaluationContext& a, const EvaluationContext& b);

struct MatrixEntry {
    std::string rule_id;
    StatedLevel stated_level = StatedLevel::High;
    Sign sign = Sign::Positive;
    std::optional<std::string> condition;

    friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Rows are metrics in declaration order; columns are practices and roles by id.
struct MatrixExport {
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    /// Row-major, rows.size() * columns.size() cells.
    std::vector<std::vector<MatrixEntry>> cells;

    const std::vector<MatrixEntry>& cell(std::size_t row, std::size_t column) const {
        return cells.at(row * columns.size() + column);
    }
    std::size_t cell_count() const noexcept { return cells.size(); }
};

MatrixExport export_matrix(const KnowledgeBase& kb);

/// `rule-id:LEVEL:SIGN[@condition]`
std::string to_cell_token(const MatrixEntry& entry);

std::string_view to_string(ImpactLabel label) noexcept;
std::string_view to_string(ConditionStatus status) noexcept;
std::string_view to_string(RuleOutcome outcome) noexcept;

}  // namespace moca
