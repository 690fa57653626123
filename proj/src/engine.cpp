#include "moca/engine.hpp"

#include <algorithm>
#include <map>

namespace moca {

ImpactLabel label_for(int score) noexcept {
    if (score <= -2) return ImpactLabel::StronglyNegative;
    if (score == -1) return ImpactLabel::Negative;
    if (score == 0) return ImpactLabel::Neutral;
    if (score == 1) return ImpactLabel::Positive;
    return ImpactLabel::StronglyPositive;
}

bool condition_satisfied(const ImpactCondition& condition, const EvaluationContext& ctx) {
    return std::all_of(condition.terms.begin(), condition.terms.end(), [&](const ConditionTerm& term) {
        if (const auto* flag = std::get_if<ContextFlag>(&term)) return ctx.flags.contains(flag->flag);
        const auto& predicate = std::get<MetricPredicate>(term);
        const auto value = ctx.profile.value_of(predicate.metric);
        return value && level_of(*value, ctx.thresholds) == to_level(predicate.level);
    });
}

RuleTrace trace_rule(const KnowledgeBase& kb, const EvaluationContext& ctx, const ImpactRule& rule) {
    RuleTrace trace{rule.id, RuleOutcome::Dormant, 0};
    const auto value = ctx.profile.value_of(rule.metric);
    if (!value) {
        trace.outcome = RuleOutcome::Indeterminate;
        return trace;
    }
    const Level level = level_of(*value, ctx.thresholds);
    if (level == Level::Medium) return trace;
    if (rule.condition) {
        const ImpactCondition* condition = kb.find_condition(*rule.condition);
        if (!condition) throw LookupError("unknown condition '" + *rule.condition + "'");
        if (!condition_satisfied(*condition, ctx)) {
            trace.outcome = RuleOutcome::Gated;
            return trace;
        }
    }
    trace.outcome = RuleOutcome::Fired;
    trace.value = contribution_at(normalize(rule), level);
    return trace;
}

Assessment evaluate_element(const KnowledgeBase& kb, const EvaluationContext& ctx, std::string_view element_id) {
    const AgileElement& element = kb.element(element_id);
    Assessment out;
    out.element_id = element.id;
    for (const ImpactRule* rule : kb.rules_for(element.id)) {
        const RuleTrace trace = trace_rule(kb, ctx, *rule);
        switch (trace.outcome) {
            case RuleOutcome::Indeterminate: out.indeterminate_rules.push_back(rule->id); break;
            case RuleOutcome::Gated: out.gated_rules.push_back(rule->id); break;
            case RuleOutcome::Dormant: break;
            case RuleOutcome::Fired:
                out.contributions.push_back(Contribution{
                    .rule_id = rule->id,
                    .value = trace.value,
                    .fired_level = level_of(*ctx.profile.value_of(rule->metric), ctx.thresholds) == Level::High
                                       ? StatedLevel::High
                                       : StatedLevel::Low,
                    .condition_status =
                        rule->condition ? ConditionStatus::Satisfied : ConditionStatus::NotApplicable,
                });
                out.score += trace.value;
                break;
        }
    }
    out.label = label_for(out.score);
    return out;
}

namespace {

std::vector<std::string> selected_elements(const KnowledgeBase& kb, const EvaluationContext& ctx) {
    std::vector<std::string> ids;
    if (ctx.element_selection) {
        for (const auto& id : *ctx.element_selection) {
            kb.element(id);  // throws on unknown
            ids.push_back(id);
        }
    } else {
        for (const auto* e : kb.rule_eligible_elements()) ids.push_back(e->id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

std::vector<Assessment> evaluate(const KnowledgeBase& kb, const EvaluationContext& ctx) {
    std::vector<Assessment> out;
    for (const auto& id : selected_elements(kb, ctx)) out.push_back(evaluate_element(kb, ctx, id));
    return out;
}

std::vector<ElementDiff> diff(const KnowledgeBase& kb, const EvaluationContext& a, const EvaluationContext& b) {
    std::vector<std::string> ids = selected_elements(kb, a);
    for (auto& id : selected_elements(kb, b)) ids.push_back(std::move(id));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    std::vector<ElementDiff> out;
    for (const auto& id : ids) {
        ElementDiff d;
        d.element_id = id;
        for (const ImpactRule* rule : kb.rules_for(kb.element(id).id)) {
            const RuleTrace ta = trace_rule(kb, a, *rule);
            const RuleTrace tb = trace_rule(kb, b, *rule);
            d.score_a += ta.value;
            d.score_b += tb.value;
            if (!(ta == tb)) d.rules_changed.push_back(rule->id);
        }
        d.delta = d.score_b - d.score_a;
        out.push_back(std::move(d));
    }
    return out;
}

MatrixExport export_matrix(const KnowledgeBase& kb) {
    MatrixExport m;
    for (const auto& metric : kb.metrics()) m.rows.push_back(metric.id);
    for (const auto* e : kb.rule_eligible_elements()) m.columns.push_back(e->id);
    m.cells.resize(m.rows.size() * m.columns.size());

    std::map<std::string, std::size_t> row_of;
    std::map<std::string, std::size_t> column_of;
    for (std::size_t i = 0; i < m.rows.size(); ++i) row_of[m.rows[i]] = i;
    for (std::size_t j = 0; j < m.columns.size(); ++j) column_of[m.columns[j]] = j;

    // kb.rules() is sorted by id, so each cell is too.
    for (const auto& rule : kb.rules()) {
        auto r = row_of.find(rule.metric);
        auto c = column_of.find(rule.element);
        if (r == row_of.end() || c == column_of.end()) continue;  // ineligible target
        m.cells[r->second * m.columns.size() + c->second].push_back(
            MatrixEntry{rule.id, rule.stated_level, rule.sign, rule.condition});
    }
    return m;
}

std::string to_cell_token(const MatrixEntry& entry) {
    std::string out = entry.rule_id + ":" + std::string(to_string(entry.stated_level)) + ":" +
                      std::string(to_string(entry.sign));
    if (entry.condition) out += "@" + *entry.condition;
    return out;
}

std::string_view to_string(ImpactLabel label) noexcept {
    switch (label) {
        case ImpactLabel::StronglyNegative: return "strongly_negative";
        case ImpactLabel::Negative: return "negative";
        case ImpactLabel::Neutral: return "neutral";
        case ImpactLabel::Positive: return "positive";
        case ImpactLabel::StronglyPositive: return "strongly_positive";
    }
    return "?";
}

std::string_view to_string(ConditionStatus status) noexcept {
    return status == ConditionStatus::Satisfied ? "satisfied" : "not_applicable";
}

std::string_view to_string(RuleOutcome outcome) noexcept {
    switch (outcome) {
        case RuleOutcome::Fired: return "fired";
        case RuleOutcome::Dormant: return "dormant";
        case RuleOutcome::Gated: return "gated";
        case RuleOutcome::Indeterminate: return "indeterminate";
    }
    return "?";
}

}  // namespace moca
