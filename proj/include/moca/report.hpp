#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "moca/engine.hpp"
#include "moca/kb.hpp"

namespace moca::report {

using Json = nlohmann::ordered_json;

// Text renderings end with a newline. JSON field names follow the struct
// field names in engine.hpp / kb.hpp.

std::string findings_text(const ValidationReport& report);
Json findings_json(const ValidationReport& report);

/// Full `validate` report: findings plus a KB summary and matrix/manifest lines.
std::string validation_text(const KnowledgeBase& kb, const ValidationReport& report);
Json validation_json(const KnowledgeBase& kb, const ValidationReport& report);

std::string evaluation_text(const KnowledgeBase& kb, const EvaluationContext& ctx,
                            const std::vector<Assessment>& assessments);
Json evaluation_json(const EvaluationContext& ctx, const std::vector<Assessment>& assessments);
Json assessment_json(const Assessment& a);

/// `IF (IC1) THEN HIGH(PDI) ->(-) daily_meeting`; the IF part is omitted without a condition.
std::string template_notation(const ImpactRule& rule);
std::string explanation_text(const KnowledgeBase& kb, const ImpactRule& rule);
Json explanation_json(const KnowledgeBase& kb, const ImpactRule& rule);

std::string matrix_text(const MatrixExport& m);
Json matrix_json(const MatrixExport& m);
/// Header `metric,<element ids...>`, one row per metric, cells joined by ';'.
std::string matrix_csv(const MatrixExport& m);

std::string diff_text(const std::vector<ElementDiff>& diffs, bool show_all);
Json diff_json(const std::vector<ElementDiff>& diffs);

}  // namespace moca::report
