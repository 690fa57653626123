#include "moca/report.hpp"

#include <sstream>

namespace moca::report {

namespace {

std::string signed_int(int v) { return v > 0 ? "+" + std::to_string(v) : std::to_string(v); }

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string term_text(const ConditionTerm& term) {
    if (const auto* f = std::get_if<ContextFlag>(&term)) return "FLAG " + f->flag;
    const auto& p = std::get<MetricPredicate>(term);
    return std::string(to_string(p.level)) + " " + p.metric;
}

Json term_json(const ConditionTerm& term) {
    if (const auto* f = std::get_if<ContextFlag>(&term)) return Json{{"flag", f->flag}};
    const auto& p = std::get<MetricPredicate>(term);
    return Json{{"metric", p.metric}, {"level", to_string(p.level)}};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

std::string findings_text(const ValidationReport& report) {
    std::ostringstream os;
    for (const auto& f : report.findings) {
        if (f.location) {
            os << f.location->file;
            if (f.location->line > 0) os << ":" << f.location->line << ":" << f.location->column;
            os << ": ";
        }
        os << to_string(f.severity) << " [" << f.code << "] " << f.message;
        if (!f.entity_id.empty()) os << " (" << f.entity_id << ")";
        os << "\n";
    }
    os << "result: " << report.count(Severity::Error) << " error(s), " << report.count(Severity::Warning)
       << " warning(s)\n";
    return os.str();
}

Json findings_json(const ValidationReport& report) {
    Json list = Json::array();
    for (const auto& f : report.findings) {
        Json j{{"severity", to_string(f.severity)},
               {"code", f.code},
               {"message", f.message},
               {"entity_id", f.entity_id}};
        if (f.location) {
            j["file"] = f.location->file;
            if (f.location->line > 0) {
                j["line"] = f.location->line;
                j["column"] = f.location->column;
            }
        }
        list.push_back(std::move(j));
    }
    return Json{{"findings", std::move(list)},
                {"errors", report.count(Severity::Error)},
                {"warnings", report.count(Severity::Warning)}};
}

namespace {

struct KbCounts {
    std::size_t practices = 0;
    std::size_t roles = 0;
    std::size_t eligible = 0;
    std::size_t covered_cells = 0;
};

KbCounts count_kb(const KnowledgeBase& kb) {
    KbCounts c;
    for (const auto& e : kb.elements()) {
        if (e.kind == ElementKind::Practice) ++c.practices;
        if (e.kind == ElementKind::Role) ++c.roles;
    }
    c.eligible = c.practices + c.roles;
    for (const auto& cell : export_matrix(kb).cells) {
        if (!cell.empty()) ++c.covered_cells;
    }
    return c;
}

}  // namespace

std::string validation_text(const KnowledgeBase& kb, const ValidationReport& report) {
    std::ostringstream os;
    const KbCounts c = count_kb(kb);
    os << findings_text(report);
    os << "knowledge base: " << kb.metrics().size() << " metrics, " << kb.elements().size() << " elements ("
       << c.practices << " practices, " << c.roles << " roles), " << kb.conditions().size() << " conditions, "
       << kb.rules().size() << " rules\n";
    os << "matrix domain: " << kb.matrix_domain_size() << " cells (" << kb.metrics().size() << " metrics x "
       << c.eligible << " elements), " << c.covered_cells << " covered\n";
    if (!kb.manifest()) {
        os << "manifest: none\n";
    } else {
        const auto& m = *kb.manifest();
        bool mismatch = false;
        for (const auto& f : report.findings) {
            if (f.severity == Severity::Error && f.entity_id == "manifest") mismatch = true;
        }
        os << "manifest: " << m.metrics << " metrics, " << m.practices << " practices, " << m.roles << " roles, "
           << m.practice_categories << " practice categories: " << (mismatch ? "MISMATCH" : "confirmed") << "\n";
    }
    return os.str();
}

Json validation_json(const KnowledgeBase& kb, const ValidationReport& report) {
    const KbCounts c = count_kb(kb);
    Json j = findings_json(report);
    j["knowledge_base"] = Json{{"metrics", kb.metrics().size()},
                               {"elements", kb.elements().size()},
                               {"practices", c.practices},
                               {"roles", c.roles},
                               {"conditions", kb.conditions().size()},
                               {"rules", kb.rules().size()}};
    j["matrix_domain"] = kb.matrix_domain_size();
    j["covered_cells"] = c.covered_cells;
    if (kb.manifest()) {
        const auto& m = *kb.manifest();
        j["manifest"] = Json{{"metrics", m.metrics},
                             {"practices", m.practices},
                             {"roles", m.roles},
                             {"practice_categories", m.practice_categories}};
    } else {
        j["manifest"] = nullptr;
    }
    return j;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

std::string evaluation_text(const KnowledgeBase& kb, const EvaluationContext& ctx,
                            const std::vector<Assessment>& assessments) {
    std::ostringstream os;
    std::vector<std::string> values;
    for (const auto& [metric, value] : ctx.profile.values) values.push_back(metric + "=" + std::to_string(value.value()));
    os << "profile: " << ctx.profile.name << " (" << join(values, ", ") << ")\n";
    os << "flags: " << (ctx.flags.empty() ? "(none)" : join({ctx.flags.begin(), ctx.flags.end()}, ", ")) << "\n";
    os << "thresholds: low <= " << ctx.thresholds.low() << ", high >= " << ctx.thresholds.high() << "\n\n";

    for (const auto& a : assessments) {
        std::vector<std::string> fired;
        for (const auto& c : a.contributions) fired.push_back(c.rule_id);
        os << a.element_id << ": " << to_string(a.label);
        if (!fired.empty()) os << " (" << join(fired, ", ") << ")";
        os << " score " << signed_int(a.score) << "\n";

        for (const auto& c : a.contributions) {
            const ImpactRule& rule = kb.rule(c.rule_id);
            os << "    " << (c.value > 0 ? "+ " : "- ") << rule.id << " " << signed_int(c.value) << " "
               << to_string(c.fired_level) << " " << rule.metric;
            if (rule.condition) os << ", " << *rule.condition << " satisfied";
            os << ": " << rule.title;
            if (!rule.rationale.empty()) os << ". " << rule.rationale;
            os << "\n";
        }
        for (const auto& id : a.gated_rules) {
            const ImpactRule& rule = kb.rule(id);
            os << "    gated: " << rule.condition.value_or("?") << " not satisfied (" << id << ")\n";
        }
        for (const auto& id : a.indeterminate_rules) {
            os << "    indeterminate: no value for " << kb.rule(id).metric << " (" << id << ")\n";
        }
    }
    return os.str();
}

Json assessment_json(const Assessment& a) {
    Json contributions = Json::array();
    for (const auto& c : a.contributions) {
        contributions.push_back(Json{{"rule_id", c.rule_id},
                                     {"value", c.value},
                                     {"fired_level", to_string(c.fired_level)},
                                     {"condition_status", to_string(c.condition_status)}});
    }
    return Json{{"element_id", a.element_id},
                {"contributions", std::move(contributions)},
                {"score", a.score},
                {"label", to_string(a.label)},
                {"indeterminate_rules", a.indeterminate_rules},
                {"gated_rules", a.gated_rules}};
}

Json evaluation_json(const EvaluationContext& ctx, const std::vector<Assessment>& assessments) {
    Json values = Json::object();
    for (const auto& [metric, value] : ctx.profile.values) values[metric] = value.value();
    Json list = Json::array();
    for (const auto& a : assessments) list.push_back(assessment_json(a));
    return Json{{"profile", Json{{"name", ctx.profile.name}, {"values", std::move(values)}}},
                {"flags", std::vector<std::string>(ctx.flags.begin(), ctx.flags.end())},
                {"thresholds", Json{{"low", ctx.thresholds.low()}, {"high", ctx.thresholds.high()}}},
                {"assessments", std::move(list)}};
}

// ---------------------------------------------------------------------------
// explain
// ---------------------------------------------------------------------------

std::string template_notation(const ImpactRule& rule) {
    std::string out;
    if (rule.condition) out += "IF (" + *rule.condition + ") THEN ";
    out += std::string(to_string(rule.stated_level)) + "(" + rule.metric + ") ->(" +
           (rule.sign == Sign::Positive ? "+" : "-") + ") " + rule.element;
    return out;
}

std::string explanation_text(const KnowledgeBase& kb, const ImpactRule& rule) {
    std::ostringstream os;
    os << "rule " << rule.id;
    if (!rule.title.empty()) os << ": " << rule.title;
    os << "\n  " << template_notation(rule) << "\n";
    os << "  impact: " << (rule.sign == Sign::Positive ? "positive" : "negative") << " on " << rule.element;
    if (const auto* e = kb.find_element(rule.element)) os << " (" << e->name << ", " << to_string(e->kind) << ")";
    os << "\n";
    if (!rule.condition) {
        os << "  condition: No precondition\n";
    } else {
        const ImpactCondition* c = kb.find_condition(*rule.condition);
        os << "  condition: " << *rule.condition;
        if (c) {
            os << " \"" << c->description << "\"\n";
            for (const auto& t : c->terms) os << "    " << term_text(t) << "\n";
        } else {
            os << "\n";
        }
    }
    if (!rule.rationale.empty()) os << "  rationale: " << rule.rationale << "\n";
    const NormalizedRule n = normalize(rule);
    os << "  contribution: HIGH " << rule.metric << " " << signed_int(contribution_at(n, Level::High)) << ", LOW "
       << rule.metric << " " << signed_int(contribution_at(n, Level::Low)) << ", MEDIUM " << rule.metric
       << " 0\n";
    return os.str();
}

Json explanation_json(const KnowledgeBase& kb, const ImpactRule& rule) {
    Json condition = nullptr;
    if (rule.condition) {
        condition = Json{{"id", *rule.condition}};
        if (const ImpactCondition* c = kb.find_condition(*rule.condition)) {
            Json terms = Json::array();
            for (const auto& t : c->terms) terms.push_back(term_json(t));
            condition["description"] = c->description;
            condition["terms"] = std::move(terms);
        }
    }
    return Json{{"id", rule.id},
                {"title", rule.title},
                {"template", template_notation(rule)},
                {"metric", rule.metric},
                {"stated_level", to_string(rule.stated_level)},
                {"sign", to_string(rule.sign)},
                {"element", rule.element},
                {"condition", std::move(condition)},
                {"rationale", rule.rationale},
                {"polarity", normalize(rule).polarity}};
}

// ---------------------------------------------------------------------------
// matrix
// ---------------------------------------------------------------------------

std::string matrix_text(const MatrixExport& m) {
    std::ostringstream os;
    std::size_t covered = 0;
    for (const auto& cell : m.cells) covered += cell.empty() ? 0 : 1;
    os << "matrix: " << m.rows.size() << " metrics x " << m.columns.size() << " elements = " << m.cell_count()
       << " cells, " << covered << " covered\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            const auto& cell = m.cell(r, c);
            if (cell.empty()) continue;
            std::vector<std::string> tokens;
            for (const auto& e : cell) tokens.push_back(to_cell_token(e));
            os << m.rows[r] << " x " << m.columns[c] << ": " << join(tokens, ";") << "\n";
        }
    }
    return os.str();
}

Json matrix_json(const MatrixExport& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            Json cell = Json::array();
            for (const auto& e : m.cell(r, c)) {
                Json entry{{"rule_id", e.rule_id},
                           {"stated_level", to_string(e.stated_level)},
                           {"sign", to_string(e.sign)}};
                entry["condition"] = e.condition ? Json(*e.condition) : Json(nullptr);
                cell.push_back(std::move(entry));
            }
            row.push_back(std::move(cell));
        }
        rows.push_back(std::move(row));
    }
    return Json{{"rows", m.rows}, {"columns", m.columns}, {"cells", std::move(rows)}};
}

std::string matrix_csv(const MatrixExport& m) {
    std::string out = "metric";
    for (const auto& c : m.columns) out += "," + csv_field(c);
    out += "\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        out += csv_field(m.rows[r]);
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            std::vector<std::string> tokens;
            for (const auto& e : m.cell(r, c)) tokens.push_back(to_cell_token(e));
            out += "," + csv_field(join(tokens, ";"));
        }
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// diff
// ---------------------------------------------------------------------------

std::string diff_text(const std::vector<ElementDiff>& diffs, bool show_all) {
    std::ostringstream os;
    bool any = false;
    for (const auto& d : diffs) {
        if (!d.changed() && !show_all) continue;
        any = any || d.changed();
        os << d.element_id << ": " << signed_int(d.score_a) << " -> " << signed_int(d.score_b) << " (delta "
           << signed_int(d.delta) << ")";
        if (!d.rules_changed.empty()) os << " rules changed: " << join(d.rules_changed, ", ");
        os << "\n";
    }
    if (!any) os << "no differences\n";
    return os.str();
}

Json diff_json(const std::vector<ElementDiff>& diffs) {
    Json list = Json::array();
    for (const auto& d : diffs) {
        list.push_back(Json{{"element_id", d.element_id},
                            {"score_a", d.score_a},
                            {"score_b", d.score_b},
                            {"delta", d.delta},
                            {"rules_changed", d.rules_changed}});
    }
    return Json{{"differences", std::move(list)}};
}

}  // namespace moca::report
