#include "moca/kb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace moca {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// ValidationReport
// ---------------------------------------------------------------------------

std::string_view to_string(Severity s) noexcept { return s == Severity::Error ? "error" : "warning"; }

bool ValidationReport::has_errors() const noexcept { return count(Severity::Error) > 0; }

std::size_t ValidationReport::count(Severity s) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [s](const Finding& f) { return f.severity == s; }));
}

bool ValidationReport::has_io_errors() const noexcept {
    return std::any_of(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.severity == Severity::Error && f.code == "io_error"; });
}

void ValidationReport::error(std::string code, std::string message, std::string entity_id,
                             std::optional<SourceLocation> where) {
    findings.push_back({Severity::Error, std::move(code), std::move(message), std::move(entity_id), std::move(where)});
}

void ValidationReport::warning(std::string code, std::string message, std::string entity_id,
                               std::optional<SourceLocation> where) {
    findings.push_back(
        {Severity::Warning, std::move(code), std::move(message), std::move(entity_id), std::move(where)});
}

void ValidationReport::append(const ValidationReport& other) {
    findings.insert(findings.end(), other.findings.begin(), other.findings.end());
    if (other.matrix_domain) matrix_domain = other.matrix_domain;
}

void KbSources::note_origin(std::string_view entity_class, std::string_view id, SourceLocation where) {
    origins[std::string(entity_class) + ":" + std::string(id)].push_back(std::move(where));
}

// ---------------------------------------------------------------------------
// KnowledgeBase lookups
// ---------------------------------------------------------------------------

namespace {

template <typename T, typename Key>
const T* find_by(const std::vector<T>& items, std::string_view key, Key T::*field) {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.*field == key; });
    return it == items.end() ? nullptr : &*it;
}

}  // namespace

const CulturalMetric* KnowledgeBase::find_metric(std::string_view id) const noexcept {
    return find_by(metrics_, id, &CulturalMetric::id);
}
const AgileElement* KnowledgeBase::find_element(std::string_view id) const noexcept {
    return find_by(elements_, id, &AgileElement::id);
}
const ImpactCondition* KnowledgeBase::find_condition(std::string_view id) const noexcept {
    return find_by(conditions_, id, &ImpactCondition::id);
}
const ImpactRule* KnowledgeBase::find_rule(std::string_view id) const noexcept {
    return find_by(rules_, id, &ImpactRule::id);
}
const CulturalProfile* KnowledgeBase::find_profile(std::string_view name) const noexcept {
    return find_by(profiles_, name, &CulturalProfile::name);
}

const AgileElement& KnowledgeBase::element(std::string_view id) const {
    if (const auto* e = find_element(id)) return *e;
    throw LookupError("unknown element '" + std::string(id) + "'");
}

const ImpactRule& KnowledgeBase::rule(std::string_view id) const {
    if (const auto* r = find_rule(id)) return *r;
    throw LookupError("unknown rule '" + std::string(id) + "'");
}

const CulturalProfile& KnowledgeBase::profile(std::string_view name) const {
    if (const auto* p = find_profile(name)) return *p;
    throw LookupError("unknown profile '" + std::string(name) + "'");
}

std::vector<const AgileElement*> KnowledgeBase::rule_eligible_elements() const {
    std::vector<const AgileElement*> out;
    for (const auto& e : elements_) {
        if (is_rule_eligible(e.kind)) out.push_back(&e);
    }
    return out;
}

std::vector<const ImpactRule*> KnowledgeBase::rules_for(std::string_view element_id) const {
    std::vector<const ImpactRule*> out;
    for (const auto& r : rules_) {
        if (r.element == element_id) out.push_back(&r);
    }
    return out;
}

std::size_t KnowledgeBase::matrix_domain_size() const noexcept {
    const auto columns = static_cast<std::size_t>(std::count_if(
        elements_.begin(), elements_.end(), [](const AgileElement& e) { return is_rule_eligible(e.kind); }));
    return metrics_.size() * columns;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace {

class Assembler {
public:
    explicit Assembler(const KbSources& src) : src_(src) {}

    ValidationReport run() {
        check_metrics();
        check_elements();
        check_conditions();
        check_rules();
        check_profiles();
        return std::move(report_);
    }

private:
    std::optional<SourceLocation> where(std::string_view cls, std::string_view id, std::size_t nth = 0) const {
        auto it = src_.origins.find(std::string(cls) + ":" + std::string(id));
        if (it == src_.origins.end() || it->second.empty()) return std::nullopt;
        return it->second[std::min(nth, it->second.size() - 1)];
    }

    // Returns the occurrence index of `id` seen so far and records it.
    std::size_t occurrence(std::map<std::string, std::size_t>& seen, const std::string& id) {
        return seen[id]++;
    }

    void check_metrics() {
        std::map<std::string, std::size_t> seen;
        for (const auto& m : src_.metrics) {
            const std::size_t nth = occurrence(seen, m.id);
            if (nth > 0) {
                report_.error("duplicate_metric_id", "duplicate metric id '" + m.id + "'", m.id,
                              where("metric", m.id, nth));
                continue;
            }
            if (!is_metric_id(m.id)) {
                report_.error("invalid_metric_id", "metric id '" + m.id + "' must match [A-Z][A-Z0-9_]*", m.id,
                              where("metric", m.id));
            }
            const CultureLevel expected =
                m.source == MetricSource::Hofstede ? CultureLevel::National : CultureLevel::Organizational;
            if (m.level != expected) {
                report_.error("metric_level_mismatch",
                              "metric '" + m.id + "' from " + std::string(to_string(m.source)) + " must have level " +
                                  std::string(to_string(expected)),
                              m.id, where("metric", m.id));
            }
            metric_ids_.insert(m.id);
        }
    }

    void check_elements() {
        std::map<std::string, std::size_t> seen;
        for (const auto& e : src_.elements) {
            const std::size_t nth = occurrence(seen, e.id);
            if (nth > 0) {
                report_.error("duplicate_element_id", "duplicate element id '" + e.id + "'", e.id,
                              where("element", e.id, nth));
                continue;
            }
            if (!is_identifier(e.id) || dsl::is_keyword(e.id)) {
                report_.error("invalid_element_id", "element id '" + e.id + "' is not a valid identifier", e.id,
                              where("element", e.id));
            }
            if (e.kind == ElementKind::Practice && (!e.category || e.category->empty())) {
                report_.error("missing_practice_category", "practice '" + e.id + "' has no category", e.id,
                              where("element", e.id));
            }
            element_kinds_[e.id] = e.kind;
        }
    }

    void check_conditions() {
        std::map<std::string, std::size_t> seen;
        for (const auto& c : src_.conditions) {
            const std::size_t nth = occurrence(seen, c.id);
            if (nth > 0) {
                report_.error("duplicate_condition_id", "duplicate condition id '" + c.id + "'", c.id,
                              where("condition", c.id, nth));
                continue;
            }
            condition_ids_.insert(c.id);
            if (c.terms.empty()) {
                report_.error("empty_condition", "condition '" + c.id + "' has no terms", c.id,
                              where("condition", c.id));
            }
            for (const auto& term : c.terms) {
                if (const auto* p = std::get_if<MetricPredicate>(&term); p && !metric_ids_.contains(p->metric)) {
                    report_.error("dangling_metric_reference",
                                  "dangling metric reference '" + p->metric + "' in condition " + c.id, c.id,
                                  where("condition", c.id));
                }
            }
        }
    }

    void check_rules() {
        std::map<std::string, std::size_t> seen;
        std::map<std::tuple<std::string, std::string, std::string>, std::string> triples;
        for (const auto& r : src_.rules) {
            const std::size_t nth = occurrence(seen, r.id);
            if (nth > 0) {
                report_.error("duplicate_rule_id", "duplicate rule id '" + r.id + "'", r.id, where("rule", r.id, nth));
                continue;
            }
            const auto loc = where("rule", r.id);
            if (!metric_ids_.contains(r.metric)) {
                report_.error("dangling_metric_reference",
                              "dangling metric reference '" + r.metric + "' in rule " + r.id, r.id, loc);
            }
            if (auto it = element_kinds_.find(r.element); it == element_kinds_.end()) {
                report_.error("dangling_element_reference",
                              "dangling element reference '" + r.element + "' in rule " + r.id, r.id, loc);
            } else if (!is_rule_eligible(it->second)) {
                report_.warning("ineligible_rule_target",
                                "rule " + r.id + " targets " + std::string(to_string(it->second)) + " '" + r.element +
                                    "', which is outside the impact matrix",
                                r.id, loc);
            }
            if (r.condition && !condition_ids_.contains(*r.condition)) {
                report_.error("dangling_condition_reference",
                              "dangling condition reference '" + *r.condition + "' in rule " + r.id, r.id, loc);
            }
            auto key = std::make_tuple(r.metric, r.element, r.condition.value_or(""));
            if (auto [it, inserted] = triples.emplace(key, r.id); !inserted) {
                report_.error("duplicate_rule_triple",
                              "rule " + r.id + " repeats (metric, element, condition) of rule " + it->second, r.id,
                              loc);
            }
        }
    }

    void check_profiles() {
        std::map<std::string, std::size_t> seen;
        for (const auto& p : src_.profiles) {
            const std::size_t nth = occurrence(seen, p.name);
            if (nth > 0) {
                report_.error("duplicate_profile_name", "duplicate profile name '" + p.name + "'", p.name,
                              where("profile", p.name, nth));
                continue;
            }
            for (const auto& [metric, value] : p.values) {
                if (!metric_ids_.contains(metric)) {
                    report_.error("unknown_profile_metric",
                                  "profile '" + p.name + "' references unknown metric '" + metric + "'", p.name,
                                  where("profile", p.name));
                }
            }
        }
    }

    const KbSources& src_;
    ValidationReport report_;
    std::set<std::string> metric_ids_;
    std::set<std::string> condition_ids_;
    std::map<std::string, ElementKind> element_kinds_;
};

template <typename T, typename Key>
void sort_by(std::vector<T>& items, Key T::*field) {
    std::stable_sort(items.begin(), items.end(), [field](const T& a, const T& b) { return a.*field < b.*field; });
}

}  // namespace

LoadResult KnowledgeBase::assemble(KbSources sources) {
    ValidationReport report = Assembler(sources).run();
    if (report.has_errors()) return report;

    KnowledgeBase kb;
    kb.metrics_ = std::move(sources.metrics);
    kb.elements_ = std::move(sources.elements);
    kb.conditions_ = std::move(sources.conditions);
    kb.rules_ = std::move(sources.rules);
    kb.profiles_ = std::move(sources.profiles);
    kb.manifest_ = sources.manifest;
    kb.warnings_ = std::move(report);
    sort_by(kb.elements_, &AgileElement::id);
    sort_by(kb.conditions_, &ImpactCondition::id);
    sort_by(kb.rules_, &ImpactRule::id);
    sort_by(kb.profiles_, &CulturalProfile::name);
    return kb;
}

// ---------------------------------------------------------------------------
// File reading
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

/// Line/column (1-based) of a byte offset.
std::pair<int, int> position_of(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            line_start = i + 1;
        }
    }
    return {line, static_cast<int>(offset - line_start) + 1};
}

/// Parse JSON, rejecting duplicate object keys.
std::optional<json> parse_json(const std::string& text, const std::string& file, ValidationReport& report) {
    std::vector<std::set<std::string>> keys;
    std::optional<std::string> duplicate;
    auto callback = [&](int, json::parse_event_t event, json& parsed) {
        switch (event) {
            case json::parse_event_t::object_start: keys.emplace_back(); break;
            case json::parse_event_t::object_end: keys.pop_back(); break;
            case json::parse_event_t::key:
                if (!keys.back().insert(parsed.get<std::string>()).second && !duplicate) {
                    duplicate = parsed.get<std::string>();
                }
                break;
            default: break;
        }
        return true;
    };
    try {
        json doc = json::parse(text, callback);
        if (duplicate) {
            report.error("duplicate_json_key", "duplicate key '" + *duplicate + "' in " + file, file,
                         SourceLocation{file, 0, 0});
            return std::nullopt;
        }
        return doc;
    } catch (const json::parse_error& e) {
        auto [line, col] = position_of(text, e.byte == 0 ? 0 : e.byte - 1);
        report.error("json_parse_error", e.what(), file, SourceLocation{file, line, col});
        return std::nullopt;
    }
}

/// Small schema helper: pulls typed fields out of one JSON object, recording
/// every problem against the entity being read.
class FieldReader {
public:
    FieldReader(const json& obj, std::string entity, const std::string& file, ValidationReport& report)
        : obj_(obj), entity_(std::move(entity)), file_(file), report_(report) {}

    bool ok() const noexcept { return ok_; }

    std::string string(const char* key, bool required = true) {
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            if (required) fail("missing field '" + std::string(key) + "'");
            return {};
        }
        if (!it->is_string()) {
            fail("field '" + std::string(key) + "' must be a string");
            return {};
        }
        return it->get<std::string>();
    }

    std::optional<std::string> optional_string(const char* key) {
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return std::nullopt;
        return string(key);
    }

    std::vector<std::string> string_list(const char* key) {
        std::vector<std::string> out;
        auto it = obj_.find(key);
        if (it == obj_.end()) return out;
        if (!it->is_array()) {
            fail("field '" + std::string(key) + "' must be an array of strings");
            return out;
        }
        for (const auto& v : *it) {
            if (!v.is_string()) {
                fail("field '" + std::string(key) + "' must be an array of strings");
                return {};
            }
            out.push_back(v.get<std::string>());
        }
        return out;
    }

    int non_negative(const char* key) {
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            fail("missing field '" + std::string(key) + "'");
            return 0;
        }
        if (!it->is_number_integer() || it->get<long long>() < 0 || it->get<long long>() > 1'000'000) {
            fail("field '" + std::string(key) + "' must be a non-negative integer");
            return 0;
        }
        return it->get<int>();
    }

    template <typename Enum>
    Enum enumeration(const char* key, std::optional<Enum> (*parse)(std::string_view) noexcept, Enum fallback,
                     std::string_view allowed) {
        const std::string raw = string(key);
        if (!ok_) return fallback;
        if (auto v = parse(raw)) return *v;
        fail("field '" + std::string(key) + "' has invalid value '" + raw + "' (allowed: " + std::string(allowed) +
             ")");
        return fallback;
    }

    void fail(std::string message) {
        ok_ = false;
        report_.error("schema_error", entity_ + ": " + message, entity_, SourceLocation{file_, 0, 0});
    }

private:
    const json& obj_;
    std::string entity_;
    const std::string& file_;
    ValidationReport& report_;
    bool ok_ = true;
};

std::string entity_label(const json& obj, const char* id_key, const std::string& file, std::size_t index) {
    if (obj.is_object()) {
        if (auto it = obj.find(id_key); it != obj.end() && it->is_string()) return it->get<std::string>();
    }
    return file + "[" + std::to_string(index) + "]";
}

enum class DataKind { Metrics, Elements, Profiles, Unknown };

DataKind classify(const json& array) {
    const json& first = array.front();
    if (!first.is_object()) return DataKind::Unknown;
    if (first.contains("values")) return DataKind::Profiles;
    if (first.contains("kind")) return DataKind::Elements;
    if (first.contains("source") || first.contains("low_pole") || first.contains("high_pole")) {
        return DataKind::Metrics;
    }
    return DataKind::Unknown;
}

void read_metrics(const json& array, const std::string& file, KbSources& out, ValidationReport& report) {
    for (std::size_t i = 0; i < array.size(); ++i) {
        const json& obj = array[i];
        const std::string label = entity_label(obj, "id", file, i);
        FieldReader r(obj, label, file, report);
        if (!obj.is_object()) {
            r.fail("metric entry must be an object");
            continue;
        }
        CulturalMetric m;
        m.id = r.string("id");
        m.name = r.string("name");
        m.level = r.enumeration("level", &parse_culture_level, CultureLevel::National, "National, Organizational");
        m.low_pole = r.string("low_pole");
        m.high_pole = r.string("high_pole");
        m.source = r.enumeration("source", &parse_metric_source, MetricSource::Hofstede, "Hofstede, CVM");
        if (!r.ok()) continue;
        out.note_origin("metric", m.id, {file, 0, 0});
        out.metrics.push_back(std::move(m));
    }
}

void read_elements(const json& array, const std::string& file, KbSources& out, ValidationReport& report) {
    for (std::size_t i = 0; i < array.size(); ++i) {
        const json& obj = array[i];
        const std::string label = entity_label(obj, "id", file, i);
        FieldReader r(obj, label, file, report);
        if (!obj.is_object()) {
            r.fail("element entry must be an object");
            continue;
        }
        AgileElement e;
        e.id = r.string("id");
        e.name = r.string("name");
        e.kind = r.enumeration("kind", &parse_element_kind, ElementKind::Practice,
                               "Practice, Role, Artifact, Technique, Tool");
        e.category = r.optional_string("category");
        e.source_methods = r.string_list("source_methods");
        if (!r.ok()) continue;
        out.note_origin("element", e.id, {file, 0, 0});
        out.elements.push_back(std::move(e));
    }
}

std::optional<CulturalProfile> read_profile(const json& obj, const std::string& label, const std::string& file,
                                            ValidationReport& report) {
    FieldReader r(obj, label, file, report);
    if (!obj.is_object()) {
        r.fail("profile entry must be an object");
        return std::nullopt;
    }
    CulturalProfile p;
    p.name = r.string("name");
    auto values = obj.find("values");
    if (values == obj.end() || !values->is_object()) {
        r.fail("field 'values' must be an object of metric-id -> integer");
        return std::nullopt;
    }
    for (const auto& [metric, value] : values->items()) {
        if (!value.is_number_integer()) {
            r.fail("value of '" + metric + "' must be an integer");
            continue;
        }
        const long long v = value.get<long long>();
        if (v < 0 || v > 100) {
            report.error("value_out_of_range",
                         "profile '" + p.name + "': value " + std::to_string(v) + " of '" + metric +
                             "' outside [0, 100]",
                         label, SourceLocation{file, 0, 0});
            r.fail("invalid value");
            continue;
        }
        p.values.emplace(metric, MetricValue(static_cast<int>(v)));
    }
    if (!r.ok()) return std::nullopt;
    return p;
}

void read_profiles(const json& array, const std::string& file, KbSources& out, ValidationReport& report) {
    for (std::size_t i = 0; i < array.size(); ++i) {
        if (auto p = read_profile(array[i], entity_label(array[i], "name", file, i), file, report)) {
            out.note_origin("profile", p->name, {file, 0, 0});
            out.profiles.push_back(std::move(*p));
        }
    }
}

void read_manifest(const json& obj, const std::string& file, KbSources& out, ValidationReport& report) {
    if (out.manifest) {
        report.error("duplicate_manifest", "more than one manifest supplied", file, SourceLocation{file, 0, 0});
        return;
    }
    FieldReader r(obj, "manifest", file, report);
    ExpectedCounts counts;
    counts.metrics = r.non_negative("metrics");
    counts.practices = r.non_negative("practices");
    counts.roles = r.non_negative("roles");
    counts.practice_categories = r.non_negative("practice_categories");
    if (r.ok()) out.manifest = counts;
}

void read_json_file(const std::string& text, const std::string& file, KbSources& out, ValidationReport& report) {
    auto doc = parse_json(text, file, report);
    if (!doc) return;
    if (doc->is_object()) {
        read_manifest(*doc, file, out, report);
        return;
    }
    if (!doc->is_array()) {
        report.error("unrecognized_data_file", "expected a JSON array or manifest object", file,
                     SourceLocation{file, 0, 0});
        return;
    }
    if (doc->empty()) {
        report.warning("empty_data_file", "empty data file ignored", file, SourceLocation{file, 0, 0});
        return;
    }
    switch (classify(*doc)) {
        case DataKind::Metrics: read_metrics(*doc, file, out, report); break;
        case DataKind::Elements: read_elements(*doc, file, out, report); break;
        case DataKind::Profiles: read_profiles(*doc, file, out, report); break;
        case DataKind::Unknown:
            report.error("unrecognized_data_file",
                         "cannot tell whether this is a metrics, elements or profiles file", file,
                         SourceLocation{file, 0, 0});
            break;
    }
}

void read_rule_file(const std::string& text, const std::string& file, KbSources& out, ValidationReport& report) {
    auto parsed = dsl::parse(text);
    for (const auto& e : parsed.errors) {
        report.error("parse_error", dsl::format_error(e), file, SourceLocation{file, e.line, e.column});
    }
    for (auto& decl : parsed.document.declarations) {
        if (auto* c = std::get_if<ImpactCondition>(&decl.entity)) {
            out.note_origin("condition", c->id, {file, decl.line, 1});
            out.conditions.push_back(std::move(*c));
        } else if (auto* r = std::get_if<ImpactRule>(&decl.entity)) {
            out.note_origin("rule", r->id, {file, decl.line, 1});
            out.rules.push_back(std::move(*r));
        }
    }
}

std::vector<fs::path> expand(const std::vector<fs::path>& paths, ValidationReport& report) {
    std::set<fs::path> files;
    for (const auto& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            for (const auto& entry : fs::directory_iterator(p, ec)) {
                const auto ext = entry.path().extension();
                if (entry.is_regular_file() && (ext == ".json" || ext == ".moca")) {
                    files.insert(fs::weakly_canonical(entry.path()));
                }
            }
            if (ec) report.error("io_error", "cannot list directory: " + ec.message(), p.string());
        } else if (fs::exists(p, ec)) {
            files.insert(fs::weakly_canonical(p, ec));
        } else {
            report.error("io_error", "cannot read '" + p.string() + "': no such file or directory", p.string());
        }
    }
    return {files.begin(), files.end()};
}

}  // namespace

KbSources read_sources(const std::vector<fs::path>& paths, ValidationReport& report) {
    KbSources out;
    for (const auto& path : expand(paths, report)) {
        const std::string file = path.string();
        auto text = read_file(path);
        if (!text) {
            report.error("io_error", "cannot read '" + file + "'", file);
            continue;
        }
        const auto ext = path.extension();
        if (ext == ".moca") {
            read_rule_file(*text, file, out, report);
        } else if (ext == ".json") {
            read_json_file(*text, file, out, report);
        } else {
            report.error("unsupported_file", "unsupported file type (expected .json or .moca)", file,
                         SourceLocation{file, 0, 0});
        }
    }
    return out;
}

LoadResult load(const std::vector<fs::path>& paths) {
    ValidationReport report;
    KbSources sources = read_sources(paths, report);
    if (report.has_errors()) {
        // Keep going so reference errors are reported alongside read errors.
        auto assembled = KnowledgeBase::assemble(std::move(sources));
        if (auto* more = std::get_if<ValidationReport>(&assembled)) report.append(*more);
        return report;
    }
    auto result = KnowledgeBase::assemble(std::move(sources));
    if (auto* errors = std::get_if<ValidationReport>(&result)) {
        report.append(*errors);
        return report;
    }
    return result;
}

std::variant<std::vector<CulturalProfile>, ValidationReport> load_profiles(const fs::path& path,
                                                                           const KnowledgeBase& kb) {
    ValidationReport report;
    const std::string file = path.string();
    auto text = read_file(path);
    if (!text) {
        report.error("io_error", "cannot read '" + file + "'", file);
        return report;
    }
    auto doc = parse_json(*text, file, report);
    if (!doc) return report;
    if (!doc->is_array()) {
        report.error("schema_error", "profiles file must be a JSON array", file, SourceLocation{file, 0, 0});
        return report;
    }
    std::vector<CulturalProfile> profiles;
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc->size(); ++i) {
        const std::string label = entity_label((*doc)[i], "name", file, i);
        auto p = read_profile((*doc)[i], label, file, report);
        if (!p) continue;
        if (!names.insert(p->name).second) {
            report.error("duplicate_profile_name", "duplicate profile name '" + p->name + "'", p->name,
                         SourceLocation{file, 0, 0});
            continue;
        }
        for (const auto& [metric, value] : p->values) {
            if (!kb.find_metric(metric)) {
                report.error("unknown_profile_metric",
                             "profile '" + p->name + "' references unknown metric '" + metric + "'", p->name,
                             SourceLocation{file, 0, 0});
            }
        }
        profiles.push_back(std::move(*p));
    }
    if (report.has_errors()) return report;
    return profiles;
}

ValidationReport validate_completeness(const KnowledgeBase& kb) {
    ValidationReport report;
    if (!kb.manifest()) return report;
    const ExpectedCounts& m = *kb.manifest();

    int practices = 0;
    int roles = 0;
    std::set<std::string> categories;
    for (const auto& e : kb.elements()) {
        if (e.kind == ElementKind::Practice) {
            ++practices;
            if (e.category) categories.insert(*e.category);
        } else if (e.kind == ElementKind::Role) {
            ++roles;
        }
    }

    auto check = [&](std::string_view what, int declared, int actual) {
        if (declared != actual) {
            report.error("manifest_count_mismatch",
                         "manifest declares " + std::to_string(declared) + " " + std::string(what) + ", KB has " +
                             std::to_string(actual),
                         "manifest");
        }
    };
    check("metrics", m.metrics, static_cast<int>(kb.metrics().size()));
    check("practices", m.practices, practices);
    check("roles", m.roles, roles);
    check("practice categories", m.practice_categories, static_cast<int>(categories.size()));

    const std::size_t domain = kb.matrix_domain_size();
    const auto expected_domain = static_cast<std::size_t>(m.metrics) * static_cast<std::size_t>(m.practices + m.roles);
    report.matrix_domain = domain;
    if (domain != expected_domain) {
        report.error("matrix_domain_mismatch",
                     "matrix domain has " + std::to_string(domain) + " cells, manifest implies " +
                         std::to_string(expected_domain),
                     "manifest");
    }

    std::set<std::pair<std::string, std::string>> covered;
    for (const auto& r : kb.rules()) covered.emplace(r.metric, r.element);
    const auto columns = kb.rule_eligible_elements();
    for (const auto& metric : kb.metrics()) {
        for (const auto* element : columns) {
            if (!covered.contains({metric.id, element->id})) {
                report.warning("uncovered_cell", "no rule covers (" + metric.id + ", " + element->id + ")",
                               metric.id + "/" + element->id);
            }
        }
    }
    return report;
}

}  // namespace moca
