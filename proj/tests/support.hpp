#pragma once

// Test-only helpers: random knowledge bases and rule documents, a brute-force
// evaluator that does not use normalize() or the engine, and temp dirs.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "moca/dsl.hpp"
#include "moca/kb.hpp"
#include "moca/model.hpp"

namespace moca::testing {

#ifndef MOCA_SEED_DIR
#error "MOCA_SEED_DIR must be defined by the build"
#endif

inline std::filesystem::path seed_dir() { return MOCA_SEED_DIR; }

inline KnowledgeBase load_seed() {
    auto result = load({seed_dir()});
    if (auto* report = std::get_if<ValidationReport>(&result)) {
        throw std::runtime_error("seed KB failed to load: " + report->findings.front().message);
    }
    return std::get<KnowledgeBase>(std::move(result));
}

inline KnowledgeBase assemble_or_throw(KbSources sources) {
    auto result = KnowledgeBase::assemble(std::move(sources));
    if (auto* report = std::get_if<ValidationReport>(&result)) {
        throw std::runtime_error("assemble failed: " + report->findings.front().message);
    }
    return std::get<KnowledgeBase>(std::move(result));
}

/// Directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("moca_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

    /// Copy the seed KB files here.
    void copy_seed() const {
        for (const auto& entry : std::filesystem::directory_iterator(seed_dir())) {
            std::filesystem::copy_file(entry.path(), path_ / entry.path().filename());
        }
    }

private:
    std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Per-rule result of direct case analysis.
struct OracleOutcome {
    enum Kind { Fired, Dormant, Gated, Indeterminate } kind = Dormant;
    int value = 0;
};

/// Evaluates a rule from its authored form: a stated level that matches
/// the actual level yields the sign as written; the opposite level yields
/// the opposite sign. `levels` maps metric -> level; absent means no value.
inline OracleOutcome oracle_rule(const ImpactRule& rule, const std::map<std::string, Level>& levels,
                                 const std::set<std::string>& flags,
                                 const std::vector<ImpactCondition>& conditions) {
    auto it = levels.find(rule.metric);
    if (it == levels.end()) return {OracleOutcome::Indeterminate, 0};
    const Level actual = it->second;
    if (actual == Level::Medium) return {OracleOutcome::Dormant, 0};
    if (rule.condition) {
        const ImpactCondition* cond = nullptr;
        for (const auto& c : conditions) {
            if (c.id == *rule.condition) cond = &c;
        }
        if (cond == nullptr) return {OracleOutcome::Gated, 0};
        bool holds = true;
        for (const auto& term : cond->terms) {
            if (const auto* f = std::get_if<ContextFlag>(&term)) {
                holds = holds && flags.count(f->flag) == 1;
            } else {
                const auto& p = std::get<MetricPredicate>(term);
                auto lv = levels.find(p.metric);
                const bool low = p.level == StatedLevel::Low;
                holds = holds && lv != levels.end() &&
                        ((low && lv->second == Level::Low) || (!low && lv->second == Level::High));
            }
        }
        if (!holds) return {OracleOutcome::Gated, 0};
    }
    const bool stated_high = rule.stated_level == StatedLevel::High;
    const bool actual_high = actual == Level::High;
    int value;
    if (stated_high == actual_high) {
        value = rule.sign == Sign::Positive ? 1 : -1;
    } else {
        value = rule.sign == Sign::Positive ? -1 : 1;
    }
    return {OracleOutcome::Fired, value};
}

/// A value in the band of `level` for the given thresholds.
inline int value_in(Level level, const Thresholds& t, std::mt19937& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    switch (level) {
        case Level::Low: return pick(0, t.low());
        case Level::Medium: return pick(t.low() + 1, t.high() - 1);
        case Level::High: return pick(t.high(), 100);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Random knowledge bases
// ---------------------------------------------------------------------------

struct RandomKbSpec {
    int max_metrics = 8;
    int max_elements = 6;
    int max_rules = 20;
    int max_conditions = 3;
    int flags = 3;
};

inline KbSources random_sources(std::mt19937& rng, const RandomKbSpec& spec = {}) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    KbSources s;
    const int n_metrics = pick(1, spec.max_metrics);
    for (int i = 0; i < n_metrics; ++i) {
        const bool cvm = pick(0, 3) == 0;
        s.metrics.push_back(CulturalMetric{"M" + std::to_string(i), "metric " + std::to_string(i),
                                           cvm ? CultureLevel::Organizational : CultureLevel::National, "low",
                                           "high", cvm ? MetricSource::CVM : MetricSource::Hofstede});
    }
    const int n_elements = pick(1, spec.max_elements);
    for (int i = 0; i < n_elements; ++i) {
        const bool role = pick(0, 2) == 0;
        AgileElement e{"e" + std::to_string(i), "element " + std::to_string(i),
                       role ? ElementKind::Role : ElementKind::Practice, std::nullopt, {}};
        if (!role) e.category = "cat" + std::to_string(pick(0, 4));
        s.elements.push_back(std::move(e));
    }
    const int n_conditions = pick(0, spec.max_conditions);
    for (int i = 0; i < n_conditions; ++i) {
        ImpactCondition c{"C" + std::to_string(i), "condition " + std::to_string(i), {}};
        const int n_terms = pick(1, 3);
        for (int t = 0; t < n_terms; ++t) {
            if (pick(0, 1) == 0) {
                c.terms.push_back(ContextFlag{"f" + std::to_string(pick(0, spec.flags - 1))});
            } else {
                c.terms.push_back(MetricPredicate{"M" + std::to_string(pick(0, n_metrics - 1)),
                                                  pick(0, 1) ? StatedLevel::High : StatedLevel::Low});
            }
        }
        s.conditions.push_back(std::move(c));
    }
    const int n_rules = pick(0, spec.max_rules);
    std::set<std::tuple<std::string, std::string, std::string>> triples;
    for (int i = 0, attempts = 0; i < n_rules && attempts < 200; ++attempts) {
        ImpactRule r;
        r.id = "R" + std::to_string(i);
        r.title = "rule " + std::to_string(i);
        r.metric = "M" + std::to_string(pick(0, n_metrics - 1));
        r.element = "e" + std::to_string(pick(0, n_elements - 1));
        if (n_conditions > 0 && pick(0, 1) == 0) r.condition = "C" + std::to_string(pick(0, n_conditions - 1));
        r.stated_level = pick(0, 1) ? StatedLevel::High : StatedLevel::Low;
        r.sign = pick(0, 1) ? Sign::Positive : Sign::Negative;
        if (!triples.emplace(r.metric, r.element, r.condition.value_or("")).second) continue;
        s.rules.push_back(std::move(r));
        ++i;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Random rule documents
// ---------------------------------------------------------------------------

inline std::string random_identifier(std::mt19937& rng) {
    static const std::string first = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    static const std::string rest = first + "0123456789_";
    std::string id;
    do {
        const int len = std::uniform_int_distribution<int>(1, 10)(rng);
        id = first[std::uniform_int_distribution<std::size_t>(0, first.size() - 1)(rng)];
        for (int i = 1; i < len; ++i) id += rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
    } while (dsl::is_keyword(id));
    return id;
}

/// Printable text without '"' or line breaks; includes some multi-byte UTF-8.
inline std::string random_text(std::mt19937& rng, int max_len = 30, bool allow_quote = false) {
    static const std::vector<std::string> extras = {"\xC3\xA4", "\xE2\x86\x92", "\xC3\x9F", "#", ":", "\t"};
    std::string s;
    const int len = std::uniform_int_distribution<int>(0, max_len)(rng);
    for (int i = 0; i < len; ++i) {
        if (std::uniform_int_distribution<int>(0, 15)(rng) == 0) {
            s += extras[std::uniform_int_distribution<std::size_t>(0, extras.size() - 1)(rng)];
            continue;
        }
        char c = static_cast<char>(std::uniform_int_distribution<int>(0x20, 0x7e)(rng));
        if (c == '"' && !allow_quote) c = '\'';
        s += c;
    }
    return s;
}

inline dsl::RuleDocument random_document(std::mt19937& rng, int max_entities = 12) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    dsl::RuleDocument doc;
    const int n = pick(0, max_entities);
    for (int i = 0; i < n; ++i) {
        switch (pick(0, 2)) {
            case 0: doc.add(dsl::Comment{random_text(rng, 40, true)}); break;
            case 1: {
                ImpactCondition c{random_identifier(rng), random_text(rng), {}};
                const int terms = pick(1, 4);
                for (int t = 0; t < terms; ++t) {
                    if (pick(0, 1)) {
                        c.terms.push_back(ContextFlag{random_identifier(rng)});
                    } else {
                        c.terms.push_back(
                            MetricPredicate{random_identifier(rng), pick(0, 1) ? StatedLevel::High : StatedLevel::Low});
                    }
                }
                doc.add(std::move(c));
                break;
            }
            default: {
                ImpactRule r;
                r.id = random_identifier(rng);
                if (pick(0, 3)) r.title = random_text(rng);
                if (pick(0, 1)) r.condition = random_identifier(rng);
                r.stated_level = pick(0, 1) ? StatedLevel::High : StatedLevel::Low;
                r.metric = random_identifier(rng);
                r.element = random_identifier(rng);
                r.sign = pick(0, 1) ? Sign::Positive : Sign::Negative;
                if (pick(0, 1)) r.rationale = random_text(rng, 60);
                doc.add(std::move(r));
                break;
            }
        }
    }
    return doc;
}

/// True if every error points inside `source` (1-based line, column up to line length + 1).
inline bool errors_positioned(std::string_view source, const std::vector<dsl::ParseError>& errors) {
    std::vector<std::size_t> lengths;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos) end = source.size();
        lengths.push_back(end - start);
        if (end == source.size()) break;
        start = end + 1;
    }
    for (const auto& e : errors) {
        if (e.line < 1 || static_cast<std::size_t>(e.line) > lengths.size()) return false;
        if (e.column < 1 || static_cast<std::size_t>(e.column) > lengths[static_cast<std::size_t>(e.line) - 1] + 1) {
            return false;
        }
        if (e.message.empty()) return false;
    }
    return true;
}

}  // namespace moca::testing
