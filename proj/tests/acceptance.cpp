// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "moca/cli.hpp"
#include "moca/engine.hpp"
#include "moca/report.hpp"
#include "support.hpp"

using namespace moca;
using moca::testing::OracleOutcome;

namespace {

using Clock = std::chrono::steady_clock;

constexpr unsigned kSeed = 20240611;
constexpr int kInversionKbs = 1000;
constexpr int kPermutationCases = 1000;
constexpr int kOracleKbs = 1000;
constexpr int kRoundTrips = 1000;
constexpr double kFig2Budget = 1.0;
constexpr double kOracleBudget = 10.0;

/// Collects failures for one criterion; prints the first few.
class Check {
public:
    explicit Check(std::string id) : id_(std::move(id)) {}

    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (ok) return;
        ++failures_;
        if (failures_ <= 5) std::cerr << "  " << id_ << ": " << what << "\n";
    }

    bool report(const std::string& summary) const {
        std::cout << (failures_ == 0 ? "PASS " : "FAIL ") << id_ << " " << summary << " [" << checks_
                  << " checks, " << failures_ << " failed]\n";
        return failures_ == 0;
    }

private:
    std::string id_;
    long checks_ = 0;
    long failures_ = 0;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CliRun {
    int code;
    std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str()};
}

bool has_line(const std::string& text, const std::string& line) {
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        if (l == line) return true;
    }
    return false;
}

EvaluationContext fig2_context(const KnowledgeBase& kb, bool flag, Thresholds t = {}) {
    EvaluationContext ctx;
    ctx.profile = kb.profile("fig2_example");
    if (flag) ctx.flags.insert("manager_attends_meeting");
    ctx.thresholds = t;
    return ctx;
}

/// Seed relations with and without the manager flag, through the library and the CLI.
void check_fig2(Check& c, const std::vector<std::string>& extra_args, Thresholds t) {
    const KnowledgeBase kb = testing::load_seed();
    c.expect(kb.profile("fig2_example").values.size() == 3, "fig2_example has three values");
    c.expect(kb.profile("fig2_example").value_of("UAI") == MetricValue(75), "UAI 75");
    c.expect(kb.profile("fig2_example").value_of("MAS") == MetricValue(80), "MAS 80");
    c.expect(kb.profile("fig2_example").value_of("PDI") == MetricValue(90), "PDI 90");

    struct Expect {
        const char* element;
        int score;
        ImpactLabel label;
        std::vector<std::string> fired;
        std::vector<std::string> gated;
    };
    const std::vector<Expect> with_flag = {
        {"planning_meeting", 1, ImpactLabel::Positive, {"H4"}, {}},
        {"review_meeting", -1, ImpactLabel::Negative, {"H5"}, {}},
        {"daily_meeting", -1, ImpactLabel::Negative, {"H6"}, {}},
    };
    const std::vector<Expect> without_flag = {
        {"planning_meeting", 1, ImpactLabel::Positive, {"H4"}, {}},
        {"review_meeting", 0, ImpactLabel::Neutral, {}, {"H5"}},
        {"daily_meeting", 0, ImpactLabel::Neutral, {}, {"H6"}},
    };
    for (const bool flag : {true, false}) {
        const auto assessments = evaluate(kb, fig2_context(kb, flag, t));
        int non_neutral = 0;
        for (const auto& a : assessments) {
            if (a.score != 0) ++non_neutral;
        }
        c.expect(non_neutral == (flag ? 3 : 1), "only the expected elements are non-neutral");
        for (const auto& e : flag ? with_flag : without_flag) {
            const Assessment a = evaluate_element(kb, fig2_context(kb, flag, t), e.element);
            std::vector<std::string> fired;
            for (const auto& contribution : a.contributions) fired.push_back(contribution.rule_id);
            const std::string tag = std::string(e.element) + (flag ? " with flag" : " without flag");
            c.expect(a.score == e.score, tag + ": score");
            c.expect(a.label == e.label, tag + ": label");
            c.expect(fired == e.fired, tag + ": fired rules");
            c.expect(a.gated_rules == e.gated, tag + ": gated rules");
            c.expect(a.indeterminate_rules.empty(), tag + ": no indeterminate rules");
        }
    }

    std::vector<std::string> base = {"evaluate", "--kb", testing::seed_dir().string(), "--profile", "fig2_example"};
    base.insert(base.end(), extra_args.begin(), extra_args.end());
    auto flagged = base;
    flagged.insert(flagged.end(), {"--flag", "manager_attends_meeting"});
    const CliRun on = cli(flagged);
    c.expect(on.code == 0, "cli exit code with flag");
    c.expect(has_line(on.out, "planning_meeting: positive (H4) score +1"), "cli planning_meeting with flag");
    c.expect(has_line(on.out, "review_meeting: negative (H5) score -1"), "cli review_meeting with flag");
    c.expect(has_line(on.out, "daily_meeting: negative (H6) score -1"), "cli daily_meeting with flag");
    const CliRun off = cli(base);
    c.expect(off.code == 0, "cli exit code without flag");
    c.expect(has_line(off.out, "planning_meeting: positive (H4) score +1"), "cli planning_meeting without flag");
    c.expect(has_line(off.out, "review_meeting: neutral score 0"), "cli review_meeting without flag");
    c.expect(has_line(off.out, "daily_meeting: neutral score 0"), "cli daily_meeting without flag");
    c.expect(has_line(off.out, "    gated: IC1 not satisfied (H5)"), "cli reports H5 gated");
    c.expect(has_line(off.out, "    gated: IC1 not satisfied (H6)"), "cli reports H6 gated");
}

bool criterion_fig2() {
    Check c("AC1");
    const auto start = Clock::now();
    check_fig2(c, {}, Thresholds{});
    const double elapsed = seconds_since(start);
    c.expect(elapsed < kFig2Budget, "runtime " + std::to_string(elapsed) + " s");
    char buf[96];
    std::snprintf(buf, sizeof buf, "seed relations H4/H5/H6 with and without flag, exact; %.3f s < %.0f s", elapsed,
                  kFig2Budget);
    return c.report(buf);
}

bool criterion_matrix() {
    Check c("AC2");
    const KnowledgeBase kb = testing::load_seed();
    const MatrixExport m = export_matrix(kb);
    c.expect(m.rows.size() == 8, "8 metric rows");
    c.expect(m.columns.size() == 48, "48 element columns");
    c.expect(m.cell_count() == 384, "384 cells");
    c.expect(kb.matrix_domain_size() == 384, "matrix domain 384");
    const CliRun v = cli({"validate", "--kb", testing::seed_dir().string()});
    c.expect(v.code == 0, "validate exit code 0");
    c.expect(has_line(v.out, "manifest: 8 metrics, 38 practices, 10 roles, 5 practice categories: confirmed"),
             "validate confirms manifest counts");
    c.expect(v.out.find("matrix domain: 384 cells (8 metrics x 48 elements)") != std::string::npos,
             "validate reports 384 cells");
    const CliRun csv = cli({"matrix", "--kb", testing::seed_dir().string(), "--format", "csv"});
    c.expect(std::count(csv.out.begin(), csv.out.end(), '\n') == 9, "csv has header plus 8 rows");
    c.expect(std::count(csv.out.begin(), csv.out.end(), ',') == 9 * 48, "csv has 48 cells per row");
    return c.report("8 metrics x (38 practices + 10 roles) = 384 cells; manifest confirmed");
}

/// Context under which every term of `cond` holds for metrics other than `metric`.
/// Empty when the condition constrains `metric` itself or contradicts itself.
std::optional<EvaluationContext> satisfying_context(const KnowledgeBase& kb, const ImpactRule& rule,
                                                    std::mt19937& rng) {
    EvaluationContext ctx;
    std::map<std::string, Level> required;
    if (rule.condition) {
        for (const auto& term : kb.find_condition(*rule.condition)->terms) {
            if (const auto* f = std::get_if<ContextFlag>(&term)) {
                ctx.flags.insert(f->flag);
                continue;
            }
            const auto& p = std::get<MetricPredicate>(term);
            if (p.metric == rule.metric) return std::nullopt;
            const Level want = to_level(p.level);
            auto [it, inserted] = required.emplace(p.metric, want);
            if (!inserted && it->second != want) return std::nullopt;
        }
    }
    for (const auto& m : kb.metrics()) {
        auto it = required.find(m.id);
        const Level level = it != required.end() ? it->second : static_cast<Level>(rng() % 3);
        ctx.profile.values.emplace(m.id, MetricValue(testing::value_in(level, ctx.thresholds, rng)));
    }
    return ctx;
}

bool criterion_inversion() {
    Check c("AC3");
    std::mt19937 rng(kSeed);
    long rules_checked = 0;
    long engine_checked = 0;
    for (int i = 0; i < kInversionKbs; ++i) {
        const KnowledgeBase kb = testing::assemble_or_throw(testing::random_sources(rng, {8, 6, 20, 3, 3}));
        for (const auto& rule : kb.rules()) {
            ++rules_checked;
            const NormalizedRule n = normalize(rule);
            c.expect(contribution_at(n, Level::High) == -contribution_at(n, Level::Low),
                     "normalized inversion for " + rule.id);
            c.expect(contribution_at(n, Level::High) != 0, "non-zero contribution for " + rule.id);
            auto ctx = satisfying_context(kb, rule, rng);
            if (!ctx) continue;
            ++engine_checked;
            EvaluationContext high = *ctx, low = *ctx;
            high.profile.values.insert_or_assign(rule.metric, MetricValue(testing::value_in(Level::High, ctx->thresholds, rng)));
            low.profile.values.insert_or_assign(rule.metric, MetricValue(testing::value_in(Level::Low, ctx->thresholds, rng)));
            const RuleTrace th = trace_rule(kb, high, rule);
            const RuleTrace tl = trace_rule(kb, low, rule);
            c.expect(th.outcome == RuleOutcome::Fired && tl.outcome == RuleOutcome::Fired,
                     "rule " + rule.id + " fires when its condition holds");
            c.expect(th.value == -tl.value && th.value != 0, "engine inversion for " + rule.id);
        }
    }
    return c.report(std::to_string(kInversionKbs) + " random KBs (<=20 rules), " + std::to_string(rules_checked) +
                    " rules, " + std::to_string(engine_checked) + " evaluated with condition satisfied; 0 violations");
}

EvaluationContext random_context(const KbSources& s, std::mt19937& rng) {
    EvaluationContext ctx;
    for (const auto& m : s.metrics) {
        if (rng() % 8 == 0) continue;
        ctx.profile.values.emplace(m.id, MetricValue(static_cast<int>(rng() % 101)));
    }
    for (int f = 0; f < 3; ++f) {
        if (rng() % 2) ctx.flags.insert("f" + std::to_string(f));
    }
    const int low = 1 + static_cast<int>(rng() % 60);
    const int high = low + 2 + static_cast<int>(rng() % static_cast<unsigned>(98 - low));
    ctx.thresholds = Thresholds(low, high);
    return ctx;
}

std::string render(const KnowledgeBase& kb, const EvaluationContext& ctx) {
    const auto assessments = evaluate(kb, ctx);
    return report::evaluation_json(ctx, assessments).dump(2) + report::evaluation_text(kb, ctx, assessments);
}

bool criterion_additivity() {
    Check c("AC4");
    std::mt19937 rng(kSeed + 1);
    for (int i = 0; i < kPermutationCases; ++i) {
        KbSources s = testing::random_sources(rng);
        const EvaluationContext ctx = random_context(s, rng);
        const KnowledgeBase kb = testing::assemble_or_throw(s);
        for (const auto& a : evaluate(kb, ctx)) {
            int sum = 0;
            std::vector<std::string> fired;
            for (const auto* rule : kb.rules_for(a.element_id)) {
                const RuleTrace t = trace_rule(kb, ctx, *rule);
                if (t.outcome == RuleOutcome::Fired) {
                    sum += t.value;
                    fired.push_back(t.rule_id);
                }
            }
            int contributed = 0;
            std::vector<std::string> ids;
            for (const auto& contribution : a.contributions) {
                contributed += contribution.value;
                ids.push_back(contribution.rule_id);
            }
            c.expect(a.score == contributed && a.score == sum, "score is the sum of fired contributions");
            c.expect(ids == fired, "contributions are exactly the fired rules");
            c.expect(a.label == label_for(a.score), "label follows score");
        }
        const std::string expected = render(kb, ctx);
        std::shuffle(s.rules.begin(), s.rules.end(), rng);
        std::shuffle(s.conditions.begin(), s.conditions.end(), rng);
        std::shuffle(s.elements.begin(), s.elements.end(), rng);
        c.expect(render(testing::assemble_or_throw(s), ctx) == expected, "output identical after permutation");
    }

    // Through files and the CLI: every declaration order of the seed rule file.
    testing::TempDir dir;
    dir.copy_seed();
    const std::string source = testing::read_text(testing::seed_dir() / "rules.moca");
    std::vector<std::string> lines;
    std::istringstream in(source);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    std::sort(lines.begin(), lines.end());
    const std::vector<std::string> args = {"evaluate", "--kb", dir.path().string(), "--profile", "fig2_example",
                                           "--flag", "manager_attends_meeting", "--format", "json"};
    const std::string seed_out = cli({"evaluate", "--kb", testing::seed_dir().string(), "--profile", "fig2_example",
                                      "--flag", "manager_attends_meeting", "--format", "json"})
                                     .out;
    int orders = 0;
    do {
        std::string text;
        for (const auto& l : lines) text += l + "\n";
        dir.write("rules.moca", text);
        c.expect(cli(args).out == seed_out, "cli output identical for reordered seed rules");
        ++orders;
    } while (std::next_permutation(lines.begin(), lines.end()));
    return c.report(std::to_string(kPermutationCases) + " random KBs plus " + std::to_string(orders) +
                    " seed file orders; score = sum of fired contributions, output bit-identical; 0 violations");
}

bool criterion_oracle() {
    Check c("AC5");
    std::mt19937 rng(kSeed + 2);
    const auto start = Clock::now();
    long assignments = 0;
    long comparisons = 0;
    for (int i = 0; i < kOracleKbs; ++i) {
        const KbSources s = testing::random_sources(rng, {5, 6, 10, 3, 3});
        const KnowledgeBase kb = testing::assemble_or_throw(s);
        const EvaluationContext base = random_context(s, rng);
        std::size_t total = 1;
        for (std::size_t m = 0; m < s.metrics.size(); ++m) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            ++assignments;
            EvaluationContext ctx;
            ctx.thresholds = base.thresholds;
            for (int f = 0; f < 3; ++f) {
                if (rng() % 2) ctx.flags.insert("f" + std::to_string(f));
            }
            std::map<std::string, Level> levels;
            std::size_t rest = code;
            for (const auto& m : s.metrics) {
                const auto level = static_cast<Level>(rest % 3);
                rest /= 3;
                levels.emplace(m.id, level);
                ctx.profile.values.emplace(m.id, MetricValue(testing::value_in(level, ctx.thresholds, rng)));
            }
            for (const auto& a : evaluate(kb, ctx)) {
                ++comparisons;
                int score = 0;
                std::vector<std::string> fired, gated, indeterminate;
                for (const auto& rule : s.rules) {
                    if (rule.element != a.element_id) continue;
                    const OracleOutcome o = testing::oracle_rule(rule, levels, ctx.flags, s.conditions);
                    if (o.kind == OracleOutcome::Fired) {
                        score += o.value;
                        fired.push_back(rule.id);
                    }
                    if (o.kind == OracleOutcome::Gated) gated.push_back(rule.id);
                    if (o.kind == OracleOutcome::Indeterminate) indeterminate.push_back(rule.id);
                }
                std::sort(fired.begin(), fired.end());
                std::sort(gated.begin(), gated.end());
                std::vector<std::string> engine_fired;
                for (const auto& contribution : a.contributions) engine_fired.push_back(contribution.rule_id);
                std::sort(engine_fired.begin(), engine_fired.end());
                auto engine_gated = a.gated_rules;
                std::sort(engine_gated.begin(), engine_gated.end());
                c.expect(a.score == score, "score for " + a.element_id);
                c.expect(engine_fired == fired, "fired rules for " + a.element_id);
                c.expect(engine_gated == gated, "gated rules for " + a.element_id);
                c.expect(a.indeterminate_rules == indeterminate, "indeterminate rules for " + a.element_id);
            }
        }
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < kOracleBudget, "runtime " + std::to_string(elapsed) + " s");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d random KBs (<=5 metrics, <=10 rules), %ld level assignments, %ld element comparisons; "
                  "0 disagreements; %.2f s < %.0f s",
                  kOracleKbs, assignments, comparisons, elapsed, kOracleBudget);
    return c.report(buf);
}

/// Byte offsets of a declaration line that lie outside string literals.
std::vector<std::size_t> unquoted_positions(const std::string& line) {
    std::vector<std::size_t> out;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            in_string = !in_string;
            continue;
        }
        if (!in_string) out.push_back(i);
    }
    return out;
}

/// Position of the header colon: after the id and the optional quoted title.
std::size_t header_colon(const std::string& line) {
    std::size_t pos = line.find(' ') + 1;
    pos = line.find_first_of(" :", pos);
    if (line[pos] == ' ' && line[pos + 1] == '"') pos = line.find('"', pos + 2) + 1;
    return pos;
}

/// Guaranteed-corrupting edits of one declaration line.
std::vector<std::string> mutations(const std::string& line, std::mt19937& rng) {
    std::vector<std::string> out;
    const bool rule = line.rfind("RULE ", 0) == 0;
    const std::size_t colon = header_colon(line);

    std::string dropped_colon = line;
    dropped_colon.erase(colon, 1);
    out.push_back(dropped_colon);

    std::string bad_keyword = line;
    if (rule) {
        bad_keyword.replace(bad_keyword.find(" IMPACTS ", colon), 9, " IMPACT ");
    } else {
        bad_keyword.replace(0, 9, "CONDITON");
    }
    out.push_back(bad_keyword);

    const std::size_t open = line.find('"');
    if (open != std::string::npos && open < colon) {
        std::string unterminated = line;
        unterminated.erase(line.find('"', open + 1), 1);
        out.push_back(unterminated);
    }

    if (rule) {
        std::string bad_sign = line;
        const std::size_t element = bad_sign.find(" IMPACTS ", colon) + 9;
        const std::size_t sign = bad_sign.find(' ', element) + 1;
        bad_sign.replace(sign, 8, "POSITIV");
        out.push_back(bad_sign);
    }

    const auto positions = unquoted_positions(line);
    std::string dash = line;
    dash.insert(positions[rng() % positions.size()], 1, '-');
    out.push_back(dash);
    return out;
}

bool criterion_round_trip() {
    Check c("AC6");
    std::mt19937 rng(kSeed + 3);
    long mutated = 0;
    long fuzzed = 0;
    for (int i = 0; i < kRoundTrips; ++i) {
        const dsl::RuleDocument doc = testing::random_document(rng);
        const std::string text = dsl::serialize(doc);
        const dsl::ParseResult parsed = dsl::parse(text);
        c.expect(parsed.ok(), "serialized document parses");
        c.expect(parsed.document == doc, "parse(serialize(doc)) == doc");
        c.expect(dsl::serialize(parsed.document) == text, "serialize is stable");

        std::vector<std::string> lines;
        std::istringstream in(text);
        for (std::string l; std::getline(in, l);) lines.push_back(l);
        for (std::size_t n = 0; n < lines.size(); ++n) {
            if (lines[n].empty() || lines[n][0] == '#') continue;
            for (const auto& bad : mutations(lines[n], rng)) {
                ++mutated;
                std::string corrupted;
                for (std::size_t k = 0; k < lines.size(); ++k) corrupted += (k == n ? bad : lines[k]) + "\n";
                try {
                    const dsl::ParseResult r = dsl::parse(corrupted);
                    c.expect(!r.ok(), "mutation rejected: " + bad);
                    c.expect(testing::errors_positioned(corrupted, r.errors), "errors positioned: " + bad);
                    const bool on_line = std::any_of(r.errors.begin(), r.errors.end(), [&](const dsl::ParseError& e) {
                        return e.line == static_cast<int>(n) + 1;
                    });
                    c.expect(on_line, "error reported on the mutated line: " + bad);
                } catch (const std::exception& e) {
                    c.expect(false, std::string("parse threw: ") + e.what());
                }
            }
        }

        // Arbitrary byte edits: never a crash, and any error is positioned.
        std::string fuzz = text;
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < edits; ++k) {
            const std::size_t at = fuzz.empty() ? 0 : rng() % (fuzz.size() + 1);
            switch (rng() % 3) {
                case 0: fuzz.insert(at, 1, static_cast<char>(rng() % 256)); break;
                case 1: if (at < fuzz.size()) fuzz.erase(at, 1); break;
                default: if (at < fuzz.size()) fuzz[at] = static_cast<char>(rng() % 256); break;
            }
        }
        ++fuzzed;
        try {
            const dsl::ParseResult r = dsl::parse(fuzz);
            c.expect(testing::errors_positioned(fuzz, r.errors), "fuzzed errors positioned");
        } catch (const std::exception& e) {
            c.expect(false, std::string("parse threw on fuzzed input: ") + e.what());
        }
    }
    return c.report(std::to_string(kRoundTrips) + " random documents round-trip exactly; " + std::to_string(mutated) +
                    " corrupting mutations and " + std::to_string(fuzzed) +
                    " byte fuzzes yield positioned errors, no crash");
}

bool criterion_thresholds() {
    Check c("AC7");
    check_fig2(c, {"--thresholds", "49,51"}, Thresholds(49, 51));
    return c.report("seed relations unchanged with thresholds 49,51");
}

}  // namespace

int main() {
    bool ok = true;
    ok = criterion_fig2() && ok;
    ok = criterion_matrix() && ok;
    ok = criterion_inversion() && ok;
    ok = criterion_additivity() && ok;
    ok = criterion_oracle() && ok;
    ok = criterion_round_trip() && ok;
    ok = criterion_thresholds() && ok;
    std::cout << (ok ? "all criteria passed" : "some criteria FAILED") << "\n";
    return ok ? 0 : 1;
}
