#include "moca/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "moca/engine.hpp"
#include "moca/kb.hpp"
#include "moca/report.hpp"

namespace moca::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Load failed; the report has already been printed.
struct LoadFailure {
    int exit_code;
};

struct Options {
    std::vector<std::string> kb;
    std::string profile_file;
    std::string profile;
    std::vector<std::string> flags;
    std::string thresholds = "33,67";
    std::vector<std::string> elements;
    std::string format = "text";
    std::string out;

    // diff
    std::string profile_b;
    std::string profile_file_b;
    std::vector<std::string> flags_b;
    std::string thresholds_b;
    bool all = false;

    // explain
    std::string rule_id;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

Thresholds parse_thresholds(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("--thresholds expects <low>,<high>, got '" + text + "'");
    int values[2] = {0, 0};
    for (int i = 0; i < 2; ++i) {
        const auto& p = parts[static_cast<std::size_t>(i)];
        auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), values[i]);
        if (ec != std::errc{} || ptr != p.data() + p.size()) {
            throw UsageError("--thresholds: '" + p + "' is not an integer");
        }
    }
    try {
        return Thresholds(values[0], values[1]);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

template <typename F>
decltype(auto) run_lookup(F&& f) {
    try {
        return f();
    } catch (const LookupError& e) {
        throw UsageError(e.what());
    }
}

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err, std::string kb_env)
        : out_(out), err_(err), kb_env_(std::move(kb_env)) {}

    int validate(const Options& o) {
        const KnowledgeBase kb = load_kb(o, {"text", "json"});
        ValidationReport report = kb.warnings();
        report.append(validate_completeness(kb));
        if (o.format == "json") {
            emit(o, report::validation_json(kb, report).dump(2) + "\n");
        } else {
            emit(o, report::validation_text(kb, report));
        }
        return report.has_errors() ? kExitValidation : kExitOk;
    }

    int evaluate(const Options& o) {
        const KnowledgeBase kb = load_kb(o, {"text", "json"});
        const EvaluationContext ctx = make_context(kb, o.profile_file, o.profile, o.flags, o.thresholds, o.elements);
        const auto assessments = run_lookup([&] { return moca::evaluate(kb, ctx); });
        if (o.format == "json") {
            emit(o, report::evaluation_json(ctx, assessments).dump(2) + "\n");
        } else {
            emit(o, report::evaluation_text(kb, ctx, assessments));
        }
        return kExitOk;
    }

    int explain(const Options& o) {
        const KnowledgeBase kb = load_kb(o, {"text", "json"});
        const ImpactRule& rule = run_lookup([&]() -> const ImpactRule& { return kb.rule(o.rule_id); });
        if (o.format == "json") {
            emit(o, report::explanation_json(kb, rule).dump(2) + "\n");
        } else {
            emit(o, report::explanation_text(kb, rule));
        }
        return kExitOk;
    }

    int matrix(const Options& o) {
        const KnowledgeBase kb = load_kb(o, {"text", "json", "csv"});
        const MatrixExport m = export_matrix(kb);
        if (o.format == "csv") {
            emit(o, report::matrix_csv(m));
        } else if (o.format == "json") {
            emit(o, report::matrix_json(m).dump(2) + "\n");
        } else {
            emit(o, report::matrix_text(m));
        }
        return kExitOk;
    }

    int diff(const Options& o) {
        const KnowledgeBase kb = load_kb(o, {"text", "json"});
        const EvaluationContext a = make_context(kb, o.profile_file, o.profile, o.flags, o.thresholds, o.elements);
        const EvaluationContext b = make_context(
            kb, o.profile_file_b.empty() ? o.profile_file : o.profile_file_b,
            o.profile_b.empty() ? o.profile : o.profile_b, o.flags_b,
            o.thresholds_b.empty() ? o.thresholds : o.thresholds_b, o.elements);
        auto diffs = run_lookup([&] { return moca::diff(kb, a, b); });
        if (o.format == "json") {
            if (!o.all) std::erase_if(diffs, [](const ElementDiff& d) { return !d.changed(); });
            emit(o, report::diff_json(diffs).dump(2) + "\n");
        } else {
            emit(o, report::diff_text(diffs, o.all));
        }
        return kExitOk;
    }

private:
    std::vector<fs::path> kb_paths(const Options& o) const {
        std::vector<fs::path> paths(o.kb.begin(), o.kb.end());
        if (paths.empty() && !kb_env_.empty()) {
            for (const auto& p : split(kb_env_, ':')) {
                if (!p.empty()) paths.emplace_back(p);
            }
        }
        if (paths.empty()) throw UsageError("no knowledge base given: use --kb <path> or set MOCA_KB_PATH");
        return paths;
    }

    KnowledgeBase load_kb(const Options& o, std::initializer_list<std::string_view> formats) {
        if (std::find(formats.begin(), formats.end(), o.format) == formats.end()) {
            throw UsageError("--format " + o.format + " is not supported by this command");
        }
        auto result = load(kb_paths(o));
        if (auto* report = std::get_if<ValidationReport>(&result)) {
            err_ << report::findings_text(*report);
            throw LoadFailure{report->has_io_errors() ? kExitUsage : kExitValidation};
        }
        return std::get<KnowledgeBase>(std::move(result));
    }

    CulturalProfile find_profile(const KnowledgeBase& kb, const std::string& file, const std::string& name) {
        if (name.empty()) throw UsageError("--profile <name> is required");
        if (file.empty()) {
            if (const auto* p = kb.find_profile(name)) return *p;
            throw UsageError("unknown profile '" + name + "'");
        }
        auto loaded = load_profiles(file, kb);
        if (auto* report = std::get_if<ValidationReport>(&loaded)) {
            err_ << report::findings_text(*report);
            throw LoadFailure{report->has_io_errors() ? kExitUsage : kExitValidation};
        }
        for (auto& p : std::get<std::vector<CulturalProfile>>(loaded)) {
            if (p.name == name) return p;
        }
        throw UsageError("unknown profile '" + name + "' in " + file);
    }

    EvaluationContext make_context(const KnowledgeBase& kb, const std::string& profile_file,
                                   const std::string& profile, const std::vector<std::string>& flags,
                                   const std::string& thresholds, const std::vector<std::string>& elements) {
        EvaluationContext ctx;
        ctx.thresholds = parse_thresholds(thresholds);
        ctx.profile = find_profile(kb, profile_file, profile);
        ctx.flags.insert(flags.begin(), flags.end());
        if (!elements.empty()) ctx.element_selection.emplace(elements.begin(), elements.end());
        return ctx;
    }

    void emit(const Options& o, const std::string& text) {
        if (o.out.empty()) {
            out_ << text;
            return;
        }
        std::ofstream file(o.out, std::ios::binary);
        file << text;
        if (!file) throw UsageError("cannot write '" + o.out + "'");
    }

    std::ostream& out_;
    std::ostream& err_;
    std::string kb_env_;
};

void add_common(CLI::App& cmd, Options& o, bool with_scenario) {
    cmd.add_option("--kb", o.kb, "Knowledge base file or directory (repeatable; default: $MOCA_KB_PATH)")->allow_extra_args(false);
    cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
    cmd.add_option("--out", o.out, "Write output to this file instead of standard output");
    if (!with_scenario) return;
    cmd.add_option("--profile-file", o.profile_file, "Profiles file (default: profiles loaded with the KB)");
    cmd.add_option("--profile", o.profile, "Profile name");
    cmd.add_option("--flag", o.flags, "Context flag that holds (repeatable)")->allow_extra_args(false);
    cmd.add_option("--thresholds", o.thresholds, "Level thresholds <low>,<high>")->capture_default_str();
    cmd.add_option("--element", o.elements, "Restrict to this element (repeatable)")->allow_extra_args(false);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const std::string& kb_env) {
    CLI::App app{"Evaluate cultural impact on agile elements", "moca"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Check a knowledge base for errors and completeness");
    add_common(*validate, o, false);

    auto* evaluate = app.add_subcommand("evaluate", "Assess agile elements for a cultural profile");
    add_common(*evaluate, o, true);

    auto* explain = app.add_subcommand("explain", "Show one impact rule in template notation");
    add_common(*explain, o, false);
    explain->add_option("rule", o.rule_id, "Rule id")->required();

    auto* matrix = app.add_subcommand("matrix", "Export the metric x element impact matrix");
    add_common(*matrix, o, false);

    auto* diff = app.add_subcommand("diff", "Compare two scenarios (a: --profile/--flag, b: --profile-b/--flag-b)");
    add_common(*diff, o, true);
    diff->add_option("--profile-b", o.profile_b, "Profile for scenario b (default: --profile)");
    diff->add_option("--profile-file-b", o.profile_file_b, "Profiles file for scenario b (default: --profile-file)");
    diff->add_option("--flag-b", o.flags_b, "Context flag for scenario b (repeatable)")->allow_extra_args(false);
    diff->add_option("--thresholds-b", o.thresholds_b, "Thresholds for scenario b (default: --thresholds)");
    diff->add_flag("--all", o.all, "Show unchanged elements too");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    Runner runner(out, err, kb_env);
    try {
        if (validate->parsed()) return runner.validate(o);
        if (evaluate->parsed()) return runner.evaluate(o);
        if (explain->parsed()) return runner.explain(o);
        if (matrix->parsed()) return runner.matrix(o);
        if (diff->parsed()) return runner.diff(o);
    } catch (const UsageError& e) {
        err << "moca: " << e.what() << "\n";
        return kExitUsage;
    } catch (const LoadFailure& f) {
        return f.exit_code;
    }
    return kExitUsage;
}

}  // namespace moca::cli
