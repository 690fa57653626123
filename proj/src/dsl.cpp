#include "moca/dsl.hpp"

#include <array>
#include <optional>
#include <sstream>

namespace moca::dsl {

bool operator==(const RuleDocument& a, const RuleDocument& b) {
    if (a.declarations.size() != b.declarations.size()) return false;
    for (std::size_t i = 0; i < a.declarations.size(); ++i) {
        if (!(a.declarations[i].entity == b.declarations[i].entity)) return false;
    }
    return true;
}

namespace {

constexpr std::array kKeywords{
    std::string_view{"RULE"},     std::string_view{"CONDITION"}, std::string_view{"IF"},
    std::string_view{"THEN"},     std::string_view{"HIGH"},      std::string_view{"LOW"},
    std::string_view{"IMPACTS"},  std::string_view{"POSITIVE"},  std::string_view{"NEGATIVE"},
    std::string_view{"BECAUSE"},  std::string_view{"AND"},       std::string_view{"FLAG"},
};

enum class TokenKind { Word, String, Colon, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string_view text;  // word text or string contents
    int column = 0;
};

bool is_word_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

std::string describe(const Token& t) {
    switch (t.kind) {
        case TokenKind::Word:
            if (is_keyword(t.text)) return "keyword '" + std::string(t.text) + "'";
            return "'" + std::string(t.text) + "'";
        case TokenKind::String: return "string";
        case TokenKind::Colon: return "':'";
        case TokenKind::End: return "end of line";
    }
    return "token";
}

/// Thrown inside a single line; caught by the line loop and turned into a ParseError.
struct LineError {
    int column;
    std::string message;
    std::vector<std::string> expected;
};

class LineParser {
public:
    explicit LineParser(std::string_view line) : line_(line) { tokenize(); }

    std::optional<Entity> parse_line() {
        const Token& head = peek();
        if (head.kind == TokenKind::End) return std::nullopt;
        if (head.kind == TokenKind::Word && head.text == "RULE") return parse_rule();
        if (head.kind == TokenKind::Word && head.text == "CONDITION") return parse_condition();
        std::string msg = head.kind == TokenKind::Word && !is_keyword(head.text)
                              ? "unknown keyword '" + std::string(head.text) + "'"
                              : "unexpected " + describe(head) + " at start of declaration";
        throw LineError{head.column, std::move(msg), {"RULE", "CONDITION", "comment"}};
    }

private:
    void tokenize() {
        std::size_t i = 0;
        while (i < line_.size()) {
            const char c = line_[i];
            const int col = static_cast<int>(i) + 1;
            if (c == ' ' || c == '\t') {
                ++i;
            } else if (c == ':') {
                tokens_.push_back({TokenKind::Colon, line_.substr(i, 1), col});
                ++i;
            } else if (c == '"') {
                const std::size_t close = line_.find('"', i + 1);
                if (close == std::string_view::npos) {
                    throw LineError{col, "unterminated string", {"'\"'"}};
                }
                tokens_.push_back({TokenKind::String, line_.substr(i + 1, close - i - 1), col});
                i = close + 1;
            } else if (is_word_char(c)) {
                std::size_t j = i;
                while (j < line_.size() && is_word_char(line_[j])) ++j;
                tokens_.push_back({TokenKind::Word, line_.substr(i, j - i), col});
                i = j;
            } else {
                std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                        ? "byte 0x" + hex(static_cast<unsigned char>(c))
                                        : "'" + std::string(1, c) + "'";
                throw LineError{col, "unexpected character " + shown, {}};
            }
        }
        tokens_.push_back({TokenKind::End, {}, static_cast<int>(line_.size()) + 1});
    }

    static std::string hex(unsigned char c) {
        constexpr char digits[] = "0123456789abcdef";
        return {digits[c >> 4], digits[c & 0xf]};
    }

    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    bool at_word(std::string_view w) const {
        return peek().kind == TokenKind::Word && peek().text == w;
    }

    [[noreturn]] void fail(std::string what, std::vector<std::string> expected) const {
        throw LineError{peek().column, "expected " + what + ", found " + describe(peek()), std::move(expected)};
    }

    void expect_keyword(std::string_view kw, std::string_view context = {}) {
        if (!at_word(kw)) {
            std::string what = "'" + std::string(kw) + "'";
            if (!context.empty()) what += " " + std::string(context);
            fail(std::move(what), {std::string(kw)});
        }
        next();
    }

    std::string expect_ident(std::string_view what) {
        const Token& t = peek();
        if (t.kind != TokenKind::Word || is_keyword(t.text)) fail(std::string(what), {std::string(what)});
        if (!is_identifier(t.text)) {
            throw LineError{t.column, "invalid identifier '" + std::string(t.text) + "': must start with a letter",
                            {std::string(what)}};
        }
        return std::string(next().text);
    }

    std::string expect_string(std::string_view what) {
        if (peek().kind != TokenKind::String) fail(std::string(what), {"string"});
        return std::string(next().text);
    }

    void expect_colon() {
        if (peek().kind != TokenKind::Colon) fail("':'", {"':'"});
        next();
    }

    void expect_end() {
        if (peek().kind != TokenKind::End) fail("end of line", {"end of line"});
    }

    StatedLevel expect_level() {
        if (at_word("HIGH")) { next(); return StatedLevel::High; }
        if (at_word("LOW")) { next(); return StatedLevel::Low; }
        fail("'HIGH' or 'LOW'", {"HIGH", "LOW"});
    }

    Sign expect_sign() {
        if (at_word("POSITIVE")) { next(); return Sign::Positive; }
        if (at_word("NEGATIVE")) { next(); return Sign::Negative; }
        if (peek().kind == TokenKind::Word && !is_keyword(peek().text)) {
            throw LineError{peek().column, "malformed sign '" + std::string(peek().text) + "'",
                            {"POSITIVE", "NEGATIVE"}};
        }
        fail("'POSITIVE' or 'NEGATIVE'", {"POSITIVE", "NEGATIVE"});
    }

    ImpactRule parse_rule() {
        next();  // RULE
        ImpactRule rule;
        rule.id = expect_ident("rule identifier");
        if (peek().kind == TokenKind::String) rule.title = std::string(next().text);
        expect_colon();
        if (at_word("IF")) {
            next();
            rule.condition = expect_ident("condition identifier");
            expect_keyword("THEN", "after condition");
        }
        rule.stated_level = expect_level();
        rule.metric = expect_ident("metric identifier");
        expect_keyword("IMPACTS", "after metric");
        rule.element = expect_ident("element identifier");
        rule.sign = expect_sign();
        if (at_word("BECAUSE")) {
            next();
            rule.rationale = expect_string("rationale string");
        }
        expect_end();
        return rule;
    }

    ConditionTerm parse_term() {
        if (at_word("FLAG")) {
            next();
            return ContextFlag{expect_ident("flag identifier")};
        }
        if (at_word("HIGH") || at_word("LOW")) {
            const StatedLevel level = expect_level();
            return MetricPredicate{expect_ident("metric identifier"), level};
        }
        fail("condition term", {"FLAG", "HIGH", "LOW"});
    }

    ImpactCondition parse_condition() {
        next();  // CONDITION
        ImpactCondition cond;
        cond.id = expect_ident("condition identifier");
        cond.description = expect_string("condition description string");
        expect_colon();
        cond.terms.push_back(parse_term());
        while (at_word("AND")) {
            next();
            cond.terms.push_back(parse_term());
        }
        expect_end();
        return cond;
    }

    std::string_view line_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::string term_source(const ConditionTerm& term) {
    if (const auto* f = std::get_if<ContextFlag>(&term)) return "FLAG " + f->flag;
    const auto& p = std::get<MetricPredicate>(term);
    return std::string(to_string(p.level)) + " " + p.metric;
}

}  // namespace

bool is_keyword(std::string_view word) noexcept {
    for (auto kw : kKeywords) {
        if (kw == word) return true;
    }
    return false;
}

ParseResult parse(std::string_view source) {
    ParseResult result;
    int line_no = 0;
    std::size_t start = 0;
    while (start < source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos) end = source.size();
        std::string_view line = source.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        const std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos) continue;
        if (line[first] == '#') {
            result.document.add(Comment{std::string(line.substr(first + 1))}, line_no);
            continue;
        }
        try {
            LineParser parser(line);
            if (auto entity = parser.parse_line()) result.document.add(std::move(*entity), line_no);
        } catch (LineError& e) {
            result.errors.push_back({line_no, e.column, std::move(e.message), std::move(e.expected)});
        }
    }
    if (!result.errors.empty()) result.document = {};
    return result;
}

std::string to_source(const ImpactCondition& c) {
    std::string out = "CONDITION " + c.id + " " + quoted(c.description) + ":";
    for (std::size_t i = 0; i < c.terms.size(); ++i) {
        out += i == 0 ? " " : " AND ";
        out += term_source(c.terms[i]);
    }
    return out;
}

std::string to_source(const ImpactRule& r) {
    std::string out = "RULE " + r.id;
    if (!r.title.empty()) out += " " + quoted(r.title);
    out += ":";
    if (r.condition) out += " IF " + *r.condition + " THEN";
    out += " ";
    out += to_string(r.stated_level);
    out += " " + r.metric + " IMPACTS " + r.element + " ";
    out += to_string(r.sign);
    if (!r.rationale.empty()) out += " BECAUSE " + quoted(r.rationale);
    return out;
}

std::string serialize(const RuleDocument& doc) {
    std::string out;
    for (const auto& decl : doc.declarations) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Comment>) {
                    out += "#" + e.text;
                } else {
                    out += to_source(e);
                }
            },
            decl.entity);
        out += '\n';
    }
    return out;
}

std::string format_error(const ParseError& e) {
    std::ostringstream os;
    os << e.line << ":" << e.column << ": " << e.message;
    if (!e.expected.empty()) {
        os << " (expected ";
        for (std::size_t i = 0; i < e.expected.size(); ++i) {
            if (i) os << (i + 1 == e.expected.size() ? " or " : ", ");
            os << e.expected[i];
        }
        os << ")";
    }
    return os.str();
}

}  // namespace moca::dsl
