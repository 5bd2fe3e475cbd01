#include "mirage/rulelang/parse.hpp"

#include <cstdlib>
#include <set>
#include <unordered_set>

namespace mirage::rulelang {

namespace {

enum class Tok {
    Ident,
    StrId,
    Quoted,
    Int,
    Float,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Colon,
    Assign,
    Lt,
    Le,
    Gt,
    Ge,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;                 // identifier text / numeric literal text
    std::vector<std::uint8_t> bytes;  // unescaped contents of a quoted literal
    long long int_value = 0;
    double float_value = 0.0;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws_and_comments();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = src_[pos_];
        if (c == '{') return simple(t, Tok::LBrace);
        if (c == '}') return simple(t, Tok::RBrace);
        if (c == '(') return simple(t, Tok::LParen);
        if (c == ')') return simple(t, Tok::RParen);
        if (c == ',') return simple(t, Tok::Comma);
        if (c == ':') return simple(t, Tok::Colon);
        if (c == '=') return simple(t, Tok::Assign);
        if (c == '<' || c == '>') {
            advance();
            bool eq = pos_ < src_.size() && src_[pos_] == '=';
            if (eq) advance();
            t.kind = (c == '<') ? (eq ? Tok::Le : Tok::Lt) : (eq ? Tok::Ge : Tok::Gt);
            return t;
        }
        if (c == '"') return quoted(t);
        if (c == '$') return strid(t);
        if (is_digit(c)) return number(t);
        if (is_ident_start(c)) return ident(t);
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
    }

private:
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token simple(Token t, Tok kind) {
        t.kind = kind;
        advance();
        return t;
    }

    Token quoted(Token t) {
        advance();  // opening quote
        t.kind = Tok::Quoted;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') {
                throw SyntaxError("unterminated string literal", t.line, t.col);
            }
            char c = src_[pos_];
            if (c == '"') {
                advance();
                return t;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size()) throw SyntaxError("unterminated escape", line_, col_);
                char e = src_[pos_];
                switch (e) {
                    case '"': t.bytes.push_back('"'); break;
                    case '\\': t.bytes.push_back('\\'); break;
                    case 'n': t.bytes.push_back('\n'); break;
                    case 'r': t.bytes.push_back('\r'); break;
                    case 't': t.bytes.push_back('\t'); break;
                    case '0': t.bytes.push_back(0); break;
                    case 'x': {
                        advance();
                        if (pos_ + 1 >= src_.size()) {
                            throw SyntaxError("truncated \\x escape", line_, col_);
                        }
                        auto hex = [this](char h) -> int {
                            if (h >= '0' && h <= '9') return h - '0';
                            if (h >= 'a' && h <= 'f') return h - 'a' + 10;
                            if (h >= 'A' && h <= 'F') return h - 'A' + 10;
                            throw SyntaxError("invalid hex digit in \\x escape", line_, col_);
                        };
                        int hi = hex(src_[pos_]);
                        advance();
                        int lo = hex(src_[pos_]);
                        t.bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
                        break;
                    }
                    default:
                        throw SyntaxError(std::string("unknown escape '\\") + e + "'", line_, col_);
                }
                advance();
            } else {
                t.bytes.push_back(static_cast<std::uint8_t>(c));
                advance();
            }
        }
    }

    Token strid(Token t) {
        advance();  // '$'
        if (pos_ >= src_.size() || !is_ident_start(src_[pos_])) {
            throw SyntaxError("expected identifier after '$'", t.line, t.col);
        }
        t.kind = Tok::StrId;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
            t.text.push_back(src_[pos_]);
            advance();
        }
        return t;
    }

    Token number(Token t) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) {
            t.text.push_back(src_[pos_]);
            advance();
        }
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
            t.text.push_back('.');
            advance();
            while (pos_ < src_.size() && is_digit(src_[pos_])) {
                t.text.push_back(src_[pos_]);
                advance();
            }
            t.kind = Tok::Float;
            t.float_value = std::strtod(t.text.c_str(), nullptr);
        } else {
            t.kind = Tok::Int;
            t.int_value = std::strtoll(t.text.c_str(), nullptr, 10);
            t.float_value = static_cast<double>(t.int_value);
        }
        return t;
    }

    Token ident(Token t) {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
            t.text.push_back(src_[pos_]);
            advance();
        }
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { cur_ = lexer_.next(); }

    RuleSet ruleset() {
        RuleSet rs;
        while (cur_.kind != Tok::End) {
            rs.rules.push_back(rule());
        }
        validate(rs);
        return rs;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, cur_.line, cur_.col); }

    void bump() { cur_ = lexer_.next(); }

    bool at_ident(std::string_view kw) const { return cur_.kind == Tok::Ident && cur_.text == kw; }

    void expect_ident(std::string_view kw) {
        if (!at_ident(kw)) fail("expected '" + std::string(kw) + "'");
        bump();
    }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) fail(std::string("expected ") + what);
        bump();
    }

    Rule rule() {
        expect_ident("rule");
        if (cur_.kind != Tok::Ident) fail("expected rule name");
        Rule r;
        r.name = cur_.text;
        bump();
        expect(Tok::LBrace, "'{'");

        if (at_ident("meta")) {
            bump();
            expect(Tok::Colon, "':'");
            while (cur_.kind == Tok::Ident && !is_section_keyword()) {
                std::string key = cur_.text;
                bump();
                expect(Tok::Assign, "'='");
                r.meta.emplace_back(key, meta_value());
            }
        }

        if (at_ident("strings")) {
            bump();
            expect(Tok::Colon, "':'");
            while (cur_.kind == Tok::StrId) {
                PatternDef p;
                p.id = cur_.text;
                bump();
                expect(Tok::Assign, "'='");
                if (cur_.kind != Tok::Quoted) fail("expected quoted pattern text");
                p.text = cur_.bytes;
                bump();
                while (cur_.kind == Tok::Ident &&
                       (cur_.text == "nocase" || cur_.text == "wide" || cur_.text == "ascii")) {
                    if (cur_.text == "nocase") p.nocase = true;
                    if (cur_.text == "wide") p.wide = true;
                    if (cur_.text == "ascii") p.ascii = true;
                    bump();
                }
                r.strings.push_back(std::move(p));
            }
        }

        expect_ident("condition");
        expect(Tok::Colon, "':'");
        r.condition = expr();
        expect(Tok::RBrace, "'}'");
        return r;
    }

    bool is_section_keyword() const {
        return cur_.kind == Tok::Ident &&
               (cur_.text == "strings" || cur_.text == "condition" || cur_.text == "meta");
    }

    MetaValue meta_value() {
        if (cur_.kind == Tok::Quoted) {
            std::string s(cur_.bytes.begin(), cur_.bytes.end());
            bump();
            return MetaValue(s);
        }
        if (cur_.kind == Tok::Int || cur_.kind == Tok::Float) {
            double v = cur_.float_value;
            bump();
            return MetaValue(v);
        }
        if (at_ident("true")) {
            bump();
            return MetaValue(true);
        }
        if (at_ident("false")) {
            bump();
            return MetaValue(false);
        }
        fail("expected literal meta value");
    }

    Condition expr() {
        Condition first = term();
        if (!at_ident("or")) return first;
        Condition node;
        node.kind = Condition::Kind::Or;
        node.children.push_back(std::move(first));
        while (at_ident("or")) {
            bump();
            node.children.push_back(term());
        }
        return node;
    }

    Condition term() {
        Condition first = factor();
        if (!at_ident("and")) return first;
        Condition node;
        node.kind = Condition::Kind::And;
        node.children.push_back(std::move(first));
        while (at_ident("and")) {
            bump();
            node.children.push_back(factor());
        }
        return node;
    }

    Condition factor() {
        if (at_ident("not")) {
            bump();
            Condition node;
            node.kind = Condition::Kind::Not;
            node.children.push_back(factor());
            return node;
        }
        if (cur_.kind == Tok::LParen) {
            bump();
            Condition node = expr();
            expect(Tok::RParen, "')'");
            return node;
        }
        return primary();
    }

    Condition primary() {
        Condition node;
        if (cur_.kind == Tok::StrId) {
            node.kind = Condition::Kind::PatternRef;
            node.pattern_id = cur_.text;
            bump();
            return node;
        }
        if (cur_.kind == Tok::Int) {
            node.kind = Condition::Kind::CountOf;
            if (cur_.int_value < 0 || cur_.int_value > static_cast<long long>(kMaxPatternsPerSet)) {
                fail("count out of range");
            }
            node.count = static_cast<int>(cur_.int_value);
            bump();
            expect_ident("of");
            pattern_set(node);
            return node;
        }
        if (at_ident("any")) {
            bump();
            expect_ident("of");
            node.kind = Condition::Kind::AnyOf;
            pattern_set(node);
            return node;
        }
        if (at_ident("all")) {
            bump();
            expect_ident("of");
            node.kind = Condition::Kind::AllOf;
            pattern_set(node);
            return node;
        }
        if (at_ident("import")) {
            bump();
            expect(Tok::LParen, "'('");
            if (cur_.kind != Tok::Quoted) fail("expected quoted DLL name");
            node.kind = Condition::Kind::Import;
            node.dll.assign(cur_.bytes.begin(), cur_.bytes.end());
            bump();
            expect(Tok::Comma, "','");
            if (cur_.kind != Tok::Quoted) fail("expected quoted function name");
            node.function.assign(cur_.bytes.begin(), cur_.bytes.end());
            bump();
            expect(Tok::RParen, "')'");
            return node;
        }
        if (at_ident("entropy")) {
            bump();
            node.kind = Condition::Kind::EntropyCmp;
            switch (cur_.kind) {
                case Tok::Lt: node.cmp = CmpOp::Lt; break;
                case Tok::Le: node.cmp = CmpOp::Le; break;
                case Tok::Gt: node.cmp = CmpOp::Gt; break;
                case Tok::Ge: node.cmp = CmpOp::Ge; break;
                default: fail("expected comparison operator after 'entropy'");
            }
            bump();
            if (cur_.kind != Tok::Int && cur_.kind != Tok::Float) fail("expected numeric threshold");
            node.threshold = cur_.float_value;
            bump();
            return node;
        }
        if (at_ident("unsigned")) {
            bump();
            node.kind = Condition::Kind::Unsigned;
            return node;
        }
        fail("expected condition primary");
    }

    void pattern_set(Condition& node) {
        if (at_ident("them")) {
            bump();
            node.set_is_them = true;
            return;
        }
        expect(Tok::LParen, "'(' or 'them'");
        while (true) {
            if (cur_.kind != Tok::StrId) fail("expected pattern identifier in set");
            node.set_ids.push_back(cur_.text);
            bump();
            if (cur_.kind == Tok::Comma) {
                bump();
                continue;
            }
            break;
        }
        expect(Tok::RParen, "')'");
    }

    // Whole-set semantic checks, run after a syntactically clean parse.
    void validate(const RuleSet& rs) {
        std::unordered_set<std::string> names;
        std::size_t total_patterns = 0;
        for (const auto& r : rs.rules) {
            if (!names.insert(r.name).second) {
                throw SemanticError("duplicate rule name '" + r.name + "'");
            }
            std::unordered_set<std::string> pattern_ids;
            for (const auto& p : r.strings) {
                if (!pattern_ids.insert(p.id).second) {
                    throw SemanticError("rule '" + r.name + "': duplicate pattern '$" + p.id + "'");
                }
                if (p.text.empty()) {
                    throw SemanticError("rule '" + r.name + "': pattern '$" + p.id + "' is empty");
                }
                if (p.text.size() > kMaxPatternBytes) {
                    throw SemanticError("rule '" + r.name + "': pattern '$" + p.id +
                                        "' exceeds " + std::to_string(kMaxPatternBytes) + " bytes");
                }
                ++total_patterns;
            }
            if (total_patterns > kMaxPatternsPerSet) {
                throw SemanticError("ruleset exceeds " + std::to_string(kMaxPatternsPerSet) +
                                    " patterns");
            }
            validate_condition(r, r.condition, pattern_ids);
        }
    }

    void validate_condition(const Rule& r, const Condition& c,
                            const std::unordered_set<std::string>& declared) {
        using K = Condition::Kind;
        switch (c.kind) {
            case K::PatternRef:
                if (!declared.count(c.pattern_id)) {
                    throw SemanticError("rule '" + r.name + "': undeclared pattern '$" +
                                        c.pattern_id + "'");
                }
                break;
            case K::And:
            case K::Or:
            case K::Not:
                for (const auto& ch : c.children) validate_condition(r, ch, declared);
                break;
            case K::CountOf:
            case K::AnyOf:
            case K::AllOf: {
                std::size_t set_size;
                if (c.set_is_them) {
                    if (declared.empty()) {
                        throw SemanticError("rule '" + r.name +
                                            "': 'of them' with no declared patterns");
                    }
                    set_size = declared.size();
                } else {
                    for (const auto& id : c.set_ids) {
                        if (!declared.count(id)) {
                            throw SemanticError("rule '" + r.name + "': undeclared pattern '$" +
                                                id + "' in set");
                        }
                    }
                    set_size = c.set_ids.size();
                }
                if (c.kind == K::CountOf) {
                    if (c.count < 1) {
                        throw SemanticError("rule '" + r.name + "': count must be positive");
                    }
                    if (static_cast<std::size_t>(c.count) > set_size) {
                        throw SemanticError("rule '" + r.name + "': count " +
                                            std::to_string(c.count) + " exceeds set size " +
                                            std::to_string(set_size));
                    }
                }
                break;
            }
            case K::EntropyCmp:
                if (c.threshold < 0.0 || c.threshold > 8.0) {
                    throw SemanticError("rule '" + r.name + "': entropy threshold outside [0, 8]");
                }
                break;
            case K::Import:
            case K::Unsigned:
                break;
        }
    }

    Lexer lexer_;
    Token cur_;
};

}  // namespace

RuleSet parse_ruleset(std::string_view source) { return Parser(source).ruleset(); }

}  // namespace mirage::rulelang
