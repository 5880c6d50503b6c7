#include "ifc/syntax.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <unordered_set>
#include <vector>

namespace ifc {

namespace {

enum class Tok { Ident, Int, String, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

const std::unordered_set<std::string> kKeywords = {
    "skip", "if", "then", "else", "fi", "while", "do", "od", "tini", "eval", "declassify", "attenuate",
};
const std::unordered_set<std::string> kReserved = {"stop", "Stop", "pcdecl", "PcDecl"};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line_, col_});
                return out;
            }
            const int line = line_, col = col_;
            const char ch = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                std::string s;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    s += advance();
                out.push_back({Tok::Ident, s, line, col});
            } else if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '-' && negative_allowed(out))) {
                std::string s;
                if (ch == '-') s += advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) s += advance();
                out.push_back({Tok::Int, s, line, col});
            } else if (ch == '"') {
                advance();
                std::string s;
                for (;;) {
                    if (pos_ >= src_.size()) throw ParseError("unterminated string literal", line, col);
                    char c = advance();
                    if (c == '"') break;
                    if (c == '\\') {
                        if (pos_ >= src_.size()) throw ParseError("unterminated string literal", line, col);
                        char e = advance();
                        if (e == 'n') s += '\n';
                        else if (e == '"' || e == '\\') s += e;
                        else throw ParseError(std::string("unknown escape \\") + e, line_, col_ - 2);
                    } else {
                        s += c;
                    }
                }
                out.push_back({Tok::String, s, line, col});
            } else {
                static const char* two[] = {":=", "++"};
                std::string sym;
                for (const char* t : two)
                    if (src_.substr(pos_, 2) == t) sym = t;
                if (sym.empty()) {
                    if (std::string_view(";()[]{},+-*=<>").find(ch) == std::string_view::npos)
                        throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
                    sym = std::string(1, ch);
                }
                for (std::size_t i = 0; i < sym.size(); ++i) advance();
                out.push_back({Tok::Sym, sym, line, col});
            }
        }
    }

private:
    // A '-' directly followed by a digit starts a literal when no operand precedes it.
    bool negative_allowed(const std::vector<Token>& out) const {
        if (pos_ + 1 >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) return false;
        if (out.empty()) return true;
        const Token& p = out.back();
        if (p.kind == Tok::Int || p.kind == Tok::String) return false;
        if (p.kind == Tok::Ident) return kKeywords.count(p.text) > 0;
        return p.text != ")" && p.text != "]" && p.text != "}";
    }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::string_view src, const Lattice& lat) : toks_(Lexer(src).run()), lat_(lat) {}

    CmdPtr program() {
        CmdPtr c = seq();
        if (peek().kind != Tok::End) fail("expected ';' or end of program");
        return c;
    }

    ExprPtr lone_expr() {
        ExprPtr e = expr();
        if (peek().kind != Tok::End) fail("unexpected trailing input");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", found " + got, t.line, t.col);
    }

    bool at_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
    bool at_kw(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }

    void expect_sym(const char* s) {
        if (!at_sym(s)) fail(std::string("expected '") + s + "'");
        ++pos_;
    }
    void expect_kw(const char* s) {
        if (!at_kw(s)) fail(std::string("expected '") + s + "'");
        ++pos_;
    }

    std::string ident() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail("expected identifier");
        if (kReserved.count(t.text))
            throw ParseError("'" + t.text + "' is a runtime-only construct and cannot appear in programs", t.line, t.col);
        if (kKeywords.count(t.text)) fail("expected identifier");
        ++pos_;
        return t.text;
    }

    Level level() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail("expected security level");
        auto l = lat_.find(t.text);
        if (!l) throw ParseError("undeclared level '" + t.text + "'", t.line, t.col);
        ++pos_;
        return *l;
    }

    CmdPtr seq() {
        std::vector<CmdPtr> parts{atom()};
        while (at_sym(";")) {
            ++pos_;
            parts.push_back(atom());
        }
        return mk::seq(parts);
    }

    CmdPtr atom() {
        const Token& t = peek();
        if (at_sym("(")) {
            ++pos_;
            CmdPtr c = seq();
            expect_sym(")");
            return c;
        }
        if (t.kind != Tok::Ident) fail("expected command");
        if (kReserved.count(t.text))
            throw ParseError("'" + t.text + "' is a runtime-only construct and cannot appear in programs", t.line, t.col);
        if (t.text == "skip") {
            ++pos_;
            return mk::skip();
        }
        if (t.text == "if") {
            ++pos_;
            ExprPtr g = expr();
            expect_kw("then");
            CmdPtr a = seq();
            expect_kw("else");
            CmdPtr b = seq();
            expect_kw("fi");
            return mk::cond(g, a, b);
        }
        if (t.text == "while") {
            ++pos_;
            ExprPtr g = expr();
            expect_kw("do");
            CmdPtr body = seq();
            expect_kw("od");
            return mk::loop(g, body);
        }
        if (t.text == "tini") {
            ++pos_;
            expect_sym("[");
            const Token tag_tok = peek();
            std::string tag = ident();
            if (!tags_.insert(tag).second)
                throw ParseError("duplicate tini tag '" + tag + "'", tag_tok.line, tag_tok.col);
            expect_sym(",");
            Level to = level();
            expect_sym(",");
            ExprPtr auth = expr();
            expect_sym("]");
            expect_sym("{");
            CmdPtr body = seq();
            expect_sym("}");
            return mk::tini(tag, to, auth, body);
        }
        if (t.text == "eval") {
            ++pos_;
            expect_sym("(");
            ExprPtr code = expr();
            expect_sym(")");
            expect_sym("[");
            std::vector<std::string> allowed;
            if (!at_sym("]")) {
                allowed.push_back(ident());
                while (at_sym(",")) {
                    ++pos_;
                    allowed.push_back(ident());
                }
            }
            expect_sym("]");
            return mk::eval(code, std::move(allowed));
        }
        std::string x = ident();
        expect_sym(":=");
        if (at_kw("declassify")) {
            ++pos_;
            expect_sym("(");
            ExprPtr auth = expr();
            expect_sym(",");
            Level to = level();
            expect_sym(",");
            ExprPtr value = expr();
            expect_sym(")");
            return mk::declassify(x, auth, to, value);
        }
        return mk::assign(x, expr());
    }

    ExprPtr expr() {
        ExprPtr lhs = additive();
        for (;;) {
            BinOp op;
            if (at_sym("=")) op = BinOp::Eq;
            else if (at_sym("<")) op = BinOp::Lt;
            else if (at_sym(">")) op = BinOp::Gt;
            else return lhs;
            ++pos_;
            lhs = mk::bin(op, lhs, additive());
        }
    }

    ExprPtr additive() {
        ExprPtr lhs = multiplicative();
        for (;;) {
            BinOp op;
            if (at_sym("+")) op = BinOp::Add;
            else if (at_sym("-")) op = BinOp::Sub;
            else if (at_sym("++")) op = BinOp::Concat;
            else return lhs;
            ++pos_;
            lhs = mk::bin(op, lhs, multiplicative());
        }
    }

    ExprPtr multiplicative() {
        ExprPtr lhs = primary();
        while (at_sym("*")) {
            ++pos_;
            lhs = mk::bin(BinOp::Mul, lhs, primary());
        }
        return lhs;
    }

    ExprPtr primary() {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc() || p != t.text.data() + t.text.size())
                throw ParseError("integer literal out of range", t.line, t.col);
            ++pos_;
            return mk::num(v);
        }
        if (t.kind == Tok::String) {
            ++pos_;
            return mk::str(t.text);
        }
        if (at_sym("(")) {
            ++pos_;
            ExprPtr e = expr();
            expect_sym(")");
            return e;
        }
        if (at_kw("attenuate")) {
            ++pos_;
            expect_sym("(");
            ExprPtr inner = expr();
            expect_sym(",");
            Level l = level();
            expect_sym(",");
            const Token& p = peek();
            if (p.kind != Tok::Int || (p.text != "0" && p.text != "1")) fail("expected purpose bit 0 or 1");
            int purpose = p.text == "1" ? 1 : 0;
            ++pos_;
            expect_sym(")");
            return mk::attenuate(inner, l, purpose);
        }
        return mk::var(ident());
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Lattice& lat_;
    std::unordered_set<std::string> tags_;
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\', out += c;
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out + "\"";
}

void print_expr(const Expr& e, const Lattice& lat, std::string& out);

void print_operand(const ExprPtr& e, const Lattice& lat, std::string& out) {
    if (std::holds_alternative<Binary>(e->node)) {
        out += "(";
        print_expr(*e, lat, out);
        out += ")";
    } else if (const auto* n = std::get_if<IntLit>(&e->node); n && n->value < 0) {
        out += "(";
        print_expr(*e, lat, out);
        out += ")";
    } else {
        print_expr(*e, lat, out);
    }
}

void print_expr(const Expr& e, const Lattice& lat, std::string& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLit>) out += std::to_string(x.value);
            else if constexpr (std::is_same_v<T, StrLit>) out += quote(x.value);
            else if constexpr (std::is_same_v<T, Var>) out += x.name;
            else if constexpr (std::is_same_v<T, Binary>) {
                print_operand(x.lhs, lat, out);
                out += " ";
                out += to_string(x.op);
                out += " ";
                print_operand(x.rhs, lat, out);
            } else {
                out += "attenuate(";
                print_expr(*x.inner, lat, out);
                out += ", " + lat.name(x.level) + ", " + std::to_string(x.purpose) + ")";
            }
        },
        e.node);
}

void print_cmd(const Cmd& c, const Lattice& lat, std::string& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Skip>) out += "skip";
            else if constexpr (std::is_same_v<T, Stop>) out += "<stop>";
            else if constexpr (std::is_same_v<T, Seq>) {
                if (std::holds_alternative<Seq>(x.first->node)) {
                    out += "(";
                    print_cmd(*x.first, lat, out);
                    out += ")";
                } else {
                    print_cmd(*x.first, lat, out);
                }
                out += "; ";
                print_cmd(*x.second, lat, out);
            } else if constexpr (std::is_same_v<T, While>) {
                out += "while ";
                print_expr(*x.cond, lat, out);
                out += " do ";
                print_cmd(*x.body, lat, out);
                out += " od";
            } else if constexpr (std::is_same_v<T, If>) {
                out += "if ";
                print_expr(*x.cond, lat, out);
                out += " then ";
                print_cmd(*x.then_branch, lat, out);
                out += " else ";
                print_cmd(*x.else_branch, lat, out);
                out += " fi";
            } else if constexpr (std::is_same_v<T, Assign>) {
                out += x.var + " := ";
                print_expr(*x.value, lat, out);
            } else if constexpr (std::is_same_v<T, Tini>) {
                out += "tini[" + x.tag + ", " + lat.name(x.to) + ", ";
                print_expr(*x.auth, lat, out);
                out += "] { ";
                print_cmd(*x.body, lat, out);
                out += " }";
            } else if constexpr (std::is_same_v<T, Declassify>) {
                out += x.var + " := declassify(";
                print_expr(*x.auth, lat, out);
                out += ", " + lat.name(x.to) + ", ";
                print_expr(*x.value, lat, out);
                out += ")";
            } else if constexpr (std::is_same_v<T, Eval>) {
                out += "eval(";
                print_expr(*x.code, lat, out);
                out += ")[";
                for (std::size_t i = 0; i < x.allowed.size(); ++i) out += (i ? ", " : "") + x.allowed[i];
                out += "]";
            } else {
                out += "<pcdecl " + x.tag + ", " + lat.name(x.auth) + ", " + lat.name(x.to) + ">";
            }
        },
        c.node);
}

void collect(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Var>) out.insert(x.name);
            else if constexpr (std::is_same_v<T, Binary>) {
                collect(*x.lhs, out);
                collect(*x.rhs, out);
            } else if constexpr (std::is_same_v<T, Attenuate>) collect(*x.inner, out);
        },
        e.node);
}

void collect(const Cmd& c, std::set<std::string>& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Seq>) {
                collect(*x.first, out);
                collect(*x.second, out);
            } else if constexpr (std::is_same_v<T, While>) {
                collect(*x.cond, out);
                collect(*x.body, out);
            } else if constexpr (std::is_same_v<T, If>) {
                collect(*x.cond, out);
                collect(*x.then_branch, out);
                collect(*x.else_branch, out);
            } else if constexpr (std::is_same_v<T, Assign>) {
                out.insert(x.var);
                collect(*x.value, out);
            } else if constexpr (std::is_same_v<T, Tini>) {
                collect(*x.auth, out);
                collect(*x.body, out);
            } else if constexpr (std::is_same_v<T, Declassify>) {
                out.insert(x.var);
                collect(*x.auth, out);
                collect(*x.value, out);
            } else if constexpr (std::is_same_v<T, Eval>) {
                collect(*x.code, out);
            }
        },
        c.node);
}

template <class Node>
bool contains(const Cmd& c) {
    if (std::holds_alternative<Node>(c.node)) return true;
    return std::visit(
        [](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Seq>) return contains<Node>(*x.first) || contains<Node>(*x.second);
            else if constexpr (std::is_same_v<T, While>) return contains<Node>(*x.body);
            else if constexpr (std::is_same_v<T, If>)
                return contains<Node>(*x.then_branch) || contains<Node>(*x.else_branch);
            else if constexpr (std::is_same_v<T, Tini>) return contains<Node>(*x.body);
            else return false;
        },
        c.node);
}

}  // namespace

CmdPtr parse_program(std::string_view text, const Lattice& lat) { return Parser(text, lat).program(); }

ExprPtr parse_expr(std::string_view text, const Lattice& lat) { return Parser(text, lat).lone_expr(); }

std::string print(const Cmd& c, const Lattice& lat) {
    std::string out;
    print_cmd(c, lat, out);
    return out;
}

std::string print(const Expr& e, const Lattice& lat) {
    std::string out;
    print_expr(e, lat, out);
    return out;
}

std::set<std::string> vars_of(const Cmd& c) {
    std::set<std::string> out;
    collect(c, out);
    return out;
}

std::set<std::string> vars_of(const Expr& e) {
    std::set<std::string> out;
    collect(e, out);
    return out;
}

bool eval_free(const Cmd& c) { return !contains<Eval>(c); }

bool pcdecl_free(const Cmd& c) { return !contains<PcDecl>(c); }

bool decl_wf(const Cmd& c) {
    if (std::holds_alternative<PcDecl>(c.node)) return true;
    if (const auto* s = std::get_if<Seq>(&c.node)) return decl_wf(*s->first) && decl_wf(*s->second);
    return pcdecl_free(c);
}

}  // namespace ifc
