#include "ifc/ast.hpp"

#include <functional>
#include <stdexcept>

namespace ifc {

const char* to_string(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Concat: return "++";
        case BinOp::Eq: return "=";
        case BinOp::Lt: return "<";
        case BinOp::Gt: return ">";
    }
    return "?";
}

bool same(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool same(const CmdPtr& a, const CmdPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, IntLit>) return x.value == y.value;
            else if constexpr (std::is_same_v<T, StrLit>) return x.value == y.value;
            else if constexpr (std::is_same_v<T, Var>) return x.name == y.name;
            else if constexpr (std::is_same_v<T, Binary>) return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
            else return x.level == y.level && x.purpose == y.purpose && same(x.inner, y.inner);
        },
        a.node);
}

bool operator==(const Cmd& a, const Cmd& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Skip> || std::is_same_v<T, Stop>) return true;
            else if constexpr (std::is_same_v<T, Seq>) return same(x.first, y.first) && same(x.second, y.second);
            else if constexpr (std::is_same_v<T, While>) return same(x.cond, y.cond) && same(x.body, y.body);
            else if constexpr (std::is_same_v<T, If>)
                return same(x.cond, y.cond) && same(x.then_branch, y.then_branch) && same(x.else_branch, y.else_branch);
            else if constexpr (std::is_same_v<T, Assign>) return x.var == y.var && same(x.value, y.value);
            else if constexpr (std::is_same_v<T, Tini>)
                return x.tag == y.tag && x.to == y.to && same(x.auth, y.auth) && same(x.body, y.body);
            else if constexpr (std::is_same_v<T, Declassify>)
                return x.var == y.var && x.to == y.to && same(x.auth, y.auth) && same(x.value, y.value);
            else if constexpr (std::is_same_v<T, Eval>) return x.allowed == y.allowed && same(x.code, y.code);
            else return x.tag == y.tag && x.auth == y.auth && x.to == y.to;
        },
        a.node);
}

namespace {

void mix(std::size_t& seed, std::size_t v) { seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); }

std::size_t hash_expr(const ExprPtr& e) {
    std::size_t h = e->node.index();
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLit>) mix(h, std::hash<std::int64_t>{}(x.value));
            else if constexpr (std::is_same_v<T, StrLit>) mix(h, std::hash<std::string>{}(x.value));
            else if constexpr (std::is_same_v<T, Var>) mix(h, std::hash<std::string>{}(x.name));
            else if constexpr (std::is_same_v<T, Binary>) {
                mix(h, static_cast<std::size_t>(x.op));
                mix(h, hash_expr(x.lhs));
                mix(h, hash_expr(x.rhs));
            } else {
                mix(h, x.level.id);
                mix(h, static_cast<std::size_t>(x.purpose));
                mix(h, hash_expr(x.inner));
            }
        },
        e->node);
    return h;
}

}  // namespace

std::size_t hash_value(const Cmd& c) {
    std::size_t h = c.node.index();
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Seq>) {
                mix(h, hash_value(*x.first));
                mix(h, hash_value(*x.second));
            } else if constexpr (std::is_same_v<T, While>) {
                mix(h, hash_expr(x.cond));
                mix(h, hash_value(*x.body));
            } else if constexpr (std::is_same_v<T, If>) {
                mix(h, hash_expr(x.cond));
                mix(h, hash_value(*x.then_branch));
                mix(h, hash_value(*x.else_branch));
            } else if constexpr (std::is_same_v<T, Assign>) {
                mix(h, std::hash<std::string>{}(x.var));
                mix(h, hash_expr(x.value));
            } else if constexpr (std::is_same_v<T, Tini>) {
                mix(h, std::hash<std::string>{}(x.tag));
                mix(h, x.to.id);
                mix(h, hash_expr(x.auth));
                mix(h, hash_value(*x.body));
            } else if constexpr (std::is_same_v<T, Declassify>) {
                mix(h, std::hash<std::string>{}(x.var));
                mix(h, x.to.id);
                mix(h, hash_expr(x.auth));
                mix(h, hash_expr(x.value));
            } else if constexpr (std::is_same_v<T, Eval>) {
                mix(h, hash_expr(x.code));
                for (const auto& a : x.allowed) mix(h, std::hash<std::string>{}(a));
            } else if constexpr (std::is_same_v<T, PcDecl>) {
                mix(h, std::hash<std::string>{}(x.tag));
                mix(h, x.auth.id);
                mix(h, x.to.id);
            }
        },
        c.node);
    return h;
}

namespace mk {

namespace {
template <class T>
ExprPtr e(T&& node) {
    return std::make_shared<const Expr>(Expr{std::forward<T>(node)});
}
template <class T>
CmdPtr c(T&& node) {
    return std::make_shared<const Cmd>(Cmd{std::forward<T>(node)});
}
}  // namespace

ExprPtr num(std::int64_t n) { return e(IntLit{n}); }
ExprPtr str(std::string s) { return e(StrLit{std::move(s)}); }
ExprPtr var(std::string name) { return e(Var{std::move(name)}); }
ExprPtr bin(BinOp op, ExprPtr lhs, ExprPtr rhs) { return e(Binary{op, std::move(lhs), std::move(rhs)}); }
ExprPtr attenuate(ExprPtr inner, Level level, int purpose) {
    return e(Attenuate{std::move(inner), level, purpose});
}

CmdPtr skip() {
    static const CmdPtr s = c(Skip{});
    return s;
}
CmdPtr stop() {
    static const CmdPtr s = c(Stop{});
    return s;
}
CmdPtr seq(CmdPtr first, CmdPtr second) { return c(Seq{std::move(first), std::move(second)}); }
CmdPtr seq(const std::vector<CmdPtr>& cmds) {
    if (cmds.empty()) throw std::invalid_argument("seq of no commands");
    CmdPtr out = cmds.back();
    for (std::size_t i = cmds.size() - 1; i-- > 0;) out = seq(cmds[i], out);
    return out;
}
CmdPtr loop(ExprPtr cond, CmdPtr body) { return c(While{std::move(cond), std::move(body)}); }
CmdPtr cond(ExprPtr guard, CmdPtr then_branch, CmdPtr else_branch) {
    return c(If{std::move(guard), std::move(then_branch), std::move(else_branch)});
}
CmdPtr assign(std::string var, ExprPtr value) { return c(Assign{std::move(var), std::move(value)}); }
CmdPtr tini(std::string tag, Level to, ExprPtr auth, CmdPtr body) {
    return c(Tini{std::move(tag), to, std::move(auth), std::move(body)});
}
CmdPtr declassify(std::string var, ExprPtr auth, Level to, ExprPtr value) {
    return c(Declassify{std::move(var), std::move(auth), to, std::move(value)});
}
CmdPtr eval(ExprPtr code, std::vector<std::string> allowed) { return c(Eval{std::move(code), std::move(allowed)}); }
CmdPtr pcdecl(std::string tag, Level auth, Level to) { return c(PcDecl{std::move(tag), auth, to}); }

}  // namespace mk

}  // namespace ifc
