#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ifc/lattice.hpp"

namespace ifc {

enum class BinOp { Add, Sub, Mul, Concat, Eq, Lt, Gt };

const char* to_string(BinOp op);

struct Expr;
struct Cmd;
using ExprPtr = std::shared_ptr<const Expr>;
using CmdPtr = std::shared_ptr<const Cmd>;

// ── Expressions ──

struct IntLit {
    std::int64_t value;
};
struct StrLit {
    std::string value;
};
struct Var {
    std::string name;
};
struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Attenuate {
    ExprPtr inner;
    Level level;
    int purpose;  // 0 or 1
};

struct Expr {
    std::variant<IntLit, StrLit, Var, Binary, Attenuate> node;
};

// ── Commands ──

struct Skip {};
struct Stop {};
struct Seq {
    CmdPtr first;
    CmdPtr second;
};
struct While {
    ExprPtr cond;
    CmdPtr body;
};
struct If {
    ExprPtr cond;
    CmdPtr then_branch;
    CmdPtr else_branch;
};
struct Assign {
    std::string var;
    ExprPtr value;
};
struct Tini {
    std::string tag;
    Level to;
    ExprPtr auth;
    CmdPtr body;
};
struct Declassify {
    std::string var;
    ExprPtr auth;
    Level to;
    ExprPtr value;
};
struct Eval {
    ExprPtr code;
    std::vector<std::string> allowed;
};
struct PcDecl {
    std::string tag;
    Level auth;
    Level to;
};

struct Cmd {
    std::variant<Skip, Stop, Seq, While, If, Assign, Tini, Declassify, Eval, PcDecl> node;
};

bool operator==(const Expr& a, const Expr& b);
bool operator==(const Cmd& a, const Cmd& b);
/// Deep structural equality; null pointers compare equal only to null.
bool same(const ExprPtr& a, const ExprPtr& b);
bool same(const CmdPtr& a, const CmdPtr& b);

std::size_t hash_value(const Cmd& c);

template <class T>
bool is(const CmdPtr& c) {
    return std::holds_alternative<T>(c->node);
}

namespace mk {

ExprPtr num(std::int64_t n);
ExprPtr str(std::string s);
ExprPtr var(std::string name);
ExprPtr bin(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr attenuate(ExprPtr inner, Level level, int purpose);

CmdPtr skip();
CmdPtr stop();
CmdPtr seq(CmdPtr first, CmdPtr second);
/// Right-associated sequence of one or more commands.
CmdPtr seq(const std::vector<CmdPtr>& cmds);
CmdPtr loop(ExprPtr cond, CmdPtr body);
CmdPtr cond(ExprPtr guard, CmdPtr then_branch, CmdPtr else_branch);
CmdPtr assign(std::string var, ExprPtr value);
CmdPtr tini(std::string tag, Level to, ExprPtr auth, CmdPtr body);
CmdPtr declassify(std::string var, ExprPtr auth, Level to, ExprPtr value);
CmdPtr eval(ExprPtr code, std::vector<std::string> allowed);
CmdPtr pcdecl(std::string tag, Level auth, Level to);

}  // namespace mk

}  // namespace ifc
