#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ifc/ast.hpp"
#include "ifc/lattice.hpp"

namespace ifc {

/// Syntax error, reserved-construct use, duplicate tini tag, or unknown level.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// Parses a surface program; levels are resolved against `lat`.
CmdPtr parse_program(std::string_view text, const Lattice& lat);
ExprPtr parse_expr(std::string_view text, const Lattice& lat);

/// Concrete syntax that parse_program maps back to the same AST. Runtime-only
/// nodes (Stop, PcDecl) print as `<stop>` / `<pcdecl ...>` and do not reparse.
std::string print(const Cmd& c, const Lattice& lat);
std::string print(const Expr& e, const Lattice& lat);

std::set<std::string> vars_of(const Cmd& c);
std::set<std::string> vars_of(const Expr& e);
bool eval_free(const Cmd& c);
bool pcdecl_free(const Cmd& c);
bool decl_wf(const Cmd& c);

}  // namespace ifc
