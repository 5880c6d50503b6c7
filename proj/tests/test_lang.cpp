#include <doctest.h>

#include "ifc/fuzz.hpp"
#include "support.hpp"

using namespace ifc;
using testing::lmh;
using testing::prog;

namespace {

std::string parse_error(const std::string& text) {
    try {
        parse_program(text, lmh());
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("lang") {

TEST_CASE("parse examples") {
    CHECK(is<Skip>(prog("skip")));

    CmdPtr p = prog("l := 0 ; while h > 0 do skip od ; l := 1");
    REQUIRE(is<Seq>(p));
    const auto& s = std::get<Seq>(p->node);
    CHECK(is<Assign>(s.first));
    REQUIRE(is<Seq>(s.second));
    const auto& s2 = std::get<Seq>(s.second->node);
    CHECK(is<While>(s2.first));
    CHECK(is<Assign>(s2.second));

    CmdPtr t = prog("tini[t1, L, rootauth] { while h > 0 do skip od }");
    REQUIRE(is<Tini>(t));
    CHECK(std::get<Tini>(t->node).tag == "t1");
    CHECK(std::get<Tini>(t->node).to == testing::L());
}

TEST_CASE("declassify, eval, attenuate and strings") {
    CmdPtr d = prog("l := declassify(attenuate(rootauth, M, 1), L, m)");
    REQUIRE(is<Declassify>(d));
    const auto& dn = std::get<Declassify>(d->node);
    CHECK(dn.var == "l");
    CHECK(dn.to == testing::L());
    const auto& at = std::get<Attenuate>(dn.auth->node);
    CHECK(at.level == testing::M());
    CHECK(at.purpose == 1);

    CmdPtr e = prog("eval(\"x := \\\"a\\\"\")[x]  # comment");
    REQUIRE(is<Eval>(e));
    CHECK(std::get<StrLit>(std::get<Eval>(e->node).code->node).value == "x := \"a\"");
    CHECK(std::get<Eval>(e->node).allowed == std::vector<std::string>{"x"});

    CHECK(is<Eval>(prog("eval(\"skip\")[]")));
    CHECK(is<Seq>(prog("(if h then skip else skip fi); l := 0")));
}

TEST_CASE("operators: precedence and associativity") {
    // 1 + 2 * 3 = 7 parses as (1 + (2 * 3)) = 7
    ExprPtr e = parse_expr("1 + 2 * 3 = 7", lmh());
    const auto& eq = std::get<Binary>(e->node);
    CHECK(eq.op == BinOp::Eq);
    const auto& add = std::get<Binary>(eq.lhs->node);
    CHECK(add.op == BinOp::Add);
    CHECK(std::get<Binary>(add.rhs->node).op == BinOp::Mul);
    // left associative: 5 - 2 - 1 is (5 - 2) - 1
    const auto& sub = std::get<Binary>(parse_expr("5 - 2 - 1", lmh())->node);
    CHECK(std::get<Binary>(sub.lhs->node).op == BinOp::Sub);
    CHECK(std::get<IntLit>(sub.rhs->node).value == 1);
    CHECK(std::get<IntLit>(parse_expr("-3", lmh())->node).value == -3);
}

TEST_CASE("syntax errors carry line and column") {
    const std::string e = parse_error("skip;\nl := ");
    CHECK(e.rfind("2:", 0) == 0);
    CHECK_FALSE(parse_error("if h then skip fi").empty());
    CHECK_FALSE(parse_error("l := \"unterminated").empty());
}

TEST_CASE("reserved constructs and duplicate tags") {
    CHECK(parse_error("Stop").find("runtime-only") != std::string::npos);
    CHECK(parse_error("pcdecl").find("runtime-only") != std::string::npos);
    CHECK(parse_error("tini[a, L, rootauth]{skip}; tini[a, L, rootauth]{skip}").find("a") != std::string::npos);
    CHECK_FALSE(parse_error("tini[a, Q, rootauth]{skip}").empty());
}

TEST_CASE("vars_of") {
    CHECK(vars_of(*prog("skip")).empty());
    CHECK(vars_of(*prog("l := h")) == std::set<std::string>{"l", "h"});
    const std::set<std::string> all{"auth_M", "l1", "l2", "m1", "m2", "h1", "h2"};
    CHECK(vars_of(*prog("l1 := declassify(auth_M, L, m1 + m2); h2 := h1 + l2")) == all);
}

TEST_CASE("eval_free") {
    CHECK(eval_free(*prog("skip")));
    CHECK_FALSE(eval_free(*prog("eval(\"skip\")[x]")));
    CHECK_FALSE(eval_free(*prog("while 1 do eval(\"skip\")[x] od")));
}

TEST_CASE("decl_wf and pcdecl_free") {
    const Level l = testing::L(), h = testing::H();
    CHECK(decl_wf(*mk::pcdecl("t", h, l)));
    CHECK_FALSE(decl_wf(*mk::cond(mk::num(1), mk::pcdecl("t", h, l), mk::skip())));
    CHECK(decl_wf(*mk::seq(prog("while h > 0 do skip od"), mk::pcdecl("t", h, l))));
    CHECK_FALSE(pcdecl_free(*mk::seq(mk::skip(), mk::pcdecl("t", h, l))));
    CHECK(pcdecl_free(*prog("tini[t, L, rootauth]{skip}")));
    CHECK(decl_wf(*prog("tini[t, L, rootauth]{skip}; l := 1")));
}

TEST_CASE("print then parse is the identity") {
    for (const char* src : {"l := 0; while h > 0 do skip od; l := 1",
                            "(skip; skip); skip",
                            "if (1 + 2) * 3 = 9 then l := \"a\\\"b\" ++ \"c\" else skip fi",
                            "tini[t1, L, attenuate(rootauth, M, 0)] { if m > 0 then skip else skip fi }",
                            "l := declassify(rootauth, L, h - -1)",
                            "eval(\"l := 1\")[l]"}) {
        CmdPtr p = prog(src);
        CAPTURE(src);
        CHECK(*prog(print(*p, lmh())) == *p);
    }
    FuzzConfig cfg;
    cfg.seed = 11;
    ProgramGenerator gen(lmh(), cfg);
    for (int i = 0; i < 300; ++i) {
        CmdPtr p = gen.command(5);
        const std::string text = print(*p, lmh());
        CAPTURE(text);
        CHECK(*prog(text) == *p);
    }
}

}
