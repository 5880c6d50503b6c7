#include <doctest.h>

#include <json.hpp>

#include "ifc/fuzz.hpp"
#include "support.hpp"

using namespace ifc;
using testing::H;
using testing::L;
using testing::lmh;
using testing::lmh_memory;
using testing::M;
using testing::prog;

namespace {

struct Fixture {
    CmdPtr program;
    Memory memory;
    Domain domain;
};

Fixture fixture(const std::string& stem) {
    return Fixture{parse_program(read_file(testing::corpus(stem + ".ifc")), lmh()),
                   load_memory_file(testing::corpus(stem + ".memory.json"), lmh()),
                   load_domain_file(testing::corpus(stem + ".domain.json"), lmh())};
}

Verdict check(const std::string& stem, Condition cond, Mode mode) {
    Fixture f = fixture(stem);
    return check_run(Interpreter(lmh(), MonitorOptions{mode}), f.program, f.memory, L(), cond, f.domain);
}

std::vector<const Cell*> violated(const Verdict& v) {
    std::vector<const Cell*> out;
    for (const auto& c : v.cells)
        if (c.status == CellStatus::Violated) out.push_back(&c);
    return out;
}

bool has_violation(const Verdict& v, const std::string& clause, Level attacker) {
    for (const Cell* c : violated(v))
        if (c->clause == clause && c->attacker == attacker) return true;
    return false;
}

KnowledgeSet make_set(const void* id, std::vector<Membership> status) {
    KnowledgeSet k;
    k.domain_id = id;
    k.level = L();
    for (std::size_t i = 0; i < status.size(); ++i) k.universe.push_back(i);
    k.status = std::move(status);
    return k;
}

}  // namespace

TEST_SUITE("conditions") {

TEST_CASE("containment") {
    const int grid = 0;
    using enum Membership;
    KnowledgeSet both = make_set(&grid, {In, In});
    CHECK(check_containment(both, both).status == CellStatus::Holds);

    // B.in = {h=0, h=1}, A.in = {h=0}, A.out = {h=1}
    Containment c = check_containment(make_set(&grid, {In, Out}), both);
    CHECK(c.status == CellStatus::Violated);
    CHECK(c.witness == std::size_t{1});

    CHECK(check_containment(make_set(&grid, {Unknown, Out}), make_set(&grid, {In, Out})).status ==
          CellStatus::Inconclusive);
    // an unknown bound member inside a definite superset is fine
    CHECK(check_containment(make_set(&grid, {In, In}), make_set(&grid, {Unknown, Out})).status == CellStatus::Holds);
    // a violation outweighs any unknown
    CHECK(check_containment(make_set(&grid, {Unknown, Out}), make_set(&grid, {Unknown, In})).status ==
          CellStatus::Violated);

    const int other = 0;
    CHECK_THROWS_AS(check_containment(both, make_set(&other, {In, In})), ConfigError);
}

TEST_CASE("manifest verdicts") {
    for (const ManifestEntry& e : load_manifest(testing::corpus("manifest.json"))) {
        CAPTURE(e.name);
        const Lattice lat = load_lattice_file(e.lattice);
        CmdPtr c = parse_program(read_file(e.program), lat);
        Memory m = load_memory_file(e.memory, lat);
        Domain d = load_domain_file(e.domain, lat);
        const Mode mode = e.mode == "monitored" ? Mode::Monitored : Mode::Unmonitored;
        Verdict v = check_run(Interpreter(lat, MonitorOptions{mode}), c, m, lat.bottom(), *parse_condition(e.condition), d);
        CHECK(exit_code(v.overall) == e.expected_exit);
        CHECK(v.count(CellStatus::Inconclusive) == 0);
    }
}

TEST_CASE("termination leak violates clause 3 at the final assignment") {
    Verdict v = check("while_leak", Condition::BPNI, Mode::Unmonitored);
    CHECK(v.overall == Overall::Insecure);
    auto bad = violated(v);
    REQUIRE_FALSE(bad.empty());
    for (const Cell* c : bad) {
        CHECK(c->clause == "3");
        CHECK(c->event == Event{Event::Assign{"l", BaseValue(1)}});
        REQUIRE(c->witness);
        CHECK(v.candidates[*c->witness].get("h") == BaseValue(1));
    }
    CHECK(has_violation(v, "3", L()));
    CHECK(has_violation(v, "3", M()));
}

TEST_CASE("declassify after a high loop violates clause 1a") {
    Verdict v = check("decl_after_loop", Condition::BPNI, Mode::Unmonitored);
    CHECK(v.overall == Overall::Insecure);
    CHECK(has_violation(v, "1a", L()));
    for (const Cell* c : violated(v)) CHECK(c->event.is_declassify());
}

TEST_CASE("insufficient tini authority violates clause 2b") {
    Verdict v = check("insufficient_authority", Condition::BPNI, Mode::Unmonitored);
    CHECK(v.overall == Overall::Insecure);
    CHECK(has_violation(v, "2b", L()));
    for (const Cell* c : violated(v)) CHECK(c->event == Event{Event::TiniExit{"t1", M(), H(), L()}});
    CHECK(check("while_leak_tini", Condition::BPNI, Mode::Unmonitored).overall == Overall::Secure);
}

TEST_CASE("secure fixtures") {
    CHECK(check("chained_declassify", Condition::BPNI, Mode::Unmonitored).overall == Overall::Secure);
    CHECK(check("nested_tini", Condition::BPNI, Mode::Unmonitored).overall == Overall::Secure);
}

TEST_CASE("occlusion is caught at the branch assignment") {
    Verdict v = check("occlusion", Condition::BPNI, Mode::Unmonitored);
    CHECK(v.overall == Overall::Insecure);
    auto bad = violated(v);
    REQUIRE_FALSE(bad.empty());
    for (const Cell* c : bad) {
        CHECK(c->clause == "3");
        CHECK(std::holds_alternative<Event::Assign>(c->event.e));
    }
}

TEST_CASE("branch timing separates the timed and untimed conditions") {
    CHECK(check("branch_timing", Condition::BPNI, Mode::Unmonitored).overall == Overall::Secure);
    Verdict v = check("branch_timing", Condition::BTNI, Mode::Unmonitored);
    CHECK(v.overall == Overall::Insecure);

    // recompute both branches' timestamps for l := 0
    Fixture f = fixture("branch_timing");
    std::map<std::int64_t, std::uint64_t> ts;
    for (int h : {0, 1}) {
        Memory m = f.memory;
        m.set("h", h);
        auto low = filter_trace(Interpreter(lmh(), MonitorOptions{Mode::Unmonitored}).clocked_run(Config{f.program, m, L()}, 100),
                                L(), m.env(), lmh());
        REQUIRE(low.size() == 1);
        ts[h] = low[0].ts;
    }
    CHECK(ts[0] != ts[1]);
    const auto ref_h = std::get<std::int64_t>(f.memory.get("h").v);

    bool found = false;
    for (const Cell* c : violated(v)) {
        if (c->clause != "3" || c->attacker != L()) continue;
        found = true;
        CHECK(c->ts == ts[ref_h]);
        REQUIRE(c->witness);
        const auto wh = std::get<std::int64_t>(v.candidates[*c->witness].get("h").v);
        CHECK(wh != ref_h);
        CHECK(c->witness_ts == ts[wh]);
    }
    CHECK(found);
}

TEST_CASE("blocked monitored runs are reported, not flagged") {
    Verdict v = check("high_branch", Condition::BPNI, Mode::Monitored);
    CHECK(v.run_outcome == Outcome::Blocked);
    CHECK_FALSE(v.block_reason.empty());
    CHECK(v.overall == Overall::Secure);
}

TEST_CASE("monitored corpus runs are never insecure") {
    for (const char* stem : {"while_leak", "while_leak_tini", "decl_after_loop", "insufficient_authority",
                             "chained_declassify", "nested_tini", "occlusion", "branch_timing", "high_branch",
                             "news_widget", "attenuation"}) {
        CAPTURE(stem);
        Fixture f = fixture(stem);
        CHECK(check_monitor_soundness(f.program, f.memory, L(), f.domain, lmh()).overall != Overall::Insecure);
    }
}

TEST_CASE("known gap: a tini exit from a raised pc is accepted by the monitor but violates clause 2a") {
    // The tini exit checks pc ⊑ target ⊔ auth against the pc at exit, which here is
    // H or M depending on m, so the tini event itself carries the secret m.
    CmdPtr c = prog("tini[e, L, rootauth] { if m > 0 then (if h > 0 then skip else skip fi) else skip fi }");
    const Memory m0 = lmh_memory(0, 1, 0);
    const Domain dom = testing::binary({"m", "h"});
    RunResult r = Interpreter(lmh()).run(Config{c, m0, L()}, 100);
    CHECK(r.outcome == Outcome::Terminated);
    Verdict v = check_monitor_soundness(c, m0, L(), dom, lmh());
    CHECK(v.overall == Overall::Insecure);
    CHECK(has_violation(v, "2a", L()));
    for (const Cell* w : violated(v)) {
        REQUIRE(w->witness);
        CHECK(v.candidates[*w->witness].get("m") == BaseValue(0));
    }
}

TEST_CASE("condition implications on generated runs") {
    FuzzConfig plain;
    plain.seed = 31;
    plain.weights.tini = 0;
    plain.weights.declassify = 0;
    plain.weights.eval = 0;
    ProgramGenerator gen(lmh(), plain);
    const Interpreter un(lmh(), MonitorOptions{Mode::Unmonitored});
    CheckOptions opts;
    opts.budget = 2000;
    int insecure_psni = 0;
    for (int i = 0; i < 120; ++i) {
        FuzzCase fc = gen.next();
        CAPTURE(fc.source);
        Verdict psni = check_run(un, fc.program, fc.memory, L(), Condition::PSNI, fc.domain, opts);
        Verdict bpni = check_run(un, fc.program, fc.memory, L(), Condition::BPNI, fc.domain, opts);
        Verdict pini = check_run(un, fc.program, fc.memory, L(), Condition::PINI, fc.domain, opts);
        Verdict btni = check_run(un, fc.program, fc.memory, L(), Condition::BTNI, fc.domain, opts);
        if (psni.overall == Overall::Secure) CHECK(bpni.overall == Overall::Secure);
        if (bpni.overall == Overall::Secure) CHECK(pini.overall == Overall::Secure);
        if (btni.overall == Overall::Secure) CHECK(bpni.overall == Overall::Secure);
        insecure_psni += psni.overall == Overall::Insecure;
    }
    CHECK(insecure_psni > 0);
}

TEST_CASE("verdict report formats") {
    Verdict v = check("while_leak", Condition::BPNI, Mode::Unmonitored);
    auto j = nlohmann::json::parse(verdict_json(v, lmh()));
    CHECK(j["overall"] == "Insecure");
    CHECK(j["condition"] == "BPNI");
    CHECK(j["cells"].is_array());
    CHECK(verdict_json(v, lmh()) == verdict_json(check("while_leak", Condition::BPNI, Mode::Unmonitored), lmh()));
    const std::string table = verdict_table(v, lmh());
    CHECK(table.find("h=1") != std::string::npos);
    CHECK(exit_code(Overall::Secure) == 0);
    CHECK(exit_code(Overall::Insecure) == 1);
    CHECK(exit_code(Overall::Inconclusive) == 2);
    CHECK(parse_condition("btni") == Condition::BTNI);
    CHECK_FALSE(parse_condition("xyz"));
}

}
