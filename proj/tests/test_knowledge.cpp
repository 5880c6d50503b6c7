#include <doctest.h>

#include <algorithm>
#include <random>

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

const Interpreter& unmonitored() {
    static const Interpreter i(lmh(), MonitorOptions{Mode::Unmonitored});
    return i;
}

Event assign(const std::string& x, int v) { return Event{Event::Assign{x, BaseValue(v)}}; }

Target untimed(KnowledgeKind k, std::vector<Event> prefix) {
    Target t;
    t.kind = k;
    t.level = L();
    for (auto& e : prefix) t.prefix.push_back(TimedEvent{0, std::move(e)});
    return t;
}

/// Values of `x` over the given grid indices, sorted.
std::vector<std::int64_t> values(const std::vector<std::size_t>& idx, const std::vector<Memory>& grid,
                                 const std::string& x) {
    std::vector<std::int64_t> out;
    for (auto i : idx) out.push_back(std::get<std::int64_t>(grid[i].get(x).v));
    std::sort(out.begin(), out.end());
    return out;
}

bool subset(std::vector<std::size_t> a, std::vector<std::size_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

const char* kP1 = "l := 0; while h > 0 do skip od; l := 1";
const char* kTiming = "if h > 0 then skip else skip; skip; skip fi; l := 0";

}  // namespace

TEST_SUITE("knowledge") {

TEST_CASE("memory equivalence") {
    const Memory a = lmh_memory(0, 0, 0), b = lmh_memory(0, 0, 1), c = lmh_memory(0, 1, 1);
    for (Level l : lmh().levels()) CHECK(mem_equiv(a, a, l, lmh()));
    CHECK(mem_equiv(a, b, L(), lmh()));
    CHECK(mem_equiv(a, b, M(), lmh()));
    CHECK_FALSE(mem_equiv(a, b, H(), lmh()));
    CHECK(mem_equiv(a, c, L(), lmh()));
    CHECK_FALSE(mem_equiv(a, c, M(), lmh()));
    const Memory other = MemoryBuilder(lmh()).var("l", L(), 0).build();
    for (Level l : lmh().levels()) CHECK_FALSE(mem_equiv(a, other, l, lmh()));
}

TEST_CASE("event levels and filtering") {
    const Memory m = lmh_memory(0, 0, 0);
    const TypeEnv& env = m.env();
    CHECK(level_of_event(Event{}, env, lmh()) == lmh().top());
    CHECK(level_of_event(assign("l", 0), env, lmh()) == L());
    CHECK(level_of_event(Event{Event::TiniExit{"eta", M(), H(), L()}}, env, lmh()) == L());
    CHECK(level_of_event(Event{Event::Declassify{"m", BaseValue(1), H(), H(), M()}}, env, lmh()) == M());

    CHECK(filter_trace(std::vector<Event>{}, L(), env, lmh()).empty());
    const std::vector<Event> t{Event{}, assign("l", 0), assign("h", 1)};
    CHECK(filter_trace(t, L(), env, lmh()) == std::vector<Event>{assign("l", 0)});
    CHECK(filter_trace(t, H(), env, lmh()) == t);

    auto timed = filter_trace(stamp(t), L(), env, lmh());
    REQUIRE(timed.size() == 1);
    CHECK(timed[0].ts == 2);
}

TEST_CASE("membership of l := h against an observed assignment") {
    const CmdPtr c = prog("l := h");
    const Target target = untimed(KnowledgeKind::Attacker, {assign("l", 1)});
    for (int h : {0, 1, 2}) {
        // oracle: the run emits a(l,h) and stops
        const Membership expect = h == 1 ? Membership::In : Membership::Out;
        CHECK(classify_membership(unmonitored(), c, L(), lmh_memory(0, 0, h), target, 100) == expect);
    }
}

TEST_CASE("empty target is attained by every run") {
    const CmdPtr c = prog("h := 1; while h > 0 do skip od");
    for (int h : {0, 1})
        CHECK(classify_membership(unmonitored(), c, L(), lmh_memory(0, 0, h),
                                  untimed(KnowledgeKind::Attacker, {}), 50) == Membership::In);
}

TEST_CASE("a silently looping candidate stays unknown under a small budget") {
    const CmdPtr c = prog("while h > 0 do skip od; l := 0");
    const Target plus_one = untimed(KnowledgeKind::Progress, {});
    CHECK(classify_membership(unmonitored(), c, L(), lmh_memory(0, 0, 0), plus_one, 50, false) == Membership::In);
    CHECK(classify_membership(unmonitored(), c, L(), lmh_memory(0, 0, 1), plus_one, 50, false) ==
          Membership::Unknown);
    // a repeated configuration proves the loop never exits
    CHECK(classify_membership(unmonitored(), c, L(), lmh_memory(0, 0, 1), plus_one, 50, true) == Membership::Out);
}

TEST_CASE("attacker and progress knowledge on the termination leak") {
    const CmdPtr c = prog(kP1);
    const Memory m = lmh_memory(0, 0, 0);
    const Domain dom = testing::binary({"h"});
    RunResult r = unmonitored().run(Config{c, m, L()}, 1000);
    // t up to a(l,0) is the first event; up to a(l,1) is the whole run
    const std::vector<Event> t1(r.trace.begin(), r.trace.begin() + 1);
    REQUIRE(t1.back() == assign("l", 0));
    REQUIRE(r.trace.back() == assign("l", 1));

    std::vector<Memory> grid;
    KnowledgeSet empty = attacker_knowledge(unmonitored(), c, m, L(), {}, L(), dom, 1000, &grid);
    CHECK(empty.in_set().size() == grid.size());

    KnowledgeSet k1 = attacker_knowledge(unmonitored(), c, m, L(), t1, L(), dom, 1000, &grid);
    CHECK(values(k1.in_set(), grid, "h") == std::vector<std::int64_t>{0, 1});
    KnowledgeSet k2 = attacker_knowledge(unmonitored(), c, m, L(), r.trace, L(), dom, 1000, &grid);
    CHECK(values(k2.in_set(), grid, "h") == std::vector<std::int64_t>{0});
    CHECK(values(k2.out_set(), grid, "h") == std::vector<std::int64_t>{1});

    KnowledgeSet p1 = progress_knowledge(unmonitored(), c, m, L(), t1, L(), dom, 1000, &grid);
    CHECK(values(p1.in_set(), grid, "h") == std::vector<std::int64_t>{0});
    KnowledgeSet pend = progress_knowledge(unmonitored(), c, m, L(), r.trace, L(), dom, 1000, &grid);
    CHECK(pend.in_set().empty());
    KnowledgeSet p0 = progress_knowledge(unmonitored(), c, m, L(), {}, L(), dom, 1000, &grid);
    CHECK(p0.in_set().size() == grid.size());
}

TEST_CASE("universe is the level-equivalent part of the grid") {
    const CmdPtr c = prog("l := m");
    const Memory m = lmh_memory(0, 1, 0);
    std::vector<Memory> grid;
    KnowledgeSet k = attacker_knowledge(unmonitored(), c, m, L(), {}, M(), testing::binary({"m", "h"}), 100, &grid);
    CHECK(grid.size() == 4);
    CHECK(values(k.universe, grid, "m") == std::vector<std::int64_t>{1, 1});
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!mem_equiv(grid[i], m, M(), lmh())) CHECK(k.status_of(i) == Membership::Out);
}

TEST_CASE("clock knowledge distinguishes branch timing") {
    const CmdPtr c = prog(kTiming);
    const Domain dom = testing::binary({"h"});
    // oracle: step-count each run independently and read off the low event's timestamp
    std::map<std::int64_t, std::uint64_t> low_ts;
    for (int h : {0, 1}) {
        const Memory mh = lmh_memory(0, 0, h);
        auto low = filter_trace(unmonitored().clocked_run(Config{c, mh, L()}, 100), L(), mh.env(), lmh());
        REQUIRE(low.size() == 1);
        low_ts[h] = low[0].ts;
    }
    CHECK(low_ts[0] != low_ts[1]);
    const Memory m = lmh_memory(0, 0, 0);
    std::vector<Memory> grid;
    for (int h : {0, 1}) {
        KnowledgeSet k = clock_knowledge(unmonitored(), c, m, L(), {}, L(), low_ts[h], dom, 100, &grid);
        CHECK(values(k.in_set(), grid, "h") == std::vector<std::int64_t>{h});
        CHECK(k.unknown_set().empty());
    }
    CHECK(clock_knowledge(unmonitored(), c, m, L(), {}, L(), 1, dom, 100, &grid).in_set().empty());
}

TEST_CASE("prefix must come from the reference run") {
    const CmdPtr c = prog(kP1);
    CHECK_THROWS(attacker_knowledge(unmonitored(), c, lmh_memory(0, 0, 0), L(), {assign("l", 7)}, L(),
                                    testing::binary({"h"}), 100));
}

TEST_CASE("clock, progress and attacker knowledge form a chain") {
    FuzzConfig cfg;
    cfg.seed = 19;
    ProgramGenerator gen(lmh(), cfg);
    std::mt19937_64 rng(23);
    const Interpreter interps[] = {Interpreter(lmh(), MonitorOptions{Mode::Monitored}), unmonitored()};
    int samples = 0, violations = 0;
    while (samples < 200) {
        FuzzCase fc = gen.next();
        const Interpreter& in = interps[samples % 2];
        std::vector<Memory> grid = enumerate_memories(fc.domain, fc.memory);
        const auto ref = std::find(grid.begin(), grid.end(), fc.memory) - grid.begin();
        KnowledgeOracle o(in, fc.program, L(), grid, ref, 2000);
        const auto& trace = o.reference_trace();
        const std::size_t k = rng() % (trace.size() + 1);
        const Level l = lmh().levels()[rng() % 3];
        const std::uint64_t ts = k + 1 + rng() % 12;
        KnowledgeSet a = o.attacker(k, l), p = o.progress(k, l), t = o.clock(k, l, ts);
        const bool ok = subset(t.in_set(), p.in_set()) && subset(p.in_set(), a.in_set()) &&
                        subset(a.out_set(), p.out_set()) && subset(p.out_set(), t.out_set());
        if (!ok) {
            ++violations;
            MESSAGE(fc.source);
        }
        ++samples;
    }
    CHECK(violations == 0);
}

TEST_CASE("raising the budget only resolves unknowns") {
    FuzzConfig cfg;
    cfg.seed = 29;
    ProgramGenerator gen(lmh(), cfg);
    std::size_t resolved = 0;
    for (int i = 0; i < 150; ++i) {
        FuzzCase fc = gen.next();
        std::vector<Memory> grid = enumerate_memories(fc.domain, fc.memory);
        const auto ref = std::find(grid.begin(), grid.end(), fc.memory) - grid.begin();
        KnowledgeOracle small(unmonitored(), fc.program, L(), grid, ref, 20, false);
        KnowledgeOracle large(unmonitored(), fc.program, L(), grid, ref, 5000, true);
        const std::size_t k = std::min<std::size_t>(small.reference_trace().size(), 3);
        for (Level l : lmh().levels()) {
            KnowledgeSet s = small.progress(k, l), b = large.progress(k, l);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                const Membership ms = s.status_of(j), mb = b.status_of(j);
                if (ms != Membership::Unknown) CHECK(ms == mb);
                if (ms == Membership::Unknown && mb != Membership::Unknown) ++resolved;
            }
        }
    }
    CHECK(resolved > 0);
}

TEST_CASE("domains are validated against the memory") {
    const Memory m = lmh_memory(0, 0, 1);
    Domain missing_ref;
    missing_ref.candidates["h"] = {BaseValue(0), BaseValue(2)};
    CHECK_THROWS_AS(validate_domain(missing_ref, m), ConfigError);
    Domain wrong_type;
    wrong_type.candidates["h"] = {BaseValue(1), BaseValue("x")};
    CHECK_THROWS_AS(validate_domain(wrong_type, m), ConfigError);
    Domain unknown_var;
    unknown_var.candidates["q"] = {BaseValue(0)};
    CHECK_THROWS_AS(validate_domain(unknown_var, m), ConfigError);
    CHECK(enumerate_memories(testing::binary({"m", "h"}), lmh_memory(0, 0, 0)).size() == 4);
}

}
