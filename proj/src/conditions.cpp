#include "ifc/conditions.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "ifc/io.hpp"

namespace ifc {

const char* to_string(Condition c) {
    switch (c) {
        case Condition::PSNI: return "PSNI";
        case Condition::PINI: return "PINI";
        case Condition::BPNI: return "BPNI";
        case Condition::BTNI: return "BTNI";
    }
    return "?";
}

std::optional<Condition> parse_condition(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "psni") return Condition::PSNI;
    if (lower == "pini") return Condition::PINI;
    if (lower == "bpni") return Condition::BPNI;
    if (lower == "btni") return Condition::BTNI;
    return std::nullopt;
}

const char* to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Holds: return "holds";
        case CellStatus::Violated: return "violated";
        case CellStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(Overall o) {
    switch (o) {
        case Overall::Secure: return "Secure";
        case Overall::Insecure: return "Insecure";
        case Overall::Inconclusive: return "Inconclusive";
    }
    return "?";
}

int exit_code(Overall o) {
    switch (o) {
        case Overall::Secure: return 0;
        case Overall::Insecure: return 1;
        case Overall::Inconclusive: return 2;
    }
    return 3;
}

Containment check_containment(const KnowledgeSet& a, const KnowledgeSet& b) {
    if (a.domain_id != b.domain_id) throw ConfigError("knowledge sets range over different candidate domains");
    Containment out;
    for (std::size_t j = 0; j < b.universe.size(); ++j) {
        const Membership sb = b.status[j];
        if (sb == Membership::Out) continue;
        const Membership sa = a.status_of(b.universe[j]);
        if (sa == Membership::In) continue;
        if (sb == Membership::In && sa == Membership::Out) return {CellStatus::Violated, b.universe[j]};
        if (out.status == CellStatus::Holds) out = {CellStatus::Inconclusive, b.universe[j]};
    }
    return out;
}

std::size_t Verdict::count(CellStatus s) const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [&](const Cell& c) { return c.status == s; }));
}

Verdict check_run(const Interpreter& interp, const CmdPtr& c, const Memory& m0, Level pc0, Condition cond,
                  const Domain& dom, const CheckOptions& opts) {
    const Lattice& lat = interp.lattice();
    auto grid = enumerate_memories(dom, m0);
    const auto ref = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), m0) - grid.begin());

    Verdict v;
    v.condition = cond;
    v.mode = interp.mode();
    RunResult rr = interp.run(Config{c, m0, pc0}, opts.budget, opts.detect_cycles);
    v.run_outcome = rr.outcome;
    if (rr.outcome == Outcome::Blocked) v.block_reason = rr.reason.message;

    KnowledgeOracle o(interp, c, pc0, grid, ref, opts.budget, opts.detect_cycles);
    v.candidates = std::move(grid);
    v.reference = ref;
    v.trace = o.reference_trace();

    std::vector<Level> levels = opts.attackers.empty() ? lat.levels() : opts.attackers;
    std::sort(levels.begin(), levels.end(), [&](Level a, Level b) { return lat.name(a) < lat.name(b); });
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    const bool timed = cond == Condition::BTNI;
    const TypeEnv& env = m0.env();
    std::map<std::uint16_t, std::size_t> seen;  // observable events before α, per attacker level

    for (std::size_t i = 1; i <= v.trace.size(); ++i) {
        const Event& alpha = v.trace[i - 1];
        const std::uint64_t ts = i;
        const Level ev_level = level_of_event(alpha, env, lat);
        for (Level la : levels) {
            if (!lat.flows_to(ev_level, la)) continue;
            auto add = [&](const char* clause, const KnowledgeSet& a, const KnowledgeSet& b) {
                Containment r = check_containment(a, b);
                Cell cell{i, alpha, ts, la, clause, r.status, r.witness, std::nullopt};
                if (r.witness) cell.witness_ts = o.next_observable_ts(*r.witness, la, seen[la.id]);
                v.cells.push_back(std::move(cell));
            };
            auto K = [&](std::size_t p, Level l) { return o.attacker(p, l, timed); };
            auto P = [&](std::size_t p, Level l) { return o.progress(p, l, timed); };

            const auto* decl = std::get_if<Event::Declassify>(&alpha.e);
            const auto* tini = std::get_if<Event::TiniExit>(&alpha.e);
            switch (cond) {
                case Condition::PSNI: add("psni", K(i, la), K(i - 1, la)); break;
                case Condition::PINI: add("pini", K(i, la), P(i - 1, la)); break;
                case Condition::BPNI:
                    if (decl) {
                        add("1a", P(i - 1, la), K(i - 1, la));
                        add("1b", K(i, la), K(i - 1, lat.join(decl->auth, la)));
                    } else if (tini) {
                        add("2a", K(i, la), P(i - 1, la));
                        add("2b", P(i - 1, la), K(i - 1, lat.join(tini->auth, la)));
                    } else {
                        add("3", K(i, la), K(i - 1, la));
                    }
                    break;
                case Condition::BTNI:
                    if (decl) {
                        add("1a-ts", o.clock(i - 1, la, ts), P(i - 1, la));
                        add("1a", P(i - 1, la), K(i - 1, la));
                        add("1b", K(i, la), K(i - 1, lat.join(decl->auth, la)));
                    } else if (tini) {
                        add("2a", K(i, la), o.clock(i - 1, la, ts));
                        add("2b", o.clock(i - 1, la, ts), K(i - 1, lat.join(tini->auth, la)));
                    } else {
                        add("3", K(i, la), K(i - 1, la));
                    }
                    break;
            }
        }
        for (Level la : levels)
            if (lat.flows_to(ev_level, la)) ++seen[la.id];
    }

    if (v.count(CellStatus::Violated) > 0) v.overall = Overall::Insecure;
    else if (v.count(CellStatus::Inconclusive) > 0) v.overall = Overall::Inconclusive;
    else v.overall = Overall::Secure;
    return v;
}

Verdict check_monitor_soundness(const CmdPtr& c, const Memory& m0, Level pc0, const Domain& dom, const Lattice& lat,
                       const CheckOptions& opts) {
    Interpreter interp(lat, MonitorOptions{Mode::Monitored});
    return check_run(interp, c, m0, pc0, Condition::BPNI, dom, opts);
}

namespace {

std::string outcome_line(const Verdict& v) {
    std::string s = to_string(v.run_outcome);
    s += " after " + std::to_string(v.trace.size()) + " steps";
    if (!v.block_reason.empty()) s += " (" + v.block_reason + ")";
    return s;
}

}  // namespace

std::string verdict_table(const Verdict& v, const Lattice& lat, bool all_cells) {
    std::ostringstream out;
    out << "condition " << to_string(v.condition) << ", " << to_string(v.mode) << " run " << outcome_line(v) << "\n";
    out << "reference: " << describe(v.candidates[v.reference], lat) << "\n";
    out << std::left << std::setw(6) << "step" << std::setw(6) << "ts" << std::setw(28) << "event" << std::setw(10)
        << "attacker" << std::setw(7) << "clause" << std::setw(14) << "status"
        << "witness\n";
    std::size_t hidden = 0;
    for (const Cell& c : v.cells) {
        if (!all_cells && c.status == CellStatus::Holds) {
            ++hidden;
            continue;
        }
        out << std::setw(6) << c.event_index << std::setw(6) << c.ts << std::setw(28) << render(c.event, lat)
            << std::setw(10) << lat.name(c.attacker) << std::setw(7) << c.clause << std::setw(14)
            << to_string(c.status);
        if (c.witness) {
            out << describe(v.candidates[*c.witness], lat);
            if (c.witness_ts) out << " (event at ts=" << *c.witness_ts << ")";
        }
        out << "\n";
    }
    if (hidden) out << "(" << hidden << " holding cells not shown)\n";
    out << "overall: " << to_string(v.overall) << "\n";
    return out.str();
}

std::string verdict_json(const Verdict& v, const Lattice& lat) {
    using nlohmann::json;
    json cells = json::array();
    for (const Cell& c : v.cells) {
        json j = {{"event_index", c.event_index},
                  {"ts", c.ts},
                  {"event", render(c.event, lat)},
                  {"attacker", lat.name(c.attacker)},
                  {"clause", c.clause},
                  {"status", to_string(c.status)}};
        j["witness"] = c.witness ? json::parse(memory_to_json(v.candidates[*c.witness], lat)) : json(nullptr);
        j["witness_ts"] = c.witness_ts ? json(*c.witness_ts) : json(nullptr);
        cells.push_back(std::move(j));
    }
    json out = {{"overall", to_string(v.overall)},
                {"condition", to_string(v.condition)},
                {"mode", to_string(v.mode)},
                {"run", {{"outcome", to_string(v.run_outcome)}, {"steps", v.trace.size()}}},
                {"cells", std::move(cells)}};
    if (!v.block_reason.empty()) out["run"]["reason"] = v.block_reason;
    return out.dump();
}

}  // namespace ifc
