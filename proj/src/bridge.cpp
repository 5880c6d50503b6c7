#include "ifc/bridge.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ifc/io.hpp"
#include "ifc/syntax.hpp"

namespace ifc {

const char* to_string(NoBridge r) {
    switch (r) {
        case NoBridge::Diverged: return "diverged";
        case NoBridge::BudgetExhausted: return "budget exhausted";
        case NoBridge::Blocked: return "blocked";
        case NoBridge::AlreadyFinal: return "already final";
    }
    return "?";
}

BridgeResult bridge_step(const Interpreter& interp, const Config& cfg, Level l, std::size_t budget,
                         bool detect_cycles) {
    BridgeResult out;
    if (cfg.is_final()) {
        out.failure = NoBridge::AlreadyFinal;
        return out;
    }
    const Lattice& lat = interp.lattice();
    Config cur = cfg;
    Config saved = cfg;
    std::size_t saved_at = 0, power = 1;
    for (std::size_t s = 0; s < budget; ++s) {
        StepResult st = interp.step(cur);
        if (st.kind == StepResult::Kind::Blocked) {
            out.failure = NoBridge::Blocked;
            return out;
        }
        if (observable(st.event, l, cur.mem.env(), lat) || st.next->is_final()) {
            out.bridged = true;
            out.silent_steps = s;
            out.event = std::move(st.event);
            out.next = std::move(st.next);
            return out;
        }
        cur = std::move(*st.next);
        if (!detect_cycles) continue;
        const std::size_t done = s + 1;
        if (cur == saved) {
            out.failure = NoBridge::Diverged;
            return out;
        }
        if (done - saved_at == power) {
            saved = cur;
            saved_at = done;
            power *= 2;
        }
    }
    out.failure = NoBridge::BudgetExhausted;
    return out;
}

SyncResult sync_bridge(const Interpreter& interp, const CmdPtr& c, const Memory& m, const Memory& s, Level pc,
                       Level l, const std::vector<Event>& events, std::size_t budget) {
    const Lattice& lat = interp.lattice();
    SyncResult r;
    r.left = Config{c, m, pc};
    r.right = Config{c, s, pc};
    for (std::size_t k = 0; k < events.size(); ++k) {
        BridgeResult a = bridge_step(interp, r.left, l, budget);
        BridgeResult b = bridge_step(interp, r.right, l, budget);
        auto fail = [&](SyncResult::Kind kind, std::string why) {
            r.kind = kind;
            r.position = k;
            r.reason = std::move(why);
            return r;
        };
        if (a.undecided() || b.undecided()) return fail(SyncResult::Kind::Unknown, "bridge budget exhausted");
        if (!a.bridged) return fail(SyncResult::Kind::Fail, std::string("left side ") + to_string(a.failure));
        if (!b.bridged) return fail(SyncResult::Kind::Fail, std::string("right side ") + to_string(b.failure));
        if (!(a.event == events[k])) return fail(SyncResult::Kind::Fail, "left side emits " + render(a.event, lat));
        if (!(b.event == events[k])) return fail(SyncResult::Kind::Fail, "right side emits " + render(b.event, lat));
        if (!same(a.next->cmd, b.next->cmd) || a.next->pc != b.next->pc)
            return fail(SyncResult::Kind::Fail, "sides disagree on the resulting command or pc");
        r.left = std::move(*a.next);
        r.right = std::move(*b.next);
    }
    r.kind = SyncResult::Kind::Synced;
    return r;
}

IndistRelation indist_restrict(const MemoryRelation& base, const Interpreter& interp, const CmdPtr& c, Level pc,
                               Level l, const std::vector<Event>& events, const std::vector<Memory>& memories,
                               std::size_t budget) {
    IndistRelation rel;
    rel.level = l;
    rel.events = events;
    for (std::size_t i = 0; i < memories.size(); ++i)
        for (std::size_t j = 0; j < memories.size(); ++j) {
            if (!base(memories[i], memories[j])) continue;
            if (events.empty()) {
                rel.pairs.emplace_back(i, j);
                continue;
            }
            auto r = sync_bridge(interp, c, memories[i], memories[j], pc, l, events, budget);
            if (r.kind == SyncResult::Kind::Synced) rel.pairs.emplace_back(i, j);
            else if (r.kind == SyncResult::Kind::Unknown) rel.unknown.emplace_back(i, j);
        }
    return rel;
}

namespace {

bool same_modulo_value(const Event& a, const Event& b) {
    const auto* da = std::get_if<Event::Declassify>(&a.e);
    const auto* db = std::get_if<Event::Declassify>(&b.e);
    if (da && db) return da->var == db->var && da->auth == db->auth && da->from == db->from && da->to == db->to;
    return a == b;
}

class Harness {
public:
    Harness(const Interpreter& interp, Level attacker, const HarnessOptions& opts, OperationalReport& report)
        : interp_(interp), lat_(interp.lattice()), a_(attacker), opts_(opts), rep_(report) {}

    /// Checks every applicable case for the configuration ⟨cmd, partners[self], pc⟩.
    void check_point(const CmdPtr& cmd, Level pc, const std::vector<Memory>& partners,
                     const std::vector<BridgeResult>& bridges, std::size_t self, std::size_t point) {
        const BridgeResult& bm = bridges[self];
        if (!bm.bridged) return;
        ++rep_.configurations;
        const Memory& m = partners[self];
        const Config& after = *bm.next;
        const Event& alpha = bm.event;
        const TypeEnv& env = m.env();
        const auto* decl = std::get_if<Event::Declassify>(&alpha.e);
        const auto* tini = std::get_if<Event::TiniExit>(&alpha.e);
        const bool pc_low = lat_.flows_to(after.pc, a_);
        const bool alpha_obs = observable(alpha, a_, env, lat_);
        const bool obs_decl = decl && alpha_obs;

        auto ctx = [&](int which, const Memory& s, std::string detail, bool unknown) {
            HarnessWitness w{which, point, print(*cmd, lat_), pc, m, s, std::move(detail), unknown};
            record(std::move(w));
        };

        if (obs_decl || (tini && lat_.flows_to(tini->to, a_))) {
            const int which = obs_decl ? 1 : 2;
            const Level lp = lat_.join(obs_decl ? decl->auth : tini->auth, a_);
            std::vector<Event> betas;
            if (!decompose(Config{cmd, m, pc}, lp, bm.silent_steps + 1, betas)) {
                ++stats(which).unknown;
                ctx(which, m, "decomposition at the raised level did not reach the event", true);
            } else {
                for (std::size_t j = 0; j < partners.size(); ++j) {
                    const Memory& s = partners[j];
                    if (!mem_equiv(m, s, lp, lat_)) continue;
                    ++rep_.pairs;
                    auto sync = sync_bridge(interp_, cmd, m, s, pc, lp, betas, opts_.budget);
                    if (sync.kind == SyncResult::Kind::Unknown) {
                        ++stats(which).unknown;
                        ctx(which, s, "restriction membership undecided: " + sync.reason, true);
                        continue;
                    }
                    if (sync.kind == SyncResult::Kind::Fail) continue;
                    const BridgeResult& bs = bridges[j];
                    std::string why;
                    if (!bs.bridged) why = std::string("s does not bridge (") + to_string(bs.failure) + ")";
                    else if (which == 1 && !(bs.event == alpha)) why = "s emits " + render(bs.event, lat_);
                    else if (!same(bs.next->cmd, after.cmd)) why = "resulting commands differ";
                    else if (bs.next->pc != after.pc) why = "resulting pc differs";
                    else if (!mem_equiv(after.mem, bs.next->mem, a_, lat_)) why = "resulting memories differ at attacker level";
                    tally(which, bs, s, why, ctx);
                }
            }
        }

        if (!tini && pc_low) {
            for (std::size_t j = 0; j < partners.size(); ++j) {
                const Memory& s = partners[j];
                if (!mem_equiv(m, s, a_, lat_)) continue;
                ++rep_.pairs;
                const BridgeResult& bs = bridges[j];
                std::string why;
                if (!bs.bridged) why = std::string("s does not bridge (") + to_string(bs.failure) + ")";
                else if (alpha_obs ? !same_modulo_value(bs.event, alpha) : observable(bs.event, a_, env, lat_))
                    why = "s emits " + render(bs.event, lat_);
                else if (!same(bs.next->cmd, after.cmd)) why = "resulting commands differ";
                else if (bs.next->pc != after.pc) why = "resulting pc differs";
                else if (!obs_decl && !mem_equiv(after.mem, bs.next->mem, a_, lat_))
                    why = "resulting memories differ at attacker level";
                tally(3, bs, s, why, ctx);
            }
        }

        if (tini || !pc_low) {
            for (std::size_t j = 0; j < partners.size(); ++j) {
                const Memory& s = partners[j];
                if (!mem_equiv(m, s, a_, lat_)) continue;
                ++rep_.pairs;
                const BridgeResult& bs = bridges[j];
                if (!bs.bridged) {
                    if (bs.undecided()) {
                        ++stats(4).unknown;
                        ctx(4, s, "s bridge undecided", true);
                    } else {
                        ++stats(4).pass;
                    }
                    continue;
                }
                const Config& n = *bs.next;
                std::string why;
                if (!mem_equiv(after.mem, n.mem, a_, lat_)) why = "resulting memories differ at attacker level";
                else if (!same(after.cmd, n.cmd)) why = "resulting commands differ";
                else if (!pc_low && lat_.flows_to(n.pc, a_)) why = "s ends with a low pc";
                else if (!pc_low && !after.is_final()) why = "high-pc bridge does not end at Stop";
                else if (pc_low && !lat_.flows_to(n.pc, a_)) why = "s ends with a high pc";
                else if (pc_low && !(alpha == bs.event)) why = "events differ: " + render(alpha, lat_) + " vs " + render(bs.event, lat_);
                tally(4, bs, s, why, ctx);
            }
        }
    }

private:
    CaseStats& stats(int which) { return rep_.cases[which - 1]; }

    template <typename Ctx>
    void tally(int which, const BridgeResult& bs, const Memory& s, const std::string& why, Ctx& ctx) {
        if (why.empty()) {
            ++stats(which).pass;
        } else if (bs.undecided()) {
            ++stats(which).unknown;
            ctx(which, s, why, true);
        } else {
            ++stats(which).fail;
            ctx(which, s, why, false);
        }
    }

    void record(HarnessWitness w) {
        std::size_t unknown = 0;
        for (const auto& x : rep_.witnesses) unknown += x.unknown ? 1 : 0;
        if (rep_.witnesses.size() >= opts_.max_witnesses) return;
        if (w.unknown && unknown >= opts_.max_witnesses / 4) return;
        rep_.witnesses.push_back(std::move(w));
    }

    /// Events of the raised-level bridges preceding the bridge that ends after `total` steps.
    bool decompose(Config cur, Level lp, std::size_t total, std::vector<Event>& betas) {
        std::size_t acc = 0;
        while (acc < total) {
            BridgeResult b = bridge_step(interp_, cur, lp, opts_.budget);
            if (!b.bridged) return false;
            acc += b.silent_steps + 1;
            if (acc == total) return true;
            betas.push_back(b.event);
            cur = std::move(*b.next);
        }
        return false;
    }

    const Interpreter& interp_;
    const Lattice& lat_;
    Level a_;
    const HarnessOptions& opts_;
    OperationalReport& rep_;
};

}  // namespace

OperationalReport check_operational_security(const Interpreter& interp, const CmdPtr& c, Level pc0, Level attacker,
                                             const Memory& m0, const Domain& dom, const HarnessOptions& opts) {
    if (interp.mode() != Mode::Monitored) throw ConfigError("the operational harness checks monitored runs only");
    const auto grid = enumerate_memories(dom, m0);
    OperationalReport rep;
    rep.attacker = attacker;
    rep.memories = grid.size();

    std::vector<std::size_t> refs(grid.size());
    for (std::size_t i = 0; i < refs.size(); ++i) refs[i] = i;
    if (grid.size() * grid.size() > opts.max_pairs) {
        const std::size_t keep = std::max<std::size_t>(1, opts.max_pairs / grid.size());
        std::mt19937_64 rng(opts.sample_seed);
        for (std::size_t i = refs.size() - 1; i > 0; --i) std::swap(refs[i], refs[rng() % (i + 1)]);
        refs.resize(keep);
        std::sort(refs.begin(), refs.end());
        rep.sampled = true;
        rep.warning = "domain has " + std::to_string(grid.size() * grid.size()) + " memory pairs; checking " +
                      std::to_string(keep) + " sampled reference memories (seed " + std::to_string(opts.sample_seed) +
                      ")";
    }

    Harness h(interp, attacker, opts, rep);
    for (std::size_t r : refs) {
        CmdPtr cmd = c;
        Level pc = pc0;
        std::vector<Memory> partners = grid;
        std::size_t self = r;
        for (std::size_t point = 0; point < std::max<std::size_t>(1, opts.max_points); ++point) {
            std::vector<BridgeResult> bridges;
            bridges.reserve(partners.size());
            for (const auto& s : partners) bridges.push_back(bridge_step(interp, Config{cmd, s, pc}, attacker, opts.budget));
            h.check_point(cmd, pc, partners, bridges, self, point);

            const BridgeResult& bm = bridges[self];
            if (!bm.bridged || bm.next->is_final()) break;
            std::vector<Memory> next;
            std::size_t next_self = 0;
            for (std::size_t j = 0; j < partners.size(); ++j) {
                const BridgeResult& b = bridges[j];
                if (!b.bridged || !(b.event == bm.event) || !same(b.next->cmd, bm.next->cmd) || b.next->pc != bm.next->pc)
                    continue;
                auto it = std::find(next.begin(), next.end(), b.next->mem);
                if (j == self) next_self = static_cast<std::size_t>(it - next.begin());
                if (it == next.end()) next.push_back(b.next->mem);
            }
            cmd = bm.next->cmd;
            pc = bm.next->pc;
            partners = std::move(next);
            self = next_self;
        }
    }
    return rep;
}

std::string report_text(const OperationalReport& r, const Lattice& lat) {
    std::ostringstream out;
    if (!r.warning.empty()) out << "warning: " << r.warning << "\n";
    out << "attacker " << lat.name(r.attacker) << ": " << r.memories << " memories, " << r.configurations
        << " bridged configurations, " << r.pairs << " pair checks\n";
    for (int k = 0; k < 4; ++k)
        out << "case " << k + 1 << ": pass " << r.cases[k].pass << ", fail " << r.cases[k].fail << ", unknown "
            << r.cases[k].unknown << "\n";
    for (const auto& w : r.witnesses) {
        out << (w.unknown ? "unknown" : "VIOLATION") << " case " << w.case_no << " at bridge " << w.point << ": "
            << w.detail << "\n  command: " << w.command << "\n  pc: " << lat.name(w.pc) << "\n  m: " << describe(w.m, lat)
            << "\n  s: " << describe(w.s, lat) << "\n";
    }
    out << (r.violations() ? "violations found" : "no violations") << "\n";
    return out.str();
}

std::string report_json(const OperationalReport& r, const Lattice& lat) {
    using nlohmann::json;
    json cases = json::array();
    for (int k = 0; k < 4; ++k)
        cases.push_back({{"case", k + 1}, {"pass", r.cases[k].pass}, {"fail", r.cases[k].fail}, {"unknown", r.cases[k].unknown}});
    json wit = json::array();
    for (const auto& w : r.witnesses)
        wit.push_back({{"case", w.case_no},
                       {"status", w.unknown ? "unknown" : "fail"},
                       {"point", w.point},
                       {"command", w.command},
                       {"pc", lat.name(w.pc)},
                       {"m", json::parse(memory_to_json(w.m, lat))},
                       {"s", json::parse(memory_to_json(w.s, lat))},
                       {"detail", w.detail}});
    json out = {{"attacker", lat.name(r.attacker)},
                {"memories", r.memories},
                {"configurations", r.configurations},
                {"pairs", r.pairs},
                {"violations", r.violations()},
                {"cases", cases},
                {"witnesses", wit},
                {"sampled", r.sampled}};
    if (!r.warning.empty()) out["warning"] = r.warning;
    return out.dump();
}

}  // namespace ifc
