#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ifc/knowledge.hpp"
#include "ifc/monitor.hpp"

namespace ifc {

enum class NoBridge {
    Diverged,         // a configuration repeated: no observable event or Stop ever follows
    BudgetExhausted,  // undecided within the step budget
    Blocked,          // stuck before emitting an observable event
    AlreadyFinal      // started at Stop
};

const char* to_string(NoBridge r);

struct BridgeResult {
    bool bridged = false;
    std::size_t silent_steps = 0;  // unobservable steps before the final one
    Event event;
    std::optional<Config> next;
    NoBridge failure = NoBridge::BudgetExhausted;

    /// True when the failure is not a proof that no bridge exists.
    bool undecided() const { return !bridged && failure == NoBridge::BudgetExhausted; }
};

/// Steps until the first `l`-observable event, or until an unobservable step reaches Stop.
BridgeResult bridge_step(const Interpreter& interp, const Config& cfg, Level l, std::size_t budget,
                         bool detect_cycles = true);

struct SyncResult {
    enum class Kind { Synced, Fail, Unknown };
    Kind kind = Kind::Synced;
    std::size_t position = 0;  // index into the event list where synchronisation broke
    std::string reason;
    Config left, right;  // final configurations when Synced
};

/// Lock-step bridging of ⟨c,m,pc⟩ and ⟨c,s,pc⟩ through `events`; every bridge must emit the
/// listed event and both sides must agree on the resulting command and pc.
SyncResult sync_bridge(const Interpreter& interp, const CmdPtr& c, const Memory& m, const Memory& s, Level pc,
                       Level l, const std::vector<Event>& events, std::size_t budget);

using MemoryRelation = std::function<bool(const Memory&, const Memory&)>;

struct IndistRelation {
    Level level;
    std::vector<Event> events;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;    // resolved pairs (indices into the memory list)
    std::vector<std::pair<std::size_t, std::size_t>> unknown;  // base pairs whose synchronisation hit the budget
};

IndistRelation indist_restrict(const MemoryRelation& base, const Interpreter& interp, const CmdPtr& c, Level pc,
                               Level l, const std::vector<Event>& events, const std::vector<Memory>& memories,
                               std::size_t budget);

struct HarnessWitness {
    int case_no = 0;
    std::size_t point = 0;  // number of attacker-level bridges taken before the checked configuration
    std::string command;    // printed command of the checked configuration
    Level pc;
    Memory m, s;
    std::string detail;
    bool unknown = false;
};

struct CaseStats {
    std::size_t pass = 0, fail = 0, unknown = 0;
};

struct OperationalReport {
    Level attacker;
    std::size_t memories = 0;
    std::size_t configurations = 0;  // configurations whose bridge was examined
    std::size_t pairs = 0;
    CaseStats cases[4];
    std::vector<HarnessWitness> witnesses;  // failures first, then a few unknowns
    bool sampled = false;
    std::string warning;

    std::size_t violations() const { return cases[0].fail + cases[1].fail + cases[2].fail + cases[3].fail; }
    std::size_t unknowns() const {
        return cases[0].unknown + cases[1].unknown + cases[2].unknown + cases[3].unknown;
    }
};

struct HarnessOptions {
    std::size_t budget = 10000;
    /// Also re-check from later bridge points of each run, against lock-step partners.
    std::size_t max_points = 16;
    /// Above this many memory pairs the reference memories are sampled.
    std::size_t max_pairs = 10000;
    std::uint64_t sample_seed = 1;
    std::size_t max_witnesses = 20;
};

/// Empirical check of the operational security invariant over every domain memory.
OperationalReport check_operational_security(const Interpreter& interp, const CmdPtr& c, Level pc0, Level attacker,
                                             const Memory& m0, const Domain& dom, const HarnessOptions& opts = {});

std::string report_text(const OperationalReport& r, const Lattice& lat);
std::string report_json(const OperationalReport& r, const Lattice& lat);

}  // namespace ifc
