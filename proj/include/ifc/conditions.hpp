#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ifc/knowledge.hpp"
#include "ifc/monitor.hpp"

namespace ifc {

enum class Condition { PSNI, PINI, BPNI, BTNI };

const char* to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

enum class CellStatus { Holds, Violated, Inconclusive };
enum class Overall { Secure, Insecure, Inconclusive };

const char* to_string(CellStatus s);
const char* to_string(Overall o);

struct Containment {
    CellStatus status = CellStatus::Holds;
    /// Violated: a candidate In the bound and Out of the containing set.
    /// Inconclusive: the first candidate whose Unknown status blocks a decision.
    std::optional<std::size_t> witness;
};

/// Decides A ⊇ B over candidates from one oracle.
Containment check_containment(const KnowledgeSet& a, const KnowledgeSet& b);

struct Cell {
    std::size_t event_index = 0;  // 1-based position of α in the run
    Event event;
    std::uint64_t ts = 0;  // α's timestamp in the reference run
    Level attacker;
    std::string clause;  // "1a", "1a-ts", "1b", "2a", "2b", "3"
    CellStatus status = CellStatus::Holds;
    std::optional<std::size_t> witness;  // candidate index
    /// Timed conditions: when the witness emits its counterpart of α, if it does.
    std::optional<std::uint64_t> witness_ts;
};

struct Verdict {
    Condition condition = Condition::BPNI;
    Mode mode = Mode::Monitored;
    Overall overall = Overall::Secure;
    Outcome run_outcome = Outcome::Terminated;
    std::string block_reason;
    std::vector<Event> trace;
    std::vector<Memory> candidates;
    std::size_t reference = 0;
    std::vector<Cell> cells;

    std::size_t count(CellStatus s) const;
};

struct CheckOptions {
    std::size_t budget = 10000;
    /// Restrict the attacker levels examined; empty means every level.
    std::vector<Level> attackers;
    bool detect_cycles = true;
};

Verdict check_run(const Interpreter& interp, const CmdPtr& c, const Memory& m0, Level pc0, Condition cond,
                  const Domain& dom, const CheckOptions& opts = {});

/// BPNI on the monitored run; must never come out Insecure.
Verdict check_monitor_soundness(const CmdPtr& c, const Memory& m0, Level pc0, const Domain& dom, const Lattice& lat,
                       const CheckOptions& opts = {});

/// Human-readable table. With `all_cells` false, holding cells are summarised by count.
std::string verdict_table(const Verdict& v, const Lattice& lat, bool all_cells = false);
std::string verdict_json(const Verdict& v, const Lattice& lat);
int exit_code(Overall o);

}  // namespace ifc
