#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifc/ast.hpp"
#include "ifc/lattice.hpp"
#include "ifc/value.hpp"

namespace ifc {

enum class Mode { Monitored, Unmonitored };

const char* to_string(Mode m);

struct MonitorOptions {
    Mode mode = Mode::Monitored;
    /// Mutation switch for harness self-tests: when false, the monitored assignment
    /// rule no longer checks pc ⊔ ℓ_e ⊑ Γ(x).
    bool check_assign_flow = true;
};

struct Config {
    CmdPtr cmd;
    Memory mem;
    Level pc;

    bool is_final() const { return std::holds_alternative<Stop>(cmd->node); }
    bool operator==(const Config& o) const { return pc == o.pc && mem == o.mem && same(cmd, o.cmd); }
};

enum class BlockKind { Monitor, Fault };

struct BlockReason {
    BlockKind kind = BlockKind::Fault;
    std::string message;
};

/// Runtime error in expression evaluation or command structure (not a flow violation).
class EvalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StepResult {
    enum class Kind { Stepped, Final, Blocked };
    Kind kind = Kind::Final;
    Event event;
    std::optional<Config> next;
    BlockReason reason;
};

enum class Outcome { Terminated, Blocked, BudgetExhausted, Diverged };

const char* to_string(Outcome o);

struct RunResult {
    std::vector<Event> trace;  // one event per step, ε included
    std::vector<Level> pcs;    // pc after each step
    Outcome outcome = Outcome::Terminated;
    BlockReason reason;
    Config end;  // configuration after the last step
    /// Set when outcome is Diverged: the last `cycle_length` events repeat forever.
    std::size_t cycle_length = 0;

    std::size_t steps() const { return trace.size(); }
};

/// Big-step expression evaluation; throws EvalFault on type or attenuation errors.
LabeledValue eval_expr(const Expr& e, const Memory& m, const Lattice& lat);

class Interpreter {
public:
    Interpreter(const Lattice& lat, MonitorOptions opts = {}) : lat_(&lat), opts_(opts) {}

    const Lattice& lattice() const { return *lat_; }
    const MonitorOptions& options() const { return opts_; }
    Mode mode() const { return opts_.mode; }

    StepResult step(const Config& cfg) const;

    /// Steps at most `budget` times. With `detect_cycles`, a repeated configuration
    /// ends the run with Outcome::Diverged (the semantics is deterministic).
    RunResult run(const Config& start, std::size_t budget, bool detect_cycles = false) const;

    /// As run(); event i carries timestamp i + 1 (the clock starts at 0).
    std::vector<TimedEvent> clocked_run(const Config& start, std::size_t budget, RunResult* out = nullptr) const;

private:
    bool monitored() const { return opts_.mode == Mode::Monitored; }
    StepResult step_cmd(const CmdPtr& c, const Memory& m, Level pc) const;

    const Lattice* lat_;
    MonitorOptions opts_;
};

std::vector<TimedEvent> stamp(const std::vector<Event>& trace);

}  // namespace ifc
