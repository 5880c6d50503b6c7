#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifc/ast.hpp"
#include "ifc/monitor.hpp"
#include "ifc/value.hpp"

namespace ifc {

/// Raised for malformed domains, memories and other run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Finite candidate values per variable. Variables absent here are pinned to the
/// reference memory's value.
struct Domain {
    std::map<std::string, std::vector<BaseValue>> candidates;
};

/// Checks types, declared variables, and that the reference value is a candidate.
void validate_domain(const Domain& dom, const Memory& reference);

/// All memories of the domain grid around `reference`, in a fixed order (first
/// environment variable varies slowest). Duplicate candidate values are dropped.
std::vector<Memory> enumerate_memories(const Domain& dom, const Memory& reference);

bool mem_equiv(const Memory& m, const Memory& s, Level l, const Lattice& lat);

Level level_of_event(const Event& ev, const TypeEnv& env, const Lattice& lat);
bool observable(const Event& ev, Level l, const TypeEnv& env, const Lattice& lat);

std::vector<Event> filter_trace(const std::vector<Event>& t, Level l, const TypeEnv& env, const Lattice& lat);
std::vector<TimedEvent> filter_trace(const std::vector<TimedEvent>& t, Level l, const TypeEnv& env,
                                     const Lattice& lat);

enum class Membership { In, Out, Unknown };
enum class KnowledgeKind { Attacker, Progress, Clock };

const char* to_string(Membership m);
const char* to_string(KnowledgeKind k);

/// Filtered-trace pattern a candidate run must attain.
struct Target {
    KnowledgeKind kind = KnowledgeKind::Attacker;
    Level level;
    std::vector<TimedEvent> prefix;  // already filtered at `level`
    bool timed = false;              // compare timestamps as well as events
    std::uint64_t ts = 0;            // Clock only: timestamp of the extra event
};

/// Everything the oracle needs to know about one candidate's run.
struct CandidateRun {
    std::vector<Event> trace;  // materialised up to the budget when the run provably cycles
    Outcome outcome = Outcome::Terminated;
    std::size_t cycle_length = 0;

    /// True when no further event observable at `l` can ever be emitted.
    bool complete_at(Level l, const TypeEnv& env, const Lattice& lat) const;
    /// Number of steps whose events are known (unbounded for finished runs).
    std::uint64_t known_steps() const;
};

CandidateRun simulate(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0, std::size_t budget,
                      bool detect_cycles = true);

/// Decides membership from a recorded run.
Membership classify(const CandidateRun& run, const Target& target, const TypeEnv& env, const Lattice& lat);

Membership classify_membership(const Interpreter& interp, const CmdPtr& c, Level pc0, const Memory& s,
                               const Target& target, std::size_t budget, bool detect_cycles = true);

struct KnowledgeSet {
    const void* domain_id = nullptr;  // identifies the candidate list the indices refer to
    Level level;
    KnowledgeKind kind = KnowledgeKind::Attacker;
    std::uint64_t ts = 0;
    std::vector<std::size_t> universe;  // candidates ℓ-equivalent to the reference
    std::vector<Membership> status;     // parallel to universe

    std::vector<std::size_t> in_set() const { return select(Membership::In); }
    std::vector<std::size_t> out_set() const { return select(Membership::Out); }
    std::vector<std::size_t> unknown_set() const { return select(Membership::Unknown); }
    /// Status of candidate `i`; candidates outside the universe are Out.
    Membership status_of(std::size_t i) const;

private:
    std::vector<std::size_t> select(Membership m) const;
};

/**
 * Brute-force knowledge over a finite candidate grid. Each candidate is simulated
 * once; knowledge sets for prefixes of the reference run are answered from the
 * recorded traces.
 */
class KnowledgeOracle {
public:
    KnowledgeOracle(const Interpreter& interp, CmdPtr c, Level pc0, std::vector<Memory> candidates,
                    std::size_t reference, std::size_t budget, bool detect_cycles = true);

    const std::vector<Memory>& candidates() const { return cands_; }
    const Memory& candidate(std::size_t i) const { return cands_[i]; }
    std::size_t reference() const { return ref_; }
    const CandidateRun& run_of(std::size_t i) const { return runs_[i]; }
    const std::vector<Event>& reference_trace() const { return runs_[ref_].trace; }
    const Lattice& lattice() const { return interp_.lattice(); }
    const TypeEnv& env() const { return cands_[ref_].env(); }

    /// Knowledge after the reference's first `prefix_len` events (t), at level `l`.
    KnowledgeSet attacker(std::size_t prefix_len, Level l, bool timed = false);
    KnowledgeSet progress(std::size_t prefix_len, Level l, bool timed = false);
    KnowledgeSet clock(std::size_t prefix_len, Level l, std::uint64_t ts);

    /// Timestamp of candidate i's next `l`-observable event after the first k, if recorded.
    std::optional<std::uint64_t> next_observable_ts(std::size_t i, Level l, std::size_t k);

private:
    struct View {
        std::vector<std::size_t> universe;
        std::vector<std::size_t> ref_counts;                 // observable events among the first j reference events
        std::vector<std::vector<TimedEvent>> filtered;       // per candidate
        std::vector<std::size_t> lcp_untimed, lcp_timed;     // per candidate, against the reference view
        std::vector<char> complete;
    };
    View& view(Level l);
    KnowledgeSet build(KnowledgeKind kind, std::size_t prefix_len, Level l, bool timed, std::uint64_t ts);

    const Interpreter& interp_;
    CmdPtr c_;
    Level pc0_;
    std::vector<Memory> cands_;
    std::size_t ref_;
    std::vector<CandidateRun> runs_;
    std::map<std::uint16_t, View> views_;
};

/// Single-shot helpers: `t` must be a prefix of the reference run's trace.
KnowledgeSet attacker_knowledge(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0,
                                const std::vector<Event>& t, Level l, const Domain& dom, std::size_t budget,
                                std::vector<Memory>* grid = nullptr);
KnowledgeSet progress_knowledge(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0,
                                const std::vector<Event>& t, Level l, const Domain& dom, std::size_t budget,
                                std::vector<Memory>* grid = nullptr);
KnowledgeSet clock_knowledge(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0,
                             const std::vector<Event>& t, Level l, std::uint64_t ts, const Domain& dom,
                             std::size_t budget, std::vector<Memory>* grid = nullptr);

}  // namespace ifc
