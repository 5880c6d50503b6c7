#include "ifc/knowledge.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace ifc {

const char* to_string(Membership m) {
    switch (m) {
        case Membership::In: return "in";
        case Membership::Out: return "out";
        case Membership::Unknown: return "unknown";
    }
    return "?";
}

const char* to_string(KnowledgeKind k) {
    switch (k) {
        case KnowledgeKind::Attacker: return "attacker";
        case KnowledgeKind::Progress: return "progress";
        case KnowledgeKind::Clock: return "clock";
    }
    return "?";
}

void validate_domain(const Domain& dom, const Memory& reference) {
    for (const auto& [x, values] : dom.candidates) {
        auto i = reference.env().index(x);
        if (!i) throw ConfigError("domain variable '" + x + "' is not declared in the memory");
        if (values.empty()) throw ConfigError("domain variable '" + x + "' has no candidates");
        const Type t = reference.env().at(*i).type;
        for (const auto& v : values)
            if (v.type() != t)
                throw ConfigError("domain candidate for '" + x + "' is a " + to_string(v.type()) + ", expected " +
                                  to_string(t));
        if (std::find(values.begin(), values.end(), reference.store()[*i]) == values.end())
            throw ConfigError("domain for '" + x + "' does not contain the initial value");
    }
}

std::vector<Memory> enumerate_memories(const Domain& dom, const Memory& reference) {
    validate_domain(dom, reference);
    const TypeEnv& env = reference.env();
    std::vector<std::vector<BaseValue>> axes(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
        auto it = dom.candidates.find(env.at(i).name);
        if (it == dom.candidates.end()) {
            axes[i] = {reference.store()[i]};
            continue;
        }
        for (const auto& v : it->second)
            if (std::find(axes[i].begin(), axes[i].end(), v) == axes[i].end()) axes[i].push_back(v);
    }
    std::vector<Memory> out;
    std::vector<std::size_t> idx(env.size(), 0);
    for (;;) {
        std::vector<BaseValue> store(env.size());
        for (std::size_t i = 0; i < env.size(); ++i) store[i] = axes[i][idx[i]];
        out.emplace_back(reference.env_ptr(), std::move(store));
        std::size_t k = env.size();
        while (k > 0) {
            --k;
            if (++idx[k] < axes[k].size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
        if (env.size() == 0) return out;
    }
}

bool mem_equiv(const Memory& m, const Memory& s, Level l, const Lattice& lat) {
    if (!(m.env() == s.env())) return false;
    for (std::size_t i = 0; i < m.env().size(); ++i)
        if (lat.flows_to(m.env().at(i).level, l) && !(m.store()[i] == s.store()[i])) return false;
    return true;
}

Level level_of_event(const Event& ev, const TypeEnv& env, const Lattice& lat) {
    auto var_level = [&](const std::string& x) {
        auto i = env.index(x);
        if (!i) throw ConfigError("event names undeclared variable '" + x + "'");
        return env.at(*i).level;
    };
    return std::visit(
        [&](const auto& x) -> Level {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Event::Empty>) return lat.top();
            else if constexpr (std::is_same_v<T, Event::Assign>) return var_level(x.var);
            else if constexpr (std::is_same_v<T, Event::Declassify>) return var_level(x.var);
            else return x.to;
        },
        ev.e);
}

bool observable(const Event& ev, Level l, const TypeEnv& env, const Lattice& lat) {
    return lat.flows_to(level_of_event(ev, env, lat), l);
}

std::vector<Event> filter_trace(const std::vector<Event>& t, Level l, const TypeEnv& env, const Lattice& lat) {
    std::vector<Event> out;
    for (const auto& ev : t)
        if (observable(ev, l, env, lat)) out.push_back(ev);
    return out;
}

std::vector<TimedEvent> filter_trace(const std::vector<TimedEvent>& t, Level l, const TypeEnv& env,
                                     const Lattice& lat) {
    std::vector<TimedEvent> out;
    for (const auto& te : t)
        if (observable(te.event, l, env, lat)) out.push_back(te);
    return out;
}

bool CandidateRun::complete_at(Level l, const TypeEnv& env, const Lattice& lat) const {
    switch (outcome) {
        case Outcome::Terminated:
        case Outcome::Blocked: return true;
        case Outcome::BudgetExhausted: return false;
        case Outcome::Diverged:
            for (std::size_t i = trace.size() - cycle_length; i < trace.size(); ++i)
                if (observable(trace[i], l, env, lat)) return false;
            return true;
    }
    return false;
}

std::uint64_t CandidateRun::known_steps() const {
    if (outcome == Outcome::Terminated || outcome == Outcome::Blocked) return std::numeric_limits<std::uint64_t>::max();
    return trace.size();
}

CandidateRun simulate(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0, std::size_t budget,
                      bool detect_cycles) {
    RunResult r = interp.run(Config{c, m, pc0}, budget, detect_cycles);
    CandidateRun out;
    out.outcome = r.outcome;
    out.cycle_length = r.cycle_length;
    out.trace = std::move(r.trace);
    if (out.outcome == Outcome::Diverged) {
        // Unroll the period so every step up to the budget is on record.
        const std::size_t start = out.trace.size() - out.cycle_length;
        for (std::size_t i = 0; out.trace.size() < budget; ++i)
            out.trace.push_back(out.trace[start + i % out.cycle_length]);
    }
    return out;
}

namespace {

std::vector<TimedEvent> filtered_view(const CandidateRun& run, Level l, const TypeEnv& env, const Lattice& lat) {
    std::vector<TimedEvent> out;
    for (std::size_t i = 0; i < run.trace.size(); ++i)
        if (observable(run.trace[i], l, env, lat)) out.push_back({i + 1, run.trace[i]});
    return out;
}

std::size_t common_prefix(const std::vector<TimedEvent>& a, const std::vector<TimedEvent>& b, bool timed) {
    std::size_t n = 0;
    while (n < a.size() && n < b.size() && a[n].event == b[n].event && (!timed || a[n].ts == b[n].ts)) ++n;
    return n;
}

/**
 * k: target prefix length; lcp: agreement between the candidate's filtered trace f
 * and the target; next_target_ts: timestamp of target[lcp] when lcp < k.
 */
Membership decide(KnowledgeKind kind, std::size_t k, std::size_t lcp, const std::vector<TimedEvent>& f,
                  bool complete, std::uint64_t known_steps, bool timed, std::uint64_t next_target_ts,
                  std::uint64_t ts) {
    if (lcp < k) {
        // Deviated, or still a proper prefix of the target.
        if (lcp < f.size() || complete) return Membership::Out;
        if (timed && known_steps >= next_target_ts) return Membership::Out;
        return Membership::Unknown;
    }
    switch (kind) {
        case KnowledgeKind::Attacker: return Membership::In;
        case KnowledgeKind::Progress:
            if (f.size() > k) return Membership::In;
            return complete ? Membership::Out : Membership::Unknown;
        case KnowledgeKind::Clock:
            if (f.size() > k) return f[k].ts == ts ? Membership::In : Membership::Out;
            if (complete || known_steps >= ts) return Membership::Out;
            return Membership::Unknown;
    }
    return Membership::Unknown;
}

}  // namespace

Membership classify(const CandidateRun& run, const Target& target, const TypeEnv& env, const Lattice& lat) {
    const bool timed = target.timed || target.kind == KnowledgeKind::Clock;
    auto f = filtered_view(run, target.level, env, lat);
    const std::size_t lcp = common_prefix(f, target.prefix, timed);
    const std::size_t k = target.prefix.size();
    const std::uint64_t next_ts = lcp < k ? target.prefix[lcp].ts : 0;
    return decide(target.kind, k, lcp, f, run.complete_at(target.level, env, lat), run.known_steps(), timed, next_ts,
                  target.ts);
}

Membership classify_membership(const Interpreter& interp, const CmdPtr& c, Level pc0, const Memory& s,
                               const Target& target, std::size_t budget, bool detect_cycles) {
    return classify(simulate(interp, c, s, pc0, budget, detect_cycles), target, s.env(), interp.lattice());
}

Membership KnowledgeSet::status_of(std::size_t i) const {
    for (std::size_t j = 0; j < universe.size(); ++j)
        if (universe[j] == i) return status[j];
    return Membership::Out;
}

std::vector<std::size_t> KnowledgeSet::select(Membership m) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < universe.size(); ++j)
        if (status[j] == m) out.push_back(universe[j]);
    return out;
}

KnowledgeOracle::KnowledgeOracle(const Interpreter& interp, CmdPtr c, Level pc0, std::vector<Memory> candidates,
                                 std::size_t reference, std::size_t budget, bool detect_cycles)
    : interp_(interp), c_(std::move(c)), pc0_(pc0), cands_(std::move(candidates)), ref_(reference) {
    if (ref_ >= cands_.size()) throw ConfigError("reference memory is not among the candidates");
    runs_.reserve(cands_.size());
    for (const auto& m : cands_) runs_.push_back(simulate(interp_, c_, m, pc0_, budget, detect_cycles));
}

KnowledgeOracle::View& KnowledgeOracle::view(Level l) {
    auto it = views_.find(l.id);
    if (it != views_.end()) return it->second;
    const Lattice& lat = lattice();
    View v;
    const auto& ref_trace = runs_[ref_].trace;
    v.ref_counts.assign(ref_trace.size() + 1, 0);
    for (std::size_t j = 0; j < ref_trace.size(); ++j)
        v.ref_counts[j + 1] = v.ref_counts[j] + (observable(ref_trace[j], l, env(), lat) ? 1 : 0);
    const std::size_t n = cands_.size();
    v.filtered.resize(n);
    v.lcp_untimed.assign(n, 0);
    v.lcp_timed.assign(n, 0);
    v.complete.assign(n, 0);
    v.filtered[ref_] = filtered_view(runs_[ref_], l, env(), lat);
    for (std::size_t i = 0; i < n; ++i) {
        if (!mem_equiv(cands_[ref_], cands_[i], l, lat)) continue;
        v.universe.push_back(i);
        if (i != ref_) v.filtered[i] = filtered_view(runs_[i], l, env(), lat);
        v.lcp_untimed[i] = common_prefix(v.filtered[i], v.filtered[ref_], false);
        v.lcp_timed[i] = common_prefix(v.filtered[i], v.filtered[ref_], true);
        v.complete[i] = runs_[i].complete_at(l, env(), lat) ? 1 : 0;
    }
    return views_.emplace(l.id, std::move(v)).first->second;
}

KnowledgeSet KnowledgeOracle::build(KnowledgeKind kind, std::size_t prefix_len, Level l, bool timed,
                                    std::uint64_t ts) {
    View& v = view(l);
    if (prefix_len >= v.ref_counts.size()) throw ConfigError("prefix is longer than the reference run");
    const std::size_t k = v.ref_counts[prefix_len];
    const auto& ref_f = v.filtered[ref_];
    KnowledgeSet ks;
    ks.domain_id = this;
    ks.level = l;
    ks.kind = kind;
    ks.ts = ts;
    ks.universe = v.universe;
    ks.status.reserve(v.universe.size());
    for (std::size_t i : v.universe) {
        const std::size_t full = timed ? v.lcp_timed[i] : v.lcp_untimed[i];
        const std::size_t lcp = std::min(full, k);
        const std::uint64_t next_ts = lcp < k ? ref_f[lcp].ts : 0;
        ks.status.push_back(
            decide(kind, k, lcp, v.filtered[i], v.complete[i] != 0, runs_[i].known_steps(), timed, next_ts, ts));
    }
    return ks;
}

KnowledgeSet KnowledgeOracle::attacker(std::size_t prefix_len, Level l, bool timed) {
    return build(KnowledgeKind::Attacker, prefix_len, l, timed, 0);
}

KnowledgeSet KnowledgeOracle::progress(std::size_t prefix_len, Level l, bool timed) {
    return build(KnowledgeKind::Progress, prefix_len, l, timed, 0);
}

KnowledgeSet KnowledgeOracle::clock(std::size_t prefix_len, Level l, std::uint64_t ts) {
    return build(KnowledgeKind::Clock, prefix_len, l, true, ts);
}

std::optional<std::uint64_t> KnowledgeOracle::next_observable_ts(std::size_t i, Level l, std::size_t k) {
    View& v = view(l);
    if (v.filtered[i].size() <= k) {
        if (i != ref_ && std::find(v.universe.begin(), v.universe.end(), i) == v.universe.end())
            v.filtered[i] = filtered_view(runs_[i], l, env(), lattice());
        if (v.filtered[i].size() <= k) return std::nullopt;
    }
    return v.filtered[i][k].ts;
}

namespace {

std::pair<std::vector<Memory>, std::size_t> grid_with_reference(const Domain& dom, const Memory& m) {
    auto grid = enumerate_memories(dom, m);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] == m) return {std::move(grid), i};
    throw ConfigError("reference memory is not in the domain grid");
}

std::size_t checked_prefix(const KnowledgeOracle& o, const std::vector<Event>& t) {
    const auto& ref = o.reference_trace();
    if (t.size() > ref.size() || !std::equal(t.begin(), t.end(), ref.begin()))
        throw ConfigError("trace is not a prefix of the reference run");
    return t.size();
}

}  // namespace

KnowledgeSet attacker_knowledge(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0,
                                const std::vector<Event>& t, Level l, const Domain& dom, std::size_t budget,
                                std::vector<Memory>* grid) {
    auto [cands, ref] = grid_with_reference(dom, m);
    if (grid) *grid = cands;
    KnowledgeOracle o(interp, c, pc0, std::move(cands), ref, budget);
    auto ks = o.attacker(checked_prefix(o, t), l);
    ks.domain_id = nullptr;
    return ks;
}

KnowledgeSet progress_knowledge(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0,
                                const std::vector<Event>& t, Level l, const Domain& dom, std::size_t budget,
                                std::vector<Memory>* grid) {
    auto [cands, ref] = grid_with_reference(dom, m);
    if (grid) *grid = cands;
    KnowledgeOracle o(interp, c, pc0, std::move(cands), ref, budget);
    auto ks = o.progress(checked_prefix(o, t), l);
    ks.domain_id = nullptr;
    return ks;
}

KnowledgeSet clock_knowledge(const Interpreter& interp, const CmdPtr& c, const Memory& m, Level pc0,
                             const std::vector<Event>& t, Level l, std::uint64_t ts, const Domain& dom,
                             std::size_t budget, std::vector<Memory>* grid) {
    auto [cands, ref] = grid_with_reference(dom, m);
    if (grid) *grid = cands;
    KnowledgeOracle o(interp, c, pc0, std::move(cands), ref, budget);
    auto ks = o.clock(checked_prefix(o, t), l, ts);
    ks.domain_id = nullptr;
    return ks;
}

}  // namespace ifc
