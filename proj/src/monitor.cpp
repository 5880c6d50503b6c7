#include "ifc/monitor.hpp"

#include <algorithm>

#include "ifc/syntax.hpp"

namespace ifc {

const char* to_string(Mode m) { return m == Mode::Monitored ? "monitored" : "unmonitored"; }

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Terminated: return "terminated";
        case Outcome::Blocked: return "blocked";
        case Outcome::BudgetExhausted: return "budget exhausted";
        case Outcome::Diverged: return "diverged";
    }
    return "?";
}

namespace {

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

BaseValue apply(BinOp op, const BaseValue& a, const BaseValue& b) {
    if (a.type() != b.type())
        throw EvalFault(std::string("operands of '") + to_string(op) + "' have different types (" +
                        to_string(a.type()) + ", " + to_string(b.type()) + ")");
    if (op == BinOp::Concat) {
        if (a.type() != Type::Str) throw EvalFault("'++' needs string operands");
        return BaseValue(std::get<std::string>(a.v) + std::get<std::string>(b.v));
    }
    if (a.type() != Type::Int) throw EvalFault(std::string("'") + to_string(op) + "' needs int operands");
    const auto x = static_cast<std::uint64_t>(std::get<std::int64_t>(a.v));
    const auto y = static_cast<std::uint64_t>(std::get<std::int64_t>(b.v));
    const auto sx = std::get<std::int64_t>(a.v), sy = std::get<std::int64_t>(b.v);
    switch (op) {
        case BinOp::Add: return BaseValue(wrap(x + y));
        case BinOp::Sub: return BaseValue(wrap(x - y));
        case BinOp::Mul: return BaseValue(wrap(x * y));
        case BinOp::Eq: return BaseValue(std::int64_t{sx == sy});
        case BinOp::Lt: return BaseValue(std::int64_t{sx < sy});
        case BinOp::Gt: return BaseValue(std::int64_t{sx > sy});
        case BinOp::Concat: break;
    }
    throw EvalFault("unknown operator");
}

StepResult stepped(Event ev, CmdPtr next, Memory mem, Level pc) {
    StepResult r;
    r.kind = StepResult::Kind::Stepped;
    r.event = std::move(ev);
    r.next = Config{std::move(next), std::move(mem), pc};
    return r;
}

StepResult blocked(BlockKind kind, std::string msg) {
    StepResult r;
    r.kind = StepResult::Kind::Blocked;
    r.reason = BlockReason{kind, std::move(msg)};
    return r;
}

}  // namespace

LabeledValue eval_expr(const Expr& e, const Memory& m, const Lattice& lat) {
    return std::visit(
        [&](const auto& x) -> LabeledValue {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IntLit>) return {BaseValue(x.value), lat.bottom()};
            else if constexpr (std::is_same_v<T, StrLit>) return {BaseValue(x.value), lat.bottom()};
            else if constexpr (std::is_same_v<T, Var>) {
                auto i = m.env().index(x.name);
                if (!i) throw EvalFault("unknown variable '" + x.name + "'");
                return {m.store()[*i], m.env().at(*i).level};
            } else if constexpr (std::is_same_v<T, Binary>) {
                LabeledValue a = eval_expr(*x.lhs, m, lat);
                LabeledValue b = eval_expr(*x.rhs, m, lat);
                return {apply(x.op, a.base, b.base), lat.join(a.level, b.level)};
            } else {
                LabeledValue a = eval_expr(*x.inner, m, lat);
                const auto* auth = std::get_if<Authority>(&a.base.v);
                if (!auth) throw EvalFault("attenuate applied to a non-authority value");
                if (!lat.flows_to(x.level, auth->level))
                    throw EvalFault("attenuate cannot raise authority from " + lat.name(auth->level) + " to " +
                                    lat.name(x.level));
                if (x.purpose > auth->purpose) throw EvalFault("attenuate cannot raise the purpose bit");
                return {BaseValue(Authority{x.level, x.purpose}), a.level};
            }
        },
        e.node);
}

StepResult Interpreter::step(const Config& cfg) const {
    if (cfg.is_final()) return StepResult{};
    try {
        return step_cmd(cfg.cmd, cfg.mem, cfg.pc);
    } catch (const EvalFault& f) {
        return blocked(BlockKind::Fault, f.what());
    } catch (const LatticeError& f) {
        return blocked(BlockKind::Fault, f.what());
    }
}

StepResult Interpreter::step_cmd(const CmdPtr& cmd, const Memory& m, Level pc) const {
    const Lattice& lat = *lat_;
    auto leq = [&](Level a, Level b) { return lat.flows_to(a, b); };
    auto lvl = [&](Level l) { return lat.name(l); };

    return std::visit(
        [&](const auto& x) -> StepResult {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Stop>) {
                return StepResult{};
            } else if constexpr (std::is_same_v<T, Skip>) {
                return stepped(Event{}, mk::stop(), m, pc);
            } else if constexpr (std::is_same_v<T, Assign>) {
                if (!m.has(x.var)) throw EvalFault("unknown variable '" + x.var + "'");
                LabeledValue v = eval_expr(*x.value, m, lat);
                if (v.base.type() != m.type_of(x.var))
                    throw EvalFault("cannot assign a " + std::string(to_string(v.base.type())) + " to '" + x.var + "'");
                const Level target = m.level_of(x.var);
                if (monitored() && opts_.check_assign_flow && !leq(lat.join(pc, v.level), target))
                    return blocked(BlockKind::Monitor, "assignment to " + x.var + ": pc " + lvl(pc) + " join " +
                                                           lvl(v.level) + " does not flow to " + lvl(target));
                Memory next = m;
                next.set(x.var, v.base);
                return stepped(Event{Event::Assign{x.var, v.base}}, mk::stop(), std::move(next), pc);
            } else if constexpr (std::is_same_v<T, Seq>) {
                StepResult r = step_cmd(x.first, m, pc);
                if (r.kind == StepResult::Kind::Final) throw EvalFault("sequence starts with a final command");
                if (r.kind != StepResult::Kind::Stepped) return r;
                Config& n = *r.next;
                n.cmd = n.is_final() ? x.second : mk::seq(n.cmd, x.second);
                return r;
            } else if constexpr (std::is_same_v<T, If>) {
                LabeledValue g = eval_expr(*x.cond, m, lat);
                const auto* n = std::get_if<std::int64_t>(&g.base.v);
                if (!n) throw EvalFault("if-guard is not an int");
                return stepped(Event{}, *n == 0 ? x.else_branch : x.then_branch, m, lat.join(pc, g.level));
            } else if constexpr (std::is_same_v<T, While>) {
                return stepped(Event{}, mk::cond(x.cond, mk::seq(x.body, cmd), mk::skip()), m, pc);
            } else if constexpr (std::is_same_v<T, Declassify>) {
                if (!m.has(x.var)) throw EvalFault("unknown variable '" + x.var + "'");
                LabeledValue a = eval_expr(*x.auth, m, lat);
                const auto* auth = std::get_if<Authority>(&a.base.v);
                if (!auth) throw EvalFault("declassify authority is not an authority value");
                if (auth->purpose != 1) throw EvalFault("declassify needs an authority with purpose 1");
                LabeledValue v = eval_expr(*x.value, m, lat);
                if (v.base.type() != m.type_of(x.var))
                    throw EvalFault("cannot declassify a " + std::string(to_string(v.base.type())) + " into '" + x.var +
                                    "'");
                const Level target = m.level_of(x.var);
                if (monitored()) {
                    if (!leq(a.level, pc))
                        return blocked(BlockKind::Monitor, "declassify: authority label " + lvl(a.level) +
                                                               " does not flow to pc " + lvl(pc));
                    if (!leq(lat.join(x.to, pc), target))
                        return blocked(BlockKind::Monitor, "declassify: target " + lvl(x.to) + " join pc " + lvl(pc) +
                                                               " does not flow to " + lvl(target));
                    if (!leq(v.level, lat.join(x.to, auth->level)))
                        return blocked(BlockKind::Monitor, "declassify: " + lvl(v.level) + " exceeds " + lvl(x.to) +
                                                               " join authority " + lvl(auth->level));
                }
                Memory next = m;
                next.set(x.var, v.base);
                return stepped(Event{Event::Declassify{x.var, v.base, auth->level, v.level, x.to}}, mk::stop(),
                               std::move(next), pc);
            } else if constexpr (std::is_same_v<T, Tini>) {
                LabeledValue a = eval_expr(*x.auth, m, lat);
                const auto* auth = std::get_if<Authority>(&a.base.v);
                if (!auth) throw EvalFault("tini authority is not an authority value");
                if (monitored()) {
                    if (!leq(a.level, pc))
                        return blocked(BlockKind::Monitor,
                                       "tini: authority label " + lvl(a.level) + " does not flow to pc " + lvl(pc));
                    if (!leq(pc, x.to))
                        return blocked(BlockKind::Monitor, "tini: pc " + lvl(pc) + " does not flow to " + lvl(x.to));
                }
                return stepped(Event{}, mk::seq(x.body, mk::pcdecl(x.tag, auth->level, x.to)), m, pc);
            } else if constexpr (std::is_same_v<T, PcDecl>) {
                if (monitored() && !leq(pc, lat.join(x.to, x.auth)))
                    return blocked(BlockKind::Monitor, "pcdecl " + x.tag + ": pc " + lvl(pc) + " exceeds " +
                                                           lvl(x.to) + " join authority " + lvl(x.auth));
                return stepped(Event{Event::TiniExit{x.tag, x.auth, pc, x.to}}, mk::stop(), m, x.to);
            } else {
                static_assert(std::is_same_v<T, Eval>);
                LabeledValue code = eval_expr(*x.code, m, lat);
                const auto* text = std::get_if<std::string>(&code.base.v);
                if (!text) throw EvalFault("eval argument is not a string");
                CmdPtr body;
                try {
                    body = parse_program(*text, lat);
                } catch (const ParseError& pe) {
                    throw EvalFault(std::string("eval: ") + pe.what());
                }
                for (const auto& v : vars_of(*body))
                    if (std::find(x.allowed.begin(), x.allowed.end(), v) == x.allowed.end())
                        throw EvalFault("eval: code uses variable '" + v + "' outside its allowed set");
                if (!eval_free(*body)) throw EvalFault("eval: code contains a nested eval");
                return stepped(Event{}, body, m, lat.join(pc, code.level));
            }
        },
        cmd->node);
}

RunResult Interpreter::run(const Config& start, std::size_t budget, bool detect_cycles) const {
    RunResult r;
    Config cur = start;
    Config saved = start;
    std::size_t saved_at = 0, power = 1;
    for (std::size_t s = 0; s < budget; ++s) {
        StepResult st = step(cur);
        if (st.kind == StepResult::Kind::Final) break;
        if (st.kind == StepResult::Kind::Blocked) {
            r.outcome = Outcome::Blocked;
            r.reason = st.reason;
            r.end = std::move(cur);
            return r;
        }
        r.trace.push_back(std::move(st.event));
        r.pcs.push_back(st.next->pc);
        cur = std::move(*st.next);
        if (detect_cycles && !cur.is_final()) {
            const std::size_t done = s + 1;
            if (cur == saved) {
                r.outcome = Outcome::Diverged;
                r.cycle_length = done - saved_at;
                r.end = std::move(cur);
                return r;
            }
            if (done - saved_at == power) {
                saved = cur;
                saved_at = done;
                power *= 2;
            }
        }
    }
    r.outcome = cur.is_final() ? Outcome::Terminated : Outcome::BudgetExhausted;
    r.end = std::move(cur);
    return r;
}

std::vector<TimedEvent> stamp(const std::vector<Event>& trace) {
    std::vector<TimedEvent> out;
    out.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) out.push_back({i + 1, trace[i]});
    return out;
}

std::vector<TimedEvent> Interpreter::clocked_run(const Config& start, std::size_t budget, RunResult* out) const {
    RunResult r = run(start, budget);
    auto timed = stamp(r.trace);
    if (out) *out = std::move(r);
    return timed;
}

}  // namespace ifc
