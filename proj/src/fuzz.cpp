#include "ifc/fuzz.hpp"

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ifc/io.hpp"
#include "ifc/monitor.hpp"
#include "ifc/syntax.hpp"

namespace ifc {

ProgramGenerator::ProgramGenerator(const Lattice& lat, FuzzConfig cfg) : lat_(lat), cfg_(std::move(cfg)), rng_(cfg_.seed) {
    if (cfg_.vars.empty()) throw ConfigError("fuzz: empty variable pool");
    for (const auto& name : cfg_.levels) {
        auto l = lat_.find(name);
        if (!l) throw ConfigError("fuzz: level '" + name + "' is not in the lattice");
        levels_.push_back(*l);
    }
    if (levels_.empty()) levels_ = lat_.levels();
    for (const auto& v : cfg_.vars) {
        if (!lat_.find(v.level)) throw ConfigError("fuzz: level '" + v.level + "' is not in the lattice");
        if (v.domain.empty()) throw ConfigError("fuzz: variable '" + v.name + "' has no values");
        if (v.domain.size() > 1)
            for (auto x : v.domain) domain_.candidates[v.name].push_back(BaseValue(x));
    }
}

std::string ProgramGenerator::pick_var() { return cfg_.vars[draw(cfg_.vars.size())].name; }
Level ProgramGenerator::pick_level() { return levels_[draw(levels_.size())]; }
std::string ProgramGenerator::fresh_tag() { return "t" + std::to_string(tags_++); }

ExprPtr ProgramGenerator::int_expr(int depth) {
    if (depth <= 0 || draw(3) == 0) {
        if (draw(2) == 0) return mk::num(static_cast<std::int64_t>(draw(4)));
        return mk::var(pick_var());
    }
    static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq, BinOp::Lt, BinOp::Gt};
    return mk::bin(ops[draw(6)], int_expr(depth - 1), int_expr(depth - 1));
}

ExprPtr ProgramGenerator::auth_expr(bool tini_only) {
    if (draw(3) == 0) return mk::var("rootauth");
    const int purpose = tini_only ? static_cast<int>(draw(2)) : 1;
    return mk::attenuate(mk::var("rootauth"), pick_level(), purpose);
}

CmdPtr ProgramGenerator::command(int depth, bool allow_eval) {
    const FuzzWeights& w = cfg_.weights;
    const bool leaf = depth <= 0;
    const unsigned weights[] = {w.skip,
                                w.assign,
                                leaf ? 0 : w.seq,
                                leaf ? 0 : w.cond,
                                leaf ? 0 : w.loop,
                                leaf ? 0 : w.tini,
                                w.declassify,
                                leaf || !allow_eval ? 0 : w.eval};
    unsigned total = 0;
    for (unsigned x : weights) total += x;
    if (total == 0) return mk::skip();
    auto r = static_cast<unsigned>(draw(total));
    int choice = 0;
    while (r >= weights[choice]) r -= weights[choice++];

    switch (choice) {
        case 0: return mk::skip();
        case 1: return mk::assign(pick_var(), int_expr(2));
        case 2: return mk::seq(command(depth - 1, allow_eval), command(depth - 1, allow_eval));
        case 3: return mk::cond(int_expr(2), command(depth - 1, allow_eval), command(depth - 1, allow_eval));
        case 4: {
            const std::string v = pick_var();
            switch (draw(4)) {
                case 0:  // silent loop on a variable that never changes inside it
                    return mk::loop(mk::bin(BinOp::Gt, mk::var(v), mk::num(0)), mk::skip());
                case 1:  // arbitrary guard and body, possibly divergent
                    return mk::loop(int_expr(1), command(depth - 1, allow_eval));
                default:  // countdown
                    return mk::loop(mk::bin(BinOp::Gt, mk::var(v), mk::num(0)),
                                    mk::seq(command(depth - 1, allow_eval),
                                            mk::assign(v, mk::bin(BinOp::Sub, mk::var(v), mk::num(1)))));
            }
        }
        case 5: {
            const std::string tag = fresh_tag();
            const Level to = pick_level();
            ExprPtr auth = auth_expr(true);
            return mk::tini(tag, to, std::move(auth), command(depth - 1, allow_eval));
        }
        case 6: {
            const std::string x = pick_var();
            ExprPtr auth = auth_expr(false);
            const Level to = pick_level();
            return mk::declassify(x, std::move(auth), to, int_expr(1));
        }
        default: {
            CmdPtr body = command(depth - 1, false);
            auto used = vars_of(*body);
            std::vector<std::string> allowed(used.begin(), used.end());
            if (draw(4) == 0) {
                // Occasionally exclude a variable the code needs, so eval faults.
                if (!allowed.empty()) allowed.erase(allowed.begin() + static_cast<std::ptrdiff_t>(draw(allowed.size())));
            }
            return mk::eval(mk::str(print(*body, lat_)), std::move(allowed));
        }
    }
}

Memory ProgramGenerator::memory() {
    MemoryBuilder b(lat_);
    for (const auto& v : cfg_.vars) b.var(v.name, lat_.level(v.level), BaseValue(v.domain[draw(v.domain.size())]));
    return b.build();
}

namespace {

struct Census {
    bool tini = false, declassify = false, eval = false;
};

void census(const Cmd& c, Census& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Seq>) {
                census(*x.first, out);
                census(*x.second, out);
            } else if constexpr (std::is_same_v<T, While>) {
                census(*x.body, out);
            } else if constexpr (std::is_same_v<T, If>) {
                census(*x.then_branch, out);
                census(*x.else_branch, out);
            } else if constexpr (std::is_same_v<T, Tini>) {
                out.tini = true;
                census(*x.body, out);
            } else if constexpr (std::is_same_v<T, Declassify>) {
                out.declassify = true;
            } else if constexpr (std::is_same_v<T, Eval>) {
                out.eval = true;
            }
        },
        c.node);
}

}  // namespace

FuzzCase ProgramGenerator::next() {
    FuzzCase fc;
    fc.index = produced_++;
    tags_ = 0;
    CmdPtr p = command(cfg_.max_depth);
    Census cs;
    census(*p, cs);
    if ((cfg_.weights.tini || cfg_.weights.declassify) && !cs.tini && !cs.declassify) {
        const std::string tag = fresh_tag();
        const Level to = pick_level();
        ExprPtr auth = auth_expr(true);
        p = mk::seq(p, mk::tini(tag, to, std::move(auth), command(1, false)));
    }
    fc.source = print(*p, lat_);
    CmdPtr back = parse_program(fc.source, lat_);
    if (!(*back == *p)) throw std::logic_error("generated program does not parse back: " + fc.source);
    if (!decl_wf(*p)) throw std::logic_error("generated program is not well formed: " + fc.source);
    fc.program = std::move(p);
    fc.memory = memory();
    fc.domain = domain_;
    return fc;
}

std::string FuzzSummary::text() const {
    std::ostringstream out;
    out << "seed " << seed << ": " << programs << " programs\n";
    out << "constructs: tini " << with_tini << ", declassify " << with_declassify << ", eval " << with_eval << "\n";
    out << "runs: terminated " << terminated << ", blocked " << blocked << ", diverged " << diverged
        << ", budget exhausted " << budget << "\n";
    out << "BPNI verdicts: secure " << secure << ", insecure " << insecure << ", inconclusive " << inconclusive << "\n";
    out << "insecure programs:";
    if (insecure_cases.empty()) out << " none";
    for (auto i : insecure_cases) out << " " << i;
    out << "\n";
    return out.str();
}

FuzzSummary run_fuzz(const Lattice& lat, const FuzzConfig& cfg, const std::string& emit_dir) {
    ProgramGenerator gen(lat, cfg);
    FuzzSummary sum;
    sum.seed = cfg.seed;
    nlohmann::json manifest = nlohmann::json::array();
    if (!emit_dir.empty()) std::filesystem::create_directories(emit_dir);
    CheckOptions opts;
    opts.budget = cfg.budget;
    for (std::size_t i = 0; i < cfg.count; ++i) {
        FuzzCase fc = gen.next();
        Census cs;
        census(*fc.program, cs);
        sum.with_tini += cs.tini;
        sum.with_declassify += cs.declassify;
        sum.with_eval += cs.eval;

        Verdict v = check_monitor_soundness(fc.program, fc.memory, lat.bottom(), fc.domain, lat, opts);
        ++sum.programs;
        switch (v.run_outcome) {
            case Outcome::Terminated: ++sum.terminated; break;
            case Outcome::Blocked: ++sum.blocked; break;
            case Outcome::Diverged: ++sum.diverged; break;
            case Outcome::BudgetExhausted: ++sum.budget; break;
        }
        switch (v.overall) {
            case Overall::Secure: ++sum.secure; break;
            case Overall::Insecure:
                ++sum.insecure;
                sum.insecure_cases.push_back(fc.index);
                break;
            case Overall::Inconclusive: ++sum.inconclusive; break;
        }
        if (!emit_dir.empty()) {
            const std::string stem = "fuzz_" + std::to_string(fc.index);
            const auto dir = std::filesystem::path(emit_dir);
            write_file((dir / (stem + ".ifc")).string(), fc.source + "\n");
            write_file((dir / (stem + ".memory.json")).string(), memory_to_json(fc.memory, lat) + "\n");
            nlohmann::json dom = nlohmann::json::object();
            for (const auto& [x, values] : fc.domain.candidates) {
                nlohmann::json vals = nlohmann::json::array();
                for (const auto& b : values) vals.push_back(std::get<std::int64_t>(b.v));
                dom[x] = {{"int", vals}};
            }
            write_file((dir / (stem + ".domain.json")).string(), dom.dump() + "\n");
            manifest.push_back({{"name", stem},
                                {"program", stem + ".ifc"},
                                {"memory", stem + ".memory.json"},
                                {"domain", stem + ".domain.json"},
                                {"condition", "bpni"},
                                {"mode", "monitored"},
                                {"expected_exit", exit_code(v.overall)}});
        }
    }
    if (!emit_dir.empty())
        write_file((std::filesystem::path(emit_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    return sum;
}

}  // namespace ifc
