// ifc: run programs under the monitor, check security conditions, run the
// operational harness, and fuzz the monitor.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ifc/bridge.hpp"
#include "ifc/conditions.hpp"
#include "ifc/fuzz.hpp"
#include "ifc/io.hpp"
#include "ifc/monitor.hpp"
#include "ifc/syntax.hpp"

namespace {

using namespace ifc;

constexpr int kConfigError = 3;

struct Common {
    std::string lattice;
    std::size_t budget = 10000;
    std::string pc;
};

Lattice lattice_of(const std::string& path) {
    if (path.empty()) return Lattice::chain({"L", "M", "H"});
    return load_lattice_file(path);
}

Level level_or(const Lattice& lat, const std::string& name, Level fallback) {
    if (name.empty()) return fallback;
    auto l = lat.find(name);
    if (!l) throw ConfigError("unknown level '" + name + "'");
    return *l;
}

Mode parse_mode(const std::string& s) {
    if (s == "monitored") return Mode::Monitored;
    if (s == "unmonitored") return Mode::Unmonitored;
    throw ConfigError("mode must be monitored or unmonitored, not '" + s + "'");
}

std::size_t default_budget() {
    const char* env = std::getenv("IFC_BUDGET");
    if (!env) return 10000;
    try {
        std::size_t used = 0;
        long long v = std::stoll(env, &used);
        if (used != std::string(env).size() || v <= 0) throw std::invalid_argument("");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(std::string("IFC_BUDGET must be a positive integer, got '") + env + "'");
    }
}

// ── run ──

struct RunArgs {
    std::string program, memory, mode = "monitored";
    bool unmonitored = false, clock = false;
};

int cmd_run(const RunArgs& a, const Common& c) {
    Lattice lat = lattice_of(c.lattice);
    CmdPtr prog = parse_program(read_file(a.program), lat);
    Memory mem = load_memory_file(a.memory, lat);
    Interpreter interp(lat, MonitorOptions{a.unmonitored ? Mode::Unmonitored : parse_mode(a.mode)});
    RunResult r = interp.run(Config{prog, mem, level_or(lat, c.pc, lat.bottom())}, c.budget);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        if (a.clock) std::cout << i + 1 << "|";
        std::cout << lat.name(r.pcs[i]) << "|" << render(r.trace[i], lat) << "\n";
    }
    switch (r.outcome) {
        case Outcome::Terminated: std::cout << "terminated\n"; return 0;
        case Outcome::Blocked: std::cout << "blocked: " << r.reason.message << "\n"; return 1;
        default: std::cout << "budget exhausted\n"; return 2;
    }
}

// ── check ──

struct CheckArgs {
    std::string program, memory, domain, condition = "bpni", mode = "monitored", manifest;
    std::vector<std::string> attackers;
    bool all_cells = false;
};

int check_one(const std::string& program, const std::string& memory, const std::string& domain,
              const std::string& condition, const std::string& mode, const std::vector<std::string>& attackers,
              const Lattice& lat, const Common& c, bool all_cells, bool quiet) {
    auto cond = parse_condition(condition);
    if (!cond) throw ConfigError("condition must be psni, pini, bpni or btni, not '" + condition + "'");
    CmdPtr prog = parse_program(read_file(program), lat);
    Memory mem = load_memory_file(memory, lat);
    Domain dom = load_domain_file(domain, lat);
    CheckOptions opts;
    opts.budget = c.budget;
    for (const auto& name : attackers) opts.attackers.push_back(level_or(lat, name, lat.bottom()));
    Interpreter interp(lat, MonitorOptions{parse_mode(mode)});
    Verdict v = check_run(interp, prog, mem, level_or(lat, c.pc, lat.bottom()), *cond, dom, opts);
    if (!quiet) std::cout << verdict_table(v, lat, all_cells) << verdict_json(v, lat) << "\n";
    return exit_code(v.overall);
}

int cmd_check(const CheckArgs& a, const Common& c) {
    if (!a.manifest.empty()) {
        int failures = 0;
        for (const auto& e : load_manifest(a.manifest)) {
            Lattice lat = lattice_of(e.lattice.empty() ? c.lattice : e.lattice);
            int code;
            try {
                code = check_one(e.program, e.memory, e.domain, e.condition, e.mode, a.attackers, lat, c, false, true);
            } catch (const std::exception& ex) {
                std::cout << "error " << e.name << ": " << ex.what() << "\n";
                code = kConfigError;
            }
            const bool ok = code == e.expected_exit;
            failures += ok ? 0 : 1;
            std::cout << (ok ? "PASS " : "FAIL ") << e.name << " (" << e.condition << ", " << e.mode << "): exit "
                      << code << ", expected " << e.expected_exit << "\n";
        }
        return failures ? 1 : 0;
    }
    if (a.program.empty() || a.memory.empty() || a.domain.empty())
        throw ConfigError("check needs a program, --memory and --domain (or --manifest)");
    Lattice lat = lattice_of(c.lattice);
    return check_one(a.program, a.memory, a.domain, a.condition, a.mode, a.attackers, lat, c, a.all_cells, false);
}

// ── bridge ──

struct BridgeArgs {
    std::string program, memory, domain;
    std::vector<std::string> attackers;
    bool mutate_assign = false;
    std::size_t max_pairs = 10000;
    std::uint64_t seed = 1;
};

int cmd_bridge(const BridgeArgs& a, const Common& c) {
    Lattice lat = lattice_of(c.lattice);
    CmdPtr prog = parse_program(read_file(a.program), lat);
    Memory mem = load_memory_file(a.memory, lat);
    Domain dom = load_domain_file(a.domain, lat);
    MonitorOptions mo{Mode::Monitored};
    mo.check_assign_flow = !a.mutate_assign;
    Interpreter interp(lat, mo);
    HarnessOptions opts;
    opts.budget = c.budget;
    opts.max_pairs = a.max_pairs;
    opts.sample_seed = a.seed;
    std::vector<Level> levels;
    for (const auto& name : a.attackers) levels.push_back(level_or(lat, name, lat.bottom()));
    if (levels.empty()) levels = lat.levels();
    std::size_t violations = 0, unknowns = 0;
    for (Level l : levels) {
        auto rep = check_operational_security(interp, prog, level_or(lat, c.pc, lat.bottom()), l, mem, dom, opts);
        std::cout << report_text(rep, lat) << report_json(rep, lat) << "\n";
        violations += rep.violations();
        unknowns += rep.unknowns();
    }
    if (violations) return 1;
    return unknowns ? 2 : 0;
}

// ── fuzz ──

struct FuzzArgs {
    FuzzConfig cfg;
    std::string emit_dir;
};

int cmd_fuzz(FuzzArgs a, const Common& c) {
    Lattice lat = lattice_of(c.lattice);
    a.cfg.budget = c.budget;
    FuzzSummary s = run_fuzz(lat, a.cfg, a.emit_dir);
    std::cout << s.text();
    return s.insecure ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-flow monitor and security condition checker"};
    app.require_subcommand(1);
    Common common;
    try {
        common.budget = default_budget();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--lattice", common.lattice, "lattice JSON (default: chain L < M < H)");
        sub->add_option("--budget", common.budget, "step budget (default: IFC_BUDGET or 10000)")->check(CLI::PositiveNumber);
        sub->add_option("--pc", common.pc, "initial pc level (default: bottom)");
    };

    RunArgs ra;
    auto* run = app.add_subcommand("run", "execute a program and print its trace");
    run->add_option("program", ra.program)->required();
    run->add_option("--memory", ra.memory)->required();
    run->add_option("--mode", ra.mode, "monitored or unmonitored");
    run->add_flag("--unmonitored", ra.unmonitored);
    run->add_flag("--clock", ra.clock, "prefix each line with its timestamp");
    add_common(run);

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "check a security condition on one run");
    check->add_option("program", ca.program);
    check->add_option("--memory", ca.memory);
    check->add_option("--domain", ca.domain);
    check->add_option("--condition", ca.condition, "psni, pini, bpni or btni");
    check->add_option("--mode", ca.mode, "monitored or unmonitored");
    check->add_option("--attacker", ca.attackers, "restrict attacker levels");
    check->add_option("--manifest", ca.manifest, "check every fixture of a manifest against its expected exit code");
    check->add_flag("--all-cells", ca.all_cells, "list holding cells too");
    add_common(check);

    BridgeArgs ba;
    auto* bridge = app.add_subcommand("bridge", "check the operational security invariant on a domain");
    bridge->add_option("program", ba.program)->required();
    bridge->add_option("--memory", ba.memory)->required();
    bridge->add_option("--domain", ba.domain)->required();
    bridge->add_option("--attacker", ba.attackers, "attacker levels (default: all)");
    bridge->add_flag("--mutate-assign", ba.mutate_assign, "disable the monitor's assignment check");
    bridge->add_option("--max-pairs", ba.max_pairs, "sample above this many memory pairs");
    bridge->add_option("--seed", ba.seed, "sampling seed");
    add_common(bridge);

    FuzzArgs fa;
    auto* fuzz = app.add_subcommand("fuzz", "generate programs and check monitored runs under BPNI");
    fuzz->add_option("--seed", fa.cfg.seed);
    fuzz->add_option("--count", fa.cfg.count);
    fuzz->add_option("--max-depth", fa.cfg.max_depth);
    fuzz->add_option("--emit-dir", fa.emit_dir, "write each program as a fixture");
    add_common(fuzz);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) return cmd_run(ra, common);
        if (*check) return cmd_check(ca, common);
        if (*bridge) return cmd_bridge(ba, common);
        if (*fuzz) return cmd_fuzz(fa, common);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
    } catch (const LatticeError& e) {
        std::cerr << "lattice error: " << e.what() << "\n";
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kConfigError;
}
