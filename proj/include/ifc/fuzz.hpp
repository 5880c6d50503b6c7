#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ifc/ast.hpp"
#include "ifc/conditions.hpp"
#include "ifc/knowledge.hpp"
#include "ifc/lattice.hpp"

namespace ifc {

struct FuzzVar {
    std::string name;
    std::string level;
    std::vector<std::int64_t> domain;  // candidate initial values; one value pins the variable
};

struct FuzzWeights {
    unsigned skip = 2, assign = 6, seq = 5, cond = 4, loop = 2, tini = 3, declassify = 3, eval = 1;
};

struct FuzzConfig {
    std::uint64_t seed = 7;
    std::size_t count = 500;
    int max_depth = 4;
    std::size_t budget = 10000;
    /// Int variables; `rootauth` is always added.
    std::vector<FuzzVar> vars = {
        {"l", "L", {0}}, {"l2", "L", {0}}, {"m", "M", {0, 1}}, {"h", "H", {0, 1}}, {"h2", "H", {0, 1}},
    };
    /// Levels used for tini/declassify targets and attenuations.
    std::vector<std::string> levels = {"L", "M", "H"};
    FuzzWeights weights;
};

struct FuzzCase {
    std::size_t index = 0;
    CmdPtr program;
    std::string source;
    Memory memory;
    Domain domain;
};

/// Deterministic random programs over the configured variable pool. All draws are
/// `rng() % n` on a seeded mt19937_64, so streams are identical across platforms.
class ProgramGenerator {
public:
    ProgramGenerator(const Lattice& lat, FuzzConfig cfg);

    FuzzCase next();

    CmdPtr command(int depth, bool allow_eval = true);
    ExprPtr int_expr(int depth);
    ExprPtr auth_expr(bool tini_only);
    Memory memory();
    const Domain& domain() const { return domain_; }
    std::uint64_t draw(std::uint64_t n) { return rng_() % n; }

private:
    std::string pick_var();
    Level pick_level();
    std::string fresh_tag();

    const Lattice& lat_;
    FuzzConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<Level> levels_;
    Domain domain_;
    std::size_t produced_ = 0;
    std::size_t tags_ = 0;
};

struct FuzzSummary {
    std::uint64_t seed = 0;
    std::size_t programs = 0;
    std::size_t secure = 0, insecure = 0, inconclusive = 0;
    std::size_t terminated = 0, blocked = 0, budget = 0, diverged = 0;
    std::size_t with_tini = 0, with_declassify = 0, with_eval = 0;
    std::vector<std::size_t> insecure_cases;

    std::string text() const;
};

/// Generates cfg.count programs, checks each monitored run under BPNI, and optionally
/// writes every case plus a manifest to `emit_dir`.
FuzzSummary run_fuzz(const Lattice& lat, const FuzzConfig& cfg, const std::string& emit_dir = {});

}  // namespace ifc
