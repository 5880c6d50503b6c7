#pragma once

#include <string>
#include <vector>

#include "ifc/bridge.hpp"
#include "ifc/conditions.hpp"
#include "ifc/io.hpp"
#include "ifc/knowledge.hpp"
#include "ifc/monitor.hpp"
#include "ifc/syntax.hpp"

namespace testing {

inline const ifc::Lattice& lmh() {
    static const ifc::Lattice lat = ifc::Lattice::chain({"L", "M", "H"});
    return lat;
}

inline ifc::Level L() { return lmh().level("L"); }
inline ifc::Level M() { return lmh().level("M"); }
inline ifc::Level H() { return lmh().level("H"); }

inline ifc::CmdPtr prog(const std::string& text) { return ifc::parse_program(text, lmh()); }

/// l:L, m:M, h:H ints (plus rootauth).
inline ifc::Memory lmh_memory(std::int64_t l, std::int64_t m, std::int64_t h) {
    return ifc::MemoryBuilder(lmh()).var("l", L(), l).var("m", M(), m).var("h", H(), h).build();
}

inline ifc::Domain binary(const std::vector<std::string>& vars) {
    ifc::Domain d;
    for (const auto& x : vars) d.candidates[x] = {ifc::BaseValue(0), ifc::BaseValue(1)};
    return d;
}

inline std::string corpus(const std::string& file) { return std::string(IFC_CORPUS_DIR) + "/" + file; }

inline std::vector<std::string> render_all(const std::vector<ifc::Event>& t) {
    std::vector<std::string> out;
    for (const auto& e : t) out.push_back(ifc::render(e, lmh()));
    return out;
}

}  // namespace testing
