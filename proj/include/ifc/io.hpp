#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ifc/knowledge.hpp"
#include "ifc/lattice.hpp"
#include "ifc/value.hpp"

namespace ifc {

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

/// `{"vars": {"h": {"type": "int", "level": "H", "value": 1}, ...}}`; auth values are
/// `{"auth_level": "H", "purpose": 1}`.
Memory load_memory(std::string_view json_text, const Lattice& lat);
Memory load_memory_file(const std::string& path, const Lattice& lat);
std::string memory_to_json(const Memory& m, const Lattice& lat);
/// Compact `h=1, l=0` rendering for tables and witnesses.
std::string describe(const Memory& m, const Lattice& lat);

/// `{"h": {"int": [0, 1]}, "s": {"string": ["a"]}, "k": {"auth": [{...}]}}`
Domain load_domain(std::string_view json_text, const Lattice& lat);
Domain load_domain_file(const std::string& path, const Lattice& lat);

struct ManifestEntry {
    std::string name;
    std::string program;  // paths resolved against the manifest's directory
    std::string memory;
    std::string domain;
    std::string lattice;  // optional; empty means the caller's default
    std::string condition;
    std::string mode;
    int expected_exit = 0;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);

}  // namespace ifc
