#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ifc {

/// Interned security level; only meaningful together with the Lattice that issued it.
struct Level {
    std::uint16_t id = 0;
    auto operator<=>(const Level&) const = default;
};

/// Raised for malformed lattice declarations and for undeclared level names.
class LatticeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Finite security lattice: declared levels, the reflexive-transitive closure of the
 * declared order edges, and a precomputed join table. Immutable once built.
 */
class Lattice {
public:
    using Edge = std::pair<std::string, std::string>;

    Lattice(std::vector<std::string> levels, const std::vector<Edge>& order,
            const std::string& bottom, const std::string& top);

    /// Chain `names[0] ⊑ names[1] ⊑ ...`.
    static Lattice chain(const std::vector<std::string>& names);

    bool flows_to(Level a, Level b) const;
    Level join(Level a, Level b) const;

    Level bottom() const { return bottom_; }
    Level top() const { return top_; }

    std::size_t size() const { return names_.size(); }
    std::vector<Level> levels() const;
    const std::string& name(Level l) const;

    /// Resolves a level name; "⊥" and "⊤" are aliases for bottom and top.
    std::optional<Level> find(std::string_view name) const;
    /// As find(), but throws LatticeError for undeclared names.
    Level level(std::string_view name) const;

    bool operator==(const Lattice& other) const;

private:
    void check(Level l) const;

    std::vector<std::string> names_;
    std::unordered_map<std::string, Level> index_;
    std::vector<std::vector<char>> leq_;
    std::vector<std::vector<Level>> join_;
    Level bottom_;
    Level top_;
};

/// Parses `{"levels": [...], "order": [[a,b],...], "bottom": x, "top": y}`.
Lattice load_lattice(std::string_view json_text);
Lattice load_lattice_file(const std::string& path);

}  // namespace ifc
