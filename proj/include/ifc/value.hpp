#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ifc/lattice.hpp"

namespace ifc {

enum class Type { Int, Str, Auth };

const char* to_string(Type t);

/// Authority capability ⌊level, purpose⌋; purpose 0 is usable for tini blocks only.
struct Authority {
    Level level;
    int purpose = 1;
    bool operator==(const Authority&) const = default;
};

struct BaseValue {
    std::variant<std::int64_t, std::string, Authority> v;

    BaseValue() : v(std::int64_t{0}) {}
    BaseValue(std::int64_t n) : v(n) {}
    BaseValue(int n) : v(static_cast<std::int64_t>(n)) {}
    BaseValue(std::string s) : v(std::move(s)) {}
    BaseValue(const char* s) : v(std::string(s)) {}
    BaseValue(Authority a) : v(a) {}

    Type type() const { return static_cast<Type>(v.index()); }
    bool operator==(const BaseValue&) const = default;
};

std::string render(const BaseValue& b, const Lattice& lat);

struct LabeledValue {
    BaseValue base;
    Level level;
    bool operator==(const LabeledValue&) const = default;
};

struct VarDecl {
    std::string name;
    Type type;
    Level level;
};

/// Static typing and security environment Γ; shared by every memory of a run.
class TypeEnv {
public:
    TypeEnv() = default;
    explicit TypeEnv(std::vector<VarDecl> vars);

    std::optional<std::size_t> index(const std::string& name) const;
    const VarDecl& at(std::size_t i) const { return vars_[i]; }
    const std::vector<VarDecl>& vars() const { return vars_; }
    std::size_t size() const { return vars_.size(); }
    bool operator==(const TypeEnv& o) const;

private:
    std::vector<VarDecl> vars_;  // sorted by name
    std::map<std::string, std::size_t> index_;
};

/// Store plus environment; store[i] always has type env.at(i).type.
class Memory {
public:
    Memory() = default;
    Memory(std::shared_ptr<const TypeEnv> env, std::vector<BaseValue> store);

    const TypeEnv& env() const { return *env_; }
    const std::shared_ptr<const TypeEnv>& env_ptr() const { return env_; }
    const std::vector<BaseValue>& store() const { return store_; }

    bool has(const std::string& x) const { return env_->index(x).has_value(); }
    const BaseValue& get(const std::string& x) const;
    Level level_of(const std::string& x) const;
    Type type_of(const std::string& x) const;
    void set(const std::string& x, BaseValue v);
    void set(std::size_t i, BaseValue v);

    bool operator==(const Memory& o) const;

private:
    std::shared_ptr<const TypeEnv> env_;
    std::vector<BaseValue> store_;
};

/// Builds a memory from (name, type, level, value) entries. `rootauth` is added as
/// ⌊⊤,1⌋ at ⊥ unless supplied.
class MemoryBuilder {
public:
    explicit MemoryBuilder(const Lattice& lat) : lat_(lat) {}
    MemoryBuilder& var(const std::string& name, Level level, BaseValue value);
    Memory build() const;

private:
    const Lattice& lat_;
    std::vector<std::pair<VarDecl, BaseValue>> entries_;
};

struct Event {
    struct Empty {
        bool operator==(const Empty&) const = default;
    };
    struct Assign {
        std::string var;
        BaseValue value;
        bool operator==(const Assign&) const = default;
    };
    struct Declassify {
        std::string var;
        BaseValue value;
        Level auth, from, to;
        bool operator==(const Declassify&) const = default;
    };
    struct TiniExit {
        std::string tag;
        Level auth, from, to;
        bool operator==(const TiniExit&) const = default;
    };

    std::variant<Empty, Assign, Declassify, TiniExit> e;

    bool operator==(const Event&) const = default;

    bool is_empty() const { return std::holds_alternative<Empty>(e); }
    bool is_declassify() const { return std::holds_alternative<Declassify>(e); }
    bool is_tini_exit() const { return std::holds_alternative<TiniExit>(e); }
};

/// `eps`, `a(x,v)`, `d(x,v,lauth,lfrom,lto)`, `t(tag,lauth,lfrom,lto)`.
std::string render(const Event& ev, const Lattice& lat);

struct TimedEvent {
    std::uint64_t ts;
    Event event;
    bool operator==(const TimedEvent&) const = default;
};

}  // namespace ifc
