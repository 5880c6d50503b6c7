#include "ifc/value.hpp"

#include <algorithm>
#include <stdexcept>

namespace ifc {

const char* to_string(Type t) {
    switch (t) {
        case Type::Int: return "int";
        case Type::Str: return "string";
        case Type::Auth: return "auth";
    }
    return "?";
}

std::string render(const BaseValue& b, const Lattice& lat) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
            else if constexpr (std::is_same_v<T, std::string>) {
                std::string out = "\"";
                for (char c : x) {
                    if (c == '"' || c == '\\') out += '\\', out += c;
                    else if (c == '\n') out += "\\n";
                    else out += c;
                }
                return out + "\"";
            } else {
                return "<" + lat.name(x.level) + "," + std::to_string(x.purpose) + ">";
            }
        },
        b.v);
}

TypeEnv::TypeEnv(std::vector<VarDecl> vars) : vars_(std::move(vars)) {
    std::sort(vars_.begin(), vars_.end(), [](const VarDecl& a, const VarDecl& b) { return a.name < b.name; });
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (!index_.emplace(vars_[i].name, i).second)
            throw std::invalid_argument("variable '" + vars_[i].name + "' declared twice");
}

std::optional<std::size_t> TypeEnv::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool TypeEnv::operator==(const TypeEnv& o) const {
    if (vars_.size() != o.vars_.size()) return false;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name != o.vars_[i].name || vars_[i].type != o.vars_[i].type || vars_[i].level != o.vars_[i].level)
            return false;
    return true;
}

Memory::Memory(std::shared_ptr<const TypeEnv> env, std::vector<BaseValue> store)
    : env_(std::move(env)), store_(std::move(store)) {
    if (store_.size() != env_->size()) throw std::invalid_argument("store does not cover the environment");
    for (std::size_t i = 0; i < store_.size(); ++i)
        if (store_[i].type() != env_->at(i).type)
            throw std::invalid_argument("variable '" + env_->at(i).name + "' holds a value of the wrong type");
}

const BaseValue& Memory::get(const std::string& x) const {
    auto i = env_->index(x);
    if (!i) throw std::out_of_range("unknown variable '" + x + "'");
    return store_[*i];
}

Level Memory::level_of(const std::string& x) const {
    auto i = env_->index(x);
    if (!i) throw std::out_of_range("unknown variable '" + x + "'");
    return env_->at(*i).level;
}

Type Memory::type_of(const std::string& x) const {
    auto i = env_->index(x);
    if (!i) throw std::out_of_range("unknown variable '" + x + "'");
    return env_->at(*i).type;
}

void Memory::set(const std::string& x, BaseValue v) {
    auto i = env_->index(x);
    if (!i) throw std::out_of_range("unknown variable '" + x + "'");
    set(*i, std::move(v));
}

void Memory::set(std::size_t i, BaseValue v) {
    if (v.type() != env_->at(i).type)
        throw std::invalid_argument("type mismatch storing into '" + env_->at(i).name + "'");
    store_[i] = std::move(v);
}

bool Memory::operator==(const Memory& o) const {
    if (env_ != o.env_ && !(env_ && o.env_ && *env_ == *o.env_)) return false;
    return store_ == o.store_;
}

MemoryBuilder& MemoryBuilder::var(const std::string& name, Level level, BaseValue value) {
    entries_.push_back({VarDecl{name, value.type(), level}, std::move(value)});
    return *this;
}

Memory MemoryBuilder::build() const {
    auto entries = entries_;
    bool has_root = std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.first.name == "rootauth"; });
    if (!has_root)
        entries.push_back({VarDecl{"rootauth", Type::Auth, lat_.bottom()}, BaseValue(Authority{lat_.top(), 1})});
    std::vector<VarDecl> decls;
    for (const auto& e : entries) decls.push_back(e.first);
    auto env = std::make_shared<const TypeEnv>(decls);
    std::vector<BaseValue> store(env->size());
    for (const auto& e : entries) store[*env->index(e.first.name)] = e.second;
    return Memory(env, std::move(store));
}

std::string render(const Event& ev, const Lattice& lat) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Event::Empty>) return "eps";
            else if constexpr (std::is_same_v<T, Event::Assign>) return "a(" + x.var + "," + render(x.value, lat) + ")";
            else if constexpr (std::is_same_v<T, Event::Declassify>)
                return "d(" + x.var + "," + render(x.value, lat) + "," + lat.name(x.auth) + "," + lat.name(x.from) +
                       "," + lat.name(x.to) + ")";
            else
                return "t(" + x.tag + "," + lat.name(x.auth) + "," + lat.name(x.from) + "," + lat.name(x.to) + ")";
        },
        ev.e);
}

}  // namespace ifc
