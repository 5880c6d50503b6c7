#include "ifc/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ifc {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

namespace {

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

Level level_named(const Lattice& lat, const json& j, const std::string& ctx) {
    if (!j.is_string()) throw ConfigError(ctx + ": level must be a string");
    auto l = lat.find(j.get<std::string>());
    if (!l) throw ConfigError(ctx + ": unknown level '" + j.get<std::string>() + "'");
    return *l;
}

Type parse_type(const std::string& s, const std::string& ctx) {
    if (s == "int") return Type::Int;
    if (s == "string") return Type::Str;
    if (s == "auth") return Type::Auth;
    throw ConfigError(ctx + ": unknown type '" + s + "'");
}

BaseValue parse_value(const json& j, Type t, const Lattice& lat, const std::string& ctx) {
    switch (t) {
        case Type::Int:
            if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
            return BaseValue(j.get<std::int64_t>());
        case Type::Str:
            if (!j.is_string()) throw ConfigError(ctx + ": expected a string");
            return BaseValue(j.get<std::string>());
        case Type::Auth: {
            if (!j.is_object() || !j.contains("auth_level") || !j.contains("purpose"))
                throw ConfigError(ctx + ": expected {\"auth_level\", \"purpose\"}");
            const json& p = j.at("purpose");
            if (!p.is_number_integer() || (p.get<int>() != 0 && p.get<int>() != 1))
                throw ConfigError(ctx + ": purpose must be 0 or 1");
            return BaseValue(Authority{level_named(lat, j.at("auth_level"), ctx), p.get<int>()});
        }
    }
    throw ConfigError(ctx + ": bad type");
}

json value_json(const BaseValue& b, const Lattice& lat) {
    return std::visit(
        [&](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Authority>) return {{"auth_level", lat.name(x.level)}, {"purpose", x.purpose}};
            else return x;
        },
        b.v);
}

}  // namespace

Memory load_memory(std::string_view json_text, const Lattice& lat) {
    json j = parse_json(json_text, "memory");
    if (!j.is_object() || !j.contains("vars") || !j.at("vars").is_object())
        throw ConfigError("memory: expected an object with a \"vars\" object");
    MemoryBuilder b(lat);
    std::vector<VarDecl> decls;
    for (const auto& [name, entry] : j.at("vars").items()) {
        const std::string ctx = "memory variable '" + name + "'";
        if (!entry.is_object() || !entry.contains("type") || !entry.contains("level") || !entry.contains("value"))
            throw ConfigError(ctx + ": expected type, level and value");
        Type t = parse_type(entry.at("type").get<std::string>(), ctx);
        b.var(name, level_named(lat, entry.at("level"), ctx), parse_value(entry.at("value"), t, lat, ctx));
    }
    try {
        return b.build();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("memory: ") + e.what());
    }
}

Memory load_memory_file(const std::string& path, const Lattice& lat) { return load_memory(read_file(path), lat); }

std::string memory_to_json(const Memory& m, const Lattice& lat) {
    json vars = json::object();
    for (std::size_t i = 0; i < m.env().size(); ++i) {
        const VarDecl& d = m.env().at(i);
        vars[d.name] = {{"type", to_string(d.type)}, {"level", lat.name(d.level)}, {"value", value_json(m.store()[i], lat)}};
    }
    return json{{"vars", vars}}.dump();
}

std::string describe(const Memory& m, const Lattice& lat) {
    std::string out;
    for (std::size_t i = 0; i < m.env().size(); ++i) {
        if (i) out += ", ";
        out += m.env().at(i).name + "=" + render(m.store()[i], lat);
    }
    return out;
}

Domain load_domain(std::string_view json_text, const Lattice& lat) {
    json j = parse_json(json_text, "domain");
    if (!j.is_object()) throw ConfigError("domain: expected an object");
    Domain d;
    for (const auto& [name, entry] : j.items()) {
        const std::string ctx = "domain variable '" + name + "'";
        if (!entry.is_object() || entry.size() != 1) throw ConfigError(ctx + ": expected {\"<type>\": [values]}");
        const auto& [tname, values] = *entry.items().begin();
        Type t = parse_type(tname, ctx);
        if (!values.is_array()) throw ConfigError(ctx + ": candidates must be a list");
        auto& out = d.candidates[name];
        for (const auto& v : values) out.push_back(parse_value(v, t, lat, ctx));
    }
    return d;
}

Domain load_domain_file(const std::string& path, const Lattice& lat) { return load_domain(read_file(path), lat); }

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    json j = parse_json(read_file(path), "manifest");
    if (!j.is_array()) throw ConfigError("manifest: expected a list");
    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const json& e, const char* key, bool required) -> std::string {
        if (!e.contains(key)) {
            if (required) throw ConfigError(std::string("manifest entry lacks \"") + key + "\"");
            return {};
        }
        return (base / e.at(key).get<std::string>()).string();
    };
    std::vector<ManifestEntry> out;
    for (const auto& e : j) {
        ManifestEntry m;
        m.program = resolve(e, "program", true);
        m.memory = resolve(e, "memory", true);
        m.domain = resolve(e, "domain", true);
        m.lattice = resolve(e, "lattice", false);
        m.name = e.value("name", std::filesystem::path(m.program).stem().string());
        m.condition = e.value("condition", "bpni");
        m.mode = e.value("mode", "monitored");
        m.expected_exit = e.value("expected_exit", 0);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace ifc
