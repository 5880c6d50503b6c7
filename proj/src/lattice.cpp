#include "ifc/lattice.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ifc {

namespace {

std::string pair_text(const std::string& a, const std::string& b) {
    return "(" + a + ", " + b + ")";
}

}  // namespace

Lattice::Lattice(std::vector<std::string> levels, const std::vector<Edge>& order,
                 const std::string& bottom, const std::string& top)
    : names_(std::move(levels)) {
    if (names_.empty()) throw LatticeError("lattice declares no levels");
    if (names_.size() > 0xFFFF) throw LatticeError("too many levels");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        const auto& n = names_[i];
        if (n.empty()) throw LatticeError("empty level name");
        if (n == "⊥" || n == "⊤") throw LatticeError("level name '" + n + "' is reserved as an alias");
        if (!index_.emplace(n, Level{static_cast<std::uint16_t>(i)}).second)
            throw LatticeError("duplicate level '" + n + "'");
    }
    const std::size_t n = names_.size();
    leq_.assign(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) leq_[i][i] = 1;

    auto lookup = [&](const std::string& s, const char* what) {
        auto it = index_.find(s);
        if (it == index_.end())
            throw LatticeError(std::string(what) + " refers to undeclared level '" + s + "'");
        return it->second.id;
    };
    for (const auto& [a, b] : order) leq_[lookup(a, "order edge")][lookup(b, "order edge")] = 1;

    // Warshall closure; iteration order is fixed so the result is deterministic.
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (leq_[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (leq_[k][j]) leq_[i][j] = 1;

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (leq_[i][j] && leq_[j][i])
                throw LatticeError("cyclic order between distinct levels " + pair_text(names_[i], names_[j]));

    if (bottom.empty()) throw LatticeError("missing bottom");
    if (top.empty()) throw LatticeError("missing top");
    bottom_ = Level{lookup(bottom, "bottom")};
    top_ = Level{lookup(top, "top")};
    for (std::size_t i = 0; i < n; ++i) {
        if (!leq_[bottom_.id][i])
            throw LatticeError("incorrect bottom: no order for pair " + pair_text(bottom, names_[i]));
        if (!leq_[i][top_.id])
            throw LatticeError("incorrect top: no order for pair " + pair_text(names_[i], top));
    }

    join_.assign(n, std::vector<Level>(n));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            std::vector<std::size_t> upper;
            for (std::size_t u = 0; u < n; ++u)
                if (leq_[a][u] && leq_[b][u]) upper.push_back(u);
            std::optional<std::size_t> least;
            for (std::size_t u : upper) {
                bool below_all = true;
                for (std::size_t v : upper) below_all = below_all && leq_[u][v];
                if (below_all) least = u;
            }
            if (!least) throw LatticeError("no unique join for pair " + pair_text(names_[a], names_[b]));
            join_[a][b] = Level{static_cast<std::uint16_t>(*least)};
        }
    }
}

Lattice Lattice::chain(const std::vector<std::string>& names) {
    std::vector<Edge> order;
    for (std::size_t i = 0; i + 1 < names.size(); ++i) order.emplace_back(names[i], names[i + 1]);
    if (names.empty()) throw LatticeError("lattice declares no levels");
    return Lattice(names, order, names.front(), names.back());
}

void Lattice::check(Level l) const {
    if (l.id >= names_.size()) throw LatticeError("level id " + std::to_string(l.id) + " is not declared");
}

bool Lattice::flows_to(Level a, Level b) const {
    check(a);
    check(b);
    return leq_[a.id][b.id] != 0;
}

Level Lattice::join(Level a, Level b) const {
    check(a);
    check(b);
    return join_[a.id][b.id];
}

std::vector<Level> Lattice::levels() const {
    std::vector<Level> out;
    for (std::size_t i = 0; i < names_.size(); ++i) out.push_back(Level{static_cast<std::uint16_t>(i)});
    return out;
}

const std::string& Lattice::name(Level l) const {
    check(l);
    return names_[l.id];
}

std::optional<Level> Lattice::find(std::string_view name) const {
    if (name == "⊥") return bottom_;
    if (name == "⊤") return top_;
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Level Lattice::level(std::string_view name) const {
    if (auto l = find(name)) return *l;
    throw LatticeError("undeclared level '" + std::string(name) + "'");
}

bool Lattice::operator==(const Lattice& other) const {
    return names_ == other.names_ && leq_ == other.leq_ && bottom_ == other.bottom_ && top_ == other.top_;
}

Lattice load_lattice(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw LatticeError(std::string("lattice file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw LatticeError("lattice file must be a JSON object");
    try {
        auto levels = j.at("levels").get<std::vector<std::string>>();
        std::vector<Lattice::Edge> order;
        if (j.contains("order")) {
            for (const auto& e : j.at("order")) {
                if (!e.is_array() || e.size() != 2) throw LatticeError("order edges must be [lower, upper] pairs");
                order.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
            }
        }
        std::string bottom = j.contains("bottom") ? j.at("bottom").get<std::string>() : "";
        std::string top = j.contains("top") ? j.at("top").get<std::string>() : "";
        return Lattice(std::move(levels), order, bottom, top);
    } catch (const nlohmann::json::exception& e) {
        throw LatticeError(std::string("malformed lattice file: ") + e.what());
    }
}

Lattice load_lattice_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LatticeError("cannot open lattice file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_lattice(ss.str());
}

}  // namespace ifc
