#include "cme/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cme {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

Word parse_word(const ShiftSpec& shift, const std::string& key, const std::string& field) {
    Word w;
    for (const std::string& name : split(key, ',')) {
        try {
            w.push_back(shift.symbol_id(name));
        } catch (const std::exception&) {
            throw ConfigError(field + "." + key, "unknown symbol '" + name + "'");
        }
    }
    if (w.empty()) throw ConfigError(field + "." + key, "empty word key");
    return w;
}

Rational parse_rational(const std::string& s, const std::string& field) {
    auto parts = split(s, '/');
    if (parts.size() != 1 && parts.size() != 2)
        throw ConfigError(field, "expected 'p/q' rational string");
    try {
        return Rational(boost::multiprecision::cpp_int(parts[0]),
                        parts.size() == 2 ? boost::multiprecision::cpp_int(parts[1])
                                          : boost::multiprecision::cpp_int(1));
    } catch (const std::exception&) {
        throw ConfigError(field, "unparseable rational '" + s + "'");
    }
}

const json& require(const json& j, const std::string& key, const std::string& field) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(field.empty() ? key : field + "." + key, "missing key");
    return *it;
}

GroupElement parse_element(const GroupSpec& g, const json& lit, const std::string& field) {
    GroupElement out;
    if (g.kind == GroupKind::Table) {
        if (!lit.is_number_integer()) throw ConfigError(field, "table element must be an index");
        out.v = {lit.get<int>()};
        return out;
    }
    if (!lit.is_array()) throw ConfigError(field, "lattice/free element must be an int array");
    out.v = lit.get<std::vector<int>>();
    if (g.kind == GroupKind::Lattice && static_cast<int>(out.v.size()) != g.d)
        throw ConfigError(field, "lattice element needs exactly d coordinates");
    if (g.kind == GroupKind::Free)
        for (int s : out.v)
            if (s == 0 || std::abs(s) > g.d) throw ConfigError(field, "free letter out of range");
    return out;
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SystemConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& ex) {
        throw ConfigError("(root)", std::string("invalid JSON: ") + ex.what());
    }
    SystemConfig cfg;
    cfg.name = j.value("name", "");
    cfg.family = j.value("family", "generic");
    if (cfg.family != "polya" && cfg.family != "free" && cfg.family != "generic")
        throw ConfigError("family", "must be polya, free, or generic");

    // shift
    const json& js = require(j, "shift", "");
    ShiftSpec& shift = cfg.extension.shift;
    shift.names = require(js, "symbols", "shift").get<std::vector<std::string>>();
    shift.adjacency = require(js, "adjacency", "shift").get<std::vector<std::vector<int>>>();
    if (js.contains("dagger")) {
        std::vector<int> dag(shift.names.size(), -1);
        for (auto& [from, to] : js.at("dagger").items()) {
            try {
                dag[shift.symbol_id(from)] = shift.symbol_id(to.get<std::string>());
            } catch (const std::exception&) {
                throw ConfigError("shift.dagger." + from, "unknown symbol");
            }
        }
        for (int v : dag)
            if (v < 0) throw ConfigError("shift.dagger", "involution must cover every symbol");
        shift.dagger = dag;
    }
    try {
        shift.validate();
    } catch (const std::exception& ex) {
        throw ConfigError("shift", ex.what());
    }

    // potential
    const json& jp = require(j, "potential", "");
    PotentialSpec& pot = cfg.extension.potential;
    pot.depth = require(jp, "depth", "potential").get<int>();
    pot.metric_r = jp.value("r", 0.5);
    for (auto& [key, val] : require(jp, "values", "potential").items()) {
        Word w = parse_word(shift, key, "potential.values");
        if (val.is_string()) {
            Rational q = parse_rational(val.get<std::string>(), "potential.values." + key);
            pot.exact_values[w] = q;
            pot.values[w] = static_cast<double>(q);
        } else if (val.is_number()) {
            pot.values[w] = val.get<double>();
        } else {
            throw ConfigError("potential.values." + key, "value must be a number or 'p/q'");
        }
    }
    try {
        pot.validate(shift);
    } catch (const std::exception& ex) {
        throw ConfigError("potential", ex.what());
    }

    // group
    const json& jg = require(j, "group", "");
    GroupSpec& grp = cfg.extension.group;
    std::string kind = require(jg, "kind", "group").get<std::string>();
    if (kind == "lattice")
        grp.kind = GroupKind::Lattice;
    else if (kind == "free")
        grp.kind = GroupKind::Free;
    else if (kind == "table")
        grp.kind = GroupKind::Table;
    else
        throw ConfigError("group.kind", "must be lattice, free, or table");
    if (grp.kind == GroupKind::Table) {
        grp.table = require(jg, "table", "group").get<std::vector<std::vector<int>>>();
        grp.inverse = require(jg, "inverse", "group").get<std::vector<int>>();
        grp.identity = jg.value("identity", 0);
        if (jg.contains("generators")) grp.generators = jg.at("generators").get<std::vector<int>>();
    } else {
        grp.d = require(jg, "d", "group").get<int>();
        if (grp.d < 1) throw ConfigError("group.d", "must be positive");
    }
    try {
        grp.validate();
    } catch (const std::exception& ex) {
        throw ConfigError("group", ex.what());
    }

    // psi
    const json& jpsi = require(j, "psi", "");
    cfg.extension.psi.assign(shift.alphabet_size(), GroupElement{});
    std::vector<bool> seen(shift.alphabet_size(), false);
    for (auto& [sym, lit] : jpsi.items()) {
        int id;
        try {
            id = shift.symbol_id(sym);
        } catch (const std::exception&) {
            throw ConfigError("psi." + sym, "unknown symbol");
        }
        cfg.extension.psi[id] = parse_element(grp, lit, "psi." + sym);
        seen[id] = true;
    }
    for (int a = 0; a < shift.alphabet_size(); ++a)
        if (!seen[a]) throw ConfigError("psi", "missing step for symbol '" + shift.names[a] + "'");

    // numerics
    if (j.contains("numerics")) {
        const json& jn = j.at("numerics");
        NumericsConfig& n = cfg.numerics;
        n.N = jn.value("N", n.N);
        n.depth = jn.value("depth", n.depth);
        n.ball_radius = jn.value("ball_radius", n.ball_radius);
        if (jn.contains("schedule")) n.schedule = jn.at("schedule").get<std::vector<double>>();
        n.seed = jn.value("seed", n.seed);
        n.exact = jn.value("exact", n.exact);
        n.tol = jn.value("tol", n.tol);
        if (n.N < 2) throw ConfigError("numerics.N", "must be at least 2");
        if (n.depth < 1 || n.ball_radius < 0)
            throw ConfigError("numerics", "depth must be >= 1 and ball_radius >= 0");
    }
    if (cfg.numerics.exact && pot.exact_values.size() != pot.values.size())
        throw ConfigError("numerics.exact", "exact mode needs every potential value as 'p/q'");

    try {
        cfg.extension.validate();
    } catch (const std::exception& ex) {
        throw ConfigError("(extension)", ex.what());
    }

    cfg.config_hash = fnv1a_hex(json::parse(text).dump());
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("(file)", "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace cme
