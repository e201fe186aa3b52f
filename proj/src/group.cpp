#include "cme/group.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

namespace cme {

void GroupSpec::validate() const {
    if (kind == GroupKind::Table) {
        const int n = static_cast<int>(table.size());
        if (n == 0) throw std::invalid_argument("empty group table");
        for (const auto& row : table) {
            if (static_cast<int>(row.size()) != n) throw std::invalid_argument("group table not square");
            for (int x : row)
                if (x < 0 || x >= n) throw std::invalid_argument("group table entry out of range");
        }
        if (identity < 0 || identity >= n) throw std::invalid_argument("identity index out of range");
        if (static_cast<int>(inverse.size()) != n) throw std::invalid_argument("inverse table size mismatch");
        for (int a = 0; a < n; ++a) {
            if (table[a][identity] != a || table[identity][a] != a)
                throw std::invalid_argument("identity axiom fails");
            if (table[a][inverse[a]] != identity || table[inverse[a]][a] != identity)
                throw std::invalid_argument("inverse axiom fails");
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    if (table[table[a][b]][c] != table[a][table[b][c]])
                        throw std::invalid_argument("associativity fails");
        }
    } else if (d < 1) {
        throw std::invalid_argument("group rank/dimension must be >= 1");
    }
}

GroupElement GroupSpec::id() const {
    switch (kind) {
        case GroupKind::Lattice: return GroupElement{std::vector<int>(d, 0)};
        case GroupKind::Free: return GroupElement{{}};
        case GroupKind::Table: return GroupElement{{identity}};
    }
    throw std::logic_error("bad kind");
}

GroupElement GroupSpec::multiply(const GroupElement& a, const GroupElement& b) const {
    switch (kind) {
        case GroupKind::Lattice: {
            GroupElement r = a;
            for (int i = 0; i < d; ++i) r.v[i] += b.v[i];
            return r;
        }
        case GroupKind::Free: {
            GroupElement r = a;
            for (int s : b.v) {
                if (!r.v.empty() && r.v.back() == -s)
                    r.v.pop_back();
                else
                    r.v.push_back(s);
            }
            return r;
        }
        case GroupKind::Table: return GroupElement{{table[a.v[0]][b.v[0]]}};
    }
    throw std::logic_error("bad kind");
}

GroupElement GroupSpec::invert(const GroupElement& a) const {
    switch (kind) {
        case GroupKind::Lattice: {
            GroupElement r = a;
            for (int& x : r.v) x = -x;
            return r;
        }
        case GroupKind::Free: {
            GroupElement r;
            r.v.assign(a.v.rbegin(), a.v.rend());
            for (int& x : r.v) x = -x;
            return r;
        }
        case GroupKind::Table: return GroupElement{{inverse[a.v[0]]}};
    }
    throw std::logic_error("bad kind");
}

int GroupSpec::word_length(const GroupElement& g) const {
    switch (kind) {
        case GroupKind::Lattice: {
            int s = 0;
            for (int x : g.v) s += std::abs(x);
            return s;
        }
        case GroupKind::Free: return static_cast<int>(g.v.size());
        case GroupKind::Table: {
            if (g.v[0] == identity) return 0;
            // BFS in the Cayley graph of the declared generators.
            std::vector<int> dist(table.size(), -1);
            std::vector<int> frontier{identity};
            dist[identity] = 0;
            while (!frontier.empty()) {
                std::vector<int> next;
                for (int a : frontier)
                    for (int s : generators)
                        for (int b : {table[a][s], table[a][inverse[s]]})
                            if (dist[b] < 0) {
                                dist[b] = dist[a] + 1;
                                next.push_back(b);
                            }
                frontier = std::move(next);
            }
            if (dist[g.v[0]] < 0) throw std::invalid_argument("element unreachable from generators");
            return dist[g.v[0]];
        }
    }
    throw std::logic_error("bad kind");
}

std::vector<GroupElement> GroupSpec::ball(int radius, int cap) const {
    if (radius < 0) throw std::invalid_argument("negative radius");
    if (kind == GroupKind::Free && radius > cap) {
        double est = 1;
        for (int k = 1; k <= radius; ++k) est += 2.0 * d * std::pow(2.0 * d - 1, k - 1);
        throw std::length_error("free-group ball radius " + std::to_string(radius) +
                                " exceeds cap (approx. " + std::to_string((long long)est) + " elements)");
    }
    std::set<GroupElement> seen;
    std::vector<GroupElement> frontier{id()};
    seen.insert(id());
    std::vector<GroupElement> gens;
    if (kind == GroupKind::Table) {
        for (int s : generators) {
            gens.push_back(GroupElement{{s}});
            gens.push_back(GroupElement{{inverse[s]}});
        }
    } else {
        for (int i = 0; i < d; ++i) {
            GroupElement plus, minus;
            if (kind == GroupKind::Lattice) {
                plus.v.assign(d, 0);
                plus.v[i] = 1;
                minus.v.assign(d, 0);
                minus.v[i] = -1;
            } else {
                plus.v = {i + 1};
                minus.v = {-(i + 1)};
            }
            gens.push_back(plus);
            gens.push_back(minus);
        }
    }
    for (int r = 1; r <= radius; ++r) {
        std::vector<GroupElement> next;
        for (const auto& g : frontier)
            for (const auto& s : gens) {
                GroupElement h = multiply(g, s);
                if (word_length(h) == r && seen.insert(h).second) next.push_back(h);
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

std::string GroupSpec::to_string(const GroupElement& g) const {
    if (kind == GroupKind::Table) return std::to_string(g.v[0]);
    std::string out = "[";
    for (size_t i = 0; i < g.v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(g.v[i]);
    }
    return out + "]";
}

}  // namespace cme
