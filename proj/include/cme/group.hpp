#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cme {

enum class GroupKind { Lattice, Free, Table };

// Element representation:
//   Lattice: d integer coordinates.
//   Free:    reduced word of generator indices, entries in {+-1..+-d}.
//   Table:   single index into the finite group's element list.
struct GroupElement {
    std::vector<int> v;
    bool operator==(const GroupElement& o) const { return v == o.v; }
    bool operator<(const GroupElement& o) const { return v < o.v; }
};

struct GroupSpec {
    GroupKind kind = GroupKind::Lattice;
    int d = 1;  // lattice dimension / free rank
    // Table kind only:
    std::vector<std::vector<int>> table;  // table[a][b] = a*b
    std::vector<int> inverse;
    int identity = 0;
    std::vector<int> generators;  // for word_length on table groups

    void validate() const;  // checks group axioms exhaustively for tables
    GroupElement id() const;
    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement invert(const GroupElement& a) const;
    int word_length(const GroupElement& g) const;
    bool is_identity(const GroupElement& g) const { return g == id(); }
    // All elements of word length <= radius, in canonical sorted order.
    std::vector<GroupElement> ball(int radius, int cap = 16) const;

    // Per-element bound on how much one multiplication by a generator image
    // can change word length (1 for lattice/free generators; computed for
    // arbitrary step sets by callers).
    std::string to_string(const GroupElement& g) const;
};

}  // namespace cme
