#pragma once

#include "cme/group.hpp"
#include "cme/potential.hpp"
#include "cme/shift.hpp"

namespace cme {

// Skew product T(x,g) = (theta x, g psi(x)) with a depth-1 step function psi.
struct ExtensionSpec {
    ShiftSpec shift;
    PotentialSpec potential;
    GroupSpec group;
    std::vector<GroupElement> psi;  // per symbol

    void validate() const;
    // Whether {psi(a)} generates a ball of the given radius as a semigroup
    // (transitivity prerequisite; heuristic, reported not enforced).
    bool generates_ball(int radius) const;
    GroupElement psi_of(int symbol) const { return psi.at(symbol); }
};

// Cylinder of X = Sigma x G: [word, g]. Empty word means the whole slice X_g.
struct XCylinder {
    Word word;
    GroupElement g;
    bool operator<(const XCylinder& o) const {
        if (word != o.word) return word < o.word;
        return g < o.g;
    }
    bool operator==(const XCylinder& o) const { return word == o.word && g == o.g; }
};

// psi_n along a word: psi(w_1) psi(w_2) ... psi(w_n).
GroupElement psi_n(const ExtensionSpec& e, const Word& w);

// One application of T to a cylinder point representative.
std::pair<Word, GroupElement> step(const ExtensionSpec& e, const Word& x, const GroupElement& g);

struct SymmetryReport {
    bool dagger_valid = false;
    bool psi_compatible = false;        // psi(v-dagger) = psi(v)^{-1}
    bool is_symmetric_triple = false;   // all structural conditions
    bool is_symmetric_extension = false;
    double distortion_bound = 1.0;      // sup Phi_n(x)/Phi_n(y) over w vs w-dagger
    double ratio_growth = 0.0;          // per-step log growth of the worst ratio
};

SymmetryReport check_symmetric(const ExtensionSpec& e);

}  // namespace cme
