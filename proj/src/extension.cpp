#include "cme/extension.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cme {

void ExtensionSpec::validate() const {
    shift.validate();
    potential.validate(shift);
    group.validate();
    if (static_cast<int>(psi.size()) != shift.alphabet_size())
        throw std::invalid_argument("psi must be defined on every symbol");
    if (group.kind == GroupKind::Lattice)
        for (const auto& g : psi)
            if (static_cast<int>(g.v.size()) != group.d)
                throw std::invalid_argument("psi step has wrong lattice dimension");
}

bool ExtensionSpec::generates_ball(int radius) const {
    std::set<GroupElement> reached{group.id()};
    size_t prev = 0;
    while (reached.size() != prev) {
        prev = reached.size();
        std::vector<GroupElement> batch(reached.begin(), reached.end());
        for (const auto& g : batch)
            for (const auto& s : psi) {
                GroupElement h = group.multiply(g, s);
                if (group.word_length(h) <= radius) reached.insert(h);
            }
    }
    for (const auto& g : group.ball(radius))
        if (!reached.count(g)) return false;
    return true;
}

GroupElement psi_n(const ExtensionSpec& e, const Word& w) {
    GroupElement g = e.group.id();
    for (int s : w) g = e.group.multiply(g, e.psi_of(s));
    return g;
}

std::pair<Word, GroupElement> step(const ExtensionSpec& e, const Word& x, const GroupElement& g) {
    if (x.size() < 2) throw std::invalid_argument("need at least 2 symbols to shift a representative");
    Word y(x.begin() + 1, x.end());
    return {y, e.group.multiply(g, e.psi_of(x[0]))};
}

SymmetryReport check_symmetric(const ExtensionSpec& e) {
    if (!e.shift.dagger) throw std::logic_error("symmetry check requires a dagger");
    SymmetryReport r;
    r.dagger_valid = check_dagger(e.shift);
    r.psi_compatible = true;
    for (int a = 0; a < e.shift.alphabet_size(); ++a) {
        GroupElement lhs = e.psi_of((*e.shift.dagger)[a]);
        GroupElement rhs = e.group.invert(e.psi_of(a));
        if (!(lhs == rhs)) r.psi_compatible = false;
    }
    r.is_symmetric_triple = r.dagger_valid && r.psi_compatible;

    // sup over words of Phi(w)/Phi(w-dagger). For a locally constant depth-m
    // potential the per-step worst ratio stabilizes by length 2m; a strictly
    // positive growth rate means the sup is infinite.
    const int m = e.potential.depth;
    double best = 1.0, growth = 0.0;
    double prev_log = 0.0;
    for (int len = m; len <= 2 * m + 2; ++len) {
        double worst = 0.0;
        for (const auto& w : words_of_length(e.shift, len)) {
            Word wd = dagger_word(e.shift, w);
            if (!is_admissible(e.shift, wd)) continue;
            int n = len - m + 1;
            double lr = log_phi_n(e.potential, e.shift, w, n) - log_phi_n(e.potential, e.shift, wd, n);
            worst = std::max(worst, lr);
        }
        if (len > m) growth = worst - prev_log;
        prev_log = worst;
        best = std::max(best, std::exp(worst));
    }
    r.ratio_growth = growth;
    r.distortion_bound = best;
    r.is_symmetric_extension = r.is_symmetric_triple && growth <= 1e-12;
    return r;
}

}  // namespace cme
