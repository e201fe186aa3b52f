#include "cme/shift.hpp"

#include <algorithm>

namespace cme {

int ShiftSpec::symbol_id(const std::string& name) const {
    for (int i = 0; i < alphabet_size(); ++i)
        if (names[i] == name) return i;
    throw std::invalid_argument("unknown symbol: " + name);
}

void ShiftSpec::validate() const {
    const int k = alphabet_size();
    if (k == 0) throw std::invalid_argument("empty alphabet");
    if (static_cast<int>(adjacency.size()) != k)
        throw std::invalid_argument("adjacency must be square over the alphabet");
    for (const auto& row : adjacency) {
        if (static_cast<int>(row.size()) != k)
            throw std::invalid_argument("adjacency must be square over the alphabet");
        for (int v : row)
            if (v != 0 && v != 1) throw std::invalid_argument("adjacency entries must be 0/1");
    }
    for (int a = 0; a < k; ++a) {
        bool row = false, col = false;
        for (int b = 0; b < k; ++b) {
            row |= adjacency[a][b] != 0;
            col |= adjacency[b][a] != 0;
        }
        if (!row || !col)
            throw std::invalid_argument("adjacency has an all-zero row or column at symbol " + names[a]);
    }
    if (dagger) {
        if (static_cast<int>(dagger->size()) != k)
            throw std::invalid_argument("dagger must cover the alphabet");
        for (int a = 0; a < k; ++a) {
            int d = (*dagger)[a];
            if (d < 0 || d >= k) throw std::invalid_argument("dagger maps outside the alphabet");
            if ((*dagger)[d] != a) throw std::invalid_argument("dagger is not an involution");
        }
    }
}

bool is_admissible(const ShiftSpec& spec, const Word& w) {
    if (w.empty()) return false;
    for (int s : w)
        if (s < 0 || s >= spec.alphabet_size()) throw std::invalid_argument("unknown symbol id in word");
    for (size_t i = 0; i + 1 < w.size(); ++i)
        if (!spec.admissible_pair(w[i], w[i + 1])) return false;
    return true;
}

std::vector<Word> words_of_length(const ShiftSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("word length must be >= 1");
    std::vector<Word> out, cur;
    for (int a = 0; a < spec.alphabet_size(); ++a) cur.push_back({a});
    for (int len = 1; len < n; ++len) {
        std::vector<Word> next;
        for (const auto& w : cur)
            for (int b = 0; b < spec.alphabet_size(); ++b)
                if (spec.admissible_pair(w.back(), b)) {
                    next.push_back(w);
                    next.back().push_back(b);
                }
        cur = std::move(next);
    }
    return cur;
}

double metric(const Word& x, const Word& y, MetricParam m) {
    if (x.empty() || y.empty()) throw std::invalid_argument("metric on empty word");
    size_t k = 0;
    while (k < x.size() && k < y.size() && x[k] == y[k]) ++k;
    double d = 1.0;
    for (size_t i = 0; i < k; ++i) d *= m.r;
    return d;
}

bool is_mixing(const ShiftSpec& spec, int horizon) {
    const int k = spec.alphabet_size();
    // Boolean matrix powers; entries saturate at 1.
    std::vector<std::vector<int>> p = spec.adjacency;
    for (int step = 1; step <= horizon; ++step) {
        bool all = true;
        for (const auto& row : p)
            for (int v : row) all &= v != 0;
        if (all) return true;
        if (step == horizon) break;
        std::vector<std::vector<int>> q(k, std::vector<int>(k, 0));
        for (int a = 0; a < k; ++a)
            for (int c = 0; c < k; ++c)
                if (p[a][c])
                    for (int b = 0; b < k; ++b)
                        if (spec.adjacency[c][b]) q[a][b] = 1;
        p = std::move(q);
    }
    return false;
}

bool check_dagger(const ShiftSpec& spec) {
    if (!spec.dagger) throw std::logic_error("dagger not declared");
    const auto& d = *spec.dagger;
    const int k = spec.alphabet_size();
    for (int a = 0; a < k; ++a)
        if (d[a] < 0 || d[a] >= k || d[d[a]] != a) return false;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            if (spec.admissible_pair(a, b) != spec.admissible_pair(d[b], d[a])) return false;
    return true;
}

Word dagger_word(const ShiftSpec& spec, const Word& w) {
    if (!spec.dagger) throw std::logic_error("dagger not declared");
    Word out(w.rbegin(), w.rend());
    for (int& s : out) s = (*spec.dagger)[s];
    return out;
}

Word least_extension(const ShiftSpec& spec, Word w, int n) {
    if (w.empty()) throw std::invalid_argument("cannot extend an empty word");
    while (static_cast<int>(w.size()) < n) {
        int a = 0;
        while (!spec.admissible_pair(w.back(), a)) ++a;  // validate() rules out dead rows
        w.push_back(a);
    }
    return w;
}

}  // namespace cme
