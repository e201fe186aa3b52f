#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cme {

// Finite-alphabet topological Markov chain. Symbols are dense ids 0..k-1;
// names are kept for config round-trips.
struct ShiftSpec {
    std::vector<std::string> names;           // symbol id -> display name
    std::vector<std::vector<int>> adjacency;  // 0/1, adjacency[a][b] = 1 iff "ab" allowed
    std::optional<std::vector<int>> dagger;   // symbol involution, if declared

    int alphabet_size() const { return static_cast<int>(names.size()); }
    bool admissible_pair(int a, int b) const { return adjacency[a][b] != 0; }
    int symbol_id(const std::string& name) const;
    void validate() const;  // throws std::invalid_argument on malformed specs
};

using Word = std::vector<int>;

struct MetricParam {
    double r = 0.5;
};

bool is_admissible(const ShiftSpec& spec, const Word& w);

// All admissible words of length n, lexicographic by symbol id.
std::vector<Word> words_of_length(const ShiftSpec& spec, int n);

// d_r distance between the cylinders of x and y: r^(longest common prefix).
// Identical words of length n yield the upper bound r^n.
double metric(const Word& x, const Word& y, MetricParam m);

// Primitivity probe: some A^N with N <= horizon strictly positive.
// Finite alphabet + mixing gives the b.i.p. property for free.
bool is_mixing(const ShiftSpec& spec, int horizon);

// Involution + admissibility-reversal: (a,b) allowed iff (b^, a^) allowed.
bool check_dagger(const ShiftSpec& spec);

// Dagger of a word: reverse and apply the symbol involution.
Word dagger_word(const ShiftSpec& spec, const Word& w);

// Extend w on the right to length n by the lexicographically least
// admissible continuation (canonical point representative).
Word least_extension(const ShiftSpec& spec, Word w, int n);

}  // namespace cme
