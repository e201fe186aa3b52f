#pragma once

#include <map>
#include <optional>
#include <string>

#include "cme/extension.hpp"
#include "cme/numerics.hpp"

namespace cme {

// Return partition functions Z^n(xi) for n = 1..N.
struct PartitionTable {
    Word xi;
    int N = 0;
    std::vector<double> logZ;              // index 0..N; logZ[0] unused; -inf where zero
    std::vector<Rational> exactZ;          // exact mode only; index 0..min(N, exact cap)
    bool has_exact = false;
    int period = 1;                        // gcd of indices with Z^n > 0
    long long states_visited = 0;

    int nonzero_count() const;
};

struct SpectralEstimate {
    double rho_hat = 0.0;        // ratio-extrapolated fit (headline value)
    double rho_roots = 0.0;      // Hadamard root at the largest usable n
    double beta = 0.0;           // Z^{pn} ~ C rho^{pn} n^{-beta}
    double stderr_ = 0.0;        // fit stderr combined with window sensitivity
    double beta_stderr = 0.0;
    std::string method = "ratio_extrapolated";
    int period = 1;
};

// One full suffix sweep from a source point (start, source_g): for every
// tracked cylinder [w,g] (|w| <= depth, word_length(g) <= ball_radius, plus
// the slices X_g as empty words) the values  A_n = L^n(1_[w,g])(start, source_g)
// for n = 1..N, in log domain.
struct SweepTable {
    Word start;
    GroupElement source_g;
    GroupElement group_id;
    int N = 0;
    int depth = 1;
    int ball_radius = 2;
    std::vector<XCylinder> cylinders;          // tracked, canonical order
    std::vector<std::vector<double>> logA;     // [cyl index][n], -inf where zero
    long long states_visited = 0;

    int cyl_index(const XCylinder& c) const;
    const std::vector<double>& row(const XCylinder& c) const;
};

struct SweepSettings {
    int N = 40;
    int depth = 3;          // max tracked cylinder depth
    int ball_radius = 3;
    bool exact = false;     // also carry exact rationals for Z (n <= exact_cap)
    int exact_cap = 30;
    // Memory guard: refuse sweeps whose estimated peak state count exceeds this.
    long long max_states = 80'000'000;
};

// Core DP shared by everything downstream.
SweepTable sweep(const ExtensionSpec& e, const Word& start, const GroupElement& source_g,
                 const SweepSettings& st);

PartitionTable zcount(const ExtensionSpec& e, const Word& xi, int N, bool exact = false);

// Exact-rational Z^n for n <= N (lattice/table groups and short free words).
std::vector<Rational> zcount_exact(const ExtensionSpec& e, const Word& xi, int N,
                                   const std::map<Word, Rational>& exact_values);

SpectralEstimate spectral_radius(const PartitionTable& t);

// L^n f(at) for f = sum of coef * indicator(cylinder).
double extension_apply(const ExtensionSpec& e, const std::vector<std::pair<XCylinder, double>>& f,
                       int n, const Word& at_word, const GroupElement& at_g);

struct DoeblinFortetReport {
    double worst_gap = -1.0;   // max over pairs of lhs - rhs; <= 0 means pass
    double worst_log_gap = -1.0;
    bool pass = false;
};

// Checks |L^n f(x) - L^n f(y)| <= C_phi d(x,y) L^n(|f| + r^n D(f))(x)
// on point pairs inside a common 1-cylinder of X, plus the log-Hoelder variant.
DoeblinFortetReport doeblin_fortet_check(const ExtensionSpec& e,
                                         const std::vector<std::pair<XCylinder, double>>& f, int n,
                                         const std::vector<std::pair<std::pair<Word, GroupElement>,
                                                                     std::pair<Word, GroupElement>>>& pairs);

}  // namespace cme
