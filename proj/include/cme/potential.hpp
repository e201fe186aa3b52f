#pragma once

#include <map>
#include <vector>

#include "cme/numerics.hpp"
#include "cme/shift.hpp"

namespace cme {

// Strictly positive, locally constant depth-m potential: phi(x) depends on
// x_1..x_m only. Values are keyed by depth-m admissible words.
struct PotentialSpec {
    int depth = 1;
    std::map<Word, double> values;
    // Exact representations for rational mode (populated when the config
    // declares values as "p/q" strings); empty otherwise.
    std::map<Word, Rational> exact_values;
    double metric_r = 0.5;

    void validate(const ShiftSpec& spec) const;
    // phi at a point represented by w (extended canonically if |w| < depth).
    double phi(const ShiftSpec& spec, const Word& w) const;
    double log_phi(const ShiftSpec& spec, const Word& w) const;
    // Entry-wise power phi^h (used by the pressure root-finder).
    PotentialSpec powered(double h) const;
    PotentialSpec scaled(double c) const;
};

// Perron eigendata of the weighted transition operator on window states
// (admissible words of length max(depth-1, 1)).
struct GibbsData {
    double rho_base = 0.0;
    std::vector<Word> states;          // window words, sorted
    std::vector<double> left_eigen;    // eigenfunction of the transfer operator
    std::vector<double> right_eigen;   // eigenmeasure direction
    std::vector<double> stationary;    // normalized left (.) right
    int window = 1;

    int state_index(const Word& u) const;
};

// Birkhoff product over the first n shifts; w must determine all factors
// (|w| >= n + depth - 1), shorter words are extended canonically.
double phi_n(const PotentialSpec& p, const ShiftSpec& spec, const Word& w, int n);
double log_phi_n(const PotentialSpec& p, const ShiftSpec& spec, const Word& w, int n);

// Distortion constant C: |Phi_n(tau_w x)/Phi_n(tau_w y) - 1| <= C d(x,y)
// for x,y in a common 1-cylinder. Zero for depth-1 potentials.
double distortion_constant(const PotentialSpec& p, const ShiftSpec& spec);

GibbsData base_pressure(const PotentialSpec& p, const ShiftSpec& spec);

// phi' = phi h / (rho h o theta): transfer operator becomes row-stochastic.
PotentialSpec normalize(const PotentialSpec& p, const ShiftSpec& spec);

// Stationary Markov mass of [w] from eigendata.
double gibbs_mass(const GibbsData& g, const PotentialSpec& p, const ShiftSpec& spec, const Word& w);

}  // namespace cme
