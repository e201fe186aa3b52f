#pragma once

#include <cstdint>
#include <functional>

#include "cme/transfer.hpp"

namespace cme {

struct DimensionReport {
    double delta = 0.0;       // root of the extended pressure equation
    double delta_lo = 0.0;    // propagated interval
    double delta_hi = 0.0;
    double tol = 0.0;
    double rho_delta = 0.0;   // base Perron root at phi^delta (>= 1)
    double lyapunov = 0.0;    // integral of log phi against the delta-Gibbs state
    double dim_value = 0.0;   // delta + log(rho_delta)/|lyapunov|
    double ext_rho_at_delta = 0.0;
    double ext_rho_stderr = 0.0;
    double amenability_gap = 0.0;  // log rho_delta - log ext_rho_at_delta
    bool amenable_consistent = false;
    double pressure_lo = 0.0;  // certificate: spectral radius at delta -/+ tol
    double pressure_hi = 0.0;
    int iterations = 0;
    int N = 24;
};

// Spectral radius of the extension transfer operator at phi^h, from the
// truncated return series (limsup of the n-th roots).
SpectralEstimate extended_pressure(const ExtensionSpec& e, double h, const Word& xi, int N);

// Bisection for delta with extended_pressure(h_lo) > 1 > extended_pressure(h_hi)
// (bracket expanded automatically when invalid); assembles the full report.
DimensionReport find_delta(const ExtensionSpec& e, const Word& xi, double h_lo, double h_hi,
                           double tol, int N = 24);

struct DecayCheckReport {
    bool applicable = false;   // false in the rho_delta = 1 (amenable-consistent) case
    int paths = 0;
    int passed = 0;            // observable decreased by >= 10x over the window
    double pass_fraction = 0.0;
    double mean_slope = 0.0;   // per-step log decay rate of the observable
    bool pass = false;         // >= 95% of paths passed
};

// Along mu_delta-sampled base paths, tracks rho_delta^n nu([w_1..w_n, id]) /
// Phi_n^delta, evaluated through the conformality of nu as
// rho_delta^n nu(X_{psi_n}); nu slice masses are supplied by the caller
// (closed-form where available, estimated otherwise).
DecayCheckReport decay_check(const ExtensionSpec& e, const DimensionReport& rep,
                             const std::function<double(const GroupElement&)>& nu_slice,
                             int L, int count, std::uint64_t seed);

}  // namespace cme
