#pragma once

#include "cme/transfer.hpp"

namespace cme {

struct PattersonWeights {
    std::vector<double> lambdas;  // index 1..N
    std::vector<double> log_b;    // log b_n, index 0..N (b_0 = 1)
    int N = 0;

    double partial_sum_at(const PartitionTable& t, double rho, int upto) const;
};

// Greedy construction: lambda(k) boosts the partial sum of b_n Z^n rho^-n
// toward D(k) = log(1+k), clamped to [1, 1+3/k] so b_n stays polynomial
// (radius of convergence untouched) while convergent series are driven
// to diverge.
PattersonWeights build_bn(const PartitionTable& t, double rho_hat, int N);

struct MeasureApprox {
    bool extrapolated = false;
    double s = 0.0;                    // tagged value when not extrapolated
    std::vector<XCylinder> cylinders;  // canonical order (matches sweep)
    std::vector<double> masses;
    std::vector<double> spreads;       // extrapolation spread / rho sensitivity
    std::vector<double> diagnostics;   // ratio of successive schedule differences
    bool unconverged = false;
    int N = 0, depth = 0, ball_radius = 0;

    double mass_of(const XCylinder& c) const;
    double spread_of(const XCylinder& c) const;
};

// Truncated series measure at s > rho_hat, normalized so m_s(X_id) = 1.
MeasureApprox m_s_measure(const SweepTable& sw, const PattersonWeights& w, double s);

// Per-level ratios r_n = exp(log_num[n] - log_den[n]) for n = 2..N, with a
// geometric bridge through the denominator across period gaps, and the 1/n
// Richardson limit (trailing-half least squares in 1/n and 1/n^2, fit
// stderr). Shared by the conformal-measure and kernel estimators.
std::vector<std::pair<int, double>> ratio_points(const std::vector<double>& log_num,
                                                 const std::vector<double>& log_den, int N);
std::pair<double, double> extrapolate_inverse_n(const std::vector<std::pair<int, double>>& pts);

struct ConformalSettings {
    std::vector<double> schedule;  // s_k values; default rho*(1+2^-k), k=1..8
    double rho_hat = 0.0;
    double rho_stderr = 0.0;
    int period = 1;
};

// Extrapolated conformal measure. Headline masses come from Richardson
// extrapolation in 1/n of the per-level ratios L^n(1_cyl)/Z^n inside the
// period class (the s-schedule values saturate at finite truncation and are
// kept as diagnostics).
MeasureApprox conformal_limit(const SweepTable& sw, const PattersonWeights& w,
                              const PartitionTable& t, const ConformalSettings& cs);

// Relative residual of k-step conformality at [w,g].
// Sentinel -1 when the image mass vanishes or either cylinder is untracked.
double conformality_residual(const ExtensionSpec& e, const MeasureApprox& nu, const Word& w,
                             const GroupElement& g, int k, double rho_hat);

struct MeasurePropertyReport {
    double part3_min = 0.0, part3_max = 0.0;  // rho^n nu([w,g]) / (Phi_n nu(X_{g psi_n}))
    bool symmetric_checked = false;
    double sym_min = 0.0, sym_max = 0.0;      // nu(X_g)/nu(X_{g^{-1}})
};

MeasurePropertyReport measure_properties(const ExtensionSpec& e, const MeasureApprox& nu,
                                         double rho_hat, bool symmetric);

enum class Verdict { ConservativeErgodic, Dissipative, Inconclusive };

struct ErgodicityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    double beta = 0.0;
    double beta_stderr = 0.0;
    bool boundary_note = false;  // beta within error of 1: sum n^-1 diverges, lean conservative
    std::vector<double> partial_sums;
};

ErgodicityVerdict classify_ergodicity(const PartitionTable& t, const SpectralEstimate& se);

}  // namespace cme
