#pragma once

#include <cstdint>
#include <functional>

#include "cme/patterson.hpp"

namespace cme {

// Martin-kernel estimate for a Dirac source delta_zeta against a nested
// cylinder sequence shrinking to a point z.
struct KernelEstimate {
    Word source_word;
    GroupElement source_g;
    std::vector<XCylinder> targets;    // nested, depths increasing
    std::vector<double> values;        // per-depth extrapolated ratios
    std::vector<double> value_errors;  // per-depth fit spreads
    double limit = 0.0;                // depth-extrapolated value
    double spread = 0.0;
    bool stabilized = false;  // last two depths agree within 2%
    bool zero_mass = false;   // series support missed a target cylinder
};

// Ratio of the source sweep against the reference sweep (the one started at
// (xi, id)), per target depth, extrapolated in 1/n and then in 1/depth.
KernelEstimate kernel_from_sweeps(const SweepTable& src, const SweepTable& ref,
                                  const std::vector<XCylinder>& z_cyls);

KernelEstimate kernel_estimate(const ExtensionSpec& e, const Word& zeta_w,
                               const GroupElement& zeta_g, const std::vector<XCylinder>& z_cyls,
                               const SweepTable& ref, const SweepSettings& st);

struct ThetaValue {
    double value = 0.0;
    double covered_fraction = 1.0;  // |coef|-weighted share of f inside the window
    bool partial = false;
};

// Theta(f)(z) = nu_{delta_z}(f) for f a finite cylinder combination; the
// normalizer is the reference-sweep partition row (mass of X_id from xi).
ThetaValue theta_from_sweeps(const SweepTable& z_sw, const SweepTable& ref,
                             const std::vector<std::pair<XCylinder, double>>& f);

ThetaValue theta_eval(const ExtensionSpec& e, const std::vector<std::pair<XCylinder, double>>& f,
                      const Word& z_w, const GroupElement& z_g, const SweepTable& ref,
                      const SweepSettings& st);

// A function on points of Sigma x G, sampled through a cylinder
// representative (window word, group element).
using PointFunction = std::function<double(const Word&, const GroupElement&)>;

// All mesh points: admissible words of the given depth crossed with the
// group ball of the given radius.
std::vector<std::pair<Word, GroupElement>> standard_mesh(const ExtensionSpec& e, int depth,
                                                         int ball_radius);

// max over the mesh of |L_phi h(z) - rho h(z)| / (rho h(z)).
// Returns -1 if h vanishes at a mesh point that has preimages with mass.
double harmonicity_residual(const ExtensionSpec& e, const PointFunction& h, double rho_hat,
                            const std::vector<std::pair<Word, GroupElement>>& mesh);

struct LipschitzReport {
    double d_hat = 0.0;  // max |log K(z1,.) - log K(z2,.)| / d(z1, z2)
    bool finite = true;
    int evaluated = 0;  // pairs that needed distinct sweeps
    int skipped_equal = 0;  // pairs identical at DP-start resolution (exact 0)
};

// Dirac-pair Lipschitz check for the kernel: pairs must share the first
// symbol and the group element.
LipschitzReport lipschitz_kernel_check(
    const ExtensionSpec& e,
    const std::vector<std::pair<std::pair<Word, GroupElement>, std::pair<Word, GroupElement>>>&
        pairs,
    const std::vector<XCylinder>& z_mesh, const SweepTable& ref, const SweepSettings& st);

struct PathSample {
    Word base_path;                        // admissible, length L
    std::vector<GroupElement> group_traj;  // psi_n for n = 1..L
    std::vector<double> observables;       // nu(X_{psi_n}) / rho^n, index 1..L
};

// Stationary Markov sampling from the Gibbs eigendata; deterministic given
// (seed, count, L) with per-path generators seeded by seed + path index.
std::vector<PathSample> sample_paths(const ExtensionSpec& e, const GibbsData& gibbs, int L,
                                     int count, std::uint64_t seed,
                                     const std::function<double(const GroupElement&)>& nu_slice,
                                     double rho_hat);

struct MartingaleBucketReport {
    double max_abs_z = 0.0;
    int buckets_tested = 0;
    int paths = 0;
    bool pass = false;  // all bucket means within 3 standard errors
};

// Backward-extension martingale test: W_n = nu(X_{psi(w_{-n}...w_{-1})})/rho^n;
// buckets paths by the step-n state (window, group) and compares the
// empirical mean of W_{n+1} in each bucket against W_n.
MartingaleBucketReport martingale_bucket_test(
    const ExtensionSpec& e, const GibbsData& gibbs,
    const std::function<double(const GroupElement&)>& nu_slice, double rho_hat, int n_paths,
    int check_n, std::uint64_t seed);

struct RatioMartingaleReport {
    std::vector<double> spreads;   // cross-path spread of f/h per backward step
    double terminal_spread = 0.0;
    double initial_spread = 0.0;
    bool h_vanished = false;
};

// f/h along backward left-extensions of the stationary chain.
RatioMartingaleReport ratio_martingale(const ExtensionSpec& e, const GibbsData& gibbs,
                                       const PointFunction& f, const PointFunction& h, int L,
                                       int count, std::uint64_t seed);

struct RegularityCoefficients {
    std::vector<double> c_n;  // index n = 0..depth_hi; inf-moduli on the mesh
    double d_x = 0.0;         // |f(z1)-f(z2)| <= D |f(z1)| d(z1,z2)
    double ld = 0.0;          // log variant
};

RegularityCoefficients regularity_coefficients(const ExtensionSpec& e, const PointFunction& f,
                                               int depth_hi, int ball_radius);

}  // namespace cme
