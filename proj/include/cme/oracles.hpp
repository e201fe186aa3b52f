#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cme/extension.hpp"
#include "cme/numerics.hpp"

namespace cme {

using Float50 = boost::multiprecision::cpp_bin_float_50;

// Nearest-neighbour random walk on Z^d with step weights p_{+-i}.
struct PolyaSpec {
    int d = 1;
    std::vector<Rational> p_plus;   // p_1..p_d
    std::vector<Rational> p_minus;  // p_{-1}..p_{-d}

    void validate() const;  // weights positive, total exactly 1
    Float50 lambda(int i) const;  // sqrt(p_i / p_{-i})
};

Float50 polya_rho(const PolyaSpec& ps);

// nu_id(X_k) = prod lambda_i^{-k_i}.
Float50 polya_nu_group(const PolyaSpec& ps, const std::vector<int>& k);

// nu_id([w, z]) for a signed-symbol word w (entries +-1..+-d) and slice z.
Float50 polya_cylinder(const PolyaSpec& ps, const std::vector<int>& w, const std::vector<int>& z);

// Exact return-partition oracle: Z^{n} as a d-fold binomial convolution.
Rational polya_zn(const PolyaSpec& ps, int n);

// Random walk on the free group F_d with constant q = sqrt(p_i p_{-i}).
struct FreeWalkSpec {
    int d = 2;
    std::vector<Rational> p_plus;   // p_1..p_d
    std::vector<Rational> p_minus;  // p_{-1}..p_{-d}

    void validate() const;  // q constant across i
    Rational q_squared() const;  // p_i p_{-i}
    Float50 q() const;
    bool symmetric() const;
};

Float50 fd_rho(const FreeWalkSpec& fs);

// C_k = 1 + k(d-1)/d.
Float50 fd_ck(const FreeWalkSpec& fs, int k);

// nu_id(X_g) = C_k (2/rho)^k prod p_{-i_j} over the letters of g (reduced).
Float50 fd_nu_group(const FreeWalkSpec& fs, const std::vector<int>& g);

// Active part, inactive part, inverse word.
std::vector<int> active_part(const std::vector<int>& w);
std::vector<int> inactive_part(const std::vector<int>& w);
std::vector<int> inverse_word(const std::vector<int>& v);

// nu_id([w, g]) = rho^-n mu([w]) C_k (2/rho)^k mu([kappa(r(v_g w))]).
Float50 fd_cylinder(const FreeWalkSpec& fs, const std::vector<int>& w, const std::vector<int>& g);

// Bernoulli letter mass of a word under the walk's step distribution.
Float50 fd_mu_word(const FreeWalkSpec& fs, const std::vector<int>& w);

// K(g1, (x, g2)) = (2d-1)^{-k/2} sqrt(mu[v_g1]/mu[kappa v_g1]) with
// k = |g1^{-1} g2 psi_n(x)| - |g2 psi_n(x)| (requires k to have stabilized
// over the last 10 steps of x). Also returns the fluctuation bound.
struct FdKernelValue {
    Float50 value;
    Float50 fluctuation;  // sup/inf over the neighbourhood
    int k = 0;
};
FdKernelValue fd_kernel(const FreeWalkSpec& fs, const std::vector<int>& g1,
                        const std::vector<int>& g2, const std::vector<int>& x);

// Local limit ratio lim_n P(X_n = g)/P(X_n = id) for matching parity.
Float50 fd_llt_ratio(const FreeWalkSpec& fs, const std::vector<int>& g);

// Exact return counts: Z^n = q^n R_n with R_n integer (paths of the
// distance birth-death projection); general target at distance k0.
Rational fd_zn(const FreeWalkSpec& fs, int n);
std::vector<boost::multiprecision::cpp_int> fd_walks_to_distance(int d, int k0, int N);

}  // namespace cme
