#include "cme/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace cme {

using boost::multiprecision::cpp_int;

namespace {

cpp_int factorial(int n) {
    cpp_int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Float50 to_f(const Rational& r) {
    return Float50(boost::multiprecision::numerator(r)) / Float50(boost::multiprecision::denominator(r));
}

}  // namespace

void PolyaSpec::validate() const {
    if (d < 1 || static_cast<int>(p_plus.size()) != d || static_cast<int>(p_minus.size()) != d)
        throw std::invalid_argument("Polya spec needs d weights each way");
    Rational total = 0;
    for (int i = 0; i < d; ++i) {
        if (!(p_plus[i] > 0) || !(p_minus[i] > 0))
            throw std::invalid_argument("step weights must be positive");
        total += p_plus[i] + p_minus[i];
    }
    if (total != 1) throw std::invalid_argument("step weights must sum to exactly 1");
}

Float50 PolyaSpec::lambda(int i) const { return sqrt(to_f(p_plus[i]) / to_f(p_minus[i])); }

Float50 polya_rho(const PolyaSpec& ps) {
    Float50 r = 0;
    for (int i = 0; i < ps.d; ++i) r += 2 * sqrt(to_f(ps.p_plus[i]) * to_f(ps.p_minus[i]));
    return r;
}

Float50 polya_nu_group(const PolyaSpec& ps, const std::vector<int>& k) {
    Float50 v = 1;
    for (int i = 0; i < ps.d; ++i) v *= pow(ps.lambda(i), -k[i]);
    return v;
}

Float50 polya_cylinder(const PolyaSpec& ps, const std::vector<int>& w, const std::vector<int>& z) {
    // rho^-n nu(X_z) prod_k sqrt(p_{i_k} p_{-i_k}); equals the displayed
    // 2^-n nu(X_z) prod sqrt(..)/ (sum sqrt(..))^n form since rho = 2 sum sqrt.
    Float50 rho = polya_rho(ps);
    Float50 v = polya_nu_group(ps, z);
    for (int s : w) {
        int i = std::abs(s) - 1;
        if (i < 0 || i >= ps.d) throw std::invalid_argument("bad letter");
        v *= sqrt(to_f(ps.p_plus[i]) * to_f(ps.p_minus[i])) / rho;
    }
    return v;
}

Rational polya_zn(const PolyaSpec& ps, int n) {
    // Z^n = n! * d-fold convolution of E_i(m) = [m even] (p_i p_{-i})^{m/2} / ((m/2)!)^2.
    std::vector<Rational> conv(n + 1, Rational(0));
    conv[0] = 1;
    for (int i = 0; i < ps.d; ++i) {
        std::vector<Rational> e(n + 1, Rational(0));
        Rational pq = ps.p_plus[i] * ps.p_minus[i];
        Rational pw = 1;
        for (int t = 0; 2 * t <= n; ++t) {
            e[2 * t] = pw / Rational(factorial(t) * factorial(t));
            pw *= pq;
        }
        std::vector<Rational> next(n + 1, Rational(0));
        for (int a = 0; a <= n; ++a) {
            if (conv[a] == 0) continue;
            for (int b = 0; a + b <= n; b += 1)
                if (e[b] != 0) next[a + b] += conv[a] * e[b];
        }
        conv = std::move(next);
    }
    return conv[n] * Rational(factorial(n));
}

void FreeWalkSpec::validate() const {
    if (d < 2 || static_cast<int>(p_plus.size()) != d || static_cast<int>(p_minus.size()) != d)
        throw std::invalid_argument("free-walk spec needs rank >= 2 and d weights each way");
    Rational total = 0;
    for (int i = 0; i < d; ++i) {
        if (!(p_plus[i] > 0) || !(p_minus[i] > 0))
            throw std::invalid_argument("step weights must be positive");
        total += p_plus[i] + p_minus[i];
    }
    if (total != 1) throw std::invalid_argument("step weights must sum to exactly 1");
    Rational q2 = p_plus[0] * p_minus[0];
    for (int i = 1; i < d; ++i)
        if (p_plus[i] * p_minus[i] != q2)
            throw std::invalid_argument("sqrt(p_i p_{-i}) must not depend on i");
}

Rational FreeWalkSpec::q_squared() const { return p_plus[0] * p_minus[0]; }
Float50 FreeWalkSpec::q() const { return sqrt(to_f(q_squared())); }
bool FreeWalkSpec::symmetric() const {
    for (int i = 0; i < d; ++i)
        if (p_plus[i] != p_minus[i]) return false;
    return true;
}

Float50 fd_rho(const FreeWalkSpec& fs) { return 2 * fs.q() * sqrt(Float50(2 * fs.d - 1)); }

Float50 fd_ck(const FreeWalkSpec& fs, int k) {
    return 1 + Float50(k) * (fs.d - 1) / fs.d;
}

Float50 fd_nu_group(const FreeWalkSpec& fs, const std::vector<int>& g) {
    for (size_t i = 0; i + 1 < g.size(); ++i)
        if (g[i] == -g[i + 1]) throw std::invalid_argument("group word not reduced");
    const int k = static_cast<int>(g.size());
    Float50 v = fd_ck(fs, k) * pow(2 / fd_rho(fs), k);
    for (int s : g) {
        int i = std::abs(s) - 1;
        v *= to_f(s > 0 ? fs.p_minus[i] : fs.p_plus[i]);  // p_{-letter}
    }
    return v;
}

std::vector<int> active_part(const std::vector<int>& w) {
    std::vector<int> stack;
    for (int s : w) {
        if (!stack.empty() && stack.back() == -s)
            stack.pop_back();
        else
            stack.push_back(s);
    }
    return stack;
}

std::vector<int> inactive_part(const std::vector<int>& w) {
    // Mark the survivors of the reduction; everything else is inactive.
    std::vector<size_t> stack;
    std::vector<bool> active(w.size(), false);
    for (size_t i = 0; i < w.size(); ++i) {
        if (!stack.empty() && w[stack.back()] == -w[i]) {
            stack.pop_back();
        } else {
            stack.push_back(i);
        }
    }
    for (size_t i : stack) active[i] = true;
    std::vector<int> out;
    for (size_t i = 0; i < w.size(); ++i)
        if (!active[i]) out.push_back(w[i]);
    return out;
}

std::vector<int> inverse_word(const std::vector<int>& v) {
    std::vector<int> out(v.rbegin(), v.rend());
    for (int& s : out) s = -s;
    return out;
}

Float50 fd_mu_word(const FreeWalkSpec& fs, const std::vector<int>& w) {
    Float50 v = 1;
    for (int s : w) {
        int i = std::abs(s) - 1;
        if (i < 0 || i >= fs.d) throw std::invalid_argument("bad letter");
        v *= to_f(s > 0 ? fs.p_plus[i] : fs.p_minus[i]);
    }
    return v;
}

Float50 fd_cylinder(const FreeWalkSpec& fs, const std::vector<int>& w, const std::vector<int>& g) {
    const int n = static_cast<int>(w.size());
    std::vector<int> vgw = g;
    vgw.insert(vgw.end(), w.begin(), w.end());
    std::vector<int> r = active_part(vgw);
    Float50 val = pow(fd_rho(fs), -n) * fd_mu_word(fs, w);
    if (r.empty()) return val;  // empty active part: rho^-n mu([w])
    return val * fd_ck(fs, static_cast<int>(r.size())) * pow(2 / fd_rho(fs), static_cast<int>(r.size())) *
           fd_mu_word(fs, inverse_word(r));
}

FdKernelValue fd_kernel(const FreeWalkSpec& fs, const std::vector<int>& g1,
                        const std::vector<int>& g2, const std::vector<int>& x) {
    if (x.size() < 12) throw std::invalid_argument("surrogate path too short to stabilize k");
    auto k_at = [&](size_t n) {
        std::vector<int> psi(x.begin(), x.begin() + n);
        std::vector<int> a = active_part(psi);
        std::vector<int> g2psi = g2;
        g2psi.insert(g2psi.end(), a.begin(), a.end());
        g2psi = active_part(g2psi);
        std::vector<int> g1i = inverse_word(g1);
        std::vector<int> full = g1i;
        full.insert(full.end(), g2psi.begin(), g2psi.end());
        full = active_part(full);
        return static_cast<int>(full.size()) - static_cast<int>(g2psi.size());
    };
    int k = k_at(x.size());
    for (size_t back = 1; back <= 10; ++back)
        if (k_at(x.size() - back) != k)
            throw std::runtime_error("k has not stabilized; extend the surrogate path");
    FdKernelValue out;
    out.k = k;
    Float50 mu_ratio = g1.empty() ? Float50(1)
                                  : sqrt(fd_mu_word(fs, g1) / fd_mu_word(fs, inverse_word(g1)));
    out.value = pow(Float50(2 * fs.d - 1), Float50(-k) / 2) * mu_ratio;
    out.fluctuation = pow(Float50(2 * fs.d - 1), static_cast<int>(g1.size())) * mu_ratio;
    return out;
}

Float50 fd_llt_ratio(const FreeWalkSpec& fs, const std::vector<int>& g) {
    // The n-independent limit equals the conformal slice mass nu_id(X_g).
    return fd_nu_group(fs, g);
}

std::vector<cpp_int> fd_walks_to_distance(int d, int k0, int N) {
    // Distance-to-target chain: from 0 all 2d steps move away; from j > 0 one
    // step moves closer, 2d-1 move away. Counts paths k0 -> 0 of length n.
    std::vector<cpp_int> dist(N + k0 + 2, 0);
    dist[k0] = 1;
    std::vector<cpp_int> out(N + 1, 0);
    if (k0 == 0) out[0] = 1;
    for (int n = 1; n <= N; ++n) {
        std::vector<cpp_int> next(N + k0 + 2, 0);
        for (int j = 0; j <= N + k0; ++j) {
            if (dist[j] == 0) continue;
            if (j == 0) {
                next[1] += dist[j] * (2 * d);
            } else {
                next[j - 1] += dist[j];
                if (j + 1 <= N + k0) next[j + 1] += dist[j] * (2 * d - 1);
            }
        }
        dist = std::move(next);
        out[n] = dist[0];
    }
    return out;
}

Rational fd_zn(const FreeWalkSpec& fs, int n) {
    if (n % 2 != 0) return Rational(0);
    auto counts = fd_walks_to_distance(fs.d, 0, n);
    Rational q2 = fs.q_squared();
    Rational qn = 1;
    for (int i = 0; i < n / 2; ++i) qn *= q2;
    return qn * Rational(counts[n]);
}

}  // namespace cme
