#include "cme/patterson.hpp"

#include <algorithm>
#include <cmath>

namespace cme {

double PattersonWeights::partial_sum_at(const PartitionTable& t, double rho, int upto) const {
    std::vector<double> terms;
    for (int n = 1; n <= std::min(upto, t.N); ++n)
        if (t.logZ[n] > kNegInf) terms.push_back(log_b[n] + t.logZ[n] - n * std::log(rho));
    return std::exp(logsumexp(terms));
}

PattersonWeights build_bn(const PartitionTable& t, double rho_hat, int N) {
    if (t.nonzero_count() == 0) throw std::invalid_argument("all partition values vanish");
    PattersonWeights w;
    w.N = N;
    w.lambdas.assign(N + 1, 1.0);
    w.log_b.assign(N + 1, 0.0);
    double partial = 0.0;
    for (int k = 1; k <= N; ++k) {
        double target = std::log(1.0 + k);
        double log_term_unboosted = (k <= t.N && t.logZ[k] > kNegInf)
                                        ? w.log_b[k - 1] + t.logZ[k] - k * std::log(rho_hat)
                                        : kNegInf;
        double lam = 1.0;
        if (log_term_unboosted > kNegInf && partial < target) {
            // Boost this term to close the gap. The clamp keeps b_n below a
            // fixed polynomial, so the radius of convergence is untouched while
            // a convergent (transient) series can still be driven to diverge.
            double need = (target - partial) / std::exp(log_term_unboosted);
            lam = std::min(std::max(need, 1.0), 1.0 + 3.0 / k);
        }
        w.lambdas[k] = lam;
        w.log_b[k] = w.log_b[k - 1] + std::log(lam);
        if (log_term_unboosted > kNegInf) partial += std::exp(w.log_b[k] + t.logZ[k] - k * std::log(rho_hat));
    }
    return w;
}

namespace {

// log of P_N(s) = sum b_n s^-n Z^n over the rows of a sweep (denominator of m_s).
double log_pressure_series(const SweepTable& sw, const PattersonWeights& w, double s,
                           const std::vector<double>& logZ) {
    std::vector<double> terms;
    for (int n = 1; n <= sw.N; ++n)
        if (logZ[n] > kNegInf) terms.push_back(w.log_b[n] + logZ[n] - n * std::log(s));
    return logsumexp(terms);
}

}  // namespace

double MeasureApprox::mass_of(const XCylinder& c) const {
    auto it = std::lower_bound(cylinders.begin(), cylinders.end(), c);
    if (it == cylinders.end() || !(*it == c)) throw std::out_of_range("cylinder not tracked");
    return masses[it - cylinders.begin()];
}

double MeasureApprox::spread_of(const XCylinder& c) const {
    auto it = std::lower_bound(cylinders.begin(), cylinders.end(), c);
    if (it == cylinders.end() || !(*it == c)) throw std::out_of_range("cylinder not tracked");
    return spreads.empty() ? 0.0 : spreads[it - cylinders.begin()];
}

MeasureApprox m_s_measure(const SweepTable& sw, const PattersonWeights& w, double s) {
    MeasureApprox m;
    m.s = s;
    m.N = sw.N;
    m.depth = sw.depth;
    m.ball_radius = sw.ball_radius;
    m.cylinders = sw.cylinders;
    m.masses.assign(sw.cylinders.size(), 0.0);
    // X_id carries the normalization: its row is Z^n for the base-point sweep.
    int id_ci = sw.cyl_index(XCylinder{Word{}, sw.group_id});
    if (id_ci < 0) throw std::logic_error("sweep does not track X_id");
    double logP = log_pressure_series(sw, w, s, sw.logA[id_ci]);
    for (size_t ci = 0; ci < sw.cylinders.size(); ++ci) {
        std::vector<double> terms;
        for (int n = 1; n <= sw.N; ++n)
            if (sw.logA[ci][n] > kNegInf) terms.push_back(w.log_b[n] + sw.logA[ci][n] - n * std::log(s));
        double lm = logsumexp(terms);
        m.masses[ci] = lm > kNegInf ? std::exp(lm - logP) : 0.0;
    }
    return m;
}

std::vector<std::pair<int, double>> ratio_points(const std::vector<double>& log_num,
                                                 const std::vector<double>& log_den, int N) {
    std::vector<std::pair<int, double>> pts;
    for (int n = 2; n <= N; ++n) {
        if (log_num[n] <= kNegInf) continue;
        double ld;
        if (log_den[n] > kNegInf) {
            ld = log_den[n];
        } else {
            // Period bridge: geometric interpolation between the nearest
            // levels (at most a half period away on each side) where the
            // denominator is alive.
            int lo = n - 1, hi = n + 1;
            while (lo >= 1 && log_den[lo] <= kNegInf) --lo;
            while (hi <= N && log_den[hi] <= kNegInf) ++hi;
            if (lo < 1 || hi > N) continue;
            double t = static_cast<double>(n - lo) / (hi - lo);
            ld = (1.0 - t) * log_den[lo] + t * log_den[hi];
        }
        pts.push_back({n, std::exp(log_num[n] - ld)});
    }
    return pts;
}

// Least-squares fit v(n) = L - c/n + e/n^2 over the trailing half of the
// points (linear in 1/n when fewer than five points are available); returns
// the limit L and its fit standard error.
std::pair<double, double> extrapolate_inverse_n(const std::vector<std::pair<int, double>>& pts) {
    if (pts.empty()) return {0.0, 0.0};
    if (pts.size() == 1) return {pts[0].second, 0.0};
    size_t first = pts.size() / 2;
    const size_t min_pts = pts.size() >= 5 ? 4 : 2;
    if (pts.size() - first < min_pts) first = pts.size() - min_pts;
    const bool quadratic = pts.size() - first >= 4;
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (size_t i = first; i < pts.size(); ++i) {
        double x = 1.0 / pts[i].first;
        if (quadratic)
            X.push_back({1.0, -x, x * x});
        else
            X.push_back({1.0, -x});
        y.push_back(pts[i].second);
    }
    OlsFit fit = ols(X, y);
    return {fit.coef[0], fit.stderr_[0]};
}

MeasureApprox conformal_limit(const SweepTable& sw, const PattersonWeights& w,
                              const PartitionTable& t, const ConformalSettings& cs) {
    MeasureApprox m;
    m.extrapolated = true;
    m.N = sw.N;
    m.depth = sw.depth;
    m.ball_radius = sw.ball_radius;
    m.cylinders = sw.cylinders;
    m.masses.assign(sw.cylinders.size(), 0.0);
    m.spreads.assign(sw.cylinders.size(), 0.0);
    m.diagnostics.assign(sw.cylinders.size(), 0.0);

    const double rho = cs.rho_hat;
    const double log_rho = std::log(rho);

    // Headline estimator: per-cylinder ratios r_n = A_n / Z^n inside the
    // period class, bridged through rho at mismatched parity, extrapolated
    // linearly in 1/n. This is Richardson extrapolation along the level index
    // and is immune to the schedule saturation of the truncated series.
    const int nmax = std::min(sw.N, t.N);
    for (size_t ci = 0; ci < sw.cylinders.size(); ++ci) {
        auto [limit, err] = extrapolate_inverse_n(ratio_points(sw.logA[ci], t.logZ, nmax));
        m.masses[ci] = std::max(limit, 0.0);
        // Spread: fit error plus first-order rho sensitivity of the bridge.
        m.spreads[ci] = err + m.masses[ci] * cs.rho_stderr / std::max(rho, 1e-12);
    }
    (void)log_rho;

    // Schedule diagnostics: Richardson in (s - rho) per cylinder, plus the
    // ratio of successive differences (monotone geometric decay = converged).
    std::vector<double> schedule = cs.schedule;
    if (schedule.empty())
        for (int k = 1; k <= 8; ++k) schedule.push_back(rho * (1.0 + std::pow(2.0, -k)));
    std::vector<MeasureApprox> ms;
    for (double s : schedule) ms.push_back(m_s_measure(sw, w, s));
    int bad = 0, usable = 0;
    for (size_t ci = 0; ci < sw.cylinders.size(); ++ci) {
        const size_t K = ms.size();
        if (K < 3) continue;
        double d1 = ms[K - 2].masses[ci] - ms[K - 3].masses[ci];
        double d2 = ms[K - 1].masses[ci] - ms[K - 2].masses[ci];
        if (ms[K - 1].masses[ci] > 0.0) {
            ++usable;
            m.diagnostics[ci] = d1 != 0.0 ? d2 / d1 : 0.0;
            if (!(std::abs(d2) <= std::abs(d1) + 1e-15)) ++bad;
        }
    }
    m.unconverged = usable > 0 && bad * 10 > usable;
    return m;
}

double conformality_residual(const ExtensionSpec& e, const MeasureApprox& nu, const Word& w,
                             const GroupElement& g, int k, double rho_hat) {
    if (static_cast<int>(w.size()) <= k)
        throw std::invalid_argument("word must be longer than the number of steps");
    // T^k[w,g] = [theta^k w, g psi_k(w)].
    Word img(w.begin() + k, w.end());
    Word wk(w.begin(), w.begin() + k);
    GroupElement gi = e.group.multiply(g, psi_n(e, wk));
    auto tracked = [&nu](const XCylinder& c) {
        auto it = std::lower_bound(nu.cylinders.begin(), nu.cylinders.end(), c);
        return it != nu.cylinders.end() && *it == c;
    };
    XCylinder ci{img, gi}, cs{w, g};
    if (!tracked(ci) || !tracked(cs)) return -1.0;
    double m_img = nu.mass_of(ci);
    if (!(m_img > 0.0)) return -1.0;
    double m_src = nu.mass_of(cs);
    double phi_k = phi_n(e.potential, e.shift, w, k);
    double lhs = m_img;
    double rhs = std::pow(rho_hat, k) / phi_k * m_src;
    return std::abs(lhs - rhs) / m_img;
}

MeasurePropertyReport measure_properties(const ExtensionSpec& e, const MeasureApprox& nu,
                                         double rho_hat, bool symmetric) {
    MeasurePropertyReport rep;
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (size_t ci = 0; ci < nu.cylinders.size(); ++ci) {
        const auto& c = nu.cylinders[ci];
        if (c.word.empty() || !(nu.masses[ci] > 0.0)) continue;
        int n = static_cast<int>(c.word.size());
        GroupElement tail = e.group.multiply(c.g, psi_n(e, c.word));
        if (e.group.word_length(tail) > nu.ball_radius) continue;
        double slice = nu.mass_of(XCylinder{Word{}, tail});
        if (!(slice > 0.0)) continue;
        double ratio = std::pow(rho_hat, n) * nu.masses[ci] /
                       (phi_n(e.potential, e.shift, c.word, n) * slice);
        mn = std::min(mn, ratio);
        mx = std::max(mx, ratio);
    }
    rep.part3_min = mn;
    rep.part3_max = mx;
    if (symmetric) {
        rep.symmetric_checked = true;
        double smn = std::numeric_limits<double>::infinity(), smx = 0.0;
        for (size_t ci = 0; ci < nu.cylinders.size(); ++ci) {
            const auto& c = nu.cylinders[ci];
            if (!c.word.empty() || !(nu.masses[ci] > 0.0)) continue;
            double inv = nu.mass_of(XCylinder{Word{}, e.group.invert(c.g)});
            if (!(inv > 0.0)) continue;
            double ratio = nu.masses[ci] / inv;
            smn = std::min(smn, ratio);
            smx = std::max(smx, ratio);
        }
        rep.sym_min = smn;
        rep.sym_max = smx;
    }
    return rep;
}

ErgodicityVerdict classify_ergodicity(const PartitionTable& t, const SpectralEstimate& se) {
    ErgodicityVerdict v;
    v.beta = se.beta;
    v.beta_stderr = se.beta_stderr;
    double sum = 0.0;
    for (int n = 1; n <= t.N; ++n) {
        if (t.logZ[n] > kNegInf) sum += std::exp(t.logZ[n] - n * std::log(se.rho_hat));
        v.partial_sums.push_back(sum);
    }
    const double sig = std::max(se.beta_stderr, 1e-6);
    if (se.beta > 1.0 + 2.0 * sig) {
        v.verdict = Verdict::Dissipative;
    } else if (se.beta < 1.0 - 2.0 * sig) {
        v.verdict = Verdict::ConservativeErgodic;
    } else if (se.beta <= 1.0 + sig) {
        // Boundary: beta = 1 still gives a divergent sum (harmonic series).
        v.verdict = Verdict::ConservativeErgodic;
        v.boundary_note = true;
    } else {
        v.verdict = Verdict::Inconclusive;
    }
    return v;
}

}  // namespace cme
