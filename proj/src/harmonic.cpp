#include "cme/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace cme {

namespace {

// 1/n-extrapolated ratio of one tracked cylinder between two sweeps.
std::pair<double, double> target_value(const SweepTable& src, const SweepTable& ref,
                                       const XCylinder& c, bool& missing) {
    int i = src.cyl_index(c);
    int j = ref.cyl_index(c);
    if (i < 0 || j < 0) {
        missing = true;
        return {0.0, 0.0};
    }
    auto pts = ratio_points(src.logA[i], ref.logA[j], std::min(src.N, ref.N));
    if (pts.empty()) {
        missing = true;
        return {0.0, 0.0};
    }
    return extrapolate_inverse_n(pts);
}

double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

int pick(std::mt19937_64& rng, const std::vector<double>& probs) {
    double u = u01(rng);
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

// Forward Markov chain on Gibbs windows: per-state successor lists with
// normalized probabilities, plus the stationary initial distribution.
struct GibbsChain {
    std::vector<std::vector<int>> succ;        // state -> successor states
    std::vector<std::vector<double>> prob;     // matching probabilities
    std::vector<std::vector<int>> pred;        // reversed chain
    std::vector<std::vector<double>> pred_prob;
    std::vector<double> initial;               // stationary distribution
};

GibbsChain build_chain(const ExtensionSpec& e, const GibbsData& g) {
    GibbsChain ch;
    const int ns = static_cast<int>(g.states.size());
    ch.succ.resize(ns);
    ch.prob.resize(ns);
    ch.pred.resize(ns);
    ch.pred_prob.resize(ns);
    ch.initial = g.stationary;
    for (int i = 0; i < ns; ++i) {
        const Word& u = g.states[i];
        for (int b = 0; b < e.shift.alphabet_size(); ++b) {
            if (!e.shift.admissible_pair(u.back(), b)) continue;
            Word ub = u;
            ub.push_back(b);
            Word v(ub.end() - g.window, ub.end());
            int j = g.state_index(v);
            if (j < 0) continue;
            // Weight of the step: the potential of the depth-length block that the
            // new symbol completes (for depth >= 2 this is all of ub).
            Word blk(ub.end() - std::max(e.potential.depth, 1), ub.end());
            double p = e.potential.phi(e.shift, blk) * g.left_eigen[j] /
                       (g.rho_base * g.left_eigen[i]);
            if (p <= 0.0) continue;
            ch.succ[i].push_back(j);
            ch.prob[i].push_back(p);
        }
        double tot = 0.0;
        for (double p : ch.prob[i]) tot += p;
        if (tot <= 0.0) throw std::runtime_error("gibbs chain has a dead state");
        for (double& p : ch.prob[i]) p /= tot;
    }
    // Time reversal: P_rev(v -> u) = pi(u) P(u -> v) / pi(v).
    for (int i = 0; i < ns; ++i)
        for (size_t k = 0; k < ch.succ[i].size(); ++k) {
            int j = ch.succ[i][k];
            ch.pred[j].push_back(i);
            ch.pred_prob[j].push_back(g.stationary[i] * ch.prob[i][k] / g.stationary[j]);
        }
    for (int j = 0; j < ns; ++j) {
        double tot = 0.0;
        for (double p : ch.pred_prob[j]) tot += p;
        if (tot <= 0.0) throw std::runtime_error("reversed gibbs chain has a dead state");
        for (double& p : ch.pred_prob[j]) p /= tot;
    }
    return ch;
}

}  // namespace

KernelEstimate kernel_from_sweeps(const SweepTable& src, const SweepTable& ref,
                                  const std::vector<XCylinder>& z_cyls) {
    if (z_cyls.empty()) throw std::invalid_argument("kernel needs at least one target cylinder");
    for (size_t i = 1; i < z_cyls.size(); ++i) {
        const Word& a = z_cyls[i - 1].word;
        const Word& b = z_cyls[i].word;
        if (b.size() <= a.size() || !std::equal(a.begin(), a.end(), b.begin()) ||
            !(z_cyls[i].g == z_cyls[i - 1].g))
            throw std::invalid_argument("target cylinders must be nested with increasing depth");
    }
    KernelEstimate k;
    k.source_word = src.start;
    k.source_g = src.source_g;
    k.targets = z_cyls;
    for (const XCylinder& c : z_cyls) {
        bool missing = false;
        auto [v, err] = target_value(src, ref, c, missing);
        if (missing) k.zero_mass = true;
        k.values.push_back(v);
        k.value_errors.push_back(err);
    }
    const size_t m = k.values.size();
    if (m == 1) {
        k.limit = k.values[0];
        k.spread = k.value_errors[0];
        return k;
    }
    // Linear extrapolation in 1/(depth+1) from the last two depths.
    double d1 = static_cast<double>(z_cyls[m - 2].word.size()) + 1.0;
    double d2 = static_cast<double>(z_cyls[m - 1].word.size()) + 1.0;
    double v1 = k.values[m - 2], v2 = k.values[m - 1];
    double b = (v1 - v2) / (1.0 / d1 - 1.0 / d2);
    k.limit = v1 - b / d1;
    k.spread = std::abs(v2 - k.limit) + k.value_errors[m - 1];
    k.stabilized = std::abs(v2 - v1) <= 0.02 * std::max(std::abs(v2), 1e-300);
    return k;
}

KernelEstimate kernel_estimate(const ExtensionSpec& e, const Word& zeta_w,
                               const GroupElement& zeta_g, const std::vector<XCylinder>& z_cyls,
                               const SweepTable& ref, const SweepSettings& st) {
    SweepTable src = sweep(e, zeta_w, zeta_g, st);
    return kernel_from_sweeps(src, ref, z_cyls);
}

ThetaValue theta_from_sweeps(const SweepTable& z_sw, const SweepTable& ref,
                             const std::vector<std::pair<XCylinder, double>>& f) {
    ThetaValue tv;
    XCylinder id_slice{Word{}, ref.group_id};
    int zrow = ref.cyl_index(id_slice);
    if (zrow < 0) throw std::invalid_argument("reference sweep does not track X_id");
    double total_w = 0.0, covered_w = 0.0;
    const int nmax = std::min(z_sw.N, ref.N);
    for (const auto& [cyl, coef] : f) {
        total_w += std::abs(coef);
        int i = z_sw.cyl_index(cyl);
        if (i < 0) continue;
        covered_w += std::abs(coef);
        auto pts = ratio_points(z_sw.logA[i], ref.logA[zrow], nmax);
        if (pts.empty()) continue;  // zero mass, contributes 0
        tv.value += coef * extrapolate_inverse_n(pts).first;
    }
    tv.covered_fraction = total_w > 0.0 ? covered_w / total_w : 1.0;
    tv.partial = tv.covered_fraction < 1.0;
    return tv;
}

ThetaValue theta_eval(const ExtensionSpec& e, const std::vector<std::pair<XCylinder, double>>& f,
                      const Word& z_w, const GroupElement& z_g, const SweepTable& ref,
                      const SweepSettings& st) {
    SweepTable z_sw = sweep(e, z_w, z_g, st);
    return theta_from_sweeps(z_sw, ref, f);
}

std::vector<std::pair<Word, GroupElement>> standard_mesh(const ExtensionSpec& e, int depth,
                                                         int ball_radius) {
    std::vector<std::pair<Word, GroupElement>> mesh;
    auto words = words_of_length(e.shift, depth);
    auto ball = e.group.ball(ball_radius);
    for (const auto& g : ball)
        for (const auto& w : words) mesh.push_back({w, g});
    return mesh;
}

double harmonicity_residual(const ExtensionSpec& e, const PointFunction& h, double rho_hat,
                            const std::vector<std::pair<Word, GroupElement>>& mesh) {
    double worst = 0.0;
    for (const auto& [w, g] : mesh) {
        double hv = h(w, g);
        double lh = 0.0;
        bool any_pre = false;
        for (int a = 0; a < e.shift.alphabet_size(); ++a) {
            if (!e.shift.admissible_pair(a, w.front())) continue;
            Word aw;
            aw.reserve(w.size() + 1);
            aw.push_back(a);
            aw.insert(aw.end(), w.begin(), w.end());
            double phi = e.potential.phi(e.shift, aw);
            double pre = h(aw, e.group.multiply(g, e.group.invert(e.psi_of(a))));
            if (phi * pre != 0.0) any_pre = true;
            lh += phi * pre;
        }
        if (hv == 0.0) {
            if (any_pre) return -1.0;  // sentinel: zero value with live preimages
            continue;
        }
        worst = std::max(worst, std::abs(lh - rho_hat * hv) / (rho_hat * hv));
    }
    return worst;
}

LipschitzReport lipschitz_kernel_check(
    const ExtensionSpec& e,
    const std::vector<std::pair<std::pair<Word, GroupElement>, std::pair<Word, GroupElement>>>&
        pairs,
    const std::vector<XCylinder>& z_mesh, const SweepTable& ref, const SweepSettings& st) {
    LipschitzReport rep;
    const int lw = std::max(e.potential.depth - 1, 1);
    for (const auto& [z1, z2] : pairs) {
        if (z1.first.empty() || z2.first.empty() || z1.first.front() != z2.first.front() ||
            !(z1.second == z2.second))
            throw std::invalid_argument("pair must share first symbol and group element");
        double d = metric(z1.first, z2.first, MetricParam{e.potential.metric_r});
        // Sources identical at DP-start resolution give exactly equal kernels.
        Word a = least_extension(e.shift, z1.first, lw);
        Word b = least_extension(e.shift, z2.first, lw);
        a.resize(lw);
        b.resize(lw);
        if (a == b) {
            ++rep.skipped_equal;
            continue;
        }
        SweepTable s1 = sweep(e, z1.first, z1.second, st);
        SweepTable s2 = sweep(e, z2.first, z2.second, st);
        ++rep.evaluated;
        for (const XCylinder& c : z_mesh) {
            bool m1 = false, m2 = false;
            double k1 = target_value(s1, ref, c, m1).first;
            double k2 = target_value(s2, ref, c, m2).first;
            if (m1 || m2) continue;
            if (k1 <= 0.0 || k2 <= 0.0) {
                rep.finite = false;
                continue;
            }
            rep.d_hat = std::max(rep.d_hat, std::abs(std::log(k1) - std::log(k2)) / d);
        }
    }
    return rep;
}

std::vector<PathSample> sample_paths(const ExtensionSpec& e, const GibbsData& gibbs, int L,
                                     int count, std::uint64_t seed,
                                     const std::function<double(const GroupElement&)>& nu_slice,
                                     double rho_hat) {
    if (L < gibbs.window) throw std::invalid_argument("path length below window size");
    GibbsChain ch = build_chain(e, gibbs);
    const double log_rho = std::log(rho_hat);
    std::vector<PathSample> out;
    out.reserve(count);
    for (int p = 0; p < count; ++p) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(p));
        int state = pick(rng, ch.initial);
        PathSample ps;
        ps.base_path = gibbs.states[state];
        while (static_cast<int>(ps.base_path.size()) < L) {
            int k = pick(rng, ch.prob[state]);
            state = ch.succ[state][k];
            ps.base_path.push_back(gibbs.states[state].back());
        }
        GroupElement g = e.group.id();
        for (int n = 1; n <= L; ++n) {
            g = e.group.multiply(g, e.psi_of(ps.base_path[n - 1]));
            ps.group_traj.push_back(g);
            if (nu_slice)
                ps.observables.push_back(nu_slice(g) * std::exp(-n * log_rho));
        }
        out.push_back(std::move(ps));
    }
    return out;
}

MartingaleBucketReport martingale_bucket_test(
    const ExtensionSpec& e, const GibbsData& gibbs,
    const std::function<double(const GroupElement&)>& nu_slice, double rho_hat, int n_paths,
    int check_n, std::uint64_t seed) {
    GibbsChain ch = build_chain(e, gibbs);
    const double log_rho = std::log(rho_hat);
    // key: (state index at -n, group at n); value: (W_n, samples of W_{n+1}).
    std::map<std::pair<int, GroupElement>, std::pair<double, std::vector<double>>> buckets;
    for (int p = 0; p < n_paths; ++p) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(p));
        int state = pick(rng, ch.initial);
        GroupElement g = e.group.id();
        int key_state = -1;
        GroupElement key_g;
        double wn = 0.0;
        for (int k = 1; k <= check_n + 1; ++k) {
            int j = pick(rng, ch.pred_prob[state]);
            state = ch.pred[state][j];
            g = e.group.multiply(e.psi_of(gibbs.states[state].back()), g);
            if (k == check_n) {
                key_state = state;
                key_g = g;
                wn = nu_slice(g) * std::exp(-k * log_rho);
            }
            if (k == check_n + 1) {
                double wn1 = nu_slice(g) * std::exp(-k * log_rho);
                auto& b = buckets[{key_state, key_g}];
                b.first = wn;
                b.second.push_back(wn1);
            }
        }
    }
    MartingaleBucketReport rep;
    rep.paths = n_paths;
    for (const auto& [key, data] : buckets) {
        const auto& samples = data.second;
        if (samples.size() < 30) continue;
        double mean = 0.0;
        for (double v : samples) mean += v;
        mean /= samples.size();
        double ss = 0.0;
        for (double v : samples) ss += (v - mean) * (v - mean);
        double se = std::sqrt(ss / (samples.size() - 1.0) / samples.size());
        // Relative floor: rho_hat enters as exp(-n log rho), so its last-digit
        // error must not register when the conditional variance is (near) zero.
        se = std::max(se, 1e-5 * std::abs(data.first));
        if (se <= 0.0) continue;
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(mean - data.first) / se);
        ++rep.buckets_tested;
    }
    rep.pass = rep.buckets_tested > 0 && rep.max_abs_z <= 3.0;
    return rep;
}

RatioMartingaleReport ratio_martingale(const ExtensionSpec& e, const GibbsData& gibbs,
                                       const PointFunction& f, const PointFunction& h, int L,
                                       int count, std::uint64_t seed) {
    GibbsChain ch = build_chain(e, gibbs);
    RatioMartingaleReport rep;
    std::vector<std::vector<double>> ratios(count);
    for (int p = 0; p < count; ++p) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(p));
        int state = pick(rng, ch.initial);
        Word past = gibbs.states[state];  // grows on the left
        GroupElement g = e.group.id();    // psi(w_{-n}..w_{-1})
        for (int n = 1; n <= L; ++n) {
            int j = pick(rng, ch.pred_prob[state]);
            state = ch.pred[state][j];
            int sym = gibbs.states[state].back();
            past.insert(past.begin(), sym);
            g = e.group.multiply(e.psi_of(sym), g);
            GroupElement g_pt = e.group.invert(g);
            double hv = h(past, g_pt);
            if (hv == 0.0) {
                rep.h_vanished = true;
                ratios[p].push_back(0.0);
                continue;
            }
            ratios[p].push_back(f(past, g_pt) / hv);
        }
    }
    for (int n = 0; n < L; ++n) {
        double lo = ratios[0][n], hi = ratios[0][n];
        for (int p = 1; p < count; ++p) {
            lo = std::min(lo, ratios[p][n]);
            hi = std::max(hi, ratios[p][n]);
        }
        rep.spreads.push_back(hi - lo);
    }
    rep.initial_spread = rep.spreads.front();
    rep.terminal_spread = rep.spreads.back();
    return rep;
}

RegularityCoefficients regularity_coefficients(const ExtensionSpec& e, const PointFunction& f,
                                               int depth_hi, int ball_radius) {
    RegularityCoefficients rc;
    rc.c_n.assign(depth_hi + 1, 0.0);
    const double r = e.potential.metric_r;
    auto words = words_of_length(e.shift, depth_hi);
    auto ball = e.group.ball(ball_radius);
    for (const auto& g : ball) {
        std::vector<double> vals(words.size());
        for (size_t i = 0; i < words.size(); ++i) vals[i] = f(words[i], g);
        for (size_t i = 0; i < words.size(); ++i)
            for (size_t j = 0; j < words.size(); ++j) {
                if (i == j) continue;
                size_t lcp = 0;
                while (lcp < words[i].size() && words[i][lcp] == words[j][lcp]) ++lcp;
                double diff = std::abs(vals[i] - vals[j]);
                double d = std::pow(r, static_cast<double>(lcp));
                if (vals[i] != 0.0) {
                    double rel = diff / std::abs(vals[i]);
                    for (size_t n = 0; n <= lcp && n <= static_cast<size_t>(depth_hi); ++n)
                        rc.c_n[n] = std::max(rc.c_n[n], rel);
                    rc.d_x = std::max(rc.d_x, rel / d);
                }
                if (vals[i] > 0.0 && vals[j] > 0.0)
                    rc.ld = std::max(rc.ld, std::abs(std::log(vals[i]) - std::log(vals[j])) / d);
            }
    }
    return rc;
}

}  // namespace cme
