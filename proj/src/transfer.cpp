#include "cme/transfer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace cme {

namespace {

// Packs group elements into uint64 so DP levels can be flat sorted vectors.
//   Lattice: 16-bit biased lanes (coordinates must stay within +-16383).
//   Free:    little-endian digits in base 2^ceil(log2(2d)) with a sentinel bit,
//            first letter in the lowest digit (so left-multiplication is cheap).
//   Table:   element index.
struct Codec {
    GroupKind kind;
    int d = 1;
    int bits = 2;          // free kind: bits per letter
    uint64_t mask = 3;
    int max_len = 31;
    std::vector<int> table_len;  // table kind: word lengths by element id

    explicit Codec(const GroupSpec& gs) : kind(gs.kind), d(gs.d) {
        if (kind == GroupKind::Free) {
            bits = std::bit_width(static_cast<unsigned>(2 * d - 1));
            mask = (1ull << bits) - 1;
            max_len = 63 / bits;
        } else if (kind == GroupKind::Table) {
            table_len.resize(gs.table.size());
            for (size_t i = 0; i < gs.table.size(); ++i)
                table_len[i] = gs.word_length(GroupElement{{static_cast<int>(i)}});
        }
    }

    // Free letters: +i -> 2(i-1), -i -> 2(i-1)+1  (xor 1 flips sign).
    static uint64_t letter_code(int s) {
        int i = s > 0 ? s : -s;
        return static_cast<uint64_t>(2 * (i - 1) + (s < 0 ? 1 : 0));
    }
    static int code_letter(uint64_t c) {
        int i = static_cast<int>(c / 2) + 1;
        return (c & 1) ? -i : i;
    }

    uint64_t encode(const GroupElement& g) const {
        switch (kind) {
            case GroupKind::Lattice: {
                uint64_t h = 0;
                for (int i = 0; i < d; ++i)
                    h |= (static_cast<uint64_t>(g.v[i] + 32768) & 0xffff) << (16 * i);
                return h;
            }
            case GroupKind::Free: {
                uint64_t h = 1;
                for (auto it = g.v.rbegin(); it != g.v.rend(); ++it)
                    h = (h << bits) | letter_code(*it);
                return h;
            }
            case GroupKind::Table: return static_cast<uint64_t>(g.v[0]);
        }
        return 0;
    }

    GroupElement decode(uint64_t h) const {
        switch (kind) {
            case GroupKind::Lattice: {
                GroupElement g;
                g.v.resize(d);
                for (int i = 0; i < d; ++i)
                    g.v[i] = static_cast<int>((h >> (16 * i)) & 0xffff) - 32768;
                return g;
            }
            case GroupKind::Free: {
                GroupElement g;
                while (h != 1) {
                    g.v.push_back(code_letter(h & mask));
                    h >>= bits;
                }
                return g;
            }
            case GroupKind::Table: return GroupElement{{static_cast<int>(h)}};
        }
        return {};
    }

    int length(uint64_t h) const {
        switch (kind) {
            case GroupKind::Lattice: {
                int s = 0;
                for (int i = 0; i < d; ++i)
                    s += std::abs(static_cast<int>((h >> (16 * i)) & 0xffff) - 32768);
                return s;
            }
            case GroupKind::Free: return (63 - std::countl_zero(h)) / bits;
            case GroupKind::Table: return table_len[h];
        }
        return 0;
    }
};

// Left-multiplication by a fixed element, precompiled per psi step.
struct LeftMul {
    GroupKind kind;
    uint64_t lattice_delta = 0;          // wraparound-lane addition
    std::vector<uint64_t> free_codes;    // letters of the step, applied last-to-first
    std::vector<int> table_row;          // table[step][.]
    int bits = 2;
    uint64_t mask = 3;

    uint64_t apply(uint64_t h) const {
        switch (kind) {
            case GroupKind::Lattice: {
                // Per-lane modular adds never cross lanes while coordinates
                // stay within the pruning radius (< 16384).
                uint64_t r = 0;
                for (int sh = 0; sh < 64; sh += 16) {
                    uint64_t lane = ((h >> sh) + (lattice_delta >> sh)) & 0xffff;
                    r |= lane << sh;
                }
                return r;
            }
            case GroupKind::Free: {
                for (auto it = free_codes.rbegin(); it != free_codes.rend(); ++it) {
                    uint64_t c = *it;
                    if (h != 1 && (h & mask) == (c ^ 1))
                        h >>= bits;
                    else
                        h = (h << bits) | c;
                }
                return h;
            }
            case GroupKind::Table: return static_cast<uint64_t>(table_row[h]);
        }
        return h;
    }
};

LeftMul compile_mul(const Codec& codec, const GroupSpec& gs, const GroupElement& step) {
    LeftMul m;
    m.kind = gs.kind;
    m.bits = codec.bits;
    m.mask = codec.mask;
    if (gs.kind == GroupKind::Lattice) {
        uint64_t delta = 0;
        for (int i = 0; i < gs.d; ++i)
            delta |= (static_cast<uint64_t>(step.v[i]) & 0xffff) << (16 * i);
        m.lattice_delta = delta;
    } else if (gs.kind == GroupKind::Free) {
        for (int s : step.v) m.free_codes.push_back(Codec::letter_code(s));
    } else {
        m.table_row = gs.table[step.v[0]];
    }
    return m;
}

struct Entry {
    uint32_t win;
    uint64_t g;
    double w;
};

bool entry_key_less(const Entry& a, const Entry& b) {
    if (a.win != b.win) return a.win < b.win;
    return a.g < b.g;
}

struct WindowInfo {
    std::vector<Word> windows;                         // sorted
    // trans[win][a] = (next window index or -1, log phi weight)
    std::vector<std::vector<std::pair<int, double>>> trans;
    int lw = 1;

    int index(const Word& u) const {
        auto it = std::lower_bound(windows.begin(), windows.end(), u);
        if (it == windows.end() || *it != u) return -1;
        return static_cast<int>(it - windows.begin());
    }
};

WindowInfo make_windows(const ExtensionSpec& e) {
    WindowInfo wi;
    wi.lw = std::max(e.potential.depth - 1, 1);
    wi.windows = words_of_length(e.shift, wi.lw);
    std::sort(wi.windows.begin(), wi.windows.end());
    const int k = e.shift.alphabet_size();
    wi.trans.assign(wi.windows.size(), std::vector<std::pair<int, double>>(k, {-1, 0.0}));
    for (size_t i = 0; i < wi.windows.size(); ++i) {
        const Word& u = wi.windows[i];
        for (int a = 0; a < k; ++a) {
            if (!e.shift.admissible_pair(a, u[0])) continue;
            Word ext;
            ext.push_back(a);
            ext.insert(ext.end(), u.begin(), u.end());
            double lw_phi = e.potential.log_phi(e.shift, ext);
            Word nw(ext.begin(), ext.begin() + wi.lw);
            wi.trans[i][a] = {wi.index(nw), lw_phi};
        }
    }
    return wi;
}

int max_step_length(const ExtensionSpec& e) {
    int m = 0;
    for (const auto& s : e.psi) m = std::max(m, e.group.word_length(s));
    return std::max(m, 1);
}

}  // namespace

int PartitionTable::nonzero_count() const {
    int c = 0;
    for (int n = 1; n <= N; ++n)
        if (logZ[n] > kNegInf) ++c;
    return c;
}

int SweepTable::cyl_index(const XCylinder& c) const {
    auto it = std::lower_bound(cylinders.begin(), cylinders.end(), c);
    if (it == cylinders.end() || !(*it == c)) return -1;
    return static_cast<int>(it - cylinders.begin());
}

const std::vector<double>& SweepTable::row(const XCylinder& c) const {
    int i = cyl_index(c);
    if (i < 0) throw std::out_of_range("cylinder not tracked by this sweep");
    return logA[i];
}

SweepTable sweep(const ExtensionSpec& e, const Word& start, const GroupElement& source_g,
                 const SweepSettings& st) {
    const Codec codec(e.group);
    const WindowInfo wi = make_windows(e);
    const int k = e.shift.alphabet_size();
    const int max_step = max_step_length(e);
    const int src_len = e.group.word_length(source_g);

    if (e.group.kind == GroupKind::Free) {
        int need = st.N * max_step + st.depth * max_step + st.ball_radius + src_len;
        if (need > codec.max_len)
            throw std::length_error("free-group word length " + std::to_string(need) +
                                    " exceeds the 64-bit packing budget; reduce N");
    }
    if (e.group.kind == GroupKind::Lattice && st.N * max_step + st.ball_radius + src_len > 16000)
        throw std::length_error("lattice coordinates exceed the packing budget; reduce N");

    Word x0 = least_extension(e.shift, start, wi.lw);

    // Tracked cylinders: slices X_g (empty word) and words up to st.depth,
    // group elements in the ball.
    std::vector<GroupElement> ball = e.group.ball(st.ball_radius, 24);
    std::vector<XCylinder> cyls;
    for (const auto& g : ball) cyls.push_back({Word{}, g});
    for (int dep = 1; dep <= st.depth; ++dep)
        for (const auto& w : words_of_length(e.shift, dep))
            for (const auto& g : ball) cyls.push_back({w, g});
    std::sort(cyls.begin(), cyls.end());

    SweepTable out;
    out.start = x0;
    out.source_g = source_g;
    out.group_id = e.group.id();
    out.N = st.N;
    out.depth = st.depth;
    out.ball_radius = st.ball_radius;
    out.cylinders = cyls;
    out.logA.assign(cyls.size(), std::vector<double>(st.N + 1, kNegInf));

    // Per-cylinder precomputation: prefix weight against each window, the
    // admissibility of (w, window) splices, and psi_w^{-1}.
    struct CylPre {
        std::vector<double> log_pw;  // by window index; NaN if splice inadmissible
        uint64_t target_from_g;      // encoded psi_w^{-1} g^{-1} source_g
        int wlen;
    };
    std::vector<CylPre> pre(cyls.size());
    for (size_t ci = 0; ci < cyls.size(); ++ci) {
        const XCylinder& c = cyls[ci];
        CylPre& cp = pre[ci];
        cp.wlen = static_cast<int>(c.word.size());
        cp.log_pw.assign(wi.windows.size(), std::numeric_limits<double>::quiet_NaN());
        GroupElement t = e.group.multiply(
            e.group.invert(psi_n(e, c.word)),
            e.group.multiply(e.group.invert(c.g), e.group.invert(source_g)));
        cp.target_from_g = codec.encode(t);
        for (size_t widx = 0; widx < wi.windows.size(); ++widx) {
            if (c.word.empty()) {
                cp.log_pw[widx] = 0.0;
                continue;
            }
            Word spliced = c.word;
            spliced.insert(spliced.end(), wi.windows[widx].begin(), wi.windows[widx].end());
            if (!is_admissible(e.shift, spliced)) continue;
            cp.log_pw[widx] = log_phi_n(e.potential, e.shift, spliced, cp.wlen);
        }
    }

    // Edge terms n < |w|: the full prefix u = w_{1..n} with the remainder of w
    // matching the start word.
    for (size_t ci = 0; ci < cyls.size(); ++ci) {
        const XCylinder& c = cyls[ci];
        const int wlen = pre[ci].wlen;
        for (int n = 1; n < wlen && n <= st.N; ++n) {
            Word u(c.word.begin(), c.word.begin() + n);
            Word rest(c.word.begin() + n, c.word.end());
            bool match = true;
            Word xt = least_extension(e.shift, x0, static_cast<int>(rest.size()));
            for (size_t i = 0; i < rest.size(); ++i)
                if (xt[i] != rest[i]) match = false;
            if (!match) continue;
            if (!e.shift.admissible_pair(u.back(), rest.empty() ? x0[0] : rest[0])) continue;
            GroupElement need = e.group.multiply(e.group.invert(c.g), e.group.invert(source_g));
            if (!(psi_n(e, u) == need)) continue;
            Word full = u;
            full.insert(full.end(), xt.begin(), xt.end());
            out.logA[ci][n] = log_phi_n(e.potential, e.shift, full, n);
        }
    }

    // Pruning radius per level.
    auto prune_radius = [&](int level) {
        long long a = static_cast<long long>(level) * max_step + src_len;
        long long b = static_cast<long long>(st.N - level) * max_step + st.ball_radius +
                      st.depth * max_step + src_len;
        return static_cast<int>(std::min(a, b));
    };

    std::vector<LeftMul> muls;
    for (int a = 0; a < k; ++a) muls.push_back(compile_mul(codec, e.group, e.psi_of(a)));

    std::vector<Entry> level{{static_cast<uint32_t>(wi.index(Word(x0.begin(), x0.begin() + wi.lw))),
                              codec.encode(e.group.id()), 1.0}};
    double offset = 0.0;
    std::vector<Entry> children;

    auto accumulate = [&](int n_level) {
        // A_n(w, g) with n = n_level + |w|: binary search per (cylinder, window).
        for (size_t ci = 0; ci < cyls.size(); ++ci) {
            const CylPre& cp = pre[ci];
            const int n = n_level + cp.wlen;
            if (n < 1 || n > st.N) continue;
            double acc = 0.0;
            bool any = false;
            for (size_t widx = 0; widx < wi.windows.size(); ++widx) {
                if (std::isnan(cp.log_pw[widx])) continue;
                Entry probe{static_cast<uint32_t>(widx), cp.target_from_g, 0.0};
                auto it = std::lower_bound(level.begin(), level.end(), probe, entry_key_less);
                if (it != level.end() && it->win == probe.win && it->g == probe.g) {
                    acc += it->w * std::exp(cp.log_pw[widx]);
                    any = true;
                }
            }
            if (any && acc > 0.0) out.logA[ci][n] = std::log(acc) + offset;
        }
    };

    accumulate(0);
    for (int level_j = 1; level_j <= st.N; ++level_j) {
        children.clear();
        children.reserve(level.size() * k);
        const int pr = prune_radius(level_j);
        for (const Entry& en : level) {
            for (int a = 0; a < k; ++a) {
                auto [nw, lphi] = wi.trans[en.win][a];
                if (nw < 0) continue;
                uint64_t h = muls[a].apply(en.g);
                if (codec.length(h) > pr) continue;
                children.push_back({static_cast<uint32_t>(nw), h, en.w * std::exp(lphi)});
            }
        }
        std::sort(children.begin(), children.end(), entry_key_less);
        level.clear();
        double maxw = 0.0;
        for (size_t i = 0; i < children.size();) {
            size_t j = i;
            double sum = 0.0;
            while (j < children.size() && children[j].win == children[i].win &&
                   children[j].g == children[i].g) {
                sum += children[j].w;
                ++j;
            }
            level.push_back({children[i].win, children[i].g, sum});
            maxw = std::max(maxw, sum);
            i = j;
        }
        out.states_visited += static_cast<long long>(level.size());
        if (static_cast<long long>(level.size()) > st.max_states)
            throw std::length_error("DP level exceeded the state budget (" +
                                    std::to_string(level.size()) + " states); reduce N");
        if (level.empty()) break;
        // Rescale so float weights stay near 1; offset carries the log scale.
        for (Entry& en : level) en.w /= maxw;
        offset += std::log(maxw);
        accumulate(level_j);
    }
    return out;
}

PartitionTable zcount(const ExtensionSpec& e, const Word& xi, int N, bool exact) {
    SweepSettings st;
    st.N = N;
    st.depth = 1;  // Z only needs the slices
    st.ball_radius = 0;
    SweepTable sw = sweep(e, xi, e.group.id(), st);
    PartitionTable t;
    t.xi = sw.start;
    t.N = N;
    t.states_visited = sw.states_visited;
    t.logZ.assign(N + 1, kNegInf);
    const auto& row = sw.row(XCylinder{Word{}, e.group.id()});
    for (int n = 1; n <= N; ++n) t.logZ[n] = row[n];
    int g = 0;
    for (int n = 1; n <= N; ++n)
        if (t.logZ[n] > kNegInf) g = std::gcd(g, n);
    t.period = g == 0 ? 1 : g;
    if (exact) {
        std::map<Word, Rational> vals = e.potential.exact_values;
        if (vals.empty())
            throw std::invalid_argument("rational mode requires potential values given as \"p/q\" strings");
        t.exactZ = zcount_exact(e, xi, std::min(N, 30), vals);
        t.has_exact = true;
    }
    return t;
}

std::vector<Rational> zcount_exact(const ExtensionSpec& e, const Word& xi, int N,
                                   const std::map<Word, Rational>& exact_values) {
    const WindowInfo wi = make_windows(e);
    Word x0 = least_extension(e.shift, xi, wi.lw);
    const int k = e.shift.alphabet_size();
    const int max_step = max_step_length(e);
    auto rational_phi = [&](Word win) -> Rational {
        win = least_extension(e.shift, win, e.potential.depth);
        win.resize(e.potential.depth);
        return exact_values.at(win);
    };

    using Key = std::pair<int, GroupElement>;
    std::map<Key, Rational> level;
    level[{wi.index(Word(x0.begin(), x0.begin() + wi.lw)), e.group.id()}] = Rational(1);
    std::vector<Rational> Z(N + 1, Rational(0));
    for (int j = 1; j <= N; ++j) {
        std::map<Key, Rational> next;
        for (const auto& [key, wgt] : level) {
            const auto& [widx, g] = key;
            for (int a = 0; a < k; ++a) {
                auto [nw, lphi] = wi.trans[widx][a];
                (void)lphi;
                if (nw < 0) continue;
                GroupElement h = e.group.multiply(e.psi_of(a), g);
                if (e.group.word_length(h) > (N - j) * max_step) continue;
                Word ext;
                ext.push_back(a);
                ext.insert(ext.end(), wi.windows[widx].begin(), wi.windows[widx].end());
                next[{nw, h}] += wgt * rational_phi(ext);
            }
        }
        level = std::move(next);
        // Z^j = sum over states at the identity, any window.
        Rational z(0);
        for (const auto& [key, wgt] : level)
            if (key.second == e.group.id()) z += wgt;
        Z[j] = z;
    }
    return Z;
}

SpectralEstimate spectral_radius(const PartitionTable& t) {
    if (t.nonzero_count() < 8)
        throw std::runtime_error("need at least 8 nonzero partition values for a spectral fit");
    const int p = t.period;
    std::vector<int> ks;
    for (int n = p; n <= t.N; n += p)
        if (t.logZ[n] > kNegInf) ks.push_back(n / p);
    // Ratio model: log(Z^{p(k+1)}/Z^{pk}) = p log rho - beta log((k+1)/k)
    //              + c (1/k - 1/(k+1)); fit by OLS over a trailing window.
    auto fit_from = [&](size_t first) -> OlsFit {
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (size_t i = first; i + 1 < ks.size(); ++i) {
            int k0 = ks[i], k1 = ks[i + 1];
            if (k1 != k0 + 1) continue;
            double dy = t.logZ[p * k1] - t.logZ[p * k0];
            X.push_back({static_cast<double>(p), -std::log((k0 + 1.0) / k0), 1.0 / k0 - 1.0 / (k0 + 1)});
            y.push_back(dy);
        }
        return ols(X, y);
    };
    OlsFit half = fit_from(ks.size() / 2);
    OlsFit third = fit_from(ks.size() / 3);
    SpectralEstimate se;
    se.period = p;
    se.rho_hat = std::exp(half.coef[0]);
    se.beta = half.coef[1];
    se.beta_stderr = std::max(half.stderr_[1], std::abs(half.coef[1] - third.coef[1]));
    double rho_third = std::exp(third.coef[0]);
    se.stderr_ = std::max(se.rho_hat * half.stderr_[0], std::abs(se.rho_hat - rho_third));
    int nmax = p * ks.back();
    se.rho_roots = std::exp(t.logZ[nmax] / nmax);
    return se;
}

double extension_apply(const ExtensionSpec& e, const std::vector<std::pair<XCylinder, double>>& f,
                       int n, const Word& at_word, const GroupElement& at_g) {
    int depth = 1, ball = 1;
    for (const auto& [c, coef] : f) {
        depth = std::max(depth, static_cast<int>(c.word.size()));
        // Track enough of the ball to cover every target slice.
        ball = std::max(ball, e.group.word_length(e.group.multiply(e.group.invert(c.g), at_g)));
        ball = std::max(ball, e.group.word_length(c.g));
    }
    SweepSettings st;
    st.N = n;
    st.depth = depth;
    st.ball_radius = ball + e.group.word_length(at_g);
    SweepTable sw = sweep(e, at_word, at_g, st);
    double acc = 0.0;
    for (const auto& [c, coef] : f) {
        int ci = sw.cyl_index(c);
        if (ci < 0) throw std::out_of_range("cylinder outside tracked window");
        double la = sw.logA[ci][n];
        if (la > kNegInf) acc += coef * std::exp(la);
    }
    return acc;
}

DoeblinFortetReport doeblin_fortet_check(
    const ExtensionSpec& e, const std::vector<std::pair<XCylinder, double>>& f, int n,
    const std::vector<std::pair<std::pair<Word, GroupElement>, std::pair<Word, GroupElement>>>& pairs) {
    const double cphi = distortion_constant(e.potential, e.shift);
    const double r = e.potential.metric_r;
    // D(f): Lipschitz seminorm of f over pairs in a common 1-cylinder,
    // computed on the cylinder words of f extended one level.
    double Df = 0.0;
    int fdepth = 1;
    for (const auto& [c, coef] : f) fdepth = std::max(fdepth, static_cast<int>(c.word.size()));
    auto eval_f = [&](const Word& w, const GroupElement& g) {
        double v = 0.0;
        for (const auto& [c, coef] : f) {
            if (c.word.size() > w.size()) continue;
            if (!std::equal(c.word.begin(), c.word.end(), w.begin())) continue;
            if (!(c.g == g)) continue;
            v += coef;
        }
        return v;
    };
    for (const auto& w1 : words_of_length(e.shift, fdepth + 1))
        for (const auto& w2 : words_of_length(e.shift, fdepth + 1)) {
            if (w1[0] != w2[0] || w1 == w2) continue;
            for (const auto& [c, coef] : f) {
                double d = metric(w1, w2, {r});
                Df = std::max(Df, std::abs(eval_f(w1, c.g) - eval_f(w2, c.g)) / d);
            }
        }

    DoeblinFortetReport rep;
    rep.worst_gap = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<XCylinder, double>> f_abs;
    for (const auto& [c, coef] : f) f_abs.push_back({c, std::abs(coef)});
    double rn = std::pow(r, n);
    for (const auto& [z1, z2] : pairs) {
        if (z1.first[0] != z2.first[0] || !(z1.second == z2.second))
            throw std::invalid_argument("pair must share its first symbol and group element");
        double lx = extension_apply(e, f, n, z1.first, z1.second);
        double ly = extension_apply(e, f, n, z2.first, z2.second);
        double d = metric(z1.first, z2.first, {r});
        double bound_core = extension_apply(e, f_abs, n, z1.first, z1.second);
        // L^n(r^n D(f))(x) = r^n D(f) L^n(1)(x); L^n 1 sums every slice.
        double l_one = 0.0;
        {
            SweepSettings st;
            st.N = n;
            st.depth = 1;
            st.ball_radius = std::min(n * max_step_length(e), 12) +
                             e.group.word_length(z1.second);
            SweepTable sw = sweep(e, z1.first, z1.second, st);
            std::vector<double> terms;
            for (size_t ci = 0; ci < sw.cylinders.size(); ++ci)
                if (sw.cylinders[ci].word.empty() && sw.logA[ci][n] > kNegInf)
                    terms.push_back(sw.logA[ci][n]);
            l_one = std::exp(logsumexp(terms));
        }
        double rhs = cphi * d * (bound_core + rn * Df * l_one);
        double gap = std::abs(lx - ly) - rhs;
        rep.worst_gap = std::max(rep.worst_gap, gap);
        // Log-Hoelder variant: |log L^n f(x) - log L^n f(y)| <= C d(x,y)
        // for nonnegative f (checked when both sides are positive).
        if (lx > 0 && ly > 0) {
            double lg = std::abs(std::log(lx) - std::log(ly)) - (cphi + rn * Df) * d;
            rep.worst_log_gap = std::max(rep.worst_log_gap, lg);
        }
    }
    rep.pass = rep.worst_gap <= 1e-9;
    return rep;
}

}  // namespace cme
