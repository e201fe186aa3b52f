#include "cme/potential.hpp"

#include <algorithm>
#include <cmath>

namespace cme {

void PotentialSpec::validate(const ShiftSpec& spec) const {
    if (depth < 1) throw std::invalid_argument("potential depth must be >= 1");
    if (!(metric_r > 0.0 && metric_r < 1.0)) throw std::invalid_argument("metric r must lie in (0,1)");
    auto words = words_of_length(spec, depth);
    for (const auto& w : words) {
        auto it = values.find(w);
        if (it == values.end())
            throw std::invalid_argument("potential missing a value on an admissible depth-" +
                                        std::to_string(depth) + " word");
        if (!(it->second > 0.0)) throw std::invalid_argument("potential values must be strictly positive");
    }
}

double PotentialSpec::phi(const ShiftSpec& spec, const Word& w) const {
    Word key = least_extension(spec, w, depth);
    key.resize(depth);
    auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument("potential undefined on an inadmissible window");
    return it->second;
}

double PotentialSpec::log_phi(const ShiftSpec& spec, const Word& w) const { return std::log(phi(spec, w)); }

PotentialSpec PotentialSpec::powered(double h) const {
    PotentialSpec out = *this;
    out.exact_values.clear();
    for (auto& [w, v] : out.values) v = std::pow(v, h);
    return out;
}

PotentialSpec PotentialSpec::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scale must be positive");
    PotentialSpec out = *this;
    out.exact_values.clear();
    for (auto& [w, v] : out.values) v *= c;
    return out;
}

double phi_n(const PotentialSpec& p, const ShiftSpec& spec, const Word& w, int n) {
    return std::exp(log_phi_n(p, spec, w, n));
}

double log_phi_n(const PotentialSpec& p, const ShiftSpec& spec, const Word& w, int n) {
    if (n == 0) return 0.0;
    if (!is_admissible(spec, w)) throw std::invalid_argument("inadmissible word");
    Word x = least_extension(spec, w, n + p.depth - 1);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        Word win(x.begin() + k, x.begin() + k + p.depth);
        acc += p.log_phi(spec, win);
    }
    return acc;
}

double distortion_constant(const PotentialSpec& p, const ShiftSpec& spec) {
    if (p.depth == 1) return 0.0;
    const int m = p.depth;
    // V_j = max over depth-m words agreeing on the first j symbols of |log ratio|.
    std::vector<double> V(m, 0.0);
    auto words = words_of_length(spec, m);
    for (size_t i = 0; i < words.size(); ++i)
        for (size_t j = i + 1; j < words.size(); ++j) {
            int agree = 0;
            while (agree < m && words[i][agree] == words[j][agree]) ++agree;
            if (agree == 0 || agree >= m) continue;
            double lr = std::abs(std::log(p.values.at(words[i]) / p.values.at(words[j])));
            V[agree] = std::max(V[agree], lr);
        }
    // Prepending a word of any length to x,y with d(x,y) = r^t accumulates at
    // most sum_{j>=t} V_j in log ratio; bound (e^S - 1)/r^t over t = 1..m-1.
    double c = 0.0, rt = 1.0;
    for (int t = 1; t <= m - 1; ++t) {
        rt *= p.metric_r;
        double S = 0.0;
        for (int j = t; j <= m - 1; ++j) S += V[j];
        c = std::max(c, (std::exp(S) - 1.0) / rt);
    }
    return c;
}

int GibbsData::state_index(const Word& u) const {
    auto it = std::lower_bound(states.begin(), states.end(), u);
    if (it == states.end() || *it != u) return -1;
    return static_cast<int>(it - states.begin());
}

namespace {

// Forward transition weights on window states: u -> v when v = shift(u).b is
// admissible; weight = phi on the depth-m window starting at u.
struct WindowGraph {
    std::vector<Word> states;
    // edges[i] = list of (j, weight)
    std::vector<std::vector<std::pair<int, double>>> edges;
};

WindowGraph window_graph(const PotentialSpec& p, const ShiftSpec& spec) {
    const int lw = std::max(p.depth - 1, 1);
    WindowGraph g;
    g.states = words_of_length(spec, lw);
    std::sort(g.states.begin(), g.states.end());
    g.edges.resize(g.states.size());
    for (size_t i = 0; i < g.states.size(); ++i) {
        const Word& u = g.states[i];
        for (int b = 0; b < spec.alphabet_size(); ++b) {
            if (!spec.admissible_pair(u.back(), b)) continue;
            Word ext = u;
            ext.push_back(b);
            Word v(ext.begin() + 1, ext.end());
            auto it = std::lower_bound(g.states.begin(), g.states.end(), v);
            // phi on the depth-m window starting at u (ext truncates to m).
            g.edges[i].push_back({static_cast<int>(it - g.states.begin()), p.phi(spec, ext)});
        }
    }
    return g;
}

// Power iteration for the dominant eigenpair of x -> M x with M given by a
// sparse edge list (transposed if asked). Deterministic all-ones start.
std::pair<double, std::vector<double>> perron(const WindowGraph& g, bool transpose) {
    const size_t n = g.states.size();
    std::vector<double> x(n, 1.0), y(n);
    double lambda = 0.0;
    for (int it = 0; it < 200000; ++it) {
        std::fill(y.begin(), y.end(), 0.0);
        for (size_t i = 0; i < n; ++i)
            for (auto [j, w] : g.edges[i]) {
                if (transpose)
                    y[j] += w * x[i];
                else
                    y[i] += w * x[j];
            }
        double norm = 0.0;
        for (double v : y) norm += v;
        if (!(norm > 0.0)) throw std::runtime_error("transfer matrix lost positivity");
        for (double& v : y) v /= norm;
        double diff = 0.0;
        for (size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(y[i] - x[i]));
        x.swap(y);
        if (diff < 1e-15 && it > 4) {
            lambda = norm;
            break;
        }
        lambda = norm;
    }
    return {lambda, x};
}

}  // namespace

GibbsData base_pressure(const PotentialSpec& p, const ShiftSpec& spec) {
    if (!is_mixing(spec, 4 * spec.alphabet_size() * spec.alphabet_size()))
        throw std::runtime_error("shift is not mixing; Perron data not well-defined");
    WindowGraph g = window_graph(p, spec);
    auto [rho1, left] = perron(g, true);    // transfer-operator eigenfunction
    auto [rho2, right] = perron(g, false);  // eigenmeasure direction
    GibbsData out;
    out.rho_base = 0.5 * (rho1 + rho2);
    out.states = g.states;
    out.left_eigen = left;
    out.right_eigen = right;
    out.window = std::max(p.depth - 1, 1);
    out.stationary.resize(g.states.size());
    double tot = 0.0;
    for (size_t i = 0; i < g.states.size(); ++i) {
        out.stationary[i] = left[i] * right[i];
        tot += out.stationary[i];
    }
    for (double& v : out.stationary) v /= tot;
    return out;
}

PotentialSpec normalize(const PotentialSpec& p, const ShiftSpec& spec) {
    GibbsData g = base_pressure(p, spec);
    const int m = std::max(p.depth, 2);
    PotentialSpec out;
    out.depth = m;
    out.metric_r = p.metric_r;
    for (const auto& w : words_of_length(spec, m)) {
        Word u1(w.begin(), w.begin() + g.window);
        Word u2(w.begin() + 1, w.begin() + 1 + g.window);
        double h1 = g.left_eigen[g.state_index(u1)];
        double h2 = g.left_eigen[g.state_index(u2)];
        out.values[w] = p.phi(spec, w) * h1 / (g.rho_base * h2);
    }
    return out;
}

double gibbs_mass(const GibbsData& g, const PotentialSpec& p, const ShiftSpec& spec, const Word& w) {
    if (!is_admissible(spec, w)) return 0.0;
    const int lw = g.window;
    if (static_cast<int>(w.size()) < lw) {
        // Sum over admissible extensions to window length.
        double total = 0.0;
        for (int b = 0; b < spec.alphabet_size(); ++b)
            if (spec.admissible_pair(w.back(), b)) {
                Word ext = w;
                ext.push_back(b);
                total += gibbs_mass(g, p, spec, ext);
            }
        return total;
    }
    const int n = static_cast<int>(w.size());
    Word u1(w.begin(), w.begin() + lw);
    Word u2(w.end() - lw, w.end());
    int i1 = g.state_index(u1), i2 = g.state_index(u2);
    double lr_sum = 0.0;
    for (size_t i = 0; i < g.states.size(); ++i) lr_sum += g.left_eigen[i] * g.right_eigen[i];
    double mass = g.left_eigen[i1] * g.right_eigen[i2] / lr_sum;
    mass *= phi_n(p, spec, w, n - lw) / std::pow(g.rho_base, n - lw);
    return mass;
}

}  // namespace cme
