#include "cme/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "cme/harmonic.hpp"

namespace cme {

SpectralEstimate extended_pressure(const ExtensionSpec& e, double h, const Word& xi, int N) {
    ExtensionSpec eh = e;
    eh.potential = e.potential.powered(h);
    return spectral_radius(zcount(eh, xi, N));
}

DimensionReport find_delta(const ExtensionSpec& e, const Word& xi, double h_lo, double h_hi,
                           double tol, int N) {
    if (!(tol > 0.0) || !(h_lo < h_hi)) throw std::invalid_argument("bad bracket or tolerance");
    DimensionReport rep;
    rep.tol = tol;
    rep.N = N;

    auto pressure = [&](double h) { return extended_pressure(e, h, xi, N); };

    // Pressure is strictly decreasing in h for phi < 1; expand until bracketed.
    double lo = h_lo, hi = h_hi;
    SpectralEstimate se_lo = pressure(lo), se_hi = pressure(hi);
    int expansions = 0;
    while (se_lo.rho_hat <= 1.0 && expansions < 8) {
        lo -= (hi - lo);
        se_lo = pressure(lo);
        ++expansions;
    }
    while (se_hi.rho_hat >= 1.0 && expansions < 16) {
        hi += (hi - lo);
        se_hi = pressure(hi);
        ++expansions;
    }
    if (!(se_lo.rho_hat > 1.0 && se_hi.rho_hat < 1.0))
        throw std::invalid_argument("pressure bracket invalid: rho(" + std::to_string(lo) +
                                    ") = " + std::to_string(se_lo.rho_hat) + ", rho(" +
                                    std::to_string(hi) + ") = " + std::to_string(se_hi.rho_hat));

    // Illinois-damped regula falsi on log rho, certificate kept as a bracket.
    double f_lo = std::log(se_lo.rho_hat), f_hi = std::log(se_hi.rho_hat);
    int side = 0;
    while (hi - lo > tol && rep.iterations < 80) {
        double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        double margin = 0.01 * (hi - lo);
        mid = std::clamp(mid, lo + margin, hi - margin);
        double f_mid = std::log(pressure(mid).rho_hat);
        if (f_mid > 0.0) {
            lo = mid;
            f_lo = f_mid;
            if (side == 1) f_hi *= 0.5;
            side = 1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if (side == -1) f_lo *= 0.5;
            side = -1;
        }
        ++rep.iterations;
    }
    rep.pressure_lo = std::exp(f_lo);
    rep.pressure_hi = std::exp(f_hi);
    rep.delta = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);

    SpectralEstimate at_delta = pressure(rep.delta);
    rep.ext_rho_at_delta = at_delta.rho_hat;
    rep.ext_rho_stderr = at_delta.stderr_;

    // Propagate the fit stderr through the local pressure slope into delta.
    double slope = (f_hi - f_lo) / (hi - lo);
    double rel_err = at_delta.stderr_ / std::max(at_delta.rho_hat, 1e-12);
    double delta_err = std::abs(slope) > 0.0 ? rel_err / std::abs(slope) : tol;
    rep.delta_lo = rep.delta - delta_err - 0.5 * tol;
    rep.delta_hi = rep.delta + delta_err + 0.5 * tol;

    PotentialSpec pd = e.potential.powered(rep.delta);
    GibbsData gd = base_pressure(pd, e.shift);
    // The base radius dominates the extension radius, which the bisection
    // drives to 1; floor at the theoretical bound to keep dim_value >= delta
    // when the estimate lands epsilon below it.
    rep.rho_delta = std::max(gd.rho_base, 1.0);

    int wlen = std::max(e.potential.depth, gd.window);
    double lyap = 0.0;
    for (const Word& w : words_of_length(e.shift, wlen))
        lyap += gibbs_mass(gd, pd, e.shift, w) * e.potential.log_phi(e.shift, w);
    rep.lyapunov = lyap;
    if (std::abs(lyap) > 1e-15)
        rep.dim_value = rep.delta + std::log(rep.rho_delta) / std::abs(lyap);
    else
        rep.dim_value = rep.delta;

    rep.amenability_gap = std::log(rep.rho_delta) - std::log(rep.ext_rho_at_delta);
    rep.amenable_consistent = rep.amenability_gap < 3.0 * rel_err + tol;
    return rep;
}

DecayCheckReport decay_check(const ExtensionSpec& e, const DimensionReport& rep,
                             const std::function<double(const GroupElement&)>& nu_slice,
                             int L, int count, std::uint64_t seed) {
    DecayCheckReport out;
    out.paths = count;
    if (rep.amenable_consistent || std::abs(rep.rho_delta - 1.0) < 1e-9) {
        out.applicable = false;
        return out;
    }
    out.applicable = true;

    ExtensionSpec ed = e;
    ed.potential = e.potential.powered(rep.delta);
    GibbsData gd = base_pressure(ed.potential, e.shift);
    auto paths = sample_paths(ed, gd, L, count, seed, nullptr, 1.0);

    const double log_rho = std::log(rep.rho_delta);
    const int n0 = std::min(4, L - 1);
    double slope_sum = 0.0;
    for (const auto& ps : paths) {
        double o0 = nu_slice(ps.group_traj[n0 - 1]) * std::exp(n0 * log_rho);
        double oL = nu_slice(ps.group_traj[L - 1]) * std::exp(L * log_rho);
        if (o0 > 0.0 && oL > 0.0) {
            slope_sum += (std::log(oL) - std::log(o0)) / (L - n0);
            if (oL <= o0 / 10.0) ++out.passed;
        }
    }
    out.pass_fraction = static_cast<double>(out.passed) / count;
    out.mean_slope = slope_sum / count;
    out.pass = out.pass_fraction >= 0.95;
    return out;
}

}  // namespace cme
