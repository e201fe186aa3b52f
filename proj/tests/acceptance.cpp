// Acceptance suite: end-to-end checks of the engine against closed-form
// random-walk results. Takes the bundled config directory as argv[1] and
// prints one PASS/FAIL line per criterion; exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cme/dimension.hpp"
#include "cme/harmonic.hpp"
#include "cme/oracles.hpp"
#include "cme/validate.hpp"

using namespace cme;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    if (!pass) ++g_failures;
    std::printf("criterion %2d [%-22s] %s  (%.1fs) %s\n", idx, name.c_str(),
                pass ? "PASS" : "FAIL", seconds, detail.c_str());
    std::fflush(stdout);
}

template <typename F>
void criterion(int idx, const std::string& name, F body) {
    auto t0 = Clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& ex) {
        detail = std::string("exception: ") + ex.what();
    }
    report(idx, name, pass, detail, std::chrono::duration<double>(Clock::now() - t0).count());
}

double f2d(const Float50& x) { return x.convert_to<double>(); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Word xi_of(const ExtensionSpec& e) {
    return least_extension(e.shift, Word{0}, std::max(e.potential.depth, 2));
}

PolyaSpec polya1(const Rational& pp, const Rational& pm) {
    PolyaSpec ps;
    ps.d = 1;
    ps.p_plus = {pp};
    ps.p_minus = {pm};
    ps.validate();
    return ps;
}

// Square-lattice symmetric walk, used for the d = 2 spectral/classifier rows.
const char* kZ2Json = R"({
    "name": "polya_d2_sym_inline", "family": "polya",
    "shift": {"symbols": ["+x","-x","+y","-y"],
              "adjacency": [[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]],
              "dagger": {"+x":"-x","-x":"+x","+y":"-y","-y":"+y"}},
    "potential": {"depth": 1,
                  "values": {"+x":"1/4","-x":"1/4","+y":"1/4","-y":"1/4"}},
    "group": {"kind": "lattice", "d": 2},
    "psi": {"+x":[1,0],"-x":[-1,0],"+y":[0,1],"-y":[0,-1]},
    "numerics": {"N": 40, "depth": 2, "ball_radius": 2}})";

struct Bundle {
    SystemConfig cfg;
    Word xi;
    PartitionTable zt;
    SpectralEstimate se;
};

Bundle load_bundle(const std::string& path, int N) {
    Bundle b;
    b.cfg = load_config(path);
    b.xi = xi_of(b.cfg.extension);
    b.zt = zcount(b.cfg.extension, b.xi, N);
    b.se = spectral_radius(b.zt);
    return b;
}

MeasureApprox conformal_of(const Bundle& b, int depth, int ball) {
    const ExtensionSpec& e = b.cfg.extension;
    SweepSettings st;
    st.N = b.zt.N;
    st.depth = depth;
    st.ball_radius = ball;
    SweepTable sw = sweep(e, b.xi, e.group.id(), st);
    PattersonWeights bn = build_bn(b.zt, b.se.rho_hat, b.zt.N);
    ConformalSettings cs;
    cs.rho_hat = b.se.rho_hat;
    cs.rho_stderr = b.se.stderr_;
    cs.period = b.se.period;
    return conformal_limit(sw, bn, b.zt, cs);
}

double worst_residual(const ExtensionSpec& e, const MeasureApprox& nu, double rho, int& n) {
    double worst = 0.0;
    n = 0;
    for (const XCylinder& cyl : nu.cylinders) {
        if (cyl.word.empty() || static_cast<int>(cyl.word.size()) > 3) continue;
        for (int k = 1; k < static_cast<int>(cyl.word.size()); ++k) {
            double r = conformality_residual(e, nu, cyl.word, cyl.g, k, rho);
            if (r >= 0.0) {
                worst = std::max(worst, r);
                ++n;
            }
        }
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance CONFIG_DIR\n");
        return 64;
    }
    const std::string dir = argv[1];

    Bundle sym = load_bundle(dir + "/polya_d1_sym.json", 40);
    Bundle asym = load_bundle(dir + "/polya_d1_asym.json", 40);
    Bundle d3 = load_bundle(dir + "/polya_d3_sym.json", 80);
    Bundle f2 = load_bundle(dir + "/free_d2_sym.json", 24);
    Bundle z2;
    z2.cfg = parse_config(kZ2Json);
    z2.xi = xi_of(z2.cfg.extension);
    z2.zt = zcount(z2.cfg.extension, z2.xi, 40);
    z2.se = spectral_radius(z2.zt);

    PolyaSpec ps_sym = polya1(Rational(1, 2), Rational(1, 2));
    PolyaSpec ps_asym = polya1(Rational(4, 5), Rational(1, 5));

    criterion(1, "exact-partition", [&](std::string& d) {
        bool ok = true;
        for (const auto* b : {&sym, &asym}) {
            const PolyaSpec& ps = (b == &sym) ? ps_sym : ps_asym;
            auto exact = zcount_exact(b->cfg.extension, b->xi, 20,
                                      b->cfg.extension.potential.exact_values);
            for (int n = 1; n <= 20; ++n)
                if (exact[n] != polya_zn(ps, n)) ok = false;
        }
        d = "rational return sums equal the binomial oracle, n <= 20, both d=1 walks";
        return ok;
    });

    criterion(2, "spectral-radius", [&](std::string& d) {
        double e_sym = std::abs(sym.se.rho_hat - 1.0);
        double e_asym = std::abs(asym.se.rho_hat - 0.8);
        double e_z2 = std::abs(z2.se.rho_hat - 1.0);
        double rho_f2 = std::sqrt(3.0) / 2.0;
        double e_f2 = std::abs(f2.se.rho_hat - rho_f2) / rho_f2;
        d = "errors: d1 sym " + fmt(e_sym) + ", d1 asym " + fmt(e_asym) + ", d2 " + fmt(e_z2) +
            " (<=0.002); F2 rel " + fmt(e_f2) + " (<=0.02)";
        return e_sym <= 0.002 && e_asym <= 0.002 && e_z2 <= 0.002 && e_f2 <= 0.02;
    });

    criterion(3, "beta-exponent", [&](std::string& d) {
        double b1 = std::abs(sym.se.beta - 0.5);
        double b2 = std::abs(z2.se.beta - 1.0);
        double b3 = std::abs(d3.se.beta - 1.5);
        double bf = std::abs(f2.se.beta - 1.5);
        d = "|beta - d/2|: " + fmt(b1) + ", " + fmt(b2) + ", " + fmt(b3) +
            " (<=0.2); F2 " + fmt(bf) + " (<=0.3)";
        return b1 <= 0.2 && b2 <= 0.2 && b3 <= 0.2 && bf <= 0.3;
    });

    criterion(4, "classifier", [&](std::string& d) {
        auto v = [](const Bundle& b) { return classify_ergodicity(b.zt, b.se).verdict; };
        bool ok = v(sym) == Verdict::ConservativeErgodic &&
                  v(asym) == Verdict::ConservativeErgodic &&
                  v(z2) == Verdict::ConservativeErgodic && v(d3) == Verdict::Dissipative &&
                  v(f2) == Verdict::Dissipative;
        d = "conservative for d=1,2 (sym and drifted); dissipative for d=3 and F2";
        return ok;
    });

    MeasureApprox nu_sym = conformal_of(sym, 3, 3);
    MeasureApprox nu_asym = conformal_of(asym, 3, 3);
    MeasureApprox nu_f2 = conformal_of(f2, 1, 2);

    criterion(5, "conformal-slices", [&](std::string& d) {
        GroupElement zero = sym.cfg.extension.group.id();
        GroupElement one;
        one.v = {1};
        double ratio = nu_asym.mass_of(XCylinder{Word{}, one}) /
                       nu_asym.mass_of(XCylinder{Word{}, zero});
        double e_ratio = std::abs(ratio - 0.5) / 0.5;
        double e_sym = 0.0;
        for (const GroupElement& g : sym.cfg.extension.group.ball(2))
            e_sym = std::max(e_sym, std::abs(nu_sym.mass_of(XCylinder{Word{}, g}) - 1.0));
        double e_f2 = 0.0;
        double den = nu_f2.mass_of(XCylinder{Word{}, f2.cfg.extension.group.id()});
        for (const GroupElement& g : f2.cfg.extension.group.ball(2)) {
            int k = static_cast<int>(g.v.size());
            double truth = (1.0 + 0.5 * k) * std::pow(3.0, -0.5 * k);
            double est = nu_f2.mass_of(XCylinder{Word{}, g}) / den;
            e_f2 = std::max(e_f2, std::abs(est - truth) / truth);
        }
        d = "asym ratio err " + fmt(e_ratio) + ", sym worst " + fmt(e_sym) +
            " (<=0.05); F2 worst " + fmt(e_f2) + " (<=0.15)";
        return e_ratio <= 0.05 && e_sym <= 0.05 && e_f2 <= 0.15;
    });

    criterion(6, "conformality-residual", [&](std::string& d) {
        MeasureApprox nu_d3 = conformal_of(d3, 3, 3);
        int n1 = 0, n2 = 0, n3 = 0, n4 = 0;
        double r_sym = worst_residual(sym.cfg.extension, nu_sym, sym.se.rho_hat, n1);
        double r_asym = worst_residual(asym.cfg.extension, nu_asym, asym.se.rho_hat, n2);
        double r_d3 = worst_residual(d3.cfg.extension, nu_d3, d3.se.rho_hat, n3);
        // closed-form measure must satisfy conformality to rounding error.
        MeasureApprox truth = nu_asym;
        for (size_t i = 0; i < truth.cylinders.size(); ++i) {
            Word letters;
            for (int a : truth.cylinders[i].word) letters.push_back(a == 0 ? 1 : -1);
            truth.masses[i] = f2d(polya_cylinder(ps_asym, letters, truth.cylinders[i].g.v));
        }
        double r_oracle = worst_residual(asym.cfg.extension, truth, 0.8, n4);
        d = "engine worst " + fmt(std::max({r_sym, r_asym, r_d3})) + " over " +
            std::to_string(n1 + n2 + n3) + " pairs (<1e-2); oracle " + fmt(r_oracle) + " (<1e-12)";
        return n1 > 0 && n2 > 0 && n3 > 0 && n4 > 0 && r_sym < 1e-2 && r_asym < 1e-2 &&
               r_d3 < 1e-2 && r_oracle < 1e-12;
    });

    criterion(7, "kernel-checks", [&](std::string& d) {
        const ExtensionSpec& e = asym.cfg.extension;
        SweepSettings st;
        st.N = 40;
        st.depth = 3;
        st.ball_radius = 3;
        SweepTable ref = sweep(e, asym.xi, e.group.id(), st);

        // (a) anchor: the kernel of the reference point is identically one.
        std::vector<XCylinder> nested = {XCylinder{Word{0}, e.group.id()},
                                         XCylinder{Word{0, 0}, e.group.id()},
                                         XCylinder{Word{0, 0, 0}, e.group.id()}};
        KernelEstimate anchor = kernel_from_sweeps(ref, ref, nested);
        double e_anchor = 0.0;
        for (double v : anchor.values) e_anchor = std::max(e_anchor, std::abs(v - 1.0));

        // (b) constancy in z with value nu(X_{g1}) = 0.5 for source g1 = +1.
        GroupElement one;
        one.v = {1};
        SweepTable src = sweep(e, asym.xi, one, st);
        std::vector<XCylinder> z_points = {XCylinder{Word{0}, e.group.id()},
                                           XCylinder{Word{1}, e.group.id()},
                                           XCylinder{Word{0, 1}, e.group.id()},
                                           XCylinder{Word{1, 0, 0}, one},
                                           XCylinder{Word{0}, e.group.invert(one)}};
        double e_const = 0.0;
        for (const XCylinder& z : z_points) {
            KernelEstimate k = kernel_from_sweeps(src, ref, {z});
            e_const = std::max(e_const, std::abs(k.values[0] - 0.5) / 0.5);
        }

        // (c) eigen-relation in the source: sum_a phi(a) K(g1 psi(a), .) = rho K(g1, .).
        std::map<std::vector<int>, double> kval;
        for (const GroupElement& g : e.group.ball(3)) {
            SweepTable s = sweep(e, asym.xi, g, st);
            kval[g.v] = kernel_from_sweeps(s, ref, nested).limit;
        }
        double e_eigen = 0.0;
        for (const GroupElement& g : e.group.ball(2)) {
            double lhs = 0.0;
            for (int a = 0; a < e.shift.alphabet_size(); ++a)
                lhs += e.potential.values.at(Word{a}) * kval.at(e.group.multiply(g, e.psi[a]).v);
            double rhs = asym.se.rho_hat * kval.at(g.v);
            e_eigen = std::max(e_eigen, std::abs(lhs - rhs) / rhs);
        }

        // (d) T-invariance: the kernel limit around z and around Tz agree
        // within the extrapolation spreads.
        KernelEstimate kz = kernel_from_sweeps(src, ref, {XCylinder{Word{0, 1}, e.group.id()}});
        KernelEstimate ktz = kernel_from_sweeps(src, ref, {XCylinder{Word{1}, e.psi[0]}});
        double tol_t = std::max(kz.value_errors[0] + ktz.value_errors[0], 0.02 * kz.values[0]);
        double e_tinv = std::abs(kz.values[0] - ktz.values[0]);

        d = "anchor " + fmt(e_anchor) + " (<1e-12); constancy " + fmt(e_const) +
            ", eigen " + fmt(e_eigen) + " (<=0.05); T-invariance " + fmt(e_tinv) + " <= " +
            fmt(tol_t);
        return e_anchor < 1e-12 && e_const <= 0.05 && e_eigen <= 0.05 && e_tinv <= tol_t;
    });

    criterion(8, "martingale-decay", [&](std::string& d) {
        auto run_decay = [&](const Bundle& b, const std::function<double(const GroupElement&)>& nu) {
            GibbsData gd = base_pressure(b.cfg.extension.potential, b.cfg.extension.shift);
            auto paths = sample_paths(b.cfg.extension, gd, 200, 100, b.cfg.numerics.seed, nu,
                                      b.se.rho_hat);
            int passed = 0;
            for (const auto& p : paths)
                if (p.observables[199] <= p.observables[3] / 1e3) ++passed;
            return passed;
        };
        auto nu_asym_slice = [&](const GroupElement& g) {
            return f2d(polya_nu_group(ps_asym, g.v));
        };
        auto nu_f2_slice = [&](const GroupElement& g) {
            int k = static_cast<int>(g.v.size());
            return (1.0 + 0.5 * k) * std::pow(3.0, -0.5 * k);
        };
        int p_asym = run_decay(asym, nu_asym_slice);
        int p_f2 = run_decay(f2, nu_f2_slice);
        GibbsData gd = base_pressure(asym.cfg.extension.potential, asym.cfg.extension.shift);
        auto bucket = martingale_bucket_test(asym.cfg.extension, gd, nu_asym_slice,
                                             asym.se.rho_hat, 10000, 30,
                                             asym.cfg.numerics.seed);
        d = "1e3 decay on " + std::to_string(p_asym) + "/100 (asym Z) and " +
            std::to_string(p_f2) + "/100 (F2) paths (>=95); bucket max|z| " +
            fmt(bucket.max_abs_z) + " over " + std::to_string(bucket.paths) + " paths (<=3)";
        return p_asym >= 95 && p_f2 >= 95 && bucket.pass;
    });

    criterion(9, "regularity", [&](std::string& d) {
        SystemConfig gm = load_config(dir + "/golden_mean_z.json");
        const ExtensionSpec& e = gm.extension;
        double c_phi = distortion_constant(e.potential, e.shift);
        Word xi = xi_of(e);
        SweepSettings st;
        st.N = 60;
        st.depth = 2;
        st.ball_radius = 2;
        SweepTable ref = sweep(e, xi, e.group.id(), st);
        std::vector<std::pair<XCylinder, double>> f = {{XCylinder{Word{0}, e.group.id()}, 1.0}};
        auto theta_f = [&](const Word& w, const GroupElement& g) {
            return theta_eval(e, f, w, g, ref, st).value;
        };
        auto rc = regularity_coefficients(e, theta_f, 3, 2);
        bool ld_ok = rc.ld <= c_phi + 0.1;
        // contraction inequality on enumerated pairs for n <= 4.
        auto words = words_of_length(e.shift, 3);
        std::vector<std::pair<std::pair<Word, GroupElement>, std::pair<Word, GroupElement>>> pairs;
        for (size_t i = 0; i < words.size(); ++i)
            for (size_t j = i + 1; j < words.size(); ++j)
                if (words[i][0] == words[j][0])
                    pairs.push_back({{words[i], e.group.id()}, {words[j], e.group.id()}});
        bool df_ok = true;
        double worst = -1.0;
        for (int n = 1; n <= 4; ++n) {
            auto rep = doeblin_fortet_check(e, f, n, pairs);
            df_ok = df_ok && rep.pass;
            worst = std::max(worst, rep.worst_gap);
        }
        d = "LD(Theta f) " + fmt(rc.ld) + " <= C_phi + tol " + fmt(c_phi + 0.1) +
            "; contraction worst gap " + fmt(worst) + " (<=0), n <= 4";
        return ld_ok && df_ok;
    });

    criterion(10, "dimension-pipeline", [&](std::string& d) {
        auto run = [&](const Bundle& b, int N) {
            return find_delta(b.cfg.extension, b.xi, 0.2, 3.0, 1e-3, N);
        };
        DimensionReport r1 = run(sym, 24);
        DimensionReport r3 = run(d3, 24);
        DimensionReport rf = run(f2, 20);
        auto cert = [](const DimensionReport& r) {
            return r.pressure_lo > 1.0 && r.pressure_hi < 1.0;
        };
        bool flags = r1.amenable_consistent && r3.amenable_consistent &&
                     !rf.amenable_consistent;
        bool dim_eq = std::abs(r1.dim_value - r1.delta) <= 5e-3 &&
                      std::abs(r3.dim_value - r3.delta) <= 5e-3;
        bool dim_gt = rf.dim_value - rf.delta > rf.delta_hi - rf.delta;
        d = "delta = " + fmt(r1.delta) + " / " + fmt(r3.delta) + " / " + fmt(rf.delta) +
            "; certificates + amenability flags + dim-vs-delta behavior";
        return cert(r1) && cert(r3) && cert(rf) && flags && dim_eq && dim_gt;
    });

    criterion(11, "full-validate", [&](std::string& d) {
        auto t0 = Clock::now();
        const char* names[] = {"polya_d1_sym", "polya_d1_asym", "polya_d3_sym",
                               "free_d2_sym", "golden_mean_z"};
        int passed = 0;
        std::string failed;
        for (const char* n : names) {
            ValidateReport rep = validate_config(load_config(dir + "/" + n + ".json"));
            if (rep.pass())
                ++passed;
            else
                failed += std::string(" ") + n;
        }
        double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        d = std::to_string(passed) + "/5 configs clean in " + fmt(secs) + "s (<900s)" +
            (failed.empty() ? "" : ("; failed:" + failed));
        return passed == 5 && secs < 900.0;
    });

    std::printf("%s (%d/11)\n", g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT",
                11 - g_failures);
    return g_failures;
}
