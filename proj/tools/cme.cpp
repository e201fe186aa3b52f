#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "cme/dimension.hpp"
#include "cme/harmonic.hpp"
#include "cme/oracles.hpp"
#include "cme/validate.hpp"

using json = nlohmann::json;
using namespace cme;

namespace {

std::string word_name(const ShiftSpec& s, const Word& w) {
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) out += ',';
        out += s.names[w[i]];
    }
    return out;
}

json finite_or_null(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

json cylinder_json(const ExtensionSpec& e, const XCylinder& c) {
    json j;
    j["word"] = word_name(e.shift, c.word);
    j["group"] = e.group.to_string(c.g);
    return j;
}

void write_json(const std::string& out_dir, const std::string& name, json j,
                const SystemConfig& cfg) {
    j["config_hash"] = cfg.config_hash;
    j["seed"] = cfg.numerics.seed;
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir + "/" + name);
    f << j.dump(2) << "\n";
}

Word cli_xi(const ExtensionSpec& e) {
    return least_extension(e.shift, Word{0}, std::max(e.potential.depth, 2));
}

PartitionTable run_zcount(const SystemConfig& cfg) {
    return zcount(cfg.extension, cli_xi(cfg.extension), cfg.numerics.N, cfg.numerics.exact);
}

// nu(X_g) lookup for path observables: closed form for the oracle families,
// the extrapolated estimate otherwise (0 outside the computed ball).
std::function<double(const GroupElement&)> slice_function(const SystemConfig& cfg,
                                                          const MeasureApprox* nu) {
    if (cfg.family == "polya") {
        auto ps = std::make_shared<PolyaSpec>();
        const auto& e = cfg.extension;
        ps->d = e.group.d;
        ps->p_plus.assign(ps->d, Rational(0));
        ps->p_minus.assign(ps->d, Rational(0));
        for (int a = 0; a < e.shift.alphabet_size(); ++a) {
            const auto& v = e.psi[a].v;
            for (int i = 0; i < ps->d; ++i)
                if (v[i] > 0)
                    ps->p_plus[i] = e.potential.exact_values.at(Word{a});
                else if (v[i] < 0)
                    ps->p_minus[i] = e.potential.exact_values.at(Word{a});
        }
        return [ps](const GroupElement& g) {
            return polya_nu_group(*ps, g.v).convert_to<double>();
        };
    }
    if (cfg.family == "free") {
        auto fs = std::make_shared<FreeWalkSpec>();
        const auto& e = cfg.extension;
        fs->d = e.group.d;
        fs->p_plus.assign(fs->d, Rational(0));
        fs->p_minus.assign(fs->d, Rational(0));
        for (int a = 0; a < e.shift.alphabet_size(); ++a) {
            int s = e.psi[a].v[0];
            (s > 0 ? fs->p_plus : fs->p_minus)[std::abs(s) - 1] =
                e.potential.exact_values.at(Word{a});
        }
        return [fs](const GroupElement& g) { return fd_nu_group(*fs, g.v).convert_to<double>(); };
    }
    auto copy = std::make_shared<MeasureApprox>(*nu);
    return [copy](const GroupElement& g) { return copy->mass_of(XCylinder{Word{}, g}); };
}

int cmd_zcount(const SystemConfig& cfg, const std::string& out) {
    PartitionTable t = run_zcount(cfg);
    json j;
    j["N"] = t.N;
    j["period"] = t.period;
    j["states_visited"] = t.states_visited;
    json lz = json::array();
    for (int n = 0; n <= t.N; ++n) lz.push_back(finite_or_null(t.logZ[n]));
    j["logZ"] = lz;
    if (t.has_exact) {
        json ez = json::array();
        for (const auto& q : t.exactZ) ez.push_back(q.str());
        j["exactZ"] = ez;
    }
    write_json(out, "zcount.json", j, cfg);
    return 0;
}

int cmd_spectrum(const SystemConfig& cfg, const std::string& out) {
    SpectralEstimate se = spectral_radius(run_zcount(cfg));
    json j;
    j["rho_hat"] = se.rho_hat;
    j["rho_roots"] = se.rho_roots;
    j["beta"] = se.beta;
    j["stderr"] = se.stderr_;
    j["beta_stderr"] = se.beta_stderr;
    j["method"] = se.method;
    j["period"] = se.period;
    write_json(out, "spectrum.json", j, cfg);
    return 0;
}

struct ConformalRun {
    PartitionTable zt;
    SpectralEstimate se;
    SweepTable sw;
    PattersonWeights bn;
    MeasureApprox nu;
};

ConformalRun run_conformal(const SystemConfig& cfg) {
    ConformalRun r;
    const auto& e = cfg.extension;
    Word xi = cli_xi(e);
    r.zt = zcount(e, xi, cfg.numerics.N);
    r.se = spectral_radius(r.zt);
    SweepSettings st;
    st.N = cfg.numerics.N;
    st.depth = cfg.numerics.depth;
    st.ball_radius = cfg.numerics.ball_radius;
    r.sw = sweep(e, xi, e.group.id(), st);
    r.bn = build_bn(r.zt, r.se.rho_hat, r.zt.N);
    ConformalSettings cs;
    cs.schedule = cfg.numerics.schedule;
    cs.rho_hat = r.se.rho_hat;
    cs.rho_stderr = r.se.stderr_;
    cs.period = r.se.period;
    r.nu = conformal_limit(r.sw, r.bn, r.zt, cs);
    return r;
}

int cmd_conformal(const SystemConfig& cfg, const std::string& out) {
    ConformalRun r = run_conformal(cfg);
    json j;
    j["rho_hat"] = r.se.rho_hat;
    j["extrapolated"] = r.nu.extrapolated;
    j["unconverged"] = r.nu.unconverged;
    json cyls = json::array();
    for (size_t i = 0; i < r.nu.cylinders.size(); ++i) {
        json c = cylinder_json(cfg.extension, r.nu.cylinders[i]);
        c["mass"] = r.nu.masses[i];
        c["spread"] = r.nu.spreads[i];
        c["diagnostic"] = r.nu.diagnostics[i];
        cyls.push_back(c);
    }
    j["cylinders"] = cyls;
    write_json(out, "conformal.json", j, cfg);
    return 0;
}

int cmd_classify(const SystemConfig& cfg, const std::string& out) {
    PartitionTable t = run_zcount(cfg);
    SpectralEstimate se = spectral_radius(t);
    ErgodicityVerdict v = classify_ergodicity(t, se);
    json j;
    j["verdict"] = v.verdict == Verdict::ConservativeErgodic ? "conservative_ergodic"
                   : v.verdict == Verdict::Dissipative       ? "dissipative"
                                                             : "inconclusive";
    j["beta"] = v.beta;
    j["beta_stderr"] = v.beta_stderr;
    j["boundary_note"] = v.boundary_note;
    j["partial_sums"] = v.partial_sums;
    write_json(out, "classify.json", j, cfg);
    return 0;
}

int cmd_martin(const SystemConfig& cfg, const std::string& out) {
    const auto& e = cfg.extension;
    Word xi = cli_xi(e);
    SweepSettings st;
    st.N = cfg.numerics.N;
    st.depth = std::max(3, cfg.numerics.depth);
    st.ball_radius = cfg.numerics.ball_radius;
    SweepTable ref = sweep(e, xi, e.group.id(), st);
    std::vector<XCylinder> targets;
    for (int k = 1; k <= 3; ++k) {
        Word w = least_extension(e.shift, Word{0}, k);
        w.resize(k);
        targets.push_back(XCylinder{w, e.group.id()});
    }
    json sources = json::array();
    for (const GroupElement& g : e.group.ball(1)) {
        SweepTable src = g == e.group.id() ? ref : sweep(e, xi, g, st);
        KernelEstimate k = kernel_from_sweeps(src, ref, targets);
        json s;
        s["source_group"] = e.group.to_string(g);
        s["source_word"] = word_name(e.shift, xi);
        s["values"] = k.values;
        s["limit"] = k.limit;
        s["spread"] = k.spread;
        s["stabilized"] = k.stabilized;
        s["zero_mass"] = k.zero_mass;
        sources.push_back(s);
    }
    json j;
    j["targets"] = json::array();
    for (const auto& t : targets) j["targets"].push_back(cylinder_json(e, t));
    j["kernels"] = sources;
    write_json(out, "martin.json", j, cfg);
    return 0;
}

int cmd_paths(const SystemConfig& cfg, const std::string& out) {
    const auto& e = cfg.extension;
    ConformalRun* cr = nullptr;
    ConformalRun storage;
    if (cfg.family == "generic") {
        storage = run_conformal(cfg);
        cr = &storage;
    }
    PartitionTable t = zcount(e, cli_xi(e), std::min(cfg.numerics.N, 40));
    SpectralEstimate se = spectral_radius(t);
    auto nu_slice = slice_function(cfg, cr ? &cr->nu : nullptr);
    GibbsData gd = base_pressure(e.potential, e.shift);
    auto paths = sample_paths(e, gd, 200, 100, cfg.numerics.seed, nu_slice, se.rho_hat);
    std::filesystem::create_directories(out);
    std::ofstream f(out + "/paths.csv");
    f << "# config_hash=" << cfg.config_hash << " seed=" << cfg.numerics.seed << "\n";
    f << "path_id,n,observable\n";
    for (size_t p = 0; p < paths.size(); ++p)
        for (size_t n = 0; n < paths[p].observables.size(); ++n)
            f << p << "," << (n + 1) << "," << paths[p].observables[n] << "\n";
    return 0;
}

int cmd_harmonic_check(const SystemConfig& cfg, const std::string& out) {
    const auto& e = cfg.extension;
    Word xi = cli_xi(e);
    const bool free_kind = e.group.kind == GroupKind::Free;
    SweepSettings st;
    st.N = free_kind ? std::min(cfg.numerics.N, 16) : std::min(cfg.numerics.N, 40);
    st.depth = 1;
    st.ball_radius = 1;
    SweepTable ref = sweep(e, xi, e.group.id(), st);
    PartitionTable t = zcount(e, xi, cfg.numerics.N);
    SpectralEstimate se = spectral_radius(t);

    std::vector<std::pair<XCylinder, double>> f = {{XCylinder{Word{}, e.group.id()}, 1.0}};
    const int lw = std::max(e.potential.depth - 1, 1);
    std::map<std::pair<Word, GroupElement>, double> cache;
    PointFunction h = [&](const Word& w, const GroupElement& g) {
        Word key(w.begin(), w.begin() + std::min<size_t>(w.size(), lw));
        auto it = cache.find({key, g});
        if (it != cache.end()) return it->second;
        double v = theta_eval(e, f, least_extension(e.shift, key, lw + 1), g, ref, st).value;
        cache[{key, g}] = v;
        return v;
    };
    auto mesh = standard_mesh(e, 1, free_kind ? 2 : 3);
    double residual = harmonicity_residual(e, h, se.rho_hat, mesh);
    json j;
    j["residual"] = residual;
    j["mesh_points"] = mesh.size();
    j["rho_hat"] = se.rho_hat;
    j["sentinel"] = residual < 0.0;
    write_json(out, "harmonic_check.json", j, cfg);
    return 0;
}

int cmd_dimension(const SystemConfig& cfg, const std::string& out) {
    const auto& e = cfg.extension;
    int N = e.group.kind == GroupKind::Free ? std::min(cfg.numerics.N, 20)
                                            : std::min(cfg.numerics.N, 24);
    DimensionReport dr = find_delta(e, cli_xi(e), 0.2, 3.0, cfg.numerics.tol, N);
    json j;
    j["delta"] = dr.delta;
    j["delta_interval"] = {dr.delta_lo, dr.delta_hi};
    j["tol"] = dr.tol;
    j["rho_delta"] = dr.rho_delta;
    j["lyapunov"] = dr.lyapunov;
    j["dim_value"] = dr.dim_value;
    j["ext_rho_at_delta"] = dr.ext_rho_at_delta;
    j["ext_rho_stderr"] = dr.ext_rho_stderr;
    j["amenability_gap"] = dr.amenability_gap;
    j["amenable_consistent"] = dr.amenable_consistent;
    j["certificate"] = {{"pressure_lo", dr.pressure_lo}, {"pressure_hi", dr.pressure_hi}};
    j["iterations"] = dr.iterations;
    j["N"] = dr.N;
    if (!dr.amenable_consistent && cfg.family != "generic") {
        auto nu_slice = slice_function(cfg, nullptr);
        DecayCheckReport dc = decay_check(e, dr, nu_slice, 120, 100, cfg.numerics.seed);
        j["decay_check"] = {{"applicable", dc.applicable},
                            {"pass", dc.pass},
                            {"pass_fraction", dc.pass_fraction},
                            {"mean_slope", dc.mean_slope}};
    }
    write_json(out, "dimension.json", j, cfg);
    return 0;
}

int cmd_example(const SystemConfig& cfg, const std::string& out, bool lattice) {
    json j;
    if (lattice) {
        if (cfg.family != "polya") throw ConfigError("family", "example-zd needs a polya config");
        auto nu = slice_function(cfg, nullptr);
        PolyaSpec ps;
        const auto& e = cfg.extension;
        ps.d = e.group.d;
        ps.p_plus.assign(ps.d, Rational(0));
        ps.p_minus.assign(ps.d, Rational(0));
        for (int a = 0; a < e.shift.alphabet_size(); ++a) {
            const auto& v = e.psi[a].v;
            for (int i = 0; i < ps.d; ++i)
                if (v[i] > 0)
                    ps.p_plus[i] = e.potential.exact_values.at(Word{a});
                else if (v[i] < 0)
                    ps.p_minus[i] = e.potential.exact_values.at(Word{a});
        }
        j["rho"] = polya_rho(ps).convert_to<double>();
        json slices = json::object();
        for (const GroupElement& g : e.group.ball(3))
            slices[e.group.to_string(g)] = nu(g);
        j["nu_slices"] = slices;
        json zn = json::array();
        for (int n = 0; n <= 20; ++n) zn.push_back(polya_zn(ps, n).str());
        j["Zn"] = zn;
    } else {
        if (cfg.family != "free") throw ConfigError("family", "example-fd needs a free config");
        const auto& e = cfg.extension;
        FreeWalkSpec fs;
        fs.d = e.group.d;
        fs.p_plus.assign(fs.d, Rational(0));
        fs.p_minus.assign(fs.d, Rational(0));
        for (int a = 0; a < e.shift.alphabet_size(); ++a) {
            int s = e.psi[a].v[0];
            (s > 0 ? fs.p_plus : fs.p_minus)[std::abs(s) - 1] =
                e.potential.exact_values.at(Word{a});
        }
        j["rho"] = fd_rho(fs).convert_to<double>();
        json slices = json::object();
        for (const GroupElement& g : e.group.ball(3))
            slices[e.group.to_string(g)] = fd_nu_group(fs, g.v).convert_to<double>();
        j["nu_slices"] = slices;
        json zn = json::array();
        for (int n = 0; n <= 20; ++n) zn.push_back(fd_zn(fs, n).str());
        j["Zn"] = zn;
    }
    write_json(out, lattice ? "example_zd.json" : "example_fd.json", j, cfg);
    return 0;
}

int cmd_validate(const SystemConfig& cfg, const std::string& out) {
    ValidateReport rep = validate_config(cfg);
    json j;
    j["config_name"] = rep.config_name;
    j["pass"] = rep.pass();
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"value", finite_or_null(c.value)},
                          {"bound", finite_or_null(c.bound)},
                          {"detail", c.detail},
                          {"seconds", c.seconds}});
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
    }
    j["checks"] = checks;
    write_json(out, "validate.json", j, cfg);
    return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical engine for conformal measures on group extensions"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    int workers = 0;
    std::uint64_t seed = 0;
    bool exact = false;
    app.add_option("--config", config_path, "system config JSON")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers,
                   "worker count (reserved; evaluation is deterministic and sequential)");
    auto* seed_opt = app.add_option("--seed", seed, "64-bit RNG seed override");
    app.add_flag("--exact", exact, "force exact rational mode");

    const char* names[] = {"zcount",   "spectrum",       "conformal",  "classify",
                           "martin",   "paths",          "harmonic-check", "dimension",
                           "example-zd", "example-fd",   "validate"};
    for (const char* n : names) app.add_subcommand(n, "")->fallthrough();

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();

    try {
        SystemConfig cfg = load_config(config_path);
        if (seed_opt->count() > 0) cfg.numerics.seed = seed;
        if (exact) {
            cfg.numerics.exact = true;
            if (cfg.extension.potential.exact_values.size() !=
                cfg.extension.potential.values.size())
                throw ConfigError("numerics.exact",
                                  "exact mode needs every potential value as 'p/q'");
        }
        if (cmd == "zcount") return cmd_zcount(cfg, out_dir);
        if (cmd == "spectrum") return cmd_spectrum(cfg, out_dir);
        if (cmd == "conformal") return cmd_conformal(cfg, out_dir);
        if (cmd == "classify") return cmd_classify(cfg, out_dir);
        if (cmd == "martin") return cmd_martin(cfg, out_dir);
        if (cmd == "paths") return cmd_paths(cfg, out_dir);
        if (cmd == "harmonic-check") return cmd_harmonic_check(cfg, out_dir);
        if (cmd == "dimension") return cmd_dimension(cfg, out_dir);
        if (cmd == "example-zd") return cmd_example(cfg, out_dir, true);
        if (cmd == "example-fd") return cmd_example(cfg, out_dir, false);
        if (cmd == "validate") return cmd_validate(cfg, out_dir);
        std::cerr << "unknown subcommand\n";
        return 1;
    } catch (const ConfigError& ex) {
        std::cerr << "config error at " << ex.field << ": " << ex.what() << "\n";
        return 2;
    } catch (const std::length_error& ex) {
        std::cerr << "resource limit: " << ex.what()
                  << "\nsuggestion: lower numerics.N or numerics.ball_radius\n";
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "out of memory\nsuggestion: lower numerics.N or numerics.ball_radius\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
