#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cme/harmonic.hpp"
#include "cme/patterson.hpp"
#include "helpers.hpp"

using namespace cme;

namespace {

struct Ctx {
    SystemConfig cfg;
    Word xi;
    SweepSettings st;
    SweepTable ref;
};

Ctx make(SystemConfig cfg, int N, int depth, int ball) {
    Ctx c{std::move(cfg), {}, {}, {}};
    const auto& e = c.cfg.extension;
    c.xi = least_extension(e.shift, Word{0}, std::max(e.potential.depth, 2));
    c.st.N = N;
    c.st.depth = depth;
    c.st.ball_radius = ball;
    c.ref = sweep(e, c.xi, e.group.id(), c.st);
    return c;
}

std::vector<XCylinder> nested(const GroupElement& g) {
    return {XCylinder{Word{0}, g}, XCylinder{Word{0, 0}, g}, XCylinder{Word{0, 0, 0}, g}};
}

}  // namespace

TEST_CASE("kernel of the reference point is exactly one") {
    auto c = make(cme_test::polya1("4/5", "1/5"), 30, 3, 2);
    KernelEstimate k = kernel_from_sweeps(c.ref, c.ref, nested(c.cfg.extension.group.id()));
    for (double v : k.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(k.limit == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.stabilized);
}

TEST_CASE("kernel of a shifted source is the slice mass") {
    auto c = make(cme_test::polya1("4/5", "1/5"), 40, 3, 3);
    const auto& e = c.cfg.extension;
    // nu(X_1) = 1/2 and nu(X_-1) = 2 for lambda = 2.
    KernelEstimate kp = kernel_estimate(e, c.xi, GroupElement{{1}}, nested(e.group.id()), c.ref, c.st);
    CHECK(kp.limit == doctest::Approx(0.5).epsilon(0.05));
    KernelEstimate km = kernel_estimate(e, c.xi, GroupElement{{-1}}, nested(e.group.id()), c.ref, c.st);
    CHECK(km.limit == doctest::Approx(2.0).epsilon(0.05));
    // group-invariance: the kernel only depends on the relative translation.
    KernelEstimate ks = kernel_estimate(e, c.xi, GroupElement{{1}}, nested(GroupElement{{1}}),
                                        c.ref, c.st);
    KernelEstimate k0 = kernel_from_sweeps(c.ref, c.ref, nested(e.group.id()));
    CHECK(ks.values[0] / k0.values[0] == doctest::Approx(kp.values[0]).epsilon(0.05));
}

TEST_CASE("theta of the identity-slice indicator at the base point is one") {
    auto c = make(cme_test::polya1("4/5", "1/5"), 30, 2, 2);
    const auto& e = c.cfg.extension;
    std::vector<std::pair<XCylinder, double>> f = {{XCylinder{Word{}, e.group.id()}, 1.0}};
    ThetaValue tv = theta_from_sweeps(c.ref, c.ref, f);
    CHECK(tv.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(tv.partial);
}

TEST_CASE("closed-form eigenfunction has zero harmonicity residual") {
    auto cfg = cme_test::polya1("4/5", "1/5");
    const auto& e = cfg.extension;
    // h(x, g) = lambda^g with lambda = 2 satisfies L h = rho h, rho = 4/5.
    PointFunction h = [](const Word&, const GroupElement& g) {
        return std::pow(2.0, g.v[0]);
    };
    auto mesh = standard_mesh(e, 2, 3);
    double res = harmonicity_residual(e, h, 0.8, mesh);
    CHECK(res >= 0.0);
    CHECK(res < 1e-12);
    // and a perturbed function does not.
    PointFunction hbad = [](const Word&, const GroupElement& g) {
        return std::pow(1.7, g.v[0]);
    };
    CHECK(harmonicity_residual(e, hbad, 0.8, mesh) > 1e-2);
}

TEST_CASE("sampled paths follow the gibbs drift") {
    auto cfg = cme_test::polya1("4/5", "1/5");
    const auto& e = cfg.extension;
    GibbsData gd = base_pressure(e.potential, e.shift);
    auto nu_slice = [](const GroupElement& g) { return std::pow(2.0, -g.v[0]); };
    auto paths = sample_paths(e, gd, 200, 100, 7, nu_slice, 0.8);
    REQUIRE(paths.size() == 100);
    double mean_end = 0.0;
    int decayed = 0;
    for (const auto& p : paths) {
        mean_end += p.group_traj[199].v[0];
        if (p.observables[199] <= p.observables[3] / 1e3) ++decayed;
    }
    mean_end /= 100.0;
    CHECK(mean_end == doctest::Approx(0.6 * 200).epsilon(0.08));
    CHECK(decayed >= 95);
    // determinism in the seed.
    auto again = sample_paths(e, gd, 200, 100, 7, nu_slice, 0.8);
    CHECK(again[13].base_path == paths[13].base_path);
}

TEST_CASE("bucket means satisfy the one-step martingale identity") {
    auto cfg = cme_test::polya1("4/5", "1/5");
    const auto& e = cfg.extension;
    GibbsData gd = base_pressure(e.potential, e.shift);
    auto nu_slice = [](const GroupElement& g) { return std::pow(2.0, -g.v[0]); };
    auto rep = martingale_bucket_test(e, gd, nu_slice, 0.8, 10000, 30, 0);
    CHECK(rep.buckets_tested > 0);
    CHECK(rep.pass);
    // breaking rho breaks the identity.
    auto bad = martingale_bucket_test(e, gd, nu_slice, 0.7, 10000, 30, 0);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("ratio martingale of h against itself is constant") {
    auto cfg = cme_test::polya1("4/5", "1/5");
    const auto& e = cfg.extension;
    GibbsData gd = base_pressure(e.potential, e.shift);
    PointFunction h = [](const Word&, const GroupElement& g) { return std::pow(2.0, g.v[0]); };
    auto rep = ratio_martingale(e, gd, h, h, 40, 20, 3);
    CHECK_FALSE(rep.h_vanished);
    CHECK(rep.terminal_spread == doctest::Approx(0.0));
    CHECK(rep.initial_spread == doctest::Approx(0.0));
}

TEST_CASE("lipschitz check skips window-equal sources and bounds the rest") {
    auto c = make(cme_test::golden(60), 40, 2, 2);
    const auto& e = c.cfg.extension;
    GroupElement id = e.group.id();
    std::vector<std::pair<std::pair<Word, GroupElement>, std::pair<Word, GroupElement>>> pairs;
    pairs.push_back({{Word{0, 0, 0, 0}, id}, {Word{0, 1, 0, 0}, id}});
    std::vector<XCylinder> mesh = {XCylinder{Word{0}, id}, XCylinder{Word{0, 0}, id}};
    auto rep = lipschitz_kernel_check(e, pairs, mesh, c.ref, c.st);
    CHECK(rep.evaluated + rep.skipped_equal == 1);
    if (rep.evaluated > 0) {
        CHECK(rep.finite);
        CHECK(rep.d_hat >= 0.0);
    }
}

TEST_CASE("regularity coefficients decay with the common prefix") {
    auto cfg = cme_test::golden(40);
    const auto& e = cfg.extension;
    PointFunction f = [&](const Word& w, const GroupElement& g) {
        return e.potential.phi(e.shift, w) * std::exp(-0.1 * std::abs(g.v[0]));
    };
    auto rc = regularity_coefficients(e, f, 3, 2);
    REQUIRE(rc.c_n.size() == 4);
    for (size_t n = 1; n < rc.c_n.size(); ++n) CHECK(rc.c_n[n] <= rc.c_n[n - 1] + 1e-12);
    CHECK(rc.ld >= 0.0);
}
