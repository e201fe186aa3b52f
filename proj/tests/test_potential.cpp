#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cme/potential.hpp"
#include "helpers.hpp"

using namespace cme;

TEST_CASE("base pressure of the unweighted golden-mean shift is the golden ratio") {
    ShiftSpec s;
    s.names = {"1", "2"};
    s.adjacency = {{1, 1}, {1, 0}};
    PotentialSpec p;
    p.depth = 1;
    p.values[{0}] = 1.0;
    p.values[{1}] = 1.0;
    GibbsData g = base_pressure(p, s);
    CHECK(g.rho_base == doctest::Approx(0.5 * (1.0 + std::sqrt(5.0))).epsilon(1e-12));
}

TEST_CASE("normalize makes the operator row-stochastic") {
    auto cfg = cme_test::golden();
    const auto& e = cfg.extension;
    PotentialSpec np = normalize(e.potential, e.shift);
    GibbsData g = base_pressure(np, e.shift);
    CHECK(g.rho_base == doctest::Approx(1.0).epsilon(1e-12));
    // The normalized operator fixes constants: for every window state u the
    // prepend sums sum_a phi'(a u ...) equal 1.
    for (const Word& u : g.states) {
        double sum = 0.0;
        for (int a = 0; a < e.shift.alphabet_size(); ++a) {
            if (!e.shift.admissible_pair(a, u.front())) continue;
            Word au;
            au.push_back(a);
            au.insert(au.end(), u.begin(), u.end());
            sum += np.phi(e.shift, least_extension(e.shift, au, np.depth));
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("birkhoff products multiply pointwise values") {
    auto cfg = cme_test::golden();
    const auto& e = cfg.extension;
    Word w = {0, 1, 0, 0, 1, 0};
    double prod = 1.0;
    for (int k = 0; k < 3; ++k) prod *= e.potential.phi(e.shift, Word(w.begin() + k, w.end()));
    CHECK(phi_n(e.potential, e.shift, w, 3) == doctest::Approx(prod).epsilon(1e-14));
    CHECK(log_phi_n(e.potential, e.shift, w, 3) == doctest::Approx(std::log(prod)).epsilon(1e-12));
}

TEST_CASE("distortion constant vanishes exactly at depth one") {
    auto p1 = cme_test::polya1("1/2", "1/2");
    CHECK(distortion_constant(p1.extension.potential, p1.extension.shift) == 0.0);
    auto g = cme_test::golden();
    CHECK(distortion_constant(g.extension.potential, g.extension.shift) > 0.0);
}

TEST_CASE("gibbs masses are a probability on words of fixed length") {
    auto cfg = cme_test::golden();
    const auto& e = cfg.extension;
    GibbsData g = base_pressure(e.potential, e.shift);
    for (int n = 2; n <= 4; ++n) {
        double total = 0.0;
        for (const Word& w : words_of_length(e.shift, n))
            total += gibbs_mass(g, e.potential, e.shift, w);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("powered potential raises values entrywise") {
    auto cfg = cme_test::polya1("4/5", "1/5");
    const auto& e = cfg.extension;
    PotentialSpec p2 = e.potential.powered(2.0);
    CHECK(p2.phi(e.shift, {0, 0}) == doctest::Approx(0.64).epsilon(1e-14));
    CHECK(p2.phi(e.shift, {1, 0}) == doctest::Approx(0.04).epsilon(1e-14));
}

TEST_CASE("validate rejects non-positive and missing values") {
    auto cfg = cme_test::golden();
    PotentialSpec p = cfg.extension.potential;
    CHECK_NOTHROW(p.validate(cfg.extension.shift));
    p.values[{0, 0}] = 0.0;
    CHECK_THROWS_AS(p.validate(cfg.extension.shift), std::invalid_argument);
    PotentialSpec q = cfg.extension.potential;
    q.values.erase(Word{1, 0});
    CHECK_THROWS_AS(q.validate(cfg.extension.shift), std::invalid_argument);
}
