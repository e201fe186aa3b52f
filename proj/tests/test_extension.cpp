#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cme/extension.hpp"
#include "helpers.hpp"

using namespace cme;

TEST_CASE("psi_n composes step images in word order") {
    auto cfg = cme_test::free2();
    const auto& e = cfg.extension;
    // a A b -> reduces to b.
    CHECK(psi_n(e, {0, 1, 2}) == GroupElement{{2}});
    // a b B A -> identity.
    CHECK(psi_n(e, {0, 2, 3, 1}) == e.group.id());
    auto g = cme_test::golden();
    CHECK(psi_n(g.extension, {0, 1, 0}) == GroupElement{{0}});  // -1 +2 -1
}

TEST_CASE("step shifts the word and multiplies the group coordinate") {
    auto cfg = cme_test::polya1("1/2", "1/2");
    const auto& e = cfg.extension;
    Word x = {0, 1, 0, 0};
    auto [y, g] = step(e, x, e.group.id());
    CHECK(y == Word{1, 0, 0});
    CHECK(g == e.psi_of(0));
}

TEST_CASE("symmetry report distinguishes the bundled systems") {
    auto sym = check_symmetric(cme_test::polya1("1/2", "1/2").extension);
    CHECK(sym.dagger_valid);
    CHECK(sym.psi_compatible);
    CHECK(sym.is_symmetric_extension);

    auto asym = check_symmetric(cme_test::polya1("4/5", "1/5").extension);
    CHECK_FALSE(asym.is_symmetric_extension);

    auto fd = check_symmetric(cme_test::free2().extension);
    CHECK(fd.is_symmetric_extension);

    // golden: dagger is the identity but psi(1) != psi(1)^{-1}.
    auto gm = check_symmetric(cme_test::golden().extension);
    CHECK_FALSE(gm.is_symmetric_extension);
}

TEST_CASE("generates_ball sees the step semigroup") {
    CHECK(cme_test::polya1("1/2", "1/2").extension.generates_ball(3));
    CHECK(cme_test::free2().extension.generates_ball(2));
}

TEST_CASE("validate rejects mismatched psi table") {
    auto cfg = cme_test::polya1("1/2", "1/2");
    ExtensionSpec e = cfg.extension;
    CHECK_NOTHROW(e.validate());
    e.psi.pop_back();
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}
