#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cme/oracles.hpp"

using namespace cme;

namespace {

PolyaSpec polya_sym1() {
    PolyaSpec ps;
    ps.d = 1;
    ps.p_plus = {Rational(1, 2)};
    ps.p_minus = {Rational(1, 2)};
    return ps;
}

PolyaSpec polya_asym1() {
    PolyaSpec ps;
    ps.d = 1;
    ps.p_plus = {Rational(4, 5)};
    ps.p_minus = {Rational(1, 5)};
    return ps;
}

PolyaSpec polya_sym3() {
    PolyaSpec ps;
    ps.d = 3;
    ps.p_plus = {Rational(1, 6), Rational(1, 6), Rational(1, 6)};
    ps.p_minus = ps.p_plus;
    return ps;
}

FreeWalkSpec free2() {
    FreeWalkSpec fs;
    fs.d = 2;
    fs.p_plus = {Rational(1, 4), Rational(1, 4)};
    fs.p_minus = fs.p_plus;
    return fs;
}

double d(const Float50& x) { return x.convert_to<double>(); }

}  // namespace

TEST_CASE("validation catches bad walk specs") {
    PolyaSpec bad = polya_sym1();
    bad.p_minus = {Rational(1, 3)};  // doesn't sum to one
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    FreeWalkSpec fbad = free2();
    fbad.p_plus[0] = Rational(1, 3);  // q no longer constant (and sum != 1)
    CHECK_THROWS_AS(fbad.validate(), std::invalid_argument);
}

TEST_CASE("lattice walk radii and slice masses") {
    CHECK(d(polya_rho(polya_sym1())) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d(polya_rho(polya_asym1())) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(d(polya_rho(polya_sym3())) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d(polya_asym1().lambda(0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d(polya_nu_group(polya_asym1(), {2})) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(d(polya_nu_group(polya_asym1(), {-1})) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("lattice partition counts agree with brute-force enumeration") {
    PolyaSpec ps = polya_asym1();
    for (int n = 1; n <= 10; ++n) {
        // enumerate +-1 step strings summing to zero.
        Rational total(0);
        for (int mask = 0; mask < (1 << n); ++mask) {
            int sum = 0;
            Rational w(1);
            for (int i = 0; i < n; ++i) {
                if (mask & (1 << i)) {
                    ++sum;
                    w *= ps.p_plus[0];
                } else {
                    --sum;
                    w *= ps.p_minus[0];
                }
            }
            if (sum == 0) total += w;
        }
        CHECK(polya_zn(ps, n) == total);
    }
}

TEST_CASE("lattice cylinder masses satisfy the multiplicative recursion") {
    PolyaSpec ps = polya_asym1();
    // nu([w, z]) = rho^-1 sqrt(p_{w1} p_{-w1}) nu([theta w, z]).
    std::vector<int> w = {1, -1, 1};
    Float50 lhs = polya_cylinder(ps, w, {0});
    Float50 rhs = polya_cylinder(ps, {-1, 1}, {0}) *
                  boost::multiprecision::sqrt(Float50(ps.p_plus[0]) * Float50(ps.p_minus[0])) /
                  polya_rho(ps);
    CHECK(d(lhs) == doctest::Approx(d(rhs)).epsilon(1e-12));
    // empty word reduces to the slice mass.
    CHECK(d(polya_cylinder(ps, {}, {2})) == doctest::Approx(d(polya_nu_group(ps, {2}))));
}

TEST_CASE("free walk radius, C_k, and slice masses") {
    FreeWalkSpec fs = free2();
    CHECK(d(fd_rho(fs)) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(d(fd_ck(fs, 0)) == doctest::Approx(1.0));
    CHECK(d(fd_ck(fs, 2)) == doctest::Approx(2.0));  // 1 + 2*(1/2)
    // nu(X_a) = C_1 (2/rho) p_{-1} = 1.5 * (4/sqrt(3)) * 0.25 = sqrt(3)/2.
    CHECK(d(fd_nu_group(fs, {1})) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(d(fd_llt_ratio(fs, {1})) == doctest::Approx(d(fd_nu_group(fs, {1}))));
}

TEST_CASE("free word helpers") {
    // active part: maximal reduction-free suffix logic on signed letters.
    std::vector<int> w = {1, -1, 2, 1};
    CHECK(active_part(w) == std::vector<int>{2, 1});
    CHECK(inverse_word({1, 2}) == std::vector<int>{-2, -1});
    CHECK(inverse_word(inverse_word(w)) == w);
}

TEST_CASE("free return counts agree with brute-force enumeration") {
    FreeWalkSpec fs = free2();
    // all 4^n walks, weight (1/4)^n, count those reducing to the identity.
    const int letters[4] = {1, -1, 2, -2};
    for (int n = 2; n <= 8; n += 2) {
        long long count = 0;
        long long total = 1;
        for (int i = 0; i < n; ++i) total *= 4;
        for (long long code = 0; code < total; ++code) {
            long long c = code;
            std::vector<int> stack;
            for (int i = 0; i < n; ++i) {
                int l = letters[c % 4];
                c /= 4;
                if (!stack.empty() && stack.back() == -l)
                    stack.pop_back();
                else
                    stack.push_back(l);
            }
            if (stack.empty()) ++count;
        }
        CHECK(fd_zn(fs, n) == Rational(count) / Rational(total));
    }
    CHECK(fd_zn(fs, 3) == Rational(0));
}

TEST_CASE("free kernel anchors at one for the identity source") {
    FreeWalkSpec fs = free2();
    std::vector<int> x = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};  // a^12: stable direction
    auto kv = fd_kernel(fs, {}, {}, x);
    CHECK(kv.k == 0);
    CHECK(d(kv.value) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("free kernel value along the direction of the source") {
    FreeWalkSpec fs = free2();
    std::vector<int> x(12, 1);  // boundary point a^infinity
    auto kv = fd_kernel(fs, {1}, {}, x);
    // moving the source one letter toward the limit point: k = -1.
    CHECK(kv.k == -1);
    CHECK(d(kv.value) > 1.0);
}
