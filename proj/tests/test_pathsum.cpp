#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dqca/pathsum.hpp"
#include "test_helpers.hpp"

using namespace dqca;
using namespace dqca::pathsum;
using Catch::Approx;

TEST_CASE("channel composition follows the index rule") {
    CHECK(compose({0, 0}, {0, 1}) == Channel{0, 1});
    CHECK(!compose({0, 0}, {1, 1}).has_value());
    CHECK(compose({1, 0}, {0, 1}) == Channel{1, 1});

    // the matrix units realize the rule with factors exchanged:
    // unit(p) * unit(q) == unit(compose(q, p)) (or zero)
    for (Channel p : kChannels)
        for (Channel q : kChannels) {
            Mat2 got = channel_unit(p) * channel_unit(q);
            auto comp = compose(q, p);
            Mat2 want = comp ? channel_unit(*comp) : Mat2::zero();
            CHECK(max_abs_diff(got, want) == 0.0);
        }
}

TEST_CASE("generators decompose over the channel units") {
    Mass mass = make_mass(0.6);
    Mat2 r = Cplx(mass.n) * channel_unit({0, 0});
    CHECK(max_abs_diff(r, a_right(mass)) == 0.0);
    Mat2 l = Cplx(mass.n) * channel_unit({1, 1});
    CHECK(max_abs_diff(l, a_left(mass)) == 0.0);
    Mat2 f = Cplx(0.0, mass.m) * (channel_unit({1, 0}) + channel_unit({0, 1}));
    CHECK(max_abs_diff(f, a_flip(mass)) == 0.0);
}

TEST_CASE("alpha is (i m)^f n^(t-f)") {
    Mass mass = make_mass(0.6);
    CHECK(alpha(0, 5, mass).real() == Approx(0.32768).margin(1e-15));
    CHECK(alpha(0, 5, mass).imag() == 0.0);
    CHECK(alpha(1, 2, mass) == Cplx(0.0, 0.48));
    for (int t : {1, 2, 3, 7}) {
        Cplx expect = 1.0;
        for (int i = 0; i < t; ++i) expect *= Cplx(0.0, mass.m);
        CHECK(std::abs(alpha(t, t, mass) - expect) < 1e-15);
    }
    CHECK_THROWS_AS(alpha(3, 2, mass), std::domain_error);
}

TEST_CASE("path tallies") {
    auto tally = PathTally::from(6, 2, 2);
    REQUIRE(tally.has_value());
    CHECK(tally->r == 3);
    CHECK(tally->l == 1);
    CHECK(!PathTally::from(6, 3, 2).has_value());   // wrong parity
    CHECK(!PathTally::from(4, 4, 2).has_value());   // l would be negative
    CHECK(!PathTally::from(3, 0, 5).has_value());   // f > t
}

TEST_CASE("coefficient reference values") {
    CHECK(coefficient({1, 0}, 1, 2, 1) == 1);
    CHECK(coefficient({0, 0}, 2, 4, 0) == 2);
    CHECK(coefficient({0, 0}, 0, 3, 3) == 1);  // the straight all-R path
    CHECK(coefficient({1, 1}, 0, 3, 3) == 0);
    CHECK(coefficient({0, 0}, 1, 4, 1) == 0);  // diagonal channel needs even f
    CHECK(coefficient({1, 0}, 2, 4, 0) == 0);  // off-diagonal needs odd f
    CHECK(coefficient({0, 0}, 2, 7, 2) == 0);  // (t - f + d) odd
}

TEST_CASE("coefficient symmetries") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<int> tu(0, 20);
    for (int trial = 0; trial < 200; ++trial) {
        int t = tu(rng);
        std::uniform_int_distribution<int> du(-t, t);
        int d = t ? du(rng) : 0;
        std::uniform_int_distribution<int> fu(0, t);
        int f = t ? fu(rng) : 0;
        CHECK(coefficient({1, 0}, f, t, d) == coefficient({0, 1}, f, t, d));
        CHECK(coefficient({0, 0}, f, t, d) == coefficient({1, 1}, f, t, -d));
    }
}

TEST_CASE("one-step kernel reproduces the three generators") {
    Mass mass = make_mass(0.37);
    auto k = kernel(1, mass);
    CHECK(max_abs_diff(k.at(1), a_right(mass)) < 1e-16);
    CHECK(max_abs_diff(k.at(-1), a_left(mass)) < 1e-16);
    CHECK(max_abs_diff(k.at(0), a_flip(mass)) < 1e-16);
}

TEST_CASE("two-step kernel reference values") {
    Mass mass = make_mass(0.6);
    auto k = kernel(2, mass);
    // only the double flip survives at d = 0
    CHECK(std::abs(k.at(0)(0, 0) - Cplx(-0.36, 0.0)) < 1e-16);
    CHECK(std::abs(k.at(0)(1, 1) - Cplx(-0.36, 0.0)) < 1e-16);
    CHECK(k.at(0)(0, 1) == Cplx(0.0, 0.0));
    // one flip, one right shift
    CHECK(std::abs(k.at(1)(0, 1) - Cplx(0.0, 0.48)) < 1e-16);
    CHECK(std::abs(k.at(1)(1, 0) - Cplx(0.0, 0.48)) < 1e-16);
    // straight paths at the cone edges
    CHECK(std::abs(k.at(2)(0, 0) - Cplx(0.64, 0.0)) < 1e-16);
    CHECK(std::abs(k.at(-2)(1, 1) - Cplx(0.64, 0.0)) < 1e-16);
}

TEST_CASE("kernel at t = 0 is the identity") {
    auto k = kernel(0, make_mass(0.42));
    CHECK(max_abs_diff(k.at(0), Mat2::identity()) == 0.0);
}

TEST_CASE("parity selection zeroes entries exactly") {
    auto k = kernel(9, make_mass(0.5));
    for (int d = -9; d <= 9; ++d) {
        if ((9 + d) % 2 == 0) {
            CHECK(k.at(d)(0, 1) == Cplx(0.0, 0.0));
            CHECK(k.at(d)(1, 0) == Cplx(0.0, 0.0));
        } else {
            CHECK(k.at(d)(0, 0) == Cplx(0.0, 0.0));
            CHECK(k.at(d)(1, 1) == Cplx(0.0, 0.0));
        }
    }
}

TEST_CASE("kernel unitarity at moderate times") {
    for (double m : {0.2, 0.6, 0.9}) {
        auto k = kernel(50, make_mass(m));
        CHECK(max_abs_diff(k.unitarity_sum(), Mat2::identity()) < 1e-13);
    }
}

TEST_CASE("kernel mass extremes") {
    const int t = 11;
    auto free = kernel(t, make_mass(0.0));
    CHECK(free.at(t)(0, 0) == Cplx(1.0, 0.0));
    CHECK(free.at(-t)(1, 1) == Cplx(1.0, 0.0));
    double off_cone = 0.0;
    for (int d = -t + 1; d < t; ++d) off_cone = std::max(off_cone, free.at(d).max_abs());
    CHECK(off_cone == 0.0);

    auto flip = kernel(t, make_mass(1.0));  // i^t X at odd t, at d = 0 only
    CHECK(std::abs(flip.at(0)(0, 1) - Cplx(0.0, -1.0)) < 1e-16);  // i^11 = -i
    CHECK(std::abs(flip.at(0)(1, 0) - Cplx(0.0, -1.0)) < 1e-16);
    for (int d = 1; d <= t; ++d) {
        CHECK(flip.at(d).max_abs() == 0.0);
        CHECK(flip.at(-d).max_abs() == 0.0);
    }
}

TEST_CASE("kernel is independent of the thread count") {
    auto serial = kernel(23, make_mass(0.6), 1);
    auto parallel = kernel(23, make_mass(0.6), 4);
    for (int d = -23; d <= 23; ++d)
        for (int i = 0; i < 4; ++i)
            CHECK(serial.at(d).e[static_cast<std::size_t>(i)] ==
                  parallel.at(d).e[static_cast<std::size_t>(i)]);
}

TEST_CASE("evolution via kernel matches direct stepping") {
    std::mt19937 rng(31);
    Mass mass = make_mass(0.6);

    FieldState delta = FieldState::delta(0, Spinor{1.0, 0.0});
    CHECK(max_abs_diff(evolve_via_kernel(delta, mass, 0), delta) == 0.0);
    CHECK(max_abs_diff(evolve_via_kernel(delta, mass, 2), evolve(delta, mass, 2)) < 1e-14);

    FieldState two_site;
    two_site.offset = 0;
    two_site.amps = {Spinor{Cplx(1 / std::sqrt(2.0), 0), Cplx{}},
                     Spinor{Cplx{}, Cplx(0, 1 / std::sqrt(2.0))}};
    CHECK(max_abs_diff(evolve_via_kernel(two_site, mass, 50), evolve(two_site, mass, 50)) < 1e-10);

    FieldState random = dqca_test::random_state(rng, -4, 4);
    CHECK(max_abs_diff(evolve_via_kernel(random, mass, 40), evolve(random, mass, 40)) < 1e-12);
}
