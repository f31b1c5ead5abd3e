#include <doctest.h>

#include "oracles/finite_diff.hpp"
#include "pfaffnet/activations.hpp"
#include "pfaffnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace pfaffnet;

TEST_SUITE("activations") {

TEST_CASE("builtins carry the expected Riccati data") {
    const auto acts = builtins();
    REQUIRE(acts.size() >= 3);
    auto logistic = activation_by_name("logistic");
    auto tanh_ = activation_by_name("tanh");
    auto softplus = activation_by_name("softplus");
    CHECK(logistic->riccati_index() == 0);
    CHECK(tanh_->riccati_index() == 0);
    CHECK(softplus->riccati_index() == 1);
    CHECK(logistic->coefficients().a0 == 0.0);
    CHECK(logistic->coefficients().a1 == 1.0);
    CHECK(logistic->coefficients().a2 == -1.0);
    CHECK(tanh_->coefficients().a0 == 1.0);
    CHECK(tanh_->coefficients().a1 == 0.0);
    CHECK(tanh_->coefficients().a2 == -1.0);
    CHECK(softplus->coefficients().a1 == 1.0);
    CHECK(softplus->coefficients().a2 == -1.0);
    for (const auto& a : acts)
        CHECK(a->analytic_interval().is_real_line());
    CHECK_THROWS_AS(activation_by_name("relu"), std::invalid_argument);
}

TEST_CASE("point values") {
    CHECK(activation_by_name("logistic")->derivative(0.0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(activation_by_name("tanh")->derivative(0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(activation_by_name("softplus")->derivative(0.0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(activation_by_name("tanh")->derivative(1.0, 0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("residual certification of builtins on [-5, 5]") {
    std::vector<double> t;
    for (int i = 0; i < 100; ++i)
        t.push_back(-5.0 + 10.0 * i / 99.0);
    for (const auto& a : builtins()) {
        CAPTURE(a->name());
        CHECK(riccati_residual(*a, t) <= kRiccatiCertificationTol);
    }
    const double zero = 0.0;
    CHECK(riccati_residual(*activation_by_name("tanh"), std::span(&zero, 1)) < 1e-13);
}

TEST_CASE("residual detects perturbed coefficients") {
    std::vector<double> t;
    for (int i = 0; i < 100; ++i)
        t.push_back(-5.0 + 10.0 * i / 99.0);
    for (const auto& a : builtins()) {
        auto c = a->coefficients();
        c.a0 += 0.1;
        CAPTURE(a->name());
        CHECK(riccati_residual(a->with_coefficients(c), t) > 0.05);
    }
}

TEST_CASE("derivatives agree with finite differences of the previous order") {
    for (const auto& a : builtins()) {
        for (int q = 1; q <= 6; ++q) {
            for (int i = 0; i <= 40; ++i) {
                const double t = -4.0 + 8.0 * i / 40.0;
                const double exact = a->derivative(t, q);
                const double fd = oracle::richardson_diff([&](double s) { return a->derivative(s, q - 1); }, t, 1e-2);
                CAPTURE(a->name());
                CAPTURE(q);
                CAPTURE(t);
                CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST_CASE("recurrence consistency: order r+2 equals Q_2(zeta)") {
    for (const auto& a : builtins()) {
        const int r = a->riccati_index();
        const auto& c = a->coefficients();
        for (int i = 0; i < 100; ++i) {
            const double t = -5.0 + 10.0 * i / 99.0;
            const double y = a->zeta(t);
            // Q_2 = Q_1' Q_1 by hand
            const double q1 = c.a0 + c.a1 * y + c.a2 * y * y;
            const double q2 = (c.a1 + 2 * c.a2 * y) * q1;
            CHECK(a->derivative(t, r + 2) == doctest::Approx(q2).epsilon(1e-9));
        }
        const auto Q2 = a->recurrence_polynomial(2);
        REQUIRE(Q2.size() >= 3);
        CHECK(Q2[0] == doctest::Approx(c.a1 * c.a0));
    }
}

TEST_CASE("monotonicity on sorted random samples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-20.0, 20.0);
    std::vector<double> t(1000);
    for (auto& v : t)
        v = U(rng);
    std::sort(t.begin(), t.end());
    for (const auto& a : builtins())
        CHECK(is_nondecreasing(*a, t, 1e-12));
}

TEST_CASE("derivatives batch matches single evaluations") {
    const auto sp = activation_by_name("softplus");
    double out[5];
    sp->derivatives(0.3, 0, out);
    for (int q = 0; q < 5; ++q)
        CHECK(out[q] == doctest::Approx(sp->derivative(0.3, q)).epsilon(1e-15));
}

TEST_CASE("construction rejects a2 = 0 and missing closed forms") {
    auto f = [](double t) { return t; };
    CHECK_THROWS_AS(RiccatiActivation("lin", 0, {1, 0, 0}, Interval::real_line(), {f}), std::invalid_argument);
    CHECK_THROWS_AS(RiccatiActivation("sp", 1, {0, 1, -1}, Interval::real_line(), {f}), std::invalid_argument);
}

TEST_CASE("custom activations") {
    SUBCASE("logistic from its declaration") {
        ActivationDeclaration d{"mylogistic", 0, {0, 1, -1}, 0.5, Interval::real_line()};
        auto a = make_custom_activation(d);
        for (double t : {-3.0, -0.5, 0.0, 1.0, 4.0})
            CHECK((*a)(t) == doctest::Approx(1.0 / (1.0 + std::exp(-t))).epsilon(1e-12));
    }
    SUBCASE("tan-type solution restricted to its interval") {
        // sigma' = 1 + sigma^2, sigma(0) = 0 -> tan on (-pi/2, pi/2)
        ActivationDeclaration d{"tan", 0, {1, 0, 1}, 0.0, {-1.0, 1.0}};
        auto a = make_custom_activation(d);
        CHECK((*a)(0.5) == doctest::Approx(std::tan(0.5)).epsilon(1e-12));
        CHECK_THROWS_AS(a->derivative(1.5, 0), DomainError);
        ActivationDeclaration bad{"tan", 0, {1, 0, 1}, 0.0, {-2.0, 2.0}};
        CHECK_THROWS_AS(make_custom_activation(bad), std::invalid_argument);
    }
    SUBCASE("decreasing solutions are rejected") {
        // sigma' = -(1 - sigma^2)
        ActivationDeclaration d{"neg", 0, {-1, 0, 1}, 0.0, Interval::real_line()};
        CHECK_THROWS_AS(make_custom_activation(d), std::invalid_argument);
    }
    SUBCASE("r != 0 is rejected") {
        ActivationDeclaration d{"x", 1, {0, 1, -1}, 0.5, Interval::real_line()};
        CHECK_THROWS_AS(make_custom_activation(d), std::invalid_argument);
    }
}

TEST_CASE("domain errors") {
    ActivationDeclaration d{"tan", 0, {1, 0, 1}, 0.0, {-1.0, 1.0}};
    auto a = make_custom_activation(d);
    std::vector<double> t{0.0, 2.0};
    CHECK_THROWS_AS(riccati_residual(*a, t), DomainError);
}

}
