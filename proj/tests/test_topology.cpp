#include <doctest.h>

#include "oracles/dense_zeros.hpp"
#include "oracles/scalar_net.hpp"
#include "pfaffnet/errors.hpp"
#include "pfaffnet/topology.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

using namespace pfaffnet;

namespace {

double disk(std::span<const double> x) {
    return 1.0 - x[0] * x[0] - x[1] * x[1];
}

double annulus(std::span<const double> x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return std::min(r2 - 0.25, 1.0 - r2);
}

double two_disks(std::span<const double> x) {
    auto bump = [&](double cx) { return 0.36 - (x[0] - cx) * (x[0] - cx) - x[1] * x[1]; };
    return std::max(bump(-1.0), bump(1.0));
}

SignGrid grid_from(const std::vector<int>& res, const std::vector<int>& flagged) {
    std::vector<double> lo(res.size(), 0.0), hi(res.size(), 1.0);
    SignGrid g(Box(lo, hi), res);
    for (int c : flagged)
        g.set_flag(c, true);
    return g;
}

} // namespace

TEST_SUITE("topology") {

TEST_CASE("zeros of simple functions") {
    auto r = count_zeros_1d([](double t) { return std::tanh(t); }, -1, 1);
    REQUIRE(r.count() == 1);
    CHECK(std::abs(r.zeros[0]) < 1e-12);

    auto s = count_zeros_1d([](double t) { return std::tanh(t) - 0.5; }, -2, 2);
    REQUIRE(s.count() == 1);
    CHECK(s.zeros[0] == doctest::Approx(std::atanh(0.5)).epsilon(1e-11));

    auto none = count_zeros_1d([](double t) { return 1 + t * t; }, -1, 1);
    CHECK(none.count() == 0);
    CHECK_FALSE(none.identically_zero);

    auto zero = count_zeros_1d([](double) { return 0.0; }, -1, 1);
    CHECK(zero.identically_zero);
    CHECK(zero.count() == 0);
}

TEST_CASE("tangential zeros are reported but not counted") {
    auto r = count_zeros_1d([](double t) { return (t - 0.3) * (t - 0.3); }, -1, 1);
    CHECK(r.count() == 0);
    REQUIRE(r.tangential.size() == 1);
    CHECK(r.tangential[0] == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("closely spaced zero pairs between samples are found") {
    // zeros at 0.1 and 0.1 + 1e-5, far below the sample spacing of 2/4096
    auto f = [](double t) { return (t - 0.1) * (t - 0.1 - 1e-5); };
    auto r = count_zeros_1d(f, -1, 1);
    REQUIRE(r.count() == 2);
    CHECK(r.zeros[0] == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(r.zeros[1] == doctest::Approx(0.1 + 1e-5).epsilon(1e-9));
}

TEST_CASE("domain errors at open ends are avoided") {
    // defined only strictly inside (-1, 1)
    auto f = [](double t) {
        if (!(t > -1 && t < 1))
            throw DomainError("outside");
        return std::atanh(t) - 0.2;
    };
    auto r = count_zeros_1d(f, -1, 1);
    REQUIRE(r.count() == 1);
    CHECK(r.zeros[0] == doctest::Approx(std::tanh(0.2)).epsilon(1e-11));
}

TEST_CASE("random 1-D networks agree with the dense-grid oracle") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> Ld(1, 3), Wd(1, 5);
    const char* acts[] = {"logistic", "tanh", "softplus"};
    for (int seed = 0; seed < 10; ++seed) {
        Architecture arch{1, {}};
        for (int l = Ld(rng); l > 0; --l)
            arch.widths.push_back(Wd(rng));
        auto net = sample_network(arch, activation_by_name(acts[seed % 3]), seed, 3.0);
        oracle::ScalarNet fast(net);
        auto f = [&](double t) { return evaluate(net, std::span(&t, 1)); };
        const auto got = count_zeros_1d(f, -2, 2);
        const auto ref = oracle::dense_zeros(fast, -2, 2, 200000);
        CAPTURE(seed);
        REQUIRE(got.count() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK(std::abs(got.zeros[i] - ref[i]) < 1e-9);
    }
}

TEST_CASE("superlevel intervals") {
    auto a = superlevel_intervals_1d([](double t) { return std::tanh(t); }, -1, 1);
    REQUIRE(a.size() == 1);
    CHECK(std::abs(a[0].lo) < 1e-12);
    CHECK(a[0].hi == 1.0);
    CHECK(a[0].lo_closed);
    CHECK_FALSE(a[0].hi_closed);

    // signs (+, -, +)
    auto b = superlevel_intervals_1d([](double t) { return (t + 0.5) * (t - 0.5); }, -1, 1);
    REQUIRE(b.size() == 2);
    CHECK(b[0].lo == -1.0);
    CHECK(b[0].hi == doctest::Approx(-0.5));
    CHECK(b[1].lo == doctest::Approx(0.5));

    auto c = superlevel_intervals_1d([](double t) { return -1 - t * t; }, -1, 1);
    CHECK(c.empty());
    auto d = superlevel_intervals_1d([](double t) { return 2 + t; }, -1, 1);
    REQUIRE(d.size() == 1);
    CHECK_FALSE(d[0].lo_closed);
}

TEST_CASE("interval count never exceeds zero count plus one") {
    for (int seed = 0; seed < 30; ++seed) {
        Architecture arch{1, {4, 3}};
        auto net = sample_network(arch, activation_by_name("tanh"), 900 + seed, 3.0);
        auto f = [&](double t) { return evaluate(net, std::span(&t, 1)); };
        const auto z = count_zeros_1d(f, -2, 2);
        const auto iv = superlevel_intervals_1d(f, -2, 2);
        CHECK(iv.size() <= z.count() + 1);
    }
}

TEST_CASE("intervals match components of the 1-D sign grid") {
    for (int seed = 0; seed < 20; ++seed) {
        Architecture arch{1, {5}};
        auto net = sample_network(arch, activation_by_name("logistic"), 40 + seed, 4.0);
        auto f = [&](double t) { return evaluate(net, std::span(&t, 1)); };
        const auto z = count_zeros_1d(f, -2, 2);
        double gap = 4.0;
        std::vector<double> pts{-2.0};
        pts.insert(pts.end(), z.zeros.begin(), z.zeros.end());
        pts.push_back(2.0);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            gap = std::min(gap, pts[i + 1] - pts[i]);
        if (gap < 1e-3)
            continue;
        const int res = std::max(64, static_cast<int>(std::ceil(4 * 4.0 / gap)));
        auto g = sign_grid([&](std::span<const double> x) { return f(x[0]); }, Box::cube(1, -2, 2), {res}, 0.0);
        CHECK(components(g) == superlevel_intervals_1d(f, -2, 2).size());
    }
}

TEST_CASE("sign grid basics") {
    auto g = sign_grid(disk, Box::cube(2, -2, 2), {64, 64}, 0.0);
    const double area = g.flagged_count() * 16.0 / (64 * 64);
    CHECK(area == doctest::Approx(M_PI).epsilon(0.05));
    auto g2 = sign_grid(disk, Box::cube(2, -2, 2), {128, 128}, 0.0);
    const double area2 = g2.flagged_count() * 16.0 / (128 * 128);
    CHECK(std::abs(area2 - area) / area < 0.05);
    CHECK(sign_grid(disk, Box::cube(2, -2, 2), {32, 32}, 1.5).flagged_count() == 0);

    auto bad = [](std::span<const double> x) {
        if (x[0] > 0.5)
            throw DomainError("no");
        return 1.0;
    };
    try {
        sign_grid(bad, Box::cube(2, 0, 1), {4, 4}, 0.0, 2);
        FAIL("expected an exception");
    } catch (const CellEvaluationError& e) {
        CHECK(e.cell() == 2);
    }
}

TEST_CASE("homology fixtures") {
    const Box box = Box::cube(2, -2, 2);
    auto g = sign_grid(disk, box, {64, 64}, 0.0);
    CHECK(betti_z2(g).b == std::vector<long long>{1, 0, 0});
    CHECK(components(g) == 1);
    auto a = sign_grid(annulus, box, {64, 64}, 0.0);
    CHECK(betti_z2(a).b == std::vector<long long>{1, 1, 0});
    CHECK(components(a) == 1);
    auto t = sign_grid(two_disks, box, {64, 64}, 0.0);
    CHECK(betti_z2(t).b == std::vector<long long>{2, 0, 0});
    CHECK(components(t) == 2);
    auto e = sign_grid(disk, box, {16, 16}, 5.0);
    CHECK(betti_z2(e).total() == 0);
    CHECK(components(e) == 0);

    auto st = betti_with_stability(annulus, box, 64, 0.0);
    CHECK(st.stable);
}

TEST_CASE("three-dimensional complexes") {
    // hollow cube shell: b = (1, 0, 1, 0)
    std::vector<int> flagged;
    for (int z = 0; z < 3; ++z)
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x)
                if (!(x == 1 && y == 1 && z == 1))
                    flagged.push_back(x + 3 * y + 9 * z);
    auto shell = grid_from({3, 3, 3}, flagged);
    CHECK(betti_z2(shell).b == std::vector<long long>{1, 0, 1, 0});

    // solid torus made of a ring of cubes: b = (1, 1, 0, 0)
    std::vector<int> ring;
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            if (!(x == 1 && y == 1))
                ring.push_back(x + 3 * y);
    auto torus = grid_from({3, 3, 1 + 1}, ring);
    CHECK(betti_z2(torus).b == std::vector<long long>{1, 1, 0, 0});
}

TEST_CASE("diagonal contact joins components") {
    auto g = grid_from({2, 2}, {0, 3});
    CHECK(components(g) == 1);
    CHECK(betti_z2(g).b == std::vector<long long>{1, 0, 0});
}

TEST_CASE("boundary of boundary vanishes and Euler characteristic matches") {
    std::mt19937_64 rng(12);
    std::bernoulli_distribution coin(0.45);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 3;
        std::vector<int> res(d, d == 3 ? 6 : 12);
        std::vector<int> flagged;
        std::size_t n = 1;
        for (int r : res)
            n *= r;
        for (std::size_t c = 0; c < n; ++c)
            if (coin(rng))
                flagged.push_back(static_cast<int>(c));
        auto g = grid_from(res, flagged);
        CubicalComplex cx(g);
        for (std::size_t k = 2; k <= cx.dim(); ++k)
            for (std::size_t id : cx.cells(k)) {
                std::map<std::size_t, int> parity;
                for (std::size_t f : cx.boundary(id)) {
                    CHECK(cx.contains(f));
                    for (std::size_t ff : cx.boundary(f))
                        parity[ff] ^= 1;
                }
                for (const auto& [face, p] : parity)
                    CHECK(p == 0);
            }
        const auto b = betti_z2(g);
        long long chi = 0;
        for (std::size_t i = 0; i < b.b.size(); ++i)
            chi += (i % 2 == 0 ? 1 : -1) * b.b[i];
        CHECK(chi == cx.euler_characteristic());
        CHECK(b.b[0] == static_cast<long long>(components(g)));
        for (auto v : b.b)
            CHECK(v >= 0);
    }
}

TEST_CASE("four-dimensional grids report b_0 only") {
    std::vector<int> flagged{0, 15};
    auto g = grid_from({2, 2, 2, 2}, flagged);
    auto b = betti_z2(g);
    CHECK(b.partial);
    CHECK(b.b == std::vector<long long>{1});
    auto far = grid_from({3, 3, 3, 3}, {0, 80});
    CHECK(betti_z2(far).b == std::vector<long long>{2});
    CHECK(components(far) == 2);
    CHECK_THROWS_AS(betti_z2(grid_from({2, 2, 2, 2, 2}, {0})), BudgetError);
}

TEST_CASE("complex size budget") {
    auto g = grid_from({64, 64}, {0});
    CHECK_THROWS_AS(CubicalComplex(g, 1000), BudgetError);
}

TEST_CASE("random network superlevel sets: components equal b_0") {
    for (int seed = 0; seed < 10; ++seed) {
        Architecture arch{2, {4, 3}};
        auto net = sample_network(arch, activation_by_name("tanh"), 300 + seed, 2.0);
        auto g = sign_grid([&](std::span<const double> x) { return evaluate(net, x); }, Box::cube(2, -2, 2),
                           {128, 128}, 0.0);
        CHECK(static_cast<long long>(components(g)) == betti_z2(g).b[0]);
    }
}

TEST_CASE("RLE export round trip") {
    auto g = sign_grid(annulus, Box::cube(2, -2, 2), {16, 16}, 0.0);
    std::stringstream ss;
    write_rle_csv(ss, g, {{"criterion", "superlevel"}, {"tau", "0"}});
    auto back = read_rle_csv(ss);
    CHECK(back.grid.flags() == g.flags());
    CHECK(back.grid.box() == g.box());
    CHECK(back.metadata.at("tau") == "0");
}

}
