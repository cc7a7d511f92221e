#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "motifcrf/rng.hpp"
#include "motifcrf/stats.hpp"

using namespace motifcrf;

TEST_CASE("philox4x64-10 known-answer vectors") {
    // reference outputs from an independent implementation of the scheme
    // (which emits its first block at counter value 1)
    SUBCASE("zero key, counter 1") {
        const auto out = Rng::block({1, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x02f4ba6408e4d89bull);
        CHECK(out[1] == 0x3dd62b0b9ca8c5b2ull);
        CHECK(out[2] == 0x1c8667a55d902e79ull);
        CHECK(out[3] == 0x907d7a052fd5b4dcull);
    }
    SUBCASE("zero key, counter 2") {
        const auto out = Rng::block({2, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x809bf322883987c3ull);
        CHECK(out[1] == 0x471128b9e807f7ddull);
        CHECK(out[2] == 0xf250ba0dbec065b7ull);
        CHECK(out[3] == 0xfc6ed66767a457bcull);
    }
    SUBCASE("nonzero low key word") {
        const auto out = Rng::block({1, 0, 0, 0}, {0xDEADBEEF12345678ull, 0});
        CHECK(out[0] == 0x01e08b9944fc9ce9ull);
        CHECK(out[1] == 0x4dd35999ef97e4c4ull);
        CHECK(out[2] == 0xfb4385fe6262b926ull);
        CHECK(out[3] == 0xe8ca5d2e2ace8c50ull);
    }
    SUBCASE("both key words") {
        const auto out =
            Rng::block({1, 0, 0, 0}, {0x9E3779B97F4A7C15ull, 0xBB67AE8584CAA73Bull});
        CHECK(out[0] == 0xfa033c62a6049001ull);
        CHECK(out[1] == 0x003beb58330ab297ull);
        CHECK(out[2] == 0xd45d9d1ed2e72102ull);
        CHECK(out[3] == 0xba38a9f383a1e7e2ull);
    }
}

TEST_CASE("streams are reproducible and distinct") {
    Rng a(7, 3), b(7, 3), c(7, 4);
    std::vector<std::uint64_t> xs, ys, zs;
    for (int i = 0; i < 16; ++i) {
        xs.push_back(a.next_u64());
        ys.push_back(b.next_u64());
        zs.push_back(c.next_u64());
    }
    CHECK(xs == ys);
    CHECK(xs != zs);
}

TEST_CASE("uniform01 stays inside the open interval") {
    Rng rng(123, 0);
    double mn = 1.0, mx = 0.0, sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(mn < 0.01);
    CHECK(mx > 0.99);
}

TEST_CASE("bounded and shuffle") {
    Rng rng(99, 1);
    for (int i = 0; i < 1000; ++i) CHECK(rng.bounded(7) < 7);

    std::vector<int> v(10);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    rng.shuffle(w);
    auto sorted = w;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == v);   // permutation of the original
}

TEST_CASE("normal draws match the standard moments") {
    Rng rng(2024, 0);
    const int n = 50000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        ss += x * x;
    }
    const double mean = sum / n;
    const double var = ss / n - mean * mean;
    CHECK(mean == doctest::Approx(0.0).epsilon(0.02));
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("normal quantile fixtures") {
    CHECK(stats::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(stats::normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    // round trip through the cdf
    for (double p : {0.001, 0.1, 0.3, 0.5, 0.77, 0.999})
        CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
}
