#include <doctest.h>

#include <cmath>

#include "msm/rng.hpp"

using namespace msm;

TEST_CASE("rng: identical seeds give identical streams") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: derived seeds differ across tags") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("rng: uniform_int stays in range and covers it") {
    RandomStream rng(7);
    std::vector<int> hist(10, 0);
    for (int i = 0; i < 100000; ++i) {
        const auto v = rng.uniform_int(10);
        REQUIRE(v < 10);
        ++hist[v];
    }
    // 5-sigma binomial window around 10000
    for (int h : hist) CHECK(std::abs(h - 10000) < 5 * std::sqrt(100000 * 0.1 * 0.9));
}

TEST_CASE("rng: normal moments") {
    RandomStream rng(11);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("rng: poisson mean matches for small rates") {
    RandomStream rng(13);
    const double mean = 0.0203148661872219;
    const int n = 1000000;
    long total = 0;
    for (int i = 0; i < n; ++i) total += rng.poisson(mean);
    const double est = static_cast<double>(total) / n;
    CHECK(std::abs(est - mean) < 5.0 * std::sqrt(mean / n));
}
