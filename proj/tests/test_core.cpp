#include <doctest.h>

#include <cmath>

#include "idmc/complex_vec.hpp"
#include "idmc/rng.hpp"

using namespace idmc;

TEST_CASE("rng reproducibility: equal (seed, stream) gives equal draws") {
    Rng a(42, 7);
    Rng b(42, 7);
    for (int i = 0; i < 10000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng streams differ") {
    Rng a(42, 0);
    Rng b(42, 1);
    int equal = 0;
    for (int i = 0; i < 1000; ++i) {
        if (a.next_u64() == b.next_u64()) ++equal;
    }
    CHECK(equal == 0);
}

TEST_CASE("uniform draws lie in (0, 1]") {
    Rng rng(3, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_uniform();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("gaussian sampler moments") {
    // 1e6 draws: mean magnitude < 0.01 sigma, variance within 1% of sigma^2.
    const double sigma2 = 0.7;
    Rng rng(5, 11);
    const int n = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = std::sqrt(sigma2) * rng.next_normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01 * std::sqrt(sigma2));
    CHECK(var == doctest::Approx(sigma2).epsilon(0.01));
}

TEST_CASE("average_power") {
    CHECK(average_power({{1, 0}, {1, 0}}) == 1.0);
    CHECK(average_power({{2, 0}, {0, 0}}) == 2.0);
    CHECK(average_power({{0, 0}, {0, 0}, {0, 0}}) == 0.0);
    CHECK_THROWS_AS(average_power({}), std::invalid_argument);
}

TEST_CASE("sample_complex_gaussian zero variance gives exact zeros") {
    Rng rng(1, 0);
    const ComplexVec v = sample_complex_gaussian(rng, 4, 0.0);
    REQUIRE(v.size() == 4);
    for (const cplx& x : v) {
        CHECK(x.real() == 0.0);
        CHECK(x.imag() == 0.0);
    }
}

TEST_CASE("sample_complex_gaussian empirical power") {
    Rng rng(1, 0);
    const ComplexVec v = sample_complex_gaussian(rng, 1'000'000, 1.0);
    const double p = average_power(v);
    CHECK(p > 0.99);
    CHECK(p < 1.01);
}

TEST_CASE("sample_complex_gaussian per-component variance split") {
    Rng rng(1, 0);
    const ComplexVec v = sample_complex_gaussian(rng, 1'000'000, 0.5);
    double sum = 0.0, sum_sq = 0.0;
    for (const cplx& x : v) {
        sum += x.real();
        sum_sq += x.real() * x.real();
    }
    const double mean = sum / static_cast<double>(v.size());
    const double var = sum_sq / static_cast<double>(v.size()) - mean * mean;
    CHECK(var > 0.2475);
    CHECK(var < 0.2525);
}

TEST_CASE("sample_complex_gaussian rejects negative variance") {
    Rng rng(1, 0);
    CHECK_THROWS_AS(sample_complex_gaussian(rng, 3, -1.0), std::invalid_argument);
}
