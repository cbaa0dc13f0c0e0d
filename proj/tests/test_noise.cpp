#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "msm/noise.hpp"

using namespace msm;

TEST_CASE("calibration: A* and the hit-probability round trip") {
    const double a_star = calibrate_impulsive_index(0.15, 8);
    CHECK(std::abs(a_star - (-std::log(0.85) / 8.0)) < 1e-15);
    CHECK(a_star == doctest::Approx(0.0203148661872219).epsilon(1e-12));
    CHECK(symbol_hit_probability(a_star, 8) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(sample_hit_probability(a_star) == doctest::Approx(0.0201099095285289).epsilon(1e-12));
    CHECK(symbol_hit_probability(0.0, 8) == 0.0);
    CHECK(calibrate_impulsive_index(1e-12, 8) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK_THROWS_AS(calibrate_impulsive_index(0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_impulsive_index(1.0, 8), std::invalid_argument);
}

TEST_CASE("params_from_snr: closed-form splits") {
    {
        const NoiseParams p = params_from_snr(0.0, 1.0, 0.1, 1.0);
        CHECK(p.sigma_total2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.sigma_g2 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p.sigma_i2 == doctest::Approx(0.5).epsilon(1e-12));
    }
    {
        const NoiseParams p = params_from_snr(10.0, 1e-3, 0.1, 1.0);
        CHECK(p.sigma_total2 == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(p.sigma_i2 == doctest::Approx(0.0999000999000999).epsilon(1e-9));
        CHECK(p.sigma_g2 == doctest::Approx(9.99000999000999e-5).epsilon(1e-9));
    }
    CHECK(params_from_snr(200.0, 1.0, 0.1, 1.0).sigma_total2 == doctest::Approx(0.0));
    // invariant: sigma_g2 = gamma * sigma_i2, totals add up
    const NoiseParams p = params_from_snr(7.0, 1e-6, 0.02, 2.0);
    CHECK(p.sigma_g2 == doctest::Approx(p.gamma * p.sigma_i2).epsilon(1e-12));
    CHECK(p.sigma_total2 == doctest::Approx(p.sigma_g2 + p.sigma_i2).epsilon(1e-12));
}

TEST_CASE("mixture variance: m = 0 is exactly the background branch") {
    const NoiseParams p = make_noise_params(0.02, 1e-3, 1.0);
    CHECK(mixture_sigma_m2(p, 0) == p.sigma_g2);
    CHECK(mixture_sigma_m2(p, 1) ==
          doctest::Approx(p.sigma_g2 * (1.0 / (p.a * p.gamma) + 1.0)).epsilon(1e-12));
}

TEST_CASE("sample_noise: hit fraction matches p_sample (Monte Carlo)") {
    const double a_star = calibrate_impulsive_index(0.15, 8);
    const NoiseParams p = make_noise_params(a_star, 1e-3, 1.0);
    RandomStream rng(101);
    const int n = 1000000;
    const NoiseRealization z = sample_noise(p, n, rng);
    long hits = 0;
    for (int c : z.counts) hits += (c > 0);
    const double p_sample = sample_hit_probability(a_star);
    const double sigma = std::sqrt(p_sample * (1 - p_sample) / n);
    CHECK(std::abs(static_cast<double>(hits) / n - p_sample) < 5 * sigma);
}

TEST_CASE("sample_noise: empirical power converges to sigma_total2") {
    const double a_star = calibrate_impulsive_index(0.15, 8);
    const NoiseParams p = make_noise_params(a_star, 1e-3, 1.0);
    RandomStream rng(102);
    const int n = 1000000;
    const NoiseRealization z = sample_noise(p, n, rng);
    double power = 0.0;
    for (int i = 0; i < n; ++i) power += z.z_i[i] * z.z_i[i] + z.z_q[i] * z.z_q[i];
    power /= n;
    // Var(|z|^2) = 2 E[sigma_m^4] - sigma_total^4 with E[m] = A, E[m^2] = A + A^2
    const double ag = p.a * p.gamma;
    const double e_s4 =
        p.sigma_g2 * p.sigma_g2 *
        (1.0 + 2.0 * p.a / ag + (p.a + p.a * p.a) / (ag * ag));
    const double var = 2.0 * e_s4 - p.sigma_total2 * p.sigma_total2;
    CHECK(std::abs(power - p.sigma_total2) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("sample_noise: conditional branch variance at m = 0 (Monte Carlo)") {
    const NoiseParams p = make_noise_params(0.5, 1e-2, 1.0);
    RandomStream rng(103);
    const NoiseRealization z = sample_noise(p, 200000, rng);
    double sq = 0.0;
    long n0 = 0;
    for (std::size_t i = 0; i < z.counts.size(); ++i) {
        if (z.counts[i] == 0) {
            sq += z.z_i[i] * z.z_i[i];
            ++n0;
        }
    }
    const double target = p.sigma_g2 / 2.0;
    const double est = sq / static_cast<double>(n0);
    CHECK(std::abs(est - target) < 5.0 * target * std::sqrt(2.0 / static_cast<double>(n0)));
}

TEST_CASE("hit_symbols: span ownership") {
    CHECK(hit_symbols(std::vector<int>(64, 0), 8).empty());
    std::vector<int> counts(64, 0);
    counts[19] = 2;
    const auto hits = hit_symbols(counts, 8);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0] == 2);
    CHECK_THROWS_AS(hit_symbols(std::vector<int>(63, 0), 8), std::invalid_argument);
}

TEST_CASE("hit_symbols: mean hit rate at the calibrated index (Monte Carlo)") {
    const double a_star = calibrate_impulsive_index(0.15, 8);
    RandomStream rng(104);
    const int waveforms = 10000, k = 128, l = 8;
    double sum = 0.0;
    std::vector<int> counts(k * l);
    for (int w = 0; w < waveforms; ++w) {
        for (int& c : counts) c = rng.poisson(a_star);
        sum += static_cast<double>(hit_symbols(counts, l).size()) / k;
    }
    CHECK(std::abs(sum / waveforms - 0.15) < 0.002);
}

TEST_CASE("kl_bernoulli: values and basic properties") {
    CHECK(kl_bernoulli(0.15, 0.15) == 0.0);
    CHECK(kl_bernoulli(0.2, 0.15) == doctest::Approx(0.0090367170372083).epsilon(1e-9));
    CHECK(kl_bernoulli(0.3, 0.15) > 0.0);
    CHECK(kl_bernoulli(0.05, 0.15) > 0.0);
    // convexity in q (midpoint check)
    const double mid = kl_bernoulli(0.2, 0.15);
    CHECK(mid < 0.5 * (kl_bernoulli(0.15, 0.15) + kl_bernoulli(0.25, 0.15)));
    CHECK_THROWS_AS(kl_bernoulli(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(kl_bernoulli(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("concentration: quadratic epsilon reproduces the closed-form numbers") {
    const ConcentrationReport rep = concentration_epsilon(0.15, 128, 0.05);
    CHECK(rep.epsilon == doctest::Approx(0.085726).epsilon(1e-5));
    CHECK(std::abs(rep.epsilon - 0.0857259560313713) < 1e-12);
    CHECK(std::abs(rep.lo - 0.064274) < 1e-6);
    CHECK(std::abs(rep.hi - 0.235726) < 1e-6);
    CHECK(rep.in_validity_range);

    // 1/sqrt(K) scaling
    const ConcentrationReport rep4 = concentration_epsilon(0.15, 4 * 128, 0.05);
    CHECK(rep4.epsilon == doctest::Approx(rep.epsilon / 2.0).epsilon(1e-12));

    // out of the bound's validity range
    CHECK_FALSE(concentration_epsilon(0.01, 8, 0.05).in_validity_range);
}

TEST_CASE("concentration: the quadratic approximation closes the loop at delta") {
    const ConcentrationReport rep = concentration_epsilon(0.15, 128, 0.05);
    // By construction, K * eps^2 / (2 p (1-p)) = ln(2/delta).
    const double approx_d = rep.epsilon * rep.epsilon / (2.0 * 0.15 * 0.85);
    CHECK(2.0 * std::exp(-128.0 * approx_d) == doctest::Approx(0.05).epsilon(1e-12));
    // The true upper-tail KL at p + eps is smaller than its quadratic
    // approximation, so the exact bound evaluated at the approximate eps
    // stays above delta. Frozen from a high-precision evaluation.
    const double exact = 2.0 * std::exp(-128.0 * kl_bernoulli(0.15 + rep.epsilon, 0.15));
    CHECK(exact == doctest::Approx(0.0783889552).epsilon(1e-6));
}

TEST_CASE("concentration: exact KL inversion by bisection") {
    const double eps = concentration_epsilon_exact(0.15, 128, 0.05);
    CHECK(eps == doctest::Approx(0.0918334385361969).epsilon(1e-9));
    CHECK(128.0 * kl_bernoulli(0.15 + eps, 0.15) ==
          doctest::Approx(std::log(2.0 / 0.05)).epsilon(1e-10));
}

TEST_CASE("concentration: realized hit rates cover the interval (Monte Carlo)") {
    const double a_star = calibrate_impulsive_index(0.15, 8);
    const ConcentrationReport rep = concentration_epsilon(0.15, 128, 0.05);
    RandomStream rng(105);
    const int waveforms = 10000, k = 128, l = 8;
    long inside = 0;
    std::vector<int> counts(k * l);
    for (int w = 0; w < waveforms; ++w) {
        for (int& c : counts) c = rng.poisson(a_star);
        const double p_hat = static_cast<double>(hit_symbols(counts, l).size()) / k;
        if (p_hat >= rep.lo && p_hat <= rep.hi) ++inside;
    }
    CHECK(static_cast<double>(inside) / waveforms >= 0.95);
}
