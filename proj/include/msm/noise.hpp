#pragma once

#include <vector>

#include "msm/rng.hpp"

namespace msm {

// Middleton Class-A parameters. The conditional per-sample variance is
// sigma_m^2 = sigma_g^2 * (m / (A*gamma) + 1) with m ~ Poisson(A);
// gamma = sigma_g^2 / sigma_i2 and sigma_total2 = sigma_g2 + sigma_i2.
struct NoiseParams {
    double a = 0.0;            // impulsive index
    double gamma = 0.0;        // Gaussian-to-impulsive power ratio
    double sigma_g2 = 0.0;     // background Gaussian power
    double sigma_i2 = 0.0;     // impulsive power
    double sigma_total2 = 0.0;
};

NoiseParams make_noise_params(double a, double gamma, double sigma_total2);

// Total noise power from an SNR target: sigma_total2 = signal_power * 10^(-snr/10),
// split between the Gaussian and impulsive components according to gamma.
NoiseParams params_from_snr(double snr_db, double gamma, double a, double signal_power);

// A such that the probability of at least one impulsive event within a
// symbol's sps samples equals p_star: A = -ln(1 - p_star) / sps.
double calibrate_impulsive_index(double p_star, int sps);

// 1 - exp(-A * sps): probability that a symbol has at least one hit sample.
double symbol_hit_probability(double a, int sps);

// 1 - exp(-A): probability that a single sample has m > 0.
double sample_hit_probability(double a);

// Conditional complex-sample variance given the Poisson count m:
// sigma_m^2 = sigma_g^2 * (m / (A*gamma) + 1). Each I/Q branch gets half.
double mixture_sigma_m2(const NoiseParams& params, int m);

struct NoiseRealization {
    std::vector<int> counts;  // per-sample Poisson counts m[n]
    std::vector<double> z_i;
    std::vector<double> z_q;
    NoiseParams params;
};

// Exact sampling of the Poisson-Gaussian mixture. One count per complex
// sample is shared between I and Q (an impulse hits both branches); the
// Gaussian draws are independent with per-branch variance sigma_m^2 / 2, so
// the total complex power is sigma_total2 and the process is circularly
// symmetric.
NoiseRealization sample_noise(const NoiseParams& params, int n_samples, RandomStream& rng);

// Symbol indices with at least one hit sample, ascending. counts.size() must
// be a multiple of sps.
std::vector<int> hit_symbols(const std::vector<int>& counts, int sps);

// Binary KL divergence q ln(q/p) + (1-q) ln((1-q)/(1-p)), in nats.
double kl_bernoulli(double q, double p);

struct ConcentrationReport {
    double p = 0.0;       // symbol-hit probability
    int symbols = 0;      // K
    double delta = 0.0;   // tail probability
    double epsilon = 0.0; // half-width from the quadratic KL approximation
    double lo = 0.0;
    double hi = 0.0;
    bool in_validity_range = false;  // epsilon < min(p, 1-p)
};

// Chernoff/KL two-sided concentration half-width for the realized hit
// fraction over `symbols` symbols: epsilon ~= sqrt(2 p (1-p) / K * ln(2/delta)).
ConcentrationReport concentration_epsilon(double p, int symbols, double delta);

// Exact inversion of 2 exp(-K * KL(p+eps || p)) = delta by bisection. No
// closed form exists; used to validate the quadratic approximation.
double concentration_epsilon_exact(double p, int symbols, double delta);

}  // namespace msm
